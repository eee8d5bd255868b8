#include "rtmpi/bisim.hpp"

#include <algorithm>
#include <map>

#include "game.hpp"

namespace rtmpi {

ActionLabel divergence_label() { return ActionLabel::output("<div>"); }

namespace {

constexpr std::uint32_t kSilent = 0;

/// Labels interned to small integers; id 0 is the silent step.
class LabelTable {
public:
  LabelTable() { labels_.push_back(ActionLabel::silent()); ids_[labels_[0]] = kSilent; }

  std::uint32_t id(const ActionLabel& label) {
    auto [it, fresh] = ids_.try_emplace(label, static_cast<std::uint32_t>(labels_.size()));
    if (fresh) labels_.push_back(label);
    return it->second;
  }
  const ActionLabel& label(std::uint32_t id) const { return labels_[id]; }

private:
  std::vector<ActionLabel> labels_;
  std::map<ActionLabel, std::uint32_t> ids_;
};

struct Edge {
  std::uint32_t label;
  std::uint32_t target;
  auto operator<=>(const Edge&) const = default;
};

struct Graph {
  std::vector<std::vector<Edge>> out;
  std::size_t size() const { return out.size(); }
};

/// Strongly connected components of the silent-edge subgraph (iterative
/// Tarjan). Returns the component id of every state.
std::vector<std::uint32_t> silent_components(const Lts& lts, std::uint32_t& count) {
  const std::size_t n = lts.size();
  constexpr std::uint32_t unvisited = static_cast<std::uint32_t>(-1);
  std::vector<std::uint32_t> index(n, unvisited), low(n, 0), comp(n, unvisited);
  std::vector<char> on_stack(n, 0);
  std::vector<StateId> stack;
  struct Frame {
    StateId state;
    const Transition* next;
    const Transition* end;
  };
  std::vector<Frame> frames;
  std::uint32_t counter = 0;
  count = 0;
  for (StateId root = 0; root < n; ++root) {
    if (index[root] != unvisited) continue;
    auto push = [&](StateId s) {
      index[s] = low[s] = counter++;
      stack.push_back(s);
      on_stack[s] = 1;
      auto [b, e] = lts.outgoing(s);
      frames.push_back({s, b, e});
    };
    push(root);
    while (!frames.empty()) {
      Frame& f = frames.back();
      if (f.next != f.end) {
        const Transition& t = *f.next++;
        if (!t.label.is_silent()) continue;
        if (index[t.target] == unvisited) {
          push(t.target);
        } else if (on_stack[t.target]) {
          low[f.state] = std::min(low[f.state], index[t.target]);
        }
        continue;
      }
      StateId s = f.state;
      frames.pop_back();
      if (!frames.empty()) low[frames.back().state] = std::min(low[frames.back().state], low[s]);
      if (low[s] == index[s]) {
        StateId u;
        do {
          u = stack.back();
          stack.pop_back();
          on_stack[u] = 0;
          comp[u] = count;
        } while (u != s);
        ++count;
      }
    }
  }
  return comp;
}

/// Silent SCCs collapsed to single nodes; silent edges inside a component are
/// dropped. With `mark_divergent`, divergent components carry a `<div>` loop.
struct Reduced {
  Graph graph;
  std::vector<std::uint32_t> node_of;  // original state -> node
  std::uint32_t initial;
};

Reduced reduce(const Lts& lts, bool mark_divergent, LabelTable& labels, std::uint32_t offset = 0) {
  std::uint32_t count = 0;
  std::vector<std::uint32_t> comp = silent_components(lts, count);
  std::vector<std::size_t> comp_size(count, 0);
  for (auto c : comp) ++comp_size[c];
  std::vector<char> divergent(count, 0);
  for (std::uint32_t c = 0; c < count; ++c) divergent[c] = comp_size[c] > 1;
  Reduced r;
  r.graph.out.resize(count);
  for (const auto& t : lts.transitions()) {
    std::uint32_t a = comp[t.source], b = comp[t.target];
    if (t.label.is_silent() && a == b) {
      divergent[a] = 1;
      continue;
    }
    r.graph.out[a].push_back({labels.id(t.label), b + offset});
  }
  if (mark_divergent) {
    std::uint32_t div = labels.id(divergence_label());
    for (std::uint32_t c = 0; c < count; ++c)
      if (divergent[c]) r.graph.out[c].push_back({div, c + offset});
  }
  for (auto& edges : r.graph.out) {
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  }
  r.node_of.resize(lts.size());
  for (StateId s = 0; s < lts.size(); ++s) r.node_of[s] = comp[s] + offset;
  r.initial = comp[lts.initial()] + offset;
  return r;
}

/// Branching bisimilarity classes of a graph whose silent edges form a DAG,
/// by signature refinement.
std::vector<std::uint32_t> refine(const Graph& g) {
  const std::size_t n = g.size();
  // Topological order of the silent DAG; signatures are built sinks first.
  std::vector<std::size_t> indeg(n, 0);
  for (const auto& edges : g.out)
    for (const auto& e : edges)
      if (e.label == kSilent) ++indeg[e.target];
  std::vector<std::uint32_t> order;
  order.reserve(n);
  for (std::uint32_t s = 0; s < n; ++s)
    if (indeg[s] == 0) order.push_back(s);
  for (std::size_t i = 0; i < order.size(); ++i)
    for (const auto& e : g.out[order[i]])
      if (e.label == kSilent && --indeg[e.target] == 0) order.push_back(e.target);

  std::vector<std::uint32_t> block(n, 0);
  std::size_t num_blocks = 1;
  std::vector<std::vector<Edge>> sig(n);
  for (;;) {
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const std::uint32_t s = *it;
      std::vector<Edge>& out = sig[s];
      out.clear();
      for (const auto& e : g.out[s]) {
        if (e.label == kSilent && block[e.target] == block[s]) {
          out.insert(out.end(), sig[e.target].begin(), sig[e.target].end());
        } else {
          out.push_back({e.label, block[e.target]});
        }
      }
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
    }
    std::map<std::pair<std::uint32_t, const std::vector<Edge>*>, std::uint32_t,
             bool (*)(const std::pair<std::uint32_t, const std::vector<Edge>*>&,
                      const std::pair<std::uint32_t, const std::vector<Edge>*>&)>
        ids([](const auto& a, const auto& b) {
          if (a.first != b.first) return a.first < b.first;
          return *a.second < *b.second;
        });
    std::vector<std::uint32_t> next(n);
    for (std::uint32_t s = 0; s < n; ++s) {
      auto [it, fresh] = ids.try_emplace({block[s], &sig[s]}, static_cast<std::uint32_t>(ids.size()));
      next[s] = it->second;
    }
    block.swap(next);
    if (ids.size() == num_blocks) break;
    num_blocks = ids.size();
  }
  return block;
}

/// Quotient of the nodes [first, first + count) of a graph under `block`.
Lts quotient(const Graph& g, std::uint32_t first, std::size_t count, std::uint32_t initial,
             const std::vector<std::uint32_t>& block, const LabelTable& labels) {
  std::map<std::uint32_t, StateId> renumber;
  for (std::uint32_t v = first; v < first + count; ++v)
    renumber.try_emplace(block[v], static_cast<StateId>(renumber.size()));
  std::vector<Transition> edges;
  for (std::uint32_t v = first; v < first + count; ++v)
    for (const auto& e : g.out[v]) {
      StateId a = renumber.at(block[v]), b = renumber.at(block[e.target]);
      if (e.label == kSilent && a == b) continue;
      edges.push_back({a, labels.label(e.label), b});
    }
  return canonical_renumbering(Lts(renumber.size(), renumber.at(block[initial]), std::move(edges)));
}

CheckResult check(const Lts& left, const Lts& right, bool divergence_sensitive) {
  LabelTable labels;
  Reduced l = reduce(left, divergence_sensitive, labels);
  const auto lsize = static_cast<std::uint32_t>(l.graph.size());
  Reduced r = reduce(right, divergence_sensitive, labels, lsize);
  Graph joint;
  joint.out = std::move(l.graph.out);
  joint.out.insert(joint.out.end(), r.graph.out.begin(), r.graph.out.end());
  std::vector<std::uint32_t> block = refine(joint);

  CheckResult result;
  if (block[l.initial] == block[r.initial]) {
    result.verdict = Verdict::equivalent;
    std::map<std::uint32_t, std::vector<StateId>> right_by_block;
    for (StateId t = 0; t < right.size(); ++t) right_by_block[block[r.node_of[t]]].push_back(t);
    for (StateId s = 0; s < left.size(); ++s) {
      auto it = right_by_block.find(block[l.node_of[s]]);
      if (it == right_by_block.end()) continue;
      for (StateId t : it->second) result.witness.emplace_back(s, t);
    }
    return result;
  }
  result.verdict = Verdict::inequivalent;
  Lts lq = quotient(joint, 0, lsize, l.initial, block, labels);
  Lts rq = quotient(joint, lsize, joint.size() - lsize, r.initial, block, labels);
  detail::PairRanks ranks = detail::compute_ranks(lq, rq, false);
  result.counterexample = detail::build_play(std::move(lq), std::move(rq), ranks);
  return result;
}

}  // namespace

CheckResult bb_check(const Lts& left, const Lts& right) { return check(left, right, false); }

CheckResult dpbb_check(const Lts& left, const Lts& right) { return check(left, right, true); }

Lts minimize(const Lts& lts, bool divergence_sensitive) {
  LabelTable labels;
  Reduced r = reduce(lts, divergence_sensitive, labels);
  std::vector<std::uint32_t> block = refine(r.graph);
  return quotient(r.graph, 0, r.graph.size(), r.initial, block, labels);
}

}  // namespace rtmpi
