#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <tuple>

#include "game.hpp"
#include "rtmpi/bisim.hpp"

namespace rtmpi {
namespace detail {

std::vector<std::vector<StateId>> silent_closure(const Lts& lts) {
  const std::size_t n = lts.size();
  std::vector<std::vector<StateId>> closure(n);
  std::vector<char> seen(n, 0);
  std::vector<StateId> stack;
  for (StateId s = 0; s < n; ++s) {
    std::vector<StateId>& out = closure[s];
    stack.assign(1, s);
    seen[s] = 1;
    while (!stack.empty()) {
      StateId u = stack.back();
      stack.pop_back();
      out.push_back(u);
      auto [b, e] = lts.outgoing(u);
      for (auto it = b; it != e; ++it)
        if (it->label.is_silent() && !seen[it->target]) {
          seen[it->target] = 1;
          stack.push_back(it->target);
        }
    }
    for (StateId u : out) seen[u] = 0;
    std::sort(out.begin(), out.end());
  }
  return closure;
}

namespace {

/// States of `lts` inside `allowed` that have an infinite silent run staying
/// inside `allowed`.
std::vector<char> divergent_within(const Lts& lts, const std::vector<char>& allowed) {
  const std::size_t n = lts.size();
  std::vector<std::size_t> out(n, 0);
  std::vector<std::vector<StateId>> pred(n);
  for (const auto& t : lts.transitions()) {
    if (!t.label.is_silent() || !allowed[t.source] || !allowed[t.target]) continue;
    ++out[t.source];
    pred[t.target].push_back(t.source);
  }
  std::vector<char> alive(allowed);
  std::vector<StateId> work;
  for (StateId s = 0; s < n; ++s)
    if (alive[s] && out[s] == 0) work.push_back(s);
  while (!work.empty()) {
    StateId s = work.back();
    work.pop_back();
    if (!alive[s]) continue;
    alive[s] = 0;
    for (StateId p : pred[s])
      if (alive[p] && --out[p] == 0) work.push_back(p);
  }
  return alive;
}

/// Pair relation over left x right with the transfer conditions of the
/// branching bisimulation game.
class TransferGame {
public:
  TransferGame(const Lts& left, const Lts& right)
      : left_(left), right_(right), lclos_(silent_closure(left)), rclos_(silent_closure(right)) {}

  /// `rel(s, t)` decides membership for s in left, t in right.
  template <typename Rel>
  bool left_move_matched(const Transition& move, StateId t, Rel&& rel) const {
    const StateId s = move.source;
    if (move.label.is_silent() && rel(move.target, t)) return true;
    for (StateId via : rclos_[t]) {
      if (!rel(s, via)) continue;
      auto [b, e] = right_.outgoing(via);
      for (auto it = b; it != e; ++it)
        if (it->label == move.label && rel(move.target, it->target)) return true;
    }
    return false;
  }

  template <typename Rel>
  bool right_move_matched(const Transition& move, StateId s, Rel&& rel) const {
    const StateId t = move.source;
    if (move.label.is_silent() && rel(s, move.target)) return true;
    for (StateId via : lclos_[s]) {
      if (!rel(via, t)) continue;
      auto [b, e] = left_.outgoing(via);
      for (auto it = b; it != e; ++it)
        if (it->label == move.label && rel(it->target, move.target)) return true;
    }
    return false;
  }

  /// First unmatched attack at (s, t), if any.
  template <typename Rel>
  std::optional<std::pair<Side, Transition>> find_attack(StateId s, StateId t, Rel&& rel) const {
    auto [lb, le] = left_.outgoing(s);
    for (auto it = lb; it != le; ++it)
      if (!left_move_matched(*it, t, rel)) return std::pair{Side::left, *it};
    auto [rb, re] = right_.outgoing(t);
    for (auto it = rb; it != re; ++it)
      if (!right_move_matched(*it, s, rel)) return std::pair{Side::right, *it};
    return std::nullopt;
  }

  /// All defender answers to an attack at (s, t).
  std::vector<PlayResponse> answers(StateId s, StateId t, Side attacker, const Transition& move) const {
    std::vector<PlayResponse> out;
    const Lts& def = attacker == Side::left ? right_ : left_;
    const auto& clos = attacker == Side::left ? rclos_ : lclos_;
    const StateId here = attacker == Side::left ? t : s;
    if (move.label.is_silent()) out.push_back({true, here, here, 0});
    for (StateId via : clos[here]) {
      auto [b, e] = def.outgoing(via);
      for (auto it = b; it != e; ++it)
        if (it->label == move.label) out.push_back({false, via, it->target, 0});
    }
    return out;
  }

  const Lts& left() const { return left_; }
  const Lts& right() const { return right_; }

private:
  const Lts& left_;
  const Lts& right_;
  std::vector<std::vector<StateId>> lclos_;
  std::vector<std::vector<StateId>> rclos_;
};

/// Divergence tables for a relation: div_left[t][s] is true iff s diverges
/// through states related to t (and symmetrically for div_right).
struct DivergenceTables {
  std::vector<std::vector<char>> left;
  std::vector<std::vector<char>> right;
};

template <typename Rel>
DivergenceTables divergence_tables(const Lts& left, const Lts& right, Rel&& rel) {
  DivergenceTables d;
  d.left.resize(right.size());
  d.right.resize(left.size());
  std::vector<char> allowed;
  for (StateId t = 0; t < right.size(); ++t) {
    allowed.assign(left.size(), 0);
    for (StateId s = 0; s < left.size(); ++s) allowed[s] = rel(s, t) ? 1 : 0;
    d.left[t] = divergent_within(left, allowed);
  }
  for (StateId s = 0; s < left.size(); ++s) {
    allowed.assign(right.size(), 0);
    for (StateId t = 0; t < right.size(); ++t) allowed[t] = rel(s, t) ? 1 : 0;
    d.right[s] = divergent_within(right, allowed);
  }
  return d;
}

}  // namespace

Lts mark_silent_cycles(const Lts& lts) {
  auto closure = silent_closure(lts);
  std::vector<Transition> edges = lts.transitions();
  for (const auto& t : lts.transitions())
    if (t.label.is_silent() && std::binary_search(closure[t.target].begin(), closure[t.target].end(), t.source))
      edges.push_back({t.source, divergence_label(), t.source});
  return Lts(lts.size(), lts.initial(), std::move(edges));
}

PairRanks compute_ranks(const Lts& left, const Lts& right, bool divergence_sensitive) {
  if (divergence_sensitive) return compute_ranks(mark_silent_cycles(left), mark_silent_cycles(right), false);
  PairRanks ranks{left.size(), right.size(), std::vector<std::uint32_t>(left.size() * right.size(), 0)};
  TransferGame game(left, right);
  const std::size_t nr = right.size();
  std::vector<char> rel(left.size() * nr, 1);
  for (std::uint32_t round = 1;; ++round) {
    auto member = [&](StateId s, StateId t) { return rel[s * nr + t] != 0; };
    std::vector<std::size_t> doomed;
    for (StateId s = 0; s < left.size(); ++s)
      for (StateId t = 0; t < nr; ++t)
        if (member(s, t) && game.find_attack(s, t, member)) doomed.push_back(s * nr + t);
    if (doomed.empty()) break;
    for (std::size_t p : doomed) {
      rel[p] = 0;
      ranks.rank[p] = round;
    }
  }
  return ranks;
}

DistinguishingPlay build_play(Lts left, Lts right, const PairRanks& ranks) {
  DistinguishingPlay play{std::move(left), std::move(right), {}};
  TransferGame game(play.left, play.right);
  std::map<std::pair<StateId, StateId>, std::size_t> index;

  std::function<std::size_t(StateId, StateId)> node_for = [&](StateId s, StateId t) -> std::size_t {
    if (auto it = index.find({s, t}); it != index.end()) return it->second;
    const std::uint32_t k = ranks.at(s, t);
    if (k == 0) throw std::logic_error("build_play: pair is related");
    // The relation just before round k.
    auto before = [&](StateId a, StateId b) {
      std::uint32_t r = ranks.at(a, b);
      return r == 0 || r >= k;
    };
    auto attack = game.find_attack(s, t, before);
    if (!attack) throw std::logic_error("build_play: no attack for a deleted pair");
    const std::size_t id = play.nodes.size();
    index[{s, t}] = id;
    play.nodes.push_back({s, t, attack->first, attack->second, {}});
    auto answers = game.answers(s, t, attack->first, attack->second);
    const Transition move = attack->second;
    for (auto& a : answers) {
      std::pair<StateId, StateId> first, second;
      if (attack->first == Side::left) {
        first = {s, a.via};
        second = {move.target, a.to};
        if (a.stutter) first = second = {move.target, t};
      } else {
        first = {a.via, t};
        second = {a.to, move.target};
        if (a.stutter) first = second = {s, move.target};
      }
      auto pick = before(first.first, first.second) ? second : first;
      a.refuted_by = node_for(pick.first, pick.second);
    }
    play.nodes[id].responses = std::move(answers);
    return id;
  };
  node_for(play.left.initial(), play.right.initial());
  return play;
}

}  // namespace detail

CheckResult brute_force_check(const Lts& left, const Lts& right, bool divergence_sensitive) {
  if (left.size() * right.size() > brute_force_pair_limit)
    throw OracleGuardError("brute_force_check: " + std::to_string(left.size()) + " x " +
                           std::to_string(right.size()) + " pairs exceed the oracle limit");
  detail::PairRanks ranks = detail::compute_ranks(left, right, divergence_sensitive);
  CheckResult result;
  if (ranks.at(left.initial(), right.initial()) == 0) {
    result.verdict = Verdict::equivalent;
    for (StateId s = 0; s < left.size(); ++s)
      for (StateId t = 0; t < right.size(); ++t)
        if (ranks.at(s, t) == 0) result.witness.emplace_back(s, t);
    return result;
  }
  result.verdict = Verdict::inequivalent;
  if (divergence_sensitive)
    result.counterexample = detail::build_play(detail::mark_silent_cycles(left), detail::mark_silent_cycles(right), ranks);
  else
    result.counterexample = detail::build_play(left, right, ranks);
  return result;
}

bool is_branching_bisimulation(const Lts& left, const Lts& right,
                               const std::vector<std::pair<StateId, StateId>>& relation,
                               bool divergence_sensitive) {
  const std::size_t nr = right.size();
  std::vector<char> rel(left.size() * nr, 0);
  for (auto [s, t] : relation) {
    if (s >= left.size() || t >= nr) return false;
    rel[s * nr + t] = 1;
  }
  auto member = [&](StateId s, StateId t) { return rel[s * nr + t] != 0; };
  detail::TransferGame game(left, right);
  detail::DivergenceTables div;
  if (divergence_sensitive) div = detail::divergence_tables(left, right, member);
  for (auto [s, t] : relation) {
    if (game.find_attack(s, t, member)) return false;
    if (divergence_sensitive && div.left[t][s] != div.right[s][t]) return false;
  }
  return true;
}

bool replay_play(const DistinguishingPlay& play) {
  const auto& nodes = play.nodes;
  if (nodes.empty()) return false;
  if (nodes[0].left != play.left.initial() || nodes[0].right != play.right.initial()) return false;
  detail::TransferGame game(play.left, play.right);
  for (const auto& node : nodes) {
    if (node.left >= play.left.size() || node.right >= play.right.size()) return false;
    const Lts& att = node.attacker == Side::left ? play.left : play.right;
    const StateId here = node.attacker == Side::left ? node.left : node.right;
    if (node.move.source != here) return false;
    auto [b, e] = att.outgoing(here);
    if (std::find(b, e, node.move) == e) return false;

    auto key = [](const PlayResponse& r) { return std::tuple(r.stutter, r.via, r.to); };
    std::set<std::tuple<bool, StateId, StateId>> expected, listed;
    for (const auto& r : game.answers(node.left, node.right, node.attacker, node.move)) expected.insert(key(r));
    for (const auto& r : node.responses) listed.insert(key(r));
    if (expected != listed) return false;

    for (const auto& r : node.responses) {
      if (r.refuted_by >= nodes.size()) return false;
      const PlayNode& child = nodes[r.refuted_by];
      std::pair<StateId, StateId> got{child.left, child.right};
      std::pair<StateId, StateId> first, second;
      if (node.attacker == Side::left) {
        first = {node.left, r.via};
        second = {node.move.target, r.to};
        if (r.stutter) first = second = {node.move.target, node.right};
      } else {
        first = {r.via, node.right};
        second = {r.to, node.move.target};
        if (r.stutter) first = second = {node.left, node.move.target};
      }
      if (got != first && got != second) return false;
    }
  }
  // Finite strategy: the refutation graph must be acyclic.
  std::vector<int> colour(nodes.size(), 0);
  std::function<bool(std::size_t)> acyclic = [&](std::size_t v) {
    colour[v] = 1;
    for (const auto& r : nodes[v].responses) {
      if (colour[r.refuted_by] == 1) return false;
      if (colour[r.refuted_by] == 0 && !acyclic(r.refuted_by)) return false;
    }
    colour[v] = 2;
    return true;
  };
  return acyclic(0);
}

}  // namespace rtmpi
