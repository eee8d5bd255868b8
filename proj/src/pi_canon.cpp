#include <algorithm>
#include <cctype>
#include <deque>
#include <functional>

#include "rtmpi/pi.hpp"

namespace rtmpi::pi {

namespace {

// Temporaries `#<digits>` in order of occurrence.
std::vector<std::string> temps_in(const std::string& text) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '#') continue;
    std::size_t j = i + 1;
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
    out.push_back(text.substr(i, j - i));
    i = j - 1;
  }
  return out;
}

std::string mask_temps(const std::string& text) {
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    out += text[i];
    if (text[i] != '#') continue;
    while (i + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[i + 1]))) ++i;
  }
  return out;
}

// Normal form builder. Every process position is a group: nested parallels
// and restrictions are flattened with restricted names replaced by unique
// temporaries, then renamed `<prefix><depth>.<k>` by first occurrence.
// Input binders become `<prefix><depth>`.
class Canon {
public:
  explicit Canon(std::string prefix) : prefix_(std::move(prefix)) {}

  Term group(const Term& t, std::size_t depth) {
    std::vector<Term> parts;
    std::vector<Name> temps;
    flatten(t, parts, temps);

    std::vector<Term> comps;
    for (const auto& p : parts) {
      Term c = component(p, depth + 1);
      if (c.kind != Kind::nil) comps.push_back(std::move(c));
    }
    if (dedup_) drop_replicated(comps, temps);

    std::set<Name> used;
    for (const auto& c : comps)
      for (const auto& n : free_names(c))
        if (std::find(temps.begin(), temps.end(), n) != temps.end()) used.insert(n);

    std::vector<std::pair<std::string, Term>> keyed;
    for (auto& c : comps) keyed.emplace_back(mask_temps(pretty(c)), std::move(c));
    std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    std::map<Name, Name> renaming;
    std::vector<Name> order;
    for (const auto& [key, c] : keyed) {
      for (const Name& temp : temps_in(pretty(c))) {
        if (!used.count(temp) || renaming.count(temp)) continue;
        renaming[temp] = prefix_ + std::to_string(depth) + "." + std::to_string(order.size());
        order.push_back(renaming[temp]);
      }
    }

    std::vector<std::pair<std::string, Term>> final_comps;
    for (auto& [key, c] : keyed) {
      Term renamed = substitute(c, renaming);
      final_comps.emplace_back(pretty(renamed), std::move(renamed));
    }
    std::stable_sort(final_comps.begin(), final_comps.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    comps.clear();
    for (auto& [key, c] : final_comps) comps.push_back(std::move(c));

    Term out = comps.empty() ? nil() : comps.size() == 1 ? std::move(comps[0]) : Term{Kind::par, {}, {}, std::move(comps), {}};
    for (auto it = order.rbegin(); it != order.rend(); ++it) out = restrict(*it, std::move(out));
    return out;
  }

private:
  void flatten(const Term& t, std::vector<Term>& parts, std::vector<Name>& temps) {
    switch (t.kind) {
      case Kind::nil:
        return;
      case Kind::par:
        for (const auto& c : t.children) flatten(c, parts, temps);
        return;
      case Kind::restrict: {
        // One substitution for the whole chain of restrictions.
        std::map<Name, Name> renaming;
        const Term* body = &t;
        for (; body->kind == Kind::restrict; body = &body->children[0]) {
          Name temp = "#" + std::to_string(next_temp_++);
          temps.push_back(temp);
          renaming[body->channel] = temp;
        }
        flatten(substitute(*body, renaming), parts, temps);
        return;
      }
      default:
        parts.push_back(t);
    }
  }

  Term component(const Term& t, std::size_t depth) {
    switch (t.kind) {
      case Kind::input: {
        Term body = t.children[0];
        std::optional<Name> binder;
        if (t.object) {
          binder = prefix_ + std::to_string(depth);
          body = substitute(body, {{*t.object, *binder}});
        }
        return input(t.channel, binder, group(body, depth + 1));
      }
      case Kind::output:
        return output(t.channel, t.object, group(t.children[0], depth + 1));
      case Kind::tau:
        return tau(group(t.children[0], depth + 1));
      case Kind::sum: {
        std::vector<Term> flat;
        collect_summands(t, flat);
        std::map<std::string, Term> unique;
        for (const auto& s : flat) {
          Term c = component(s, depth);
          unique.emplace(pretty(c), std::move(c));
        }
        std::vector<Term> summands;
        for (auto& [key, c] : unique) summands.push_back(std::move(c));
        return sum(std::move(summands));
      }
      case Kind::bang: {
        Term body = group(t.children[0], depth + 1);
        return body.kind == Kind::nil ? nil() : bang(std::move(body));
      }
      case Kind::ident:
        return t;
      default:
        return group(t, depth);
    }
  }

  static void collect_summands(const Term& t, std::vector<Term>& out) {
    if (t.kind != Kind::sum) {
      out.push_back(t);
      return;
    }
    for (const auto& c : t.children) collect_summands(c, out);
  }

  // !P | P -> !P and !P | !P -> !P, comparing up to bound-name choice. Non-
  // replicated components sharing group temporaries are compared as one P,
  // with the temporaries nobody else uses restricted again.
  void drop_replicated(std::vector<Term>& comps, const std::vector<Name>& temps) {
    if (std::none_of(comps.begin(), comps.end(), [](const Term& c) { return c.kind == Kind::bang; })) return;
    const std::size_t n = comps.size();
    std::vector<std::set<Name>> own(n);
    for (std::size_t k = 0; k < n; ++k)
      for (const auto& name : free_names(comps[k]))
        if (std::find(temps.begin(), temps.end(), name) != temps.end()) own[k].insert(name);

    std::vector<std::size_t> cluster(n);
    for (std::size_t k = 0; k < n; ++k) cluster[k] = k;
    std::function<std::size_t(std::size_t)> root = [&](std::size_t k) {
      return cluster[k] == k ? k : cluster[k] = root(cluster[k]);
    };
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b) {
        if (comps[a].kind == Kind::bang || comps[b].kind == Kind::bang) continue;
        if (std::any_of(own[a].begin(), own[a].end(), [&](const Name& x) { return own[b].count(x) > 0; }))
          cluster[root(b)] = root(a);
      }

    std::set<std::string> replicated;
    for (const auto& c : comps)
      if (c.kind == Kind::bang) replicated.insert(alpha_key(c.children[0]));

    std::vector<char> drop(n, 0);
    std::set<std::string> seen_bangs;
    for (std::size_t k = 0; k < n; ++k) {
      if (comps[k].kind == Kind::bang) {
        drop[k] = !seen_bangs.insert(alpha_key(comps[k])).second;
        continue;
      }
      if (root(k) != k) continue;
      std::vector<Term> members;
      std::set<Name> names;
      for (std::size_t m = k; m < n; ++m)
        if (comps[m].kind != Kind::bang && root(m) == k) {
          members.push_back(comps[m]);
          names.insert(own[m].begin(), own[m].end());
        }
      for (std::size_t m = 0; m < n; ++m)
        if (comps[m].kind == Kind::bang || root(m) != k)
          for (const auto& x : own[m]) names.erase(x);
      Term whole = members.size() == 1 ? members[0] : Term{Kind::par, {}, {}, members, {}};
      for (const auto& x : names) whole = restrict(x, std::move(whole));
      if (!replicated.count(alpha_key(whole))) continue;
      for (std::size_t m = k; m < n; ++m)
        if (comps[m].kind != Kind::bang && root(m) == k) drop[m] = 1;
    }
    std::vector<Term> kept;
    for (std::size_t k = 0; k < n; ++k)
      if (!drop[k]) kept.push_back(std::move(comps[k]));
    comps = std::move(kept);
  }

  std::string alpha_key(const Term& t) {
    Canon keyer("%");
    keyer.dedup_ = false;
    keyer.next_temp_ = next_temp_;
    std::string key = pretty(keyer.group(t, 0));
    next_temp_ = keyer.next_temp_;
    return key;
  }

  std::string prefix_;
  std::size_t next_temp_ = 0;
  bool dedup_ = true;
};

}  // namespace

Term canonicalize(const Term& term) {
  Term current = Canon("@").group(term, 0);
  for (int round = 0; round < 8; ++round) {
    Term next = Canon("@").group(current, 0);
    if (next == current) break;
    current = std::move(next);
  }
  return current;
}

ActionLabel default_label_map(const Label& label) {
  switch (label.kind) {
    case Label::Kind::silent:
      return ActionLabel::silent();
    case Label::Kind::output:
      return ActionLabel::output(label.channel, label.object);
    case Label::Kind::input:
      return ActionLabel::input(label.channel, label.object);
  }
  return ActionLabel::silent();
}

Exploration explore(const Term& term, const DefTable& defs, const std::set<Name>& universe, std::size_t max_states,
                    const LabelMap& label_map) {
  if (max_states == 0) throw std::invalid_argument("max_states must be at least 1");
  Exploration result;
  std::map<Term, StateId> ids;
  std::vector<Transition> edges;
  std::deque<StateId> queue;
  auto intern = [&](Term t) -> std::optional<StateId> {
    if (auto it = ids.find(t); it != ids.end()) return it->second;
    if (result.states.size() >= max_states) return std::nullopt;
    auto id = static_cast<StateId>(result.states.size());
    ids.emplace(t, id);
    result.states.push_back(std::move(t));
    queue.push_back(id);
    return id;
  };
  intern(canonicalize(term));
  while (!queue.empty()) {
    StateId s = queue.front();
    queue.pop_front();
    Term source = result.states[s];
    for (auto& [label, next] : transitions(source, defs, universe)) {
      auto t = intern(canonicalize(next));
      if (!t) {
        result.complete = false;
        continue;
      }
      ActionLabel projected = label_map(label);
      result.labels.emplace(projected, label);
      edges.push_back({s, projected, *t});
    }
  }
  result.lts = Lts(result.states.size(), 0, std::move(edges));
  return result;
}

}  // namespace rtmpi::pi
