#pragma once

#include <random>
#include <vector>

#include "rtmpi/lts.hpp"

namespace rtmpi::testing {

/// Random LTS with up to `max_states` states and `max_edges` edges over the
/// labels tau, a, 'b. Biased towards silent edges so that stuttering and
/// divergence both show up.
inline Lts random_lts(std::mt19937& rng, std::size_t max_states = 8, std::size_t max_edges = 16) {
  std::uniform_int_distribution<std::size_t> nstates(1, max_states);
  const std::size_t n = nstates(rng);
  std::uniform_int_distribution<std::size_t> nedges(0, max_edges);
  std::uniform_int_distribution<StateId> state(0, static_cast<StateId>(n - 1));
  std::uniform_int_distribution<int> kind(0, 4);
  std::vector<Transition> edges;
  const std::size_t m = nedges(rng);
  for (std::size_t i = 0; i < m; ++i) {
    ActionLabel label;
    switch (kind(rng)) {
      case 0:
      case 1:
        label = ActionLabel::silent();
        break;
      case 2:
      case 3:
        label = ActionLabel::input("a");
        break;
      default:
        label = ActionLabel::output("b");
    }
    edges.push_back({state(rng), label, state(rng)});
  }
  return Lts(n, 0, std::move(edges));
}

/// A chain of transitions 0 -l0-> 1 -l1-> ... ending in a deadlock.
inline Lts chain(const std::vector<ActionLabel>& labels) {
  std::vector<Transition> edges;
  for (StateId i = 0; i < labels.size(); ++i) edges.push_back({i, labels[i], i + 1});
  return Lts(labels.size() + 1, 0, std::move(edges));
}

/// Pairs for checker cross-validation: a third are independent, the rest are
/// `lts` against a copy with inert silent steps spliced after random edges
/// (a.tau.P ~ a.P), half of those perturbed by one extra random edge.
inline std::pair<Lts, Lts> random_pair(std::mt19937& rng, std::size_t max_states = 8, std::size_t max_edges = 16) {
  Lts left = random_lts(rng, max_states, max_edges);
  std::uniform_int_distribution<int> mode(0, 5);
  const int m = mode(rng);
  if (m < 2) return {left, random_lts(rng, max_states, max_edges)};
  std::vector<Transition> edges;
  StateId next = static_cast<StateId>(left.size());
  std::bernoulli_distribution splice(0.4);
  for (const auto& t : left.transitions()) {
    if (next < max_states && splice(rng)) {
      edges.push_back({t.source, t.label, next});
      edges.push_back({next, ActionLabel::silent(), t.target});
      ++next;
    } else {
      edges.push_back(t);
    }
  }
  if (m >= 4) {
    std::uniform_int_distribution<StateId> state(0, next - 1);
    edges.push_back({state(rng), m == 4 ? ActionLabel::silent() : ActionLabel::input("a"), state(rng)});
  }
  return {left, Lts(next, left.initial(), std::move(edges))};
}

}  // namespace rtmpi::testing
