#pragma once

// Internal: pair-relation fixpoint shared by the brute-force oracle and the
// counterexample builder. Deletion rounds use only the branching transfer
// conditions; divergence is handled by marking (the pairwise divergence
// clause is not monotone in the relation, so deleting on it can discard pairs
// of a valid relation).

#include <cstdint>
#include <vector>

#include "rtmpi/bisim.hpp"

namespace rtmpi::detail {

/// rank(s, t) == 0: pair survives the fixpoint. Otherwise the round (1-based)
/// in which the pair was deleted.
struct PairRanks {
  std::size_t left_size = 0;
  std::size_t right_size = 0;
  std::vector<std::uint32_t> rank;

  std::uint32_t at(StateId s, StateId t) const { return rank[s * right_size + t]; }
};

PairRanks compute_ranks(const Lts& left, const Lts& right, bool divergence_sensitive);

/// Copy of `lts` where every state on a silent cycle carries a `<div>` loop.
/// On finite systems, branching bisimilarity of the marked copies is
/// divergence-preserving branching bisimilarity of the originals.
Lts mark_silent_cycles(const Lts& lts);

/// Attacker strategy from the initial pair, which must have nonzero rank.
/// Built for the divergence-insensitive game.
DistinguishingPlay build_play(Lts left, Lts right, const PairRanks& ranks);

/// Silent closure: for each state, every state reachable by zero or more
/// silent steps (sorted, includes the state itself).
std::vector<std::vector<StateId>> silent_closure(const Lts& lts);

}  // namespace rtmpi::detail
