#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rtmpi/lts.hpp"

namespace rtmpi {

enum class Verdict : std::uint8_t { equivalent, inequivalent };

enum class Side : std::uint8_t { left, right };

/// One defender answer to an attack: the defender idles through silent steps
/// to `via` and then takes the attacked label to `to`. A stutter answer (only
/// for silent attacks) stays put: via == to == the defender's current state.
struct PlayResponse {
  bool stutter = false;
  StateId via = 0;
  StateId to = 0;
  /// Index of the node that refutes this answer.
  std::size_t refuted_by = 0;
};

/// A node of an attacker strategy at state pair (left, right): the attacker
/// moves on `attacker`'s side along `move`. Every possible defender answer is
/// listed with the node that refutes it; an empty list means no answer exists.
struct PlayNode {
  StateId left = 0;
  StateId right = 0;
  Side attacker = Side::left;
  Transition move;
  std::vector<PlayResponse> responses;
};

/// Distinguishing play: a finite attacker strategy for the branching
/// bisimulation game, played on the stored (reduced) systems. nodes[0] is the
/// initial pair.
struct DistinguishingPlay {
  Lts left;
  Lts right;
  std::vector<PlayNode> nodes;
};

struct CheckResult {
  Verdict verdict = Verdict::equivalent;
  /// On equivalence: related pairs (left state, right state), containing the
  /// pair of initial states.
  std::vector<std::pair<StateId, StateId>> witness;
  /// On inequivalence.
  std::optional<DistinguishingPlay> counterexample;

  bool equivalent() const { return verdict == Verdict::equivalent; }
};

/// Branching bisimilarity of the initial states (partition refinement on the
/// disjoint union).
CheckResult bb_check(const Lts& left, const Lts& right);

/// Divergence-preserving branching bisimilarity of the initial states.
CheckResult dpbb_check(const Lts& left, const Lts& right);

/// Size guard for the brute-force oracle: |left| * |right| must not exceed it.
inline constexpr std::size_t brute_force_pair_limit = 10'000;

class OracleGuardError : public std::length_error {
public:
  using std::length_error::length_error;
};

/// Greatest fixpoint over all state pairs, deleting pairs that violate the
/// transfer conditions. Independent of the refinement-based checkers.
CheckResult brute_force_check(const Lts& left, const Lts& right, bool divergence_sensitive);

/// True iff `relation` satisfies the branching (and optionally divergence)
/// transfer conditions pair by pair.
bool is_branching_bisimulation(const Lts& left, const Lts& right,
                               const std::vector<std::pair<StateId, StateId>>& relation,
                               bool divergence_sensitive);

/// Checks that a play is a well-formed winning attacker strategy: moves
/// exist, each node lists exactly the defender's possible answers, every
/// answer is refuted by a node at the claimed pair, and the strategy is
/// finite (acyclic).
bool replay_play(const DistinguishingPlay& play);

/// Quotient of `lts` modulo (divergence-preserving) branching bisimilarity.
/// In divergence mode, divergent classes carry an observable `<div>` self-loop.
Lts minimize(const Lts& lts, bool divergence_sensitive);

/// Observable label marking divergent classes in reduced systems.
ActionLabel divergence_label();

}  // namespace rtmpi
