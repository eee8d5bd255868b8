#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rtmpi/bisim.hpp"
#include "rtmpi/rtm.hpp"

namespace rtmpi {

/// How a candidate RTM was shown not to be branching bisimilar to x(y).'y.0.
enum class RefutationBranch : std::uint8_t {
  alphabet,            ///< some 'y_i is not an action of the candidate
  pigeonhole,          ///< C_i and C_j share a trigger, so C_i also enables 'y_j
  simulation_failure,  ///< some C_i is not reachable within the bound
};

std::string to_string(RefutationBranch branch);

struct ProbeOutcome {
  std::string name;  ///< y_i
  bool in_alphabet = false;
  /// C_i: reached by silent steps, `x y_i`, silent steps, and enabling 'y_i.
  std::optional<Configuration> reached;
};

struct RefutationReport {
  std::size_t trigger_count = 0;
  std::vector<ProbeOutcome> probes;  ///< y_1 .. y_n, n = trigger_count + 1
  RefutationBranch branch = RefutationBranch::alphabet;
  /// Indices (i, j), i < j, into probes with C_i and C_j on the same trigger.
  std::optional<std::pair<std::size_t, std::size_t>> collision;
  /// Left: 'y_i.0. Right: C_i and its one-step successors. C_i plays 'y_j.
  std::optional<DistinguishingPlay> play;
  bool complete = true;  ///< the reachable search closed under the bound

  bool refuted() const { return branch != RefutationBranch::simulation_failure; }
};

/// Probes the candidate with n = trigger_count + 1 names y1..yn against the
/// specification x(y).'y.0.
RefutationReport refute(const Rtm& candidate, std::size_t max_states);

/// Human-readable report, one fact per line.
std::string format_report(const RefutationReport& report);

}  // namespace rtmpi
