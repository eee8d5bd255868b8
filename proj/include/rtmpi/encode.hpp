#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rtmpi/lts.hpp"
#include "rtmpi/pi.hpp"
#include "rtmpi/rtm.hpp"

namespace rtmpi {

/// π-calculus specification of an RTM.
struct SpecBundle {
  pi::Term term;     ///< specification of the initial configuration
  pi::Term servers;  ///< the replicated control servers
  pi::DefTable defs; ///< carries the Tape family
  /// role -> π name. Roles: `protocol.write`, `protocol.read`, `protocol.mvL`,
  /// `protocol.mvR`, `state.<s>`, `datum.<d>`, `action.<label>`.
  std::map<std::string, pi::Name> name_map;
};

struct EncodeOptions {
  /// Test hook: leave out the handler branch of this rule index.
  std::optional<std::size_t> drop_rule;
};

/// Registers the built-in tape family. `Tape_<i>(w, r, L, R, b, d0, ..., dk)`
/// holds cells d0..dk with the head on cell i; b is the blank datum. It
/// answers `w(x)` (write), `L` and `R` (moves, extending the window with b),
/// and `'r<d_i>` (read), keeping outer blanks trimmed.
void add_tape_family(pi::DefTable& defs);

/// Encodes the machine as
///   new protocol states data in ('st.'dt.0 | S | Tape)
/// where S holds one replicated server per control state:
///   !s.( d.( a.'write<e>.'mvL.read(f).'t.'f.0 + ... ) + ... )
/// Silent rules use `tau.`, output actions `'a.`, input actions `a.`.
/// Throws std::invalid_argument on name collisions or actions the encoding
/// cannot express (inputs carrying a payload).
SpecBundle rtm_to_pi(const Rtm& rtm, const EncodeOptions& options = {});

/// The specification term of an arbitrary configuration: the state and head
/// triggers pending, the servers, and the tape holding the configuration.
pi::Term spec_of_configuration(const Rtm& rtm, const SpecBundle& spec, const Configuration& c);

/// Label projection for explored specifications: the internal-marker channel
/// maps back to `i`, everything else as default_label_map.
ActionLabel spec_label_map(const pi::Label& label);

/// π source text (parses with a DefTable that has the tape family).
std::string emit_spec(const SpecBundle& spec);
/// `role = name` lines.
std::string emit_name_map(const SpecBundle& spec);

/// Result of replaying every machine step through the specification.
struct StepwiseReport {
  std::size_t steps = 0;
  std::size_t matched = 0;
  bool complete = false;  ///< both state spaces closed under the bound
  std::vector<std::string> failures;
};

/// For every reachable configuration c and step c -a-> c', searches the
/// explored specification from the state of c for silent steps within the
/// class of c, one a-edge (none for an inert silent step), and silent steps
/// into the dpbb class of c'.
StepwiseReport replay_steps(const Rtm& rtm, std::size_t max_states, const EncodeOptions& options = {});

/// Finite transition system with an injective state numbering.
struct FinTs {
  Lts lts;
  std::vector<std::uint64_t> phi;
};

/// 1, 2, ... in breadth-first order from the initial state; unreachable
/// states follow in index order.
std::vector<std::uint64_t> bfs_numbering(const Lts& lts);

/// Lines `state_index = natural`; `#` comments. Every state needs a number
/// and numbers must be distinct. Errors are ParseError with the line.
std::vector<std::uint64_t> parse_numbering(std::string_view text, std::size_t num_states);

/// States up, s, t; data blank and the numbers in ascending order; rules
///   up tau _ / phi(init) R s
///   s tau _ / _ L t
///   t a phi(p) / phi(q) R s   for every transition p -a-> q
Rtm ts_to_rtm(const FinTs& ts);

using RuleOracle = std::function<std::vector<Rule>(const Trigger&)>;

/// The rules of ts_to_rtm generated per trigger on demand.
RuleOracle lazy_rule_oracle(FinTs ts);

}  // namespace rtmpi
