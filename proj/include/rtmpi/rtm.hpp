#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rtmpi/lts.hpp"

namespace rtmpi {

/// The blank tape symbol.
inline const std::string blank_symbol = "_";

enum class Move : std::uint8_t { left, right };

struct Rule {
  std::string from;
  std::string read;
  ActionLabel action;
  std::string write;
  Move move = Move::right;
  std::string to;

  auto operator<=>(const Rule&) const = default;
  bool operator==(const Rule&) const = default;
};

struct Trigger {
  std::string state;
  std::string datum;

  auto operator<=>(const Trigger&) const = default;
  bool operator==(const Trigger&) const = default;
};

/// Machine configuration: control state and tape `left [head] right`, kept in
/// normal form (no leading blanks on the left part, no trailing blanks on the
/// right part).
struct Configuration {
  std::string state;
  std::vector<std::string> left;
  std::string head = blank_symbol;
  std::vector<std::string> right;

  void normalize();
  bool is_normal() const;
  Trigger trigger() const { return {state, head}; }

  auto operator<=>(const Configuration&) const = default;
  bool operator==(const Configuration&) const = default;
};

/// `(s, a b [c] d)`.
std::string to_string(const Configuration& c);

bool satisfies_trigger(const Configuration& c, const Trigger& trigger);

/// Reactive Turing machine. Construction validates that every rule draws its
/// symbols from the declared sets; rules may share a trigger.
class Rtm {
public:
  Rtm(std::vector<std::string> states, std::vector<std::string> data, std::vector<ActionLabel> actions,
      std::vector<Rule> rules, std::string initial);

  const std::vector<std::string>& states() const { return states_; }
  /// Data symbols; always contains the blank.
  const std::vector<std::string>& data() const { return data_; }
  /// Declared visible actions (observable labels, or `i` after relabelling).
  const std::vector<ActionLabel>& actions() const { return actions_; }
  const std::vector<Rule>& rules() const { return rules_; }
  const std::string& initial() const { return initial_; }

  /// Rules enabled under a trigger, in declaration order.
  std::vector<const Rule*> rules_for(const Trigger& trigger) const;

  Configuration initial_configuration() const { return {initial_, {}, blank_symbol, {}}; }

  bool operator==(const Rtm& other) const;

private:
  std::vector<std::string> states_;
  std::vector<std::string> data_;
  std::vector<ActionLabel> actions_;
  std::vector<Rule> rules_;
  std::string initial_;
  std::map<Trigger, std::vector<std::size_t>> by_trigger_;
};

/// Text format:
///   states: s t ...
///   initial: s
///   data: _ 1 2          (blank spelled `_`, added if omitted)
///   actions: a 'b "x y"  (labels as in .aut files; `tau` is reserved)
///   rule: s a d / e M t  (M is L or R; a may be `tau`)
/// `#` starts a comment. Errors are ParseError with the line number.
Rtm parse_rtm(std::string_view text);
std::string emit_rtm(const Rtm& rtm);

/// One outcome per enabled rule, in rule order. Empty means deadlock.
std::vector<std::pair<ActionLabel, Configuration>> step(const Rtm& rtm, const Configuration& c);

struct RtmExploration {
  Lts lts;
  /// configurations[k] is LTS state k.
  std::vector<Configuration> configurations;
  /// False when the state bound cut exploration short.
  bool complete = true;
};

/// Breadth-first exploration from the initial configuration, at most
/// `max_states` configurations.
RtmExploration reachable_lts(const Rtm& rtm, std::size_t max_states);

struct TriggerSet {
  std::vector<Trigger> all;   ///< states x data
  std::vector<Trigger> used;  ///< triggers of at least one rule
};

TriggerSet triggers(const Rtm& rtm);
inline std::size_t trigger_count(const Rtm& rtm) { return rtm.states().size() * rtm.data().size(); }

/// Silent rules become `i`-labelled rules. Throws std::invalid_argument if
/// `i` is already an action.
Rtm relabel_internal(const Rtm& rtm);

}  // namespace rtmpi
