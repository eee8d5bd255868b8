#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rtmpi {

using StateId = std::uint32_t;

/// Error raised by every text parser in the library. Carries the 1-based
/// line (or 0 when the position is unknown).
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what), line_(line) {}
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

enum class Polarity : std::uint8_t { input, output };

/// Transition label: the silent step, the reserved internal marker `i`, or an
/// observable channel action with optional payload.
struct ActionLabel {
  enum class Kind : std::uint8_t { silent, internal_marker, observable };

  Kind kind = Kind::silent;
  std::string channel;
  Polarity polarity = Polarity::input;
  std::optional<std::string> payload;

  static ActionLabel silent() { return {}; }
  static ActionLabel internal() { return {Kind::internal_marker, {}, Polarity::input, {}}; }
  static ActionLabel output(std::string ch, std::optional<std::string> payload = {}) {
    return {Kind::observable, std::move(ch), Polarity::output, std::move(payload)};
  }
  static ActionLabel input(std::string ch, std::optional<std::string> payload = {}) {
    return {Kind::observable, std::move(ch), Polarity::input, std::move(payload)};
  }

  bool is_silent() const { return kind == Kind::silent; }

  auto operator<=>(const ActionLabel&) const = default;
  bool operator==(const ActionLabel&) const = default;
};

/// Text form used in `.aut` files and RTM action declarations:
/// `tau`, `i`, `chan`, `'chan`, `chan name`, `'chan name`.
std::string to_string(const ActionLabel& label);

/// Inverse of to_string. Throws std::invalid_argument on malformed text or on
/// an observable channel named `i`.
ActionLabel parse_label(std::string_view text);

struct Transition {
  StateId source = 0;
  ActionLabel label;
  StateId target = 0;

  auto operator<=>(const Transition&) const = default;
  bool operator==(const Transition&) const = default;
};

/// Finite labelled transition system over states 0..size()-1. Transitions are
/// kept sorted and free of duplicates.
class Lts {
public:
  Lts() : Lts(1, 0, {}) {}
  Lts(std::size_t num_states, StateId initial, std::vector<Transition> transitions);

  std::size_t size() const { return num_states_; }
  StateId initial() const { return initial_; }
  const std::vector<Transition>& transitions() const { return transitions_; }

  /// Outgoing transitions of `s`, as a contiguous view into transitions().
  std::pair<const Transition*, const Transition*> outgoing(StateId s) const;

  bool operator==(const Lts&) const = default;

private:
  std::size_t num_states_;
  StateId initial_;
  std::vector<Transition> transitions_;
  std::vector<std::size_t> offsets_;
};

/// Aldebaran reader. Reports malformed headers, count mismatches, and state
/// indices out of range with the offending line number.
Lts parse_aut(std::istream& in);
Lts parse_aut_string(std::string_view text);

/// Aldebaran writer. States are renumbered breadth-first from the initial
/// state (unreachable states follow in index order).
void emit_aut(std::ostream& out, const Lts& lts);
std::string emit_aut_string(const Lts& lts);

/// Breadth-first renumbering used by emit_aut; two LTSs are isomorphic iff
/// their canonical forms are equal (for deterministic BFS orders).
Lts canonical_renumbering(const Lts& lts);

/// Every edge labelled `from` becomes `to`.
Lts relabel(const Lts& lts, const ActionLabel& from, const ActionLabel& to);

/// States from which an infinite run of silent steps exists.
std::vector<StateId> mark_divergence(const Lts& lts);

}  // namespace rtmpi
