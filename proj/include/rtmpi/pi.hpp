#pragma once

#include <compare>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rtmpi/lts.hpp"

namespace rtmpi::pi {

using Name = std::string;

enum class Kind : std::uint8_t { nil, input, output, tau, par, sum, restrict, bang, ident };

/// Process term. Field use by kind:
///   input     channel, object = bound name (none for a nullary input), children[0]
///   output    channel, object = payload (optional), children[0]
///   tau       children[0]
///   par, sum  children (sum children are prefix-guarded)
///   restrict  channel = restricted name, children[0]
///   bang      children[0]
///   ident     channel = definition name, args
struct Term {
  Kind kind = Kind::nil;
  Name channel;
  std::optional<Name> object;
  std::vector<Term> children;
  std::vector<Name> args;

  friend bool operator==(const Term&, const Term&);
  friend bool operator<(const Term&, const Term&);
};

Term nil();
Term input(Name channel, std::optional<Name> binder, Term body);
Term output(Name channel, std::optional<Name> payload, Term cont);
Term tau(Term cont);
Term par(std::vector<Term> components);
Term sum(std::vector<Term> summands);
Term restrict(Name name, Term body);
Term bang(Term body);
Term ident(Name name, std::vector<Name> args);

struct Definition {
  std::vector<Name> params;
  Term body;
};

/// Resolves an identifier application with concrete arguments to the term it
/// unfolds to, or nullopt if the family does not cover that application.
using FamilyResolver = std::function<std::optional<Term>(const Name& name, const std::vector<Name>& args)>;

/// Defining equations `Id(x, ...) = P`, plus parameterized families resolved
/// on concrete arguments (used for indexed process families).
class DefTable {
public:
  void define(const Name& name, Definition def);
  void add_family(std::string prefix, FamilyResolver resolver);

  bool knows(const Name& name, std::size_t arity) const;
  std::optional<Term> unfold(const Name& name, const std::vector<Name>& args) const;
  const std::map<std::pair<Name, std::size_t>, Definition>& definitions() const { return defs_; }

private:
  std::map<std::pair<Name, std::size_t>, Definition> defs_;
  std::vector<std::pair<std::string, FamilyResolver>> families_;
};

/// Grammar (`|` binds loosest, then `+`):
///   P ::= 0 | a(x).P | a.P | 'a<x>.P | 'a.P | tau.P | P | P | P + P
///       | new x y ... in P | !P | Id(x, ...) | (P)
///   program ::= { def Id(x, ...) = P ; } P
/// Definitions are added to `defs`. Identifiers must resolve in `defs`.
/// Throws ParseError (with line number) on syntax errors, unbound identifiers
/// and arity mismatches.
Term parse_pi(std::string_view text, DefTable& defs);
/// Parses a lone term; identifiers must already be defined in `defs`.
Term parse_term(std::string_view text, const DefTable& defs);

std::string pretty(const Term& term);
/// Definitions in program syntax, one per line, each ending in `;`.
std::string pretty_definitions(const DefTable& defs);

std::set<Name> free_names(const Term& term);
/// Every name occurring in the term, bound or free.
std::set<Name> all_names(const Term& term);

/// Capture-avoiding simultaneous substitution of names.
Term substitute(const Term& term, const std::map<Name, Name>& renaming);

/// Transition label: silent, free input of `object` on `channel`, or output
/// on `channel` with optional payload; `bound` marks an extruded payload.
struct Label {
  enum class Kind : std::uint8_t { silent, input, output };
  Kind kind = Kind::silent;
  Name channel;
  std::optional<Name> object;
  bool bound = false;

  auto operator<=>(const Label&) const = default;
  bool operator==(const Label&) const = default;
};

std::string to_string(const Label& label);

/// Early operational semantics. Free inputs are instantiated once per name of
/// `universe`; communications pass the sender's payload.
std::vector<std::pair<Label, Term>> transitions(const Term& term, const DefTable& defs,
                                                const std::set<Name>& universe);

/// Structural-congruence normal form: parallel flattened and sorted, nil
/// removed, unused restrictions dropped, restrictions hoisted to the top of
/// each parallel group, bound names renamed by position, and copies made
/// redundant by a sibling replication removed (!P | P to !P).
Term canonicalize(const Term& term);

using LabelMap = std::function<ActionLabel(const Label&)>;
/// silent to silent, output to output (payload kept), input to input.
ActionLabel default_label_map(const Label& label);

struct Exploration {
  Lts lts;
  std::vector<Term> states;  ///< canonical term of each LTS state
  bool complete = true;
  /// The process label each LTS label was projected from.
  std::map<ActionLabel, Label> labels;
};

/// Breadth-first exploration over canonical terms, at most `max_states`.
Exploration explore(const Term& term, const DefTable& defs, const std::set<Name>& universe,
                    std::size_t max_states, const LabelMap& label_map = default_label_map);

}  // namespace rtmpi::pi
