#include <stdexcept>

#include "pi_internal.hpp"
#include "rtmpi/pi.hpp"

namespace rtmpi::pi {

namespace {

constexpr std::size_t max_unfold_depth = 256;

// One-step capability of a term before its context is known. Inputs keep the
// binder abstract; outputs carry the payload and whether it was extruded.
struct Commitment {
  enum class Kind : std::uint8_t { tau, input, output } kind;
  Name channel;
  std::optional<Name> object;  // binder (input) or payload (output)
  bool bound = false;
  Term cont;
};

class Semantics {
public:
  Semantics(const DefTable& defs, std::set<Name> avoid) : defs_(defs), avoid_(std::move(avoid)) {}

  std::vector<Commitment> commitments(const Term& t, std::size_t depth = 0) {
    std::vector<Commitment> out;
    switch (t.kind) {
      case Kind::nil:
        break;
      case Kind::input:
        out.push_back({Commitment::Kind::input, t.channel, t.object, false, t.children[0]});
        break;
      case Kind::output:
        out.push_back({Commitment::Kind::output, t.channel, t.object, false, t.children[0]});
        break;
      case Kind::tau:
        out.push_back({Commitment::Kind::tau, {}, {}, false, t.children[0]});
        break;
      case Kind::sum:
        for (const auto& c : t.children)
          for (auto& k : commitments(c, depth)) out.push_back(std::move(k));
        break;
      case Kind::ident: {
        if (depth > max_unfold_depth) throw std::runtime_error("unguarded recursion in '" + t.channel + "'");
        auto body = defs_.unfold(t.channel, t.args);
        if (!body) throw std::runtime_error("unbound identifier '" + t.channel + "'");
        out = commitments(*body, depth + 1);
        break;
      }
      case Kind::par:
        out = par_commitments(t.children, depth);
        break;
      case Kind::bang:
        out = bang_commitments(t, depth);
        break;
      case Kind::restrict:
        out = restrict_commitments(t, depth);
        break;
    }
    return out;
  }

private:
  // Places `c` into a context: `wrap` builds the new continuation, and the
  // input binder is renamed away from `context_free`.
  template <class Wrap>
  Commitment lift(Commitment c, const std::set<Name>& context_free, Wrap wrap) {
    if (c.kind == Commitment::Kind::input && c.object && context_free.count(*c.object)) {
      std::set<Name> avoid = avoid_;
      avoid.insert(context_free.begin(), context_free.end());
      for (const auto& n : all_names(c.cont)) avoid.insert(n);
      Name renamed = detail::fresh_name(*c.object, avoid);
      c.cont = substitute(c.cont, {{*c.object, renamed}});
      c.object = renamed;
    }
    c.cont = wrap(std::move(c.cont));
    return c;
  }

  static bool synchronizes(const Commitment& out, const Commitment& in) {
    return out.kind == Commitment::Kind::output && in.kind == Commitment::Kind::input && out.channel == in.channel &&
           out.object.has_value() == in.object.has_value();
  }

  // Residual of a communication: the sender's continuation and the receiver's
  // body instantiated with the payload.
  static Term received(const Commitment& out, const Commitment& in) {
    if (!in.object) return in.cont;
    return substitute(in.cont, {{*in.object, *out.object}});
  }

  static Term close(const Commitment& out, Term t) {
    return out.bound ? restrict(*out.object, std::move(t)) : t;
  }

  std::vector<Commitment> par_commitments(const std::vector<Term>& parts, std::size_t depth) {
    std::vector<std::vector<Commitment>> each;
    std::vector<std::set<Name>> others_free(parts.size());
    for (const auto& p : parts) each.push_back(commitments(p, depth));
    for (std::size_t i = 0; i < parts.size(); ++i)
      for (std::size_t j = 0; j < parts.size(); ++j)
        if (i != j)
          for (const auto& n : free_names(parts[j])) others_free[i].insert(n);

    std::vector<Commitment> out;
    for (std::size_t i = 0; i < parts.size(); ++i)
      for (const auto& c : each[i])
        out.push_back(lift(c, others_free[i], [&](Term cont) {
          std::vector<Term> next = parts;
          next[i] = std::move(cont);
          return Term{Kind::par, {}, {}, std::move(next), {}};
        }));
    for (std::size_t i = 0; i < parts.size(); ++i)
      for (std::size_t j = 0; j < parts.size(); ++j) {
        if (i == j) continue;
        for (const auto& o : each[i])
          for (const auto& n : each[j]) {
            if (!synchronizes(o, n)) continue;
            std::vector<Term> next = parts;
            next[i] = o.cont;
            next[j] = received(o, n);
            out.push_back({Commitment::Kind::tau, {}, {}, false, close(o, Term{Kind::par, {}, {}, std::move(next), {}})});
          }
      }
    return out;
  }

  std::vector<Commitment> bang_commitments(const Term& t, std::size_t depth) {
    const Term& body = t.children[0];
    auto copies = commitments(body, depth);
    std::set<Name> context = free_names(t);
    std::vector<Commitment> out;
    for (const auto& c : copies)
      out.push_back(lift(c, context, [&](Term cont) { return par({std::move(cont), t}); }));
    for (const auto& o : copies)
      for (const auto& n : copies)
        if (synchronizes(o, n))
          out.push_back({Commitment::Kind::tau, {}, {}, false, close(o, par({o.cont, received(o, n), t}))});
    return out;
  }

  std::vector<Commitment> restrict_commitments(const Term& t, std::size_t depth) {
    Name x = t.channel;
    Term body = t.children[0];
    if (avoid_.count(x)) {
      std::set<Name> avoid = avoid_;
      for (const auto& n : all_names(body)) avoid.insert(n);
      Name renamed = detail::fresh_name(x, avoid);
      body = substitute(body, {{x, renamed}});
      x = renamed;
    }
    avoid_.insert(x);
    auto inner = commitments(body, depth);
    avoid_.erase(x);

    std::vector<Commitment> out;
    auto wrap = [&](Term cont) { return restrict(x, std::move(cont)); };
    for (auto& c : inner) {
      if (c.kind != Commitment::Kind::tau && c.channel == x) continue;
      if (c.kind == Commitment::Kind::output && !c.bound && c.object == x) {
        c.bound = true;
        out.push_back(std::move(c));
        continue;
      }
      out.push_back(lift(std::move(c), {x}, wrap));
    }
    return out;
  }

  const DefTable& defs_;
  std::set<Name> avoid_;
};

}  // namespace

std::vector<std::pair<Label, Term>> transitions(const Term& term, const DefTable& defs,
                                                const std::set<Name>& universe) {
  std::set<Name> avoid = free_names(term);
  avoid.insert(universe.begin(), universe.end());
  Semantics sem(defs, avoid);
  std::vector<std::pair<Label, Term>> out;
  for (auto& c : sem.commitments(term)) {
    switch (c.kind) {
      case Commitment::Kind::tau:
        out.push_back({Label{}, std::move(c.cont)});
        break;
      case Commitment::Kind::output:
        out.push_back({Label{Label::Kind::output, c.channel, c.object, c.bound}, std::move(c.cont)});
        break;
      case Commitment::Kind::input:
        if (!c.object) {
          out.push_back({Label{Label::Kind::input, c.channel, std::nullopt, false}, std::move(c.cont)});
          break;
        }
        for (const auto& u : universe)
          out.push_back({Label{Label::Kind::input, c.channel, u, false}, substitute(c.cont, {{*c.object, u}})});
        break;
    }
  }
  return out;
}

}  // namespace rtmpi::pi
