#include <cctype>
#include <sstream>
#include <tuple>

#include "pi_internal.hpp"
#include "rtmpi/pi.hpp"

namespace rtmpi::pi {

bool operator==(const Term& a, const Term& b) {
  return a.kind == b.kind && a.channel == b.channel && a.object == b.object && a.args == b.args &&
         a.children == b.children;
}

namespace {

std::strong_ordering compare(const Term& a, const Term& b) {
  if (auto c = std::tie(a.kind, a.channel, a.object, a.args) <=> std::tie(b.kind, b.channel, b.object, b.args); c != 0)
    return c;
  for (std::size_t k = 0; k < a.children.size() && k < b.children.size(); ++k)
    if (auto c = compare(a.children[k], b.children[k]); c != 0) return c;
  return a.children.size() <=> b.children.size();
}

}  // namespace

bool operator<(const Term& a, const Term& b) { return compare(a, b) < 0; }

Term nil() { return {}; }

Term input(Name channel, std::optional<Name> binder, Term body) {
  return {Kind::input, std::move(channel), std::move(binder), {std::move(body)}, {}};
}

Term output(Name channel, std::optional<Name> payload, Term cont) {
  return {Kind::output, std::move(channel), std::move(payload), {std::move(cont)}, {}};
}

Term tau(Term cont) { return {Kind::tau, {}, {}, {std::move(cont)}, {}}; }

Term par(std::vector<Term> components) {
  if (components.empty()) return nil();
  if (components.size() == 1) return std::move(components.front());
  return {Kind::par, {}, {}, std::move(components), {}};
}

Term sum(std::vector<Term> summands) {
  if (summands.empty()) return nil();
  if (summands.size() == 1) return std::move(summands.front());
  return {Kind::sum, {}, {}, std::move(summands), {}};
}

Term restrict(Name name, Term body) { return {Kind::restrict, std::move(name), {}, {std::move(body)}, {}}; }

Term bang(Term body) { return {Kind::bang, {}, {}, {std::move(body)}, {}}; }

Term ident(Name name, std::vector<Name> args) { return {Kind::ident, std::move(name), {}, {}, std::move(args)}; }

void DefTable::define(const Name& name, Definition def) { defs_[{name, def.params.size()}] = std::move(def); }

void DefTable::add_family(std::string prefix, FamilyResolver resolver) {
  families_.emplace_back(std::move(prefix), std::move(resolver));
}

bool DefTable::knows(const Name& name, std::size_t arity) const {
  if (defs_.count({name, arity})) return true;
  for (const auto& [prefix, resolver] : families_)
    if (name.rfind(prefix, 0) == 0) return true;
  return false;
}

std::optional<Term> DefTable::unfold(const Name& name, const std::vector<Name>& args) const {
  if (auto it = defs_.find({name, args.size()}); it != defs_.end()) {
    std::map<Name, Name> renaming;
    for (std::size_t k = 0; k < args.size(); ++k) renaming[it->second.params[k]] = args[k];
    return substitute(it->second.body, renaming);
  }
  for (const auto& [prefix, resolver] : families_)
    if (name.rfind(prefix, 0) == 0)
      if (auto t = resolver(name, args)) return t;
  return std::nullopt;
}

namespace {

void collect_free(const Term& t, std::set<Name>& bound, std::set<Name>& out) {
  auto use = [&](const Name& n) {
    if (!bound.count(n)) out.insert(n);
  };
  switch (t.kind) {
    case Kind::nil:
      return;
    case Kind::input:
    case Kind::restrict: {
      const Name* binder = t.kind == Kind::input ? (t.object ? &*t.object : nullptr) : &t.channel;
      if (t.kind == Kind::input) use(t.channel);
      bool fresh = binder && bound.insert(*binder).second;
      collect_free(t.children[0], bound, out);
      if (fresh) bound.erase(*binder);
      return;
    }
    case Kind::output:
      use(t.channel);
      if (t.object) use(*t.object);
      collect_free(t.children[0], bound, out);
      return;
    case Kind::ident:
      for (const auto& a : t.args) use(a);
      return;
    default:
      for (const auto& c : t.children) collect_free(c, bound, out);
  }
}

void collect_all(const Term& t, std::set<Name>& out) {
  if (t.kind == Kind::input || t.kind == Kind::output || t.kind == Kind::restrict) out.insert(t.channel);
  if (t.object) out.insert(*t.object);
  for (const auto& a : t.args) out.insert(a);
  for (const auto& c : t.children) collect_all(c, out);
}

}  // namespace

std::set<Name> free_names(const Term& term) {
  std::set<Name> bound, out;
  collect_free(term, bound, out);
  return out;
}

std::set<Name> all_names(const Term& term) {
  std::set<Name> out;
  collect_all(term, out);
  return out;
}

Term substitute(const Term& term, const std::map<Name, Name>& renaming) {
  if (renaming.empty()) return term;
  auto map = [&](const Name& n) {
    auto it = renaming.find(n);
    return it == renaming.end() ? n : it->second;
  };
  Term out = term;
  switch (term.kind) {
    case Kind::nil:
      return out;
    case Kind::output:
      out.channel = map(term.channel);
      if (term.object) out.object = map(*term.object);
      out.children[0] = substitute(term.children[0], renaming);
      return out;
    case Kind::ident:
      for (auto& a : out.args) a = map(a);
      return out;
    case Kind::input:
    case Kind::restrict: {
      if (term.kind == Kind::input) out.channel = map(term.channel);
      Name* binder = term.kind == Kind::input ? (out.object ? &*out.object : nullptr) : &out.channel;
      if (!binder) {
        out.children[0] = substitute(term.children[0], renaming);
        return out;
      }
      std::map<Name, Name> inner = renaming;
      inner.erase(*binder);
      bool captures = false;
      for (const auto& [from, to] : inner) captures = captures || to == *binder;
      if (captures) {
        std::set<Name> avoid = all_names(term);
        for (const auto& [from, to] : inner) {
          avoid.insert(from);
          avoid.insert(to);
        }
        Name renamed = detail::fresh_name(*binder, avoid);
        inner[*binder] = renamed;
        *binder = renamed;
      }
      out.children[0] = substitute(term.children[0], inner);
      return out;
    }
    default:
      for (auto& c : out.children) c = substitute(c, renaming);
      return out;
  }
}

// ---------------------------------------------------------------------------
// Printing

namespace {

void print(const Term& t, std::string& out);

void print_unary(const Term& t, std::string& out) {
  if (t.kind == Kind::par || t.kind == Kind::sum) {
    out += '(';
    print(t, out);
    out += ')';
  } else {
    print(t, out);
  }
}

void print(const Term& t, std::string& out) {
  switch (t.kind) {
    case Kind::nil:
      out += '0';
      return;
    case Kind::input:
      out += t.channel;
      if (t.object) out += "(" + *t.object + ")";
      out += '.';
      print_unary(t.children[0], out);
      return;
    case Kind::output:
      out += "'" + t.channel;
      if (t.object) out += "<" + *t.object + ">";
      out += '.';
      print_unary(t.children[0], out);
      return;
    case Kind::tau:
      out += "tau.";
      print_unary(t.children[0], out);
      return;
    case Kind::par:
      for (std::size_t k = 0; k < t.children.size(); ++k) {
        if (k) out += " | ";
        const Term& c = t.children[k];
        if (c.kind == Kind::par) {
          print_unary(c, out);
        } else {
          print(c, out);
        }
      }
      return;
    case Kind::sum:
      for (std::size_t k = 0; k < t.children.size(); ++k) {
        if (k) out += " + ";
        print_unary(t.children[k], out);
      }
      return;
    case Kind::restrict:
      out += "new " + t.channel + " in ";
      print_unary(t.children[0], out);
      return;
    case Kind::bang:
      out += '!';
      print_unary(t.children[0], out);
      return;
    case Kind::ident:
      out += t.channel + "(";
      for (std::size_t k = 0; k < t.args.size(); ++k) {
        if (k) out += ',';
        out += t.args[k];
      }
      out += ')';
      return;
  }
}

}  // namespace

std::string pretty(const Term& term) {
  std::string out;
  print(term, out);
  return out;
}

std::string pretty_definitions(const DefTable& defs) {
  std::string out;
  for (const auto& [key, def] : defs.definitions()) {
    out += "def " + key.first + "(";
    for (std::size_t k = 0; k < def.params.size(); ++k) {
      if (k) out += ',';
      out += def.params[k];
    }
    out += ") = " + pretty(def.body) + ";\n";
  }
  return out;
}

std::string to_string(const Label& label) {
  switch (label.kind) {
    case Label::Kind::silent:
      return "tau";
    case Label::Kind::input:
      return label.channel + (label.object ? " " + *label.object : "");
    case Label::Kind::output:
      return "'" + label.channel + (label.object ? (label.bound ? " (new)" : " ") + *label.object : "");
  }
  return {};
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct Token {
  enum class Type { name, punct, end } type;
  std::string text;
  std::size_t line;
};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t line = 1;
  for (std::size_t i = 0; i < src.size();) {
    char c = src[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '#') {
      while (i < src.size() && src[i] != '\n') ++i;
    } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      out.push_back({Token::Type::name, std::string(src.substr(i, j - i)), line});
      i = j;
    } else if (std::string_view("().'<>,|+!=;").find(c) != std::string_view::npos) {
      out.push_back({Token::Type::punct, std::string(1, c), line});
      ++i;
    } else {
      throw ParseError("syntax error at line " + std::to_string(line) + ": unexpected character '" +
                           std::string(1, c) + "'",
                       line);
    }
  }
  out.push_back({Token::Type::end, "", line});
  return out;
}

bool is_keyword(const std::string& s) { return s == "tau" || s == "new" || s == "in" || s == "def"; }

class Parser {
public:
  Parser(std::vector<Token> tokens, const DefTable& defs) : toks_(std::move(tokens)), defs_(defs) {}

  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
  bool at_end() const { return peek().type == Token::Type::end; }
  bool is(const char* punct, std::size_t ahead = 0) const {
    return peek(ahead).type == Token::Type::punct && peek(ahead).text == punct;
  }
  bool is_word(const char* word) const { return peek().type == Token::Type::name && peek().text == word; }

  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    std::string near = t.type == Token::Type::end ? "end of input" : "'" + t.text + "'";
    throw ParseError("syntax error at line " + std::to_string(t.line) + " near " + near + ": " + msg, t.line);
  }

  void expect(const char* punct) {
    if (!is(punct)) fail(std::string("expected '") + punct + "'");
    ++pos_;
  }

  Name name() {
    if (peek().type != Token::Type::name || is_keyword(peek().text)) fail("expected a name");
    if (std::isdigit(static_cast<unsigned char>(peek().text[0])) && peek().text != "0") fail("names start with a letter");
    return toks_[pos_++].text;
  }

  std::vector<Name> name_list() {
    std::vector<Name> out;
    expect("(");
    if (!is(")")) {
      out.push_back(name());
      while (is(",")) {
        ++pos_;
        out.push_back(name());
      }
    }
    expect(")");
    return out;
  }

  Term term() {
    std::vector<Term> parts{sum_term()};
    while (is("|")) {
      ++pos_;
      parts.push_back(sum_term());
    }
    return parts.size() == 1 ? std::move(parts[0]) : Term{Kind::par, {}, {}, std::move(parts), {}};
  }

  Term sum_term() {
    std::size_t line = peek().line;
    std::vector<Term> parts{unary()};
    while (is("+")) {
      ++pos_;
      parts.push_back(unary());
    }
    if (parts.size() == 1) return std::move(parts[0]);
    for (const auto& p : parts)
      if (p.kind != Kind::input && p.kind != Kind::output && p.kind != Kind::tau)
        throw ParseError("syntax error at line " + std::to_string(line) + ": summands must be prefixed", line);
    return Term{Kind::sum, {}, {}, std::move(parts), {}};
  }

  Term unary() {
    const Token& t = peek();
    if (t.type == Token::Type::name && t.text == "0") {
      ++pos_;
      return nil();
    }
    if (is("(")) {
      ++pos_;
      Term inner = term();
      expect(")");
      return inner;
    }
    if (is("!")) {
      ++pos_;
      return bang(unary());
    }
    if (is("'")) {
      ++pos_;
      Name ch = name();
      std::optional<Name> payload;
      if (is("<")) {
        ++pos_;
        payload = name();
        expect(">");
      }
      expect(".");
      return output(ch, payload, unary());
    }
    if (is_word("tau")) {
      ++pos_;
      expect(".");
      return tau(unary());
    }
    if (is_word("new")) {
      ++pos_;
      std::vector<Name> names{name()};
      while (!is_word("in")) names.push_back(name());
      ++pos_;
      Term body = unary();
      for (auto it = names.rbegin(); it != names.rend(); ++it) body = restrict(*it, std::move(body));
      return body;
    }
    if (t.type != Token::Type::name) fail("expected a process");
    std::size_t line = t.line;
    Name head = name();
    if (is(".")) {
      ++pos_;
      return input(head, std::nullopt, unary());
    }
    if (!is("(")) fail("expected '.' or '(' after a name");
    std::vector<Name> args = name_list();
    if (is(".")) {
      if (args.size() != 1) fail("an input prefix binds exactly one name");
      ++pos_;
      return input(head, args[0], unary());
    }
    if (!defs_.knows(head, args.size())) {
      bool other_arity = false;
      for (const auto& [key, def] : defs_.definitions()) other_arity = other_arity || key.first == head;
      throw ParseError((other_arity ? "arity mismatch for '" : "unbound identifier '") + head + "' at line " +
                           std::to_string(line),
                       line);
    }
    return ident(head, std::move(args));
  }

  void definition(DefTable& defs) {
    ++pos_;  // def
    std::size_t line = peek().line;
    Name id = name();
    std::vector<Name> params = name_list();
    std::set<Name> distinct(params.begin(), params.end());
    if (distinct.size() != params.size())
      throw ParseError("duplicate parameter in '" + id + "' at line " + std::to_string(line), line);
    expect("=");
    // Allow recursion: the header is visible while parsing the body.
    defs.define(id, {params, nil()});
    Term body = term();
    expect(";");
    defs.define(id, {params, std::move(body)});
  }

  std::size_t pos_ = 0;

private:
  std::vector<Token> toks_;
  const DefTable& defs_;
};

}  // namespace

Term parse_pi(std::string_view text, DefTable& defs) {
  Parser p(lex(text), defs);
  while (p.is_word("def")) p.definition(defs);
  Term t = p.term();
  if (!p.at_end()) p.fail("unexpected trailing input");
  return t;
}

Term parse_term(std::string_view text, const DefTable& defs) {
  Parser p(lex(text), defs);
  Term t = p.term();
  if (!p.at_end()) p.fail("unexpected trailing input");
  return t;
}

}  // namespace rtmpi::pi
