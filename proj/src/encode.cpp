#include "rtmpi/encode.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <set>
#include <sstream>
#include <stdexcept>

#include "rtmpi/bisim.hpp"

namespace rtmpi {

namespace {

const char* const tape_prefix = "Tape_";
const pi::Name marker_channel = "i";

bool is_pi_name(const std::string& s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

// Letters and digits kept, everything else spelled as _xx (hex).
std::string mangle(const std::string& s) {
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c)) {
      out += static_cast<char>(c);
    } else {
      out += '_';
      out += hex[c >> 4];
      out += hex[c & 15];
    }
  }
  return out;
}

pi::Term tape_term(const std::vector<pi::Name>& protocol, std::vector<pi::Name> cells, std::size_t head) {
  const pi::Name& blank = protocol[4];
  while (head > 0 && cells.front() == blank) {
    cells.erase(cells.begin());
    --head;
  }
  while (cells.size() > head + 1 && cells.back() == blank) cells.pop_back();
  std::vector<pi::Name> args = protocol;
  args.insert(args.end(), cells.begin(), cells.end());
  return pi::ident(tape_prefix + std::to_string(head), std::move(args));
}

std::optional<pi::Term> resolve_tape(const pi::Name& name, const std::vector<pi::Name>& args) {
  std::size_t head = 0;
  try {
    std::size_t used = 0;
    head = std::stoul(name.substr(std::string(tape_prefix).size()), &used);
    if (used + std::string(tape_prefix).size() != name.size()) return std::nullopt;
  } catch (const std::exception&) {
    return std::nullopt;
  }
  if (args.size() < 6 || head >= args.size() - 5) return std::nullopt;
  std::vector<pi::Name> protocol(args.begin(), args.begin() + 5);
  std::vector<pi::Name> cells(args.begin() + 5, args.end());
  const pi::Name &write = protocol[0], &read = protocol[1], &left = protocol[2], &right = protocol[3];
  const pi::Name& blank = protocol[4];

  std::set<pi::Name> taken(args.begin(), args.end());
  pi::Name x = "x";
  for (std::size_t k = 1; taken.count(x); ++k) x = "x" + std::to_string(k);

  std::vector<pi::Term> branches;
  std::vector<pi::Name> written = cells;
  written[head] = x;
  branches.push_back(pi::input(write, x, tape_term(protocol, written, head)));
  if (head == 0) {
    std::vector<pi::Name> extended = cells;
    extended.insert(extended.begin(), blank);
    branches.push_back(pi::input(left, std::nullopt, tape_term(protocol, extended, 0)));
  } else {
    branches.push_back(pi::input(left, std::nullopt, tape_term(protocol, cells, head - 1)));
  }
  if (head + 1 == cells.size()) {
    std::vector<pi::Name> extended = cells;
    extended.push_back(blank);
    branches.push_back(pi::input(right, std::nullopt, tape_term(protocol, extended, head + 1)));
  } else {
    branches.push_back(pi::input(right, std::nullopt, tape_term(protocol, cells, head + 1)));
  }
  branches.push_back(pi::output(read, cells[head], tape_term(protocol, cells, head)));
  return pi::sum(std::move(branches));
}

std::vector<pi::Name> protocol_names(const SpecBundle& spec) {
  const auto& m = spec.name_map;
  return {m.at("protocol.write"), m.at("protocol.read"), m.at("protocol.mvL"), m.at("protocol.mvR"),
          m.at("datum." + blank_symbol)};
}

pi::Term action_prefix(const ActionLabel& a, const std::map<std::string, pi::Name>& names, pi::Term cont) {
  switch (a.kind) {
    case ActionLabel::Kind::silent:
      return pi::tau(std::move(cont));
    case ActionLabel::Kind::internal_marker:
      return pi::output(marker_channel, std::nullopt, std::move(cont));
    case ActionLabel::Kind::observable:
      break;
  }
  const pi::Name& ch = names.at("action." + to_string(a));
  if (a.polarity == Polarity::output) return pi::output(ch, a.payload, std::move(cont));
  return pi::input(ch, std::nullopt, std::move(cont));
}

}  // namespace

void add_tape_family(pi::DefTable& defs) { defs.add_family(tape_prefix, resolve_tape); }

SpecBundle rtm_to_pi(const Rtm& rtm, const EncodeOptions& options) {
  SpecBundle spec;
  add_tape_family(spec.defs);
  auto& names = spec.name_map;
  std::map<pi::Name, std::string> owner;
  auto claim = [&](const std::string& role, const pi::Name& name) {
    if (auto [it, fresh] = owner.emplace(name, role); !fresh)
      throw std::invalid_argument("name collision: '" + name + "' used for " + it->second + " and " + role);
    names[role] = name;
  };
  for (const char* p : {"write", "read", "mvL", "mvR"}) claim(std::string("protocol.") + p, p);
  for (const auto& s : rtm.states()) claim("state." + s, "st_" + mangle(s));
  for (const auto& d : rtm.data()) claim("datum." + d, d == blank_symbol ? "dt_blank" : "dt_" + mangle(d));
  for (const auto& a : rtm.actions()) {
    if (a.kind == ActionLabel::Kind::internal_marker) {
      claim("action.i", marker_channel);
      continue;
    }
    if (a.polarity == Polarity::input && a.payload)
      throw std::invalid_argument("input action '" + to_string(a) + "' carries a payload; not expressible");
    if (!is_pi_name(a.channel) || (a.payload && !is_pi_name(*a.payload)))
      throw std::invalid_argument("action '" + to_string(a) + "' is not a valid π name");
    auto prior = owner.find(a.channel);
    if (prior != owner.end() && prior->second.rfind("action.", 0) == 0) {
      names["action." + to_string(a)] = a.channel;
    } else {
      claim("action." + to_string(a), a.channel);
    }
    if (a.payload) {
      auto used = owner.find(*a.payload);
      if (used == owner.end()) {
        claim("payload." + *a.payload, *a.payload);
      } else if (used->second.rfind("action.", 0) != 0 && used->second.rfind("payload.", 0) != 0) {
        claim("payload." + *a.payload, *a.payload);  // reports the collision
      }
    }
  }

  // One server per control state; branches per datum, then per rule.
  std::vector<pi::Term> servers;
  for (const auto& s : rtm.states()) {
    std::vector<pi::Term> by_datum;
    for (const auto& d : rtm.data()) {
      std::vector<pi::Term> alternatives;
      for (const Rule* r : rtm.rules_for({s, d})) {
        auto index = static_cast<std::size_t>(r - rtm.rules().data());
        if (options.drop_rule == index) continue;
        pi::Term suffix = pi::output(
            "write", names.at("datum." + r->write),
            pi::output(r->move == Move::left ? "mvL" : "mvR", std::nullopt,
                       pi::input("read", "f",
                                 pi::output(names.at("state." + r->to), std::nullopt,
                                            pi::output("f", std::nullopt, pi::nil())))));
        alternatives.push_back(action_prefix(r->action, names, std::move(suffix)));
      }
      if (alternatives.empty()) continue;
      by_datum.push_back(pi::input(names.at("datum." + d), std::nullopt, pi::sum(std::move(alternatives))));
    }
    if (by_datum.empty()) continue;
    servers.push_back(pi::bang(pi::input(names.at("state." + s), std::nullopt, pi::sum(std::move(by_datum)))));
  }
  spec.servers = pi::par(servers);
  spec.term = spec_of_configuration(rtm, spec, rtm.initial_configuration());
  return spec;
}

pi::Term spec_of_configuration(const Rtm& rtm, const SpecBundle& spec, const Configuration& c) {
  const auto& names = spec.name_map;
  std::vector<pi::Name> cells;
  for (const auto& d : c.left) cells.push_back(names.at("datum." + d));
  cells.push_back(names.at("datum." + c.head));
  for (const auto& d : c.right) cells.push_back(names.at("datum." + d));

  pi::Term trigger = pi::output(names.at("state." + c.state), std::nullopt,
                                pi::output(names.at("datum." + c.head), std::nullopt, pi::nil()));
  pi::Term body = pi::par({std::move(trigger), spec.servers, tape_term(protocol_names(spec), cells, c.left.size())});

  std::vector<pi::Name> restricted{"write", "read", "mvL", "mvR"};
  for (const auto& s : rtm.states()) restricted.push_back(names.at("state." + s));
  for (const auto& d : rtm.data()) restricted.push_back(names.at("datum." + d));
  for (auto it = restricted.rbegin(); it != restricted.rend(); ++it) body = pi::restrict(*it, std::move(body));
  return body;
}

ActionLabel spec_label_map(const pi::Label& label) {
  if (label.kind == pi::Label::Kind::output && label.channel == marker_channel && !label.object)
    return ActionLabel::internal();
  return pi::default_label_map(label);
}

std::string emit_spec(const SpecBundle& spec) {
  std::string out = "# Tape_<i>(write,read,mvL,mvR,blank,cells...) is built in\n";
  out += pi::pretty(spec.term) + "\n";
  return out;
}

std::string emit_name_map(const SpecBundle& spec) {
  std::string out;
  for (const auto& [role, name] : spec.name_map) out += role + " = " + name + "\n";
  return out;
}

StepwiseReport replay_steps(const Rtm& rtm, std::size_t max_states, const EncodeOptions& options) {
  StepwiseReport report;
  RtmExploration machine = reachable_lts(rtm, max_states);
  SpecBundle spec = rtm_to_pi(rtm, options);
  pi::Exploration ex = pi::explore(spec.term, spec.defs, {}, max_states, spec_label_map);
  report.complete = machine.complete && ex.complete;
  if (!report.complete) return report;

  std::map<pi::Term, StateId> spec_id;
  for (StateId k = 0; k < ex.states.size(); ++k) spec_id.emplace(ex.states[k], k);
  CheckResult check = dpbb_check(machine.lts, ex.lts);
  std::vector<std::vector<char>> related(machine.lts.size(), std::vector<char>(ex.lts.size(), 0));
  for (const auto& [c, x] : check.witness) related[c][x] = 1;

  // States reachable from `from` by silent edges, optionally kept inside the
  // class of machine state `within`.
  auto silent_closure = [&](std::vector<StateId> from, std::optional<StateId> within) {
    std::vector<char> seen(ex.lts.size(), 0);
    std::deque<StateId> queue;
    std::vector<StateId> out;
    for (StateId s : from)
      if (!seen[s] && (!within || related[*within][s])) {
        seen[s] = 1;
        queue.push_back(s);
      }
    while (!queue.empty()) {
      StateId s = queue.front();
      queue.pop_front();
      out.push_back(s);
      auto [b, e] = ex.lts.outgoing(s);
      for (auto t = b; t != e; ++t)
        if (t->label.is_silent() && !seen[t->target] && (!within || related[*within][t->target])) {
          seen[t->target] = 1;
          queue.push_back(t->target);
        }
    }
    return out;
  };

  for (StateId k = 0; k < machine.lts.size(); ++k) {
    const Configuration& c = machine.configurations[k];
    auto found = spec_id.find(pi::canonicalize(spec_of_configuration(rtm, spec, c)));
    auto [b, e] = machine.lts.outgoing(k);
    if (found == spec_id.end()) {
      for (auto t = b; t != e; ++t) {
        ++report.steps;
        report.failures.push_back("specification of " + to_string(c) + " is not reachable");
      }
      continue;
    }
    std::vector<StateId> before = silent_closure({found->second}, k);
    for (auto t = b; t != e; ++t) {
      ++report.steps;
      std::vector<StateId> after_action;
      for (StateId s : before) {
        auto [sb, se] = ex.lts.outgoing(s);
        for (auto u = sb; u != se; ++u)
          if (u->label == t->label) after_action.push_back(u->target);
      }
      if (t->label.is_silent()) after_action.insert(after_action.end(), before.begin(), before.end());
      bool ok = false;
      for (StateId s : silent_closure(after_action, std::nullopt)) ok = ok || related[t->target][s];
      if (ok) {
        ++report.matched;
      } else {
        report.failures.push_back(to_string(c) + " -" + to_string(t->label) + "-> " +
                                  to_string(machine.configurations[t->target]) + " not matched");
      }
    }
  }
  return report;
}

std::vector<std::uint64_t> bfs_numbering(const Lts& lts) {
  std::vector<std::uint64_t> phi(lts.size(), 0);
  std::uint64_t next = 1;
  std::deque<StateId> queue{lts.initial()};
  phi[lts.initial()] = next++;
  while (!queue.empty()) {
    StateId s = queue.front();
    queue.pop_front();
    auto [b, e] = lts.outgoing(s);
    for (auto t = b; t != e; ++t)
      if (!phi[t->target]) {
        phi[t->target] = next++;
        queue.push_back(t->target);
      }
  }
  for (auto& p : phi)
    if (!p) p = next++;
  return phi;
}

std::vector<std::uint64_t> parse_numbering(std::string_view text, std::size_t num_states) {
  std::vector<std::optional<std::uint64_t>> phi(num_states);
  std::set<std::uint64_t> used;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& msg) { return ParseError(msg + " at line " + std::to_string(lineno), lineno); };
  auto natural = [&](std::string s) -> std::uint64_t {
    s.erase(0, s.find_first_not_of(" \t"));
    s.erase(s.find_last_not_of(" \t\r") + 1);
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
      throw fail("expected a natural number, got '" + s + "'");
    try {
      return std::stoull(s);
    } catch (const std::out_of_range&) {
      throw fail("number out of range");
    }
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw fail("expected 'state_index = natural'");
    std::uint64_t state = natural(line.substr(0, eq));
    std::uint64_t value = natural(line.substr(eq + 1));
    if (state >= num_states) throw fail("state index out of range");
    if (phi[state]) throw fail("state " + std::to_string(state) + " numbered twice");
    if (!used.insert(value).second) throw fail("number " + std::to_string(value) + " not injective");
    phi[state] = value;
  }
  std::vector<std::uint64_t> out;
  for (std::size_t s = 0; s < num_states; ++s) {
    if (!phi[s]) throw ParseError("state " + std::to_string(s) + " has no number at line " + std::to_string(lineno), lineno);
    out.push_back(*phi[s]);
  }
  return out;
}

namespace {

void validate(const FinTs& ts) {
  if (ts.phi.size() != ts.lts.size()) throw std::invalid_argument("numbering does not cover every state");
  std::set<std::uint64_t> distinct(ts.phi.begin(), ts.phi.end());
  if (distinct.size() != ts.phi.size()) throw std::invalid_argument("numbering is not injective");
}

Rule rule_a(const FinTs& ts) {
  return {"up", blank_symbol, ActionLabel::silent(), std::to_string(ts.phi[ts.lts.initial()]), Move::right, "s"};
}

Rule rule_b() { return {"s", blank_symbol, ActionLabel::silent(), blank_symbol, Move::left, "t"}; }

Rule rule_c(const FinTs& ts, const Transition& t) {
  return {"t", std::to_string(ts.phi[t.source]), t.label, std::to_string(ts.phi[t.target]), Move::right, "s"};
}

}  // namespace

Rtm ts_to_rtm(const FinTs& ts) {
  validate(ts);
  std::vector<std::uint64_t> numbers = ts.phi;
  std::sort(numbers.begin(), numbers.end());
  std::vector<std::string> data{blank_symbol};
  for (auto n : numbers) data.push_back(std::to_string(n));
  std::set<ActionLabel> labels;
  for (const auto& t : ts.lts.transitions())
    if (!t.label.is_silent()) labels.insert(t.label);
  std::vector<Rule> rules{rule_a(ts), rule_b()};
  for (const auto& t : ts.lts.transitions()) rules.push_back(rule_c(ts, t));
  return Rtm({"up", "s", "t"}, std::move(data), std::vector<ActionLabel>(labels.begin(), labels.end()),
             std::move(rules), "up");
}

RuleOracle lazy_rule_oracle(FinTs ts) {
  validate(ts);
  return [ts = std::move(ts)](const Trigger& trigger) -> std::vector<Rule> {
    if (trigger.datum == blank_symbol) {
      if (trigger.state == "up") return {rule_a(ts)};
      if (trigger.state == "s") return {rule_b()};
      return {};
    }
    if (trigger.state != "t") return {};
    std::vector<Rule> out;
    for (StateId p = 0; p < ts.lts.size(); ++p) {
      if (std::to_string(ts.phi[p]) != trigger.datum) continue;
      auto [b, e] = ts.lts.outgoing(p);
      for (auto t = b; t != e; ++t) out.push_back(rule_c(ts, *t));
    }
    return out;
  };
}

}  // namespace rtmpi
