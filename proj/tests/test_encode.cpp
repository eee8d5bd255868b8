#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "rtmpi/bisim.hpp"
#include "rtmpi/encode.hpp"
#include "test_support.hpp"

using namespace rtmpi;

namespace {

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(RTMPI_CORPUS_DIR) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::vector<std::string> finite_corpus{"deadlock.rtm", "parity.rtm", "tauloop.rtm", "mt_cycle.rtm",
                                             "nondet.rtm"};

pi::Exploration explore_spec(const SpecBundle& spec, std::size_t max_states = 50'000) {
  return pi::explore(spec.term, spec.defs, {}, max_states, spec_label_map);
}

// Finds the continuation after the action prefix of the only rule.
const pi::Term* handler_suffix(const pi::Term& t) {
  if (t.kind == pi::Kind::output && t.channel == "write") return &t;
  for (const auto& c : t.children)
    if (auto found = handler_suffix(c)) return found;
  return nullptr;
}

FinTs single_transition() {
  return {Lts(2, 0, {{0, ActionLabel::input("a"), 1}}), {1, 2}};
}

}  // namespace

TEST_CASE("rtm_to_pi: handler suffix") {
  Rtm m = parse_rtm("states: s t\ninitial: s\ndata: _ d e\nactions: 'a\nrule: s 'a d / e L t\n");
  SpecBundle spec = rtm_to_pi(m);
  const pi::Term* suffix = handler_suffix(spec.servers);
  REQUIRE(suffix);
  const auto& names = spec.name_map;
  pi::Term expected = pi::output(
      "write", names.at("datum.e"),
      pi::output("mvL", std::nullopt,
                 pi::input("read", "f", pi::output(names.at("state.t"), std::nullopt,
                                                    pi::output("f", std::nullopt, pi::nil())))));
  CHECK(*suffix == expected);
  CHECK(pi::pretty(*suffix) == "'write<dt_e>.'mvL.read(f).'st_t.'f.0");
  CHECK(pi::pretty(spec.servers) == "!st_s.dt_d.'a.'write<dt_e>.'mvL.read(f).'st_t.'f.0");

  // Protocol, state and datum names are restricted; the action name is free.
  CHECK(pi::free_names(spec.term) == std::set<pi::Name>{"a"});
  std::set<pi::Name> image;
  for (const auto& [role, name] : names) image.insert(name);
  CHECK(image.size() == names.size());
}

TEST_CASE("rtm_to_pi: emitted source parses back") {
  Rtm m = parse_rtm(slurp("parity.rtm"));
  SpecBundle spec = rtm_to_pi(m);
  pi::DefTable defs;
  add_tape_family(defs);
  pi::Term back = pi::parse_pi(emit_spec(spec), defs);
  CHECK(pi::canonicalize(back) == pi::canonicalize(spec.term));
  CHECK(emit_name_map(spec).find("state.even = st_even\n") != std::string::npos);
}

TEST_CASE("rtm_to_pi: errors") {
  CHECK_THROWS_AS(rtm_to_pi(parse_rtm("states: s\ninitial: s\nactions: 'write\nrule: s 'write _ / _ R s\n")),
                  std::invalid_argument);
  CHECK_THROWS_AS(rtm_to_pi(parse_rtm("states: s\ninitial: s\ndata: _ blank\n")), std::invalid_argument);
  CHECK_THROWS_AS(rtm_to_pi(parse_rtm("states: s\ninitial: s\nactions: \"x y\"\n")), std::invalid_argument);
  CHECK_NOTHROW(rtm_to_pi(parse_rtm("states: s\ninitial: s\nactions: \"'x y\" x\n")));
}

TEST_CASE("rtm_to_pi: zero-rule machine") {
  Rtm m = parse_rtm("states: up\ninitial: up\n");
  pi::Exploration ex = explore_spec(rtm_to_pi(m));
  CHECK(ex.complete);
  CHECK(ex.lts.size() == 1);
  CHECK(ex.lts.transitions().empty());
  CHECK(bb_check(ex.lts, reachable_lts(m, 10).lts).equivalent());
}

TEST_CASE("rtm_to_pi: the protocol's silent chain") {
  Rtm m = parse_rtm(
      "states: up done\ninitial: up\ndata: _ 1\nactions: 'a 'b\n"
      "rule: up 'a _ / 1 R done\nrule: done 'b _ / _ L done\n");
  pi::Exploration ex = explore_spec(rtm_to_pi(m));
  REQUIRE(ex.complete);
  const Lts& lts = ex.lts;
  StateId s = 0;
  std::size_t kickoff = 0;
  for (;;) {
    auto [b, e] = lts.outgoing(s);
    REQUIRE(e - b == 1);
    if (!b->label.is_silent()) break;
    s = b->target;
    ++kickoff;
  }
  CHECK(kickoff == 2);  // state trigger, datum trigger
  auto [b, e] = lts.outgoing(s);
  CHECK(b->label == ActionLabel::output("a"));
  s = b->target;
  std::size_t chain = 0;
  for (;;) {
    auto [cb, ce] = lts.outgoing(s);
    REQUIRE(ce - cb == 1);
    if (!cb->label.is_silent()) {
      CHECK(cb->label == ActionLabel::output("b"));
      break;
    }
    s = cb->target;
    ++chain;
  }
  CHECK(chain == 5);  // write, move, read, state trigger, datum trigger
}

TEST_CASE("tape: write, move, read round trip") {
  pi::DefTable defs;
  add_tape_family(defs);
  pi::Term start = pi::parse_pi(
      "new write read mvL mvR b d in ('write<d>.'mvL.read(f).'o<f>.0 | Tape_0(write,read,mvL,mvR,b,b))", defs);
  pi::Term updated = pi::parse_pi("new write read mvL mvR b d in ('o<b>.0 | Tape_0(write,read,mvL,mvR,b,b,d))", defs);
  pi::Exploration ex = pi::explore(start, defs, {}, 100);
  REQUIRE(ex.complete);
  CHECK(std::find(ex.states.begin(), ex.states.end(), pi::canonicalize(updated)) != ex.states.end());

  // Outer blanks are trimmed: moving right over a blank head drops it.
  pi::Term walk = pi::parse_pi("new write read mvL mvR b in ('mvR.'mvR.'o.0 | Tape_0(write,read,mvL,mvR,b,b))", defs);
  pi::Exploration walked = pi::explore(walk, defs, {}, 100);
  pi::Term end = pi::parse_pi("new write read mvL mvR b in ('o.0 | Tape_0(write,read,mvL,mvR,b,b))", defs);
  CHECK(std::find(walked.states.begin(), walked.states.end(), pi::canonicalize(end)) != walked.states.end());
}

TEST_CASE("rtm_to_pi: corpus machines are dpbb-equivalent to their specifications") {
  for (const auto& file : finite_corpus) {
    CAPTURE(file);
    Rtm m = parse_rtm(slurp(file));
    RtmExploration machine = reachable_lts(m, 50'000);
    pi::Exploration spec = explore_spec(rtm_to_pi(m));
    REQUIRE(machine.complete);
    REQUIRE(spec.complete);
    CHECK(dpbb_check(machine.lts, spec.lts).equivalent());
  }
  Rtm unbounded = parse_rtm(slurp("unbounded.rtm"));
  CHECK(!explore_spec(rtm_to_pi(unbounded), 300).complete);
}

TEST_CASE("replay_steps: every machine step is matched") {
  for (const auto& file : finite_corpus) {
    CAPTURE(file);
    StepwiseReport report = replay_steps(parse_rtm(slurp(file)), 50'000);
    CHECK(report.complete);
    CHECK(report.failures.empty());
    CHECK(report.matched == report.steps);
  }
  CHECK(replay_steps(parse_rtm(slurp("parity.rtm")), 50'000).steps == 5);
}

TEST_CASE("mutation: dropping a handler branch is detected") {
  Rtm m = parse_rtm(slurp("parity.rtm"));
  for (std::size_t rule = 0; rule < m.rules().size(); ++rule) {
    CAPTURE(rule);
    pi::Exploration spec = explore_spec(rtm_to_pi(m, {rule}));
    CheckResult r = dpbb_check(reachable_lts(m, 1000).lts, spec.lts);
    CHECK(!r.equivalent());
    REQUIRE(r.counterexample);
    CHECK(replay_play(*r.counterexample));
    StepwiseReport report = replay_steps(m, 1000, {rule});
    CHECK(report.matched < report.steps);
  }
}

TEST_CASE("divergence fidelity") {
  for (const auto& file : finite_corpus) {
    CAPTURE(file);
    Rtm m = parse_rtm(slurp(file));
    bool silent_rules = false;
    for (const auto& r : m.rules()) silent_rules = silent_rules || r.action.is_silent();
    pi::Exploration spec = explore_spec(rtm_to_pi(m));
    bool machine_diverges = !mark_divergence(reachable_lts(m, 1000).lts).empty();
    CHECK(!mark_divergence(spec.lts).empty() == machine_diverges);
    if (!silent_rules) CHECK(mark_divergence(spec.lts).empty());
    if (file == "tauloop.rtm") CHECK(!mark_divergence(spec.lts).empty());
  }
}

TEST_CASE("relabelling device: dpbb verdict equals bb verdict after rule taus become i") {
  for (const auto& file : finite_corpus) {
    CAPTURE(file);
    Rtm m = parse_rtm(slurp(file));
    Rtm marked = relabel_internal(m);
    bool dpbb = dpbb_check(reachable_lts(m, 1000).lts, explore_spec(rtm_to_pi(m)).lts).equivalent();
    bool bb = bb_check(reachable_lts(marked, 1000).lts, explore_spec(rtm_to_pi(marked)).lts).equivalent();
    CHECK(dpbb == bb);
    CHECK(bb);
  }
}

TEST_CASE("ts_to_rtm: the three rule schemas") {
  Rtm m = ts_to_rtm(single_transition());
  Rtm expected = parse_rtm(
      "states: up s t\ninitial: up\ndata: _ 1 2\nactions: a\n"
      "rule: up tau _ / 1 R s\nrule: s tau _ / _ L t\nrule: t a 1 / 2 R s\n");
  CHECK(m == expected);
  CHECK(parse_rtm(emit_rtm(m)) == m);
}

TEST_CASE("ts_to_rtm: no transitions") {
  Rtm m = ts_to_rtm({Lts(1, 0, {}), {1}});
  CHECK(m.rules().size() == 2);
  RtmExploration ex = reachable_lts(m, 100);
  REQUIRE(ex.complete);
  std::size_t deadlocks = 0;
  for (StateId s = 0; s < ex.lts.size(); ++s) {
    auto [b, e] = ex.lts.outgoing(s);
    if (b == e) {
      ++deadlocks;
      CHECK(ex.configurations[s].state == "t");
    }
  }
  CHECK(deadlocks == 1);
}

TEST_CASE("ts_to_rtm: 3-state cycle and random systems") {
  Lts cycle(3, 0, {{0, ActionLabel::input("a"), 1}, {1, ActionLabel::input("b"), 2}, {2, ActionLabel::input("c"), 0}});
  FinTs ts{cycle, bfs_numbering(cycle)};
  CHECK(ts.phi == std::vector<std::uint64_t>{1, 2, 3});
  CHECK(ts_to_rtm(ts) == parse_rtm(slurp("mt_cycle.rtm")));
  CHECK(dpbb_check(reachable_lts(ts_to_rtm(ts), 1000).lts, cycle).equivalent());

  std::mt19937 rng(7);
  for (int k = 0; k < 10; ++k) {
    Lts t = testing::random_lts(rng, 6, 12);
    RtmExploration ex = reachable_lts(ts_to_rtm({t, bfs_numbering(t)}), 10'000);
    REQUIRE(ex.complete);
    CHECK(dpbb_check(ex.lts, t).equivalent());
  }
}

TEST_CASE("lazy_rule_oracle") {
  RuleOracle oracle = lazy_rule_oracle(single_transition());
  CHECK(oracle({"t", "1"}) == std::vector<Rule>{{"t", "1", ActionLabel::input("a"), "2", Move::right, "s"}});
  CHECK(oracle({"up", "1"}).empty());
  CHECK(oracle({"up", "2"}).empty());
  CHECK(oracle({"t", "7"}).empty());

  std::mt19937 rng(11);
  for (int k = 0; k < 20; ++k) {
    Lts t = testing::random_lts(rng, 4, 10);
    FinTs ts{t, bfs_numbering(t)};
    Rtm m = ts_to_rtm(ts);
    RuleOracle lazy = lazy_rule_oracle(ts);
    for (const auto& trigger : triggers(m).all) {
      std::vector<Rule> eager;
      for (const Rule* r : m.rules_for(trigger)) eager.push_back(*r);
      CHECK(lazy(trigger) == eager);
    }
  }
}

TEST_CASE("numbering files") {
  CHECK(parse_numbering("0 = 5\n# comment\n1 = 9\n", 2) == std::vector<std::uint64_t>{5, 9});
  auto line_of = [](const char* text, std::size_t n) -> std::size_t {
    try {
      parse_numbering(text, n);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("0 = 1\n1 = 1\n", 2) == 2);
  CHECK(line_of("0 = 1\n\n2 = 3\n", 2) == 3);
  CHECK(line_of("0 = x\n", 1) == 1);
  CHECK(line_of("0 = 1\n", 2) == 1);
  CHECK_THROWS_AS(ts_to_rtm({Lts(2, 0, {}), {1, 1}}), std::invalid_argument);

  Lts t(4, 2, {{2, ActionLabel::input("a"), 0}, {0, ActionLabel::input("a"), 3}});
  CHECK(bfs_numbering(t) == std::vector<std::uint64_t>{2, 4, 1, 3});
}
