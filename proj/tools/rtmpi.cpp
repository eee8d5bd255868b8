// rtmpi: command-line workbench for reactive Turing machines and the pi-calculus.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "rtmpi/bisim.hpp"
#include "rtmpi/encode.hpp"
#include "rtmpi/lts.hpp"
#include "rtmpi/pi.hpp"
#include "rtmpi/refute.hpp"
#include "rtmpi/rtm.hpp"

using namespace rtmpi;

namespace {

enum Exit : int { ok = 0, inequivalent = 1, inconclusive = 2, usage = 64 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
}

const char* side_name(Side s) { return s == Side::left ? "left" : "right"; }

std::string format_play(const DistinguishingPlay& play) {
  std::ostringstream out;
  out << "play (" << play.left.size() << " left states, " << play.right.size() << " right states, "
      << play.nodes.size() << " nodes):\n";
  for (std::size_t k = 0; k < play.nodes.size(); ++k) {
    const PlayNode& n = play.nodes[k];
    out << "  [" << k << "] at (" << n.left << ", " << n.right << ") attacker " << side_name(n.attacker) << " plays "
        << n.move.source << " -" << to_string(n.move.label) << "-> " << n.move.target;
    if (n.responses.empty()) {
      out << "; no answer\n";
      continue;
    }
    out << '\n';
    for (const auto& r : n.responses) {
      if (r.stutter)
        out << "      answer stutter at " << r.to;
      else
        out << "      answer via " << r.via << " to " << r.to;
      out << " refuted by [" << r.refuted_by << "]\n";
    }
  }
  out << "play replays: " << (replay_play(play) ? "yes" : "no") << '\n';
  return out.str();
}

std::string format_lts_text(const pi::Exploration& ex) {
  std::ostringstream out;
  out << "states " << ex.lts.size() << (ex.complete ? "" : " (truncated)") << '\n';
  for (StateId s = 0; s < ex.lts.size(); ++s) {
    out << s << ": " << pi::pretty(ex.states[s]) << '\n';
    auto [b, e] = ex.lts.outgoing(s);
    for (auto t = b; t != e; ++t) out << "  -" << to_string(t->label) << "-> " << t->target << '\n';
  }
  return out.str();
}

struct Config {
  std::size_t max_states = 50'000;
  std::size_t universe = 0;
  std::string mode = "dpbb";
  std::uint64_t seed = 1;
  std::string format = "aut";
};

CheckResult check_mode(const std::string& mode, const Lts& left, const Lts& right) {
  return mode == "bb" ? bb_check(left, right) : dpbb_check(left, right);
}

int cmd_simulate(const std::string& file, std::size_t steps, std::uint64_t seed) {
  Rtm m = parse_rtm(read_file(file));
  std::mt19937_64 rng(seed);
  Configuration c = m.initial_configuration();
  std::cout << to_string(c) << '\n';
  for (std::size_t k = 0; k < steps; ++k) {
    auto next = step(m, c);
    if (next.empty()) {
      std::cout << "deadlock\n";
      break;
    }
    std::uniform_int_distribution<std::size_t> pick(0, next.size() - 1);
    auto& [label, to] = next[pick(rng)];
    std::cout << "  -" << to_string(label) << "-> " << to_string(to) << '\n';
    c = to;
  }
  return ok;
}

int cmd_rtm2pi(const std::string& file, const std::string& out, const std::string& name_map) {
  Rtm m = parse_rtm(read_file(file));
  SpecBundle spec = rtm_to_pi(m);
  write_output(out, emit_spec(spec));
  if (!name_map.empty()) write_output(name_map, emit_name_map(spec));
  return ok;
}

int cmd_ts2rtm(const std::string& file, const std::string& phi_file, const std::string& out) {
  Lts lts = parse_aut_string(read_file(file));
  FinTs ts{lts, phi_file.empty() ? bfs_numbering(lts) : parse_numbering(read_file(phi_file), lts.size())};
  write_output(out, emit_rtm(ts_to_rtm(ts)));
  return ok;
}

int cmd_explore(const std::string& file, const Config& cfg, const std::string& out) {
  pi::DefTable defs;
  add_tape_family(defs);
  pi::Term term = pi::parse_pi(read_file(file), defs);
  std::set<pi::Name> universe = pi::free_names(term);
  for (std::size_t k = 1; k <= cfg.universe; ++k) universe.insert("y" + std::to_string(k));
  pi::Exploration ex = pi::explore(term, defs, universe, cfg.max_states, spec_label_map);
  write_output(out, cfg.format == "text" ? format_lts_text(ex) : emit_aut_string(ex.lts));
  if (!ex.complete) {
    std::cerr << "INCONCLUSIVE: exploration cut at " << cfg.max_states << " states\n";
    return inconclusive;
  }
  return ok;
}

int cmd_check(const std::string& a, const std::string& b, const Config& cfg) {
  Lts left = parse_aut_string(read_file(a));
  Lts right = parse_aut_string(read_file(b));
  CheckResult r = check_mode(cfg.mode, left, right);
  if (r.equivalent()) {
    std::cout << "equivalent (" << cfg.mode << ")\n";
    return ok;
  }
  std::cout << "inequivalent (" << cfg.mode << ")\n";
  if (r.counterexample) std::cout << format_play(*r.counterexample);
  return inequivalent;
}

int cmd_minimize(const std::string& file, const Config& cfg, const std::string& out) {
  Lts lts = parse_aut_string(read_file(file));
  write_output(out, emit_aut_string(minimize(lts, cfg.mode == "dpbb")));
  return ok;
}

int cmd_verify_spec(const std::string& file, const Config& cfg, std::optional<std::size_t> drop_rule) {
  Rtm m = parse_rtm(read_file(file));
  RtmExploration machine = reachable_lts(m, cfg.max_states);
  std::cout << "machine states: " << machine.lts.size() << (machine.complete ? "" : " (truncated)") << '\n';
  if (!machine.complete) {
    std::cout << "INCONCLUSIVE: machine exploration cut at " << cfg.max_states << " states\n";
    return inconclusive;
  }
  EncodeOptions options;
  options.drop_rule = drop_rule;
  SpecBundle spec = rtm_to_pi(m, options);
  pi::Exploration ex = pi::explore(spec.term, spec.defs, {}, cfg.max_states, spec_label_map);
  std::cout << "specification states: " << ex.lts.size() << (ex.complete ? "" : " (truncated)") << '\n';
  if (!ex.complete) {
    std::cout << "INCONCLUSIVE: specification exploration cut at " << cfg.max_states << " states\n";
    return inconclusive;
  }
  CheckResult r = check_mode(cfg.mode, machine.lts, ex.lts);
  if (r.equivalent()) {
    std::cout << "equivalent (" << cfg.mode << ")\n";
    return ok;
  }
  std::cout << "inequivalent (" << cfg.mode << ")\n";
  if (r.counterexample) std::cout << format_play(*r.counterexample);
  return inequivalent;
}

int cmd_refute(const std::string& file, const Config& cfg) {
  Rtm m = parse_rtm(read_file(file));
  RefutationReport r = refute(m, cfg.max_states);
  std::cout << format_report(r);
  if (r.play) std::cout << format_play(*r.play);
  return r.refuted() ? ok : inconclusive;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reactive Turing machines and the pi-calculus"};
  app.require_subcommand(1);
  Config cfg;
  auto add_bound = [&](CLI::App* sub) {
    sub->add_option("--max-states", cfg.max_states, "state bound for explorations")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  };
  auto add_mode = [&](CLI::App* sub) {
    sub->add_option("--mode", cfg.mode, "equivalence")->check(CLI::IsMember({"bb", "dpbb"}))->capture_default_str();
  };
  std::string in, in2, out, aux;
  std::size_t steps = 10;
  std::optional<std::size_t> drop_rule;

  auto* simulate = app.add_subcommand("simulate", "seeded random walk of an RTM");
  simulate->add_option("rtm", in, "RTM file")->required();
  simulate->add_option("--steps", steps)->capture_default_str();
  simulate->add_option("--seed", cfg.seed)->capture_default_str();

  auto* encode = app.add_subcommand("encode", "translations");
  encode->require_subcommand(1);
  auto* rtm2pi = encode->add_subcommand("rtm2pi", "RTM to pi-calculus specification");
  rtm2pi->add_option("rtm", in, "RTM file")->required();
  rtm2pi->add_option("-o,--output", out);
  rtm2pi->add_option("--name-map", aux, "write role = name lines here");
  auto* ts2rtm = encode->add_subcommand("ts2rtm", "finite transition system (.aut) to RTM");
  ts2rtm->add_option("aut", in, ".aut file")->required();
  ts2rtm->add_option("--phi", aux, "state numbering file");
  ts2rtm->add_option("-o,--output", out);

  auto* explore = app.add_subcommand("explore", "pi term to LTS");
  explore->add_option("pi", in, "pi source file")->required();
  add_bound(explore);
  explore->add_option("--universe", cfg.universe, "extra input names y1..yK")->capture_default_str();
  explore->add_option("--format", cfg.format)->check(CLI::IsMember({"aut", "text"}))->capture_default_str();
  explore->add_option("-o,--output", out);

  auto* check = app.add_subcommand("check", "equivalence of two .aut files");
  check->add_option("left", in, ".aut file")->required();
  check->add_option("right", in2, ".aut file")->required();
  add_mode(check);

  auto* minimize_cmd = app.add_subcommand("minimize", "quotient of an .aut file");
  minimize_cmd->add_option("aut", in, ".aut file")->required();
  add_mode(minimize_cmd);
  minimize_cmd->add_option("-o,--output", out);

  auto* verify = app.add_subcommand("verify-spec", "machine against its pi-calculus specification");
  verify->add_option("rtm", in, "RTM file")->required();
  add_bound(verify);
  add_mode(verify);
  verify->add_option("--drop-rule", drop_rule, "leave out the handler of this rule index")->group("");

  auto* refute_cmd = app.add_subcommand("refute", "refute an RTM claimed equivalent to x(y).'y.0");
  refute_cmd->add_option("rtm", in, "candidate RTM file")->required();
  add_bound(refute_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return usage;
  }

  try {
    if (*simulate) return cmd_simulate(in, steps, cfg.seed);
    if (*rtm2pi) return cmd_rtm2pi(in, out, aux);
    if (*ts2rtm) return cmd_ts2rtm(in, aux, out);
    if (*explore) return cmd_explore(in, cfg, out);
    if (*check) return cmd_check(in, in2, cfg);
    if (*minimize_cmd) return cmd_minimize(in, cfg, out);
    if (*verify) return cmd_verify_spec(in, cfg, drop_rule);
    if (*refute_cmd) return cmd_refute(in, cfg);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return usage;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return usage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return usage;
  } catch (const std::length_error& e) {
    std::cerr << "INCONCLUSIVE: " << e.what() << '\n';
    return inconclusive;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return usage;
  }
  return usage;
}
