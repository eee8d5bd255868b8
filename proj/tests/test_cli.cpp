#include <doctest.h>

#include "cli_support.hpp"
#include "rtmpi/lts.hpp"
#include "rtmpi/rtm.hpp"

using namespace rtmpi;
using rtmpi::testing::corpus;
using rtmpi::testing::run_cli;

TEST_CASE("cli: usage and parse errors exit 64") {
  CHECK(run_cli("").exit_code == 64);
  CHECK(run_cli("frobnicate").exit_code == 64);
  CHECK(run_cli("check only_one.aut").exit_code == 64);
  CHECK(run_cli("refute /nonexistent/file.rtm").exit_code == 64);
  CHECK(run_cli("check " + corpus("parity.rtm") + " " + corpus("parity.rtm")).exit_code == 64);
  CHECK(run_cli("verify-spec " + corpus("parity.rtm") + " --mode weak").exit_code == 64);
  CHECK(run_cli("explore " + corpus("ts/single.aut")).exit_code == 64);
}

TEST_CASE("cli: verify-spec") {
  auto ok = run_cli("verify-spec " + corpus("parity.rtm"));
  CHECK(ok.exit_code == 0);
  CHECK(ok.out.find("equivalent (dpbb)") != std::string::npos);

  auto broken = run_cli("verify-spec " + corpus("parity.rtm") + " --drop-rule 1");
  CHECK(broken.exit_code == 1);
  CHECK(broken.out.find("play replays: yes") != std::string::npos);

  auto cut = run_cli("verify-spec " + corpus("unbounded.rtm") + " --max-states 300");
  CHECK(cut.exit_code == 2);
  CHECK(cut.out.find("INCONCLUSIVE") != std::string::npos);
}

TEST_CASE("cli: check and minimize") {
  CHECK(run_cli("check " + corpus("ts/cycle3.aut") + " " + corpus("ts/cycle3.aut") + " --mode dpbb").exit_code == 0);
  auto diff = run_cli("check " + corpus("ts/single.aut") + " " + corpus("ts/cycle3.aut"));
  CHECK(diff.exit_code == 1);
  CHECK(diff.out.find("play replays: yes") != std::string::npos);
  auto min = run_cli("minimize " + corpus("ts/cycle3.aut"));
  CHECK(min.exit_code == 0);
  CHECK(parse_aut_string(min.out).size() == 3);
}

TEST_CASE("cli: encode ts2rtm and simulate") {
  auto enc = run_cli("encode ts2rtm " + corpus("ts/single.aut"));
  REQUIRE(enc.exit_code == 0);
  Rtm m = parse_rtm(enc.out);
  CHECK(m.rules().size() == 3);
  auto sim = run_cli("simulate " + corpus("mt_cycle.rtm") + " --steps 2");
  CHECK(sim.exit_code == 0);
  CHECK(sim.out == "(up, [_])\n  -tau-> (s, 1 [_])\n  -tau-> (t, [1])\n");
}

TEST_CASE("cli: encode rtm2pi then explore") {
  auto dir = std::filesystem::temp_directory_path() / ("rtmpi_cli_pi_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  auto pi_file = (dir / "parity.pi").string();
  auto map_file = (dir / "parity.map").string();
  CHECK(run_cli("encode rtm2pi " + corpus("parity.rtm") + " -o \"" + pi_file + "\" --name-map \"" + map_file + "\"")
            .exit_code == 0);
  CHECK(std::filesystem::exists(map_file));
  auto ex = run_cli("explore \"" + pi_file + "\"");
  CHECK(ex.exit_code == 0);
  CHECK(parse_aut_string(ex.out).size() == 26);
  CHECK(run_cli("explore \"" + pi_file + "\" --max-states 5").exit_code == 2);
  std::filesystem::remove_all(dir);
}

TEST_CASE("cli: refute exit codes and determinism") {
  auto a = run_cli("refute " + corpus("refute/pigeon_k2.rtm"));
  CHECK(a.exit_code == 0);
  CHECK(a.out.find("branch: pigeonhole") != std::string::npos);
  CHECK(a.out == run_cli("refute " + corpus("refute/pigeon_k2.rtm")).out);
  CHECK(run_cli("refute " + corpus("refute/echo.rtm")).exit_code == 0);
  auto dead = run_cli("refute " + corpus("refute/deadlock_full.rtm"));
  CHECK(dead.exit_code == 2);
  CHECK(dead.out.find("simulation-failure") != std::string::npos);
}

TEST_CASE("cli: simulate is deterministic for a seed") {
  auto a = run_cli("simulate " + corpus("nondet.rtm") + " --steps 20 --seed 5");
  CHECK(a.exit_code == 0);
  CHECK(a.out == run_cli("simulate " + corpus("nondet.rtm") + " --steps 20 --seed 5").out);
}
