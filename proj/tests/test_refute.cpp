#include <doctest.h>

#include <fstream>
#include <sstream>

#include "rtmpi/bisim.hpp"
#include "rtmpi/refute.hpp"

using namespace rtmpi;

namespace {

Rtm load(const std::string& name) {
  std::ifstream in(std::string(RTMPI_CORPUS_DIR) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_rtm(ss.str());
}

}  // namespace

TEST_CASE("refute: alphabet branch") {
  for (const char* name : {"parity.rtm", "nondet.rtm", "refute/echo.rtm"}) {
    CAPTURE(name);
    Rtm m = load(name);
    RefutationReport r = refute(m, 50'000);
    CHECK(r.branch == RefutationBranch::alphabet);
    CHECK(r.refuted());
    CHECK(r.probes.size() == m.states().size() * m.data().size() + 1);
    CHECK(std::any_of(r.probes.begin(), r.probes.end(), [](const ProbeOutcome& p) { return !p.in_alphabet; }));
  }
}

TEST_CASE("refute: pigeonhole collision") {
  for (auto [name, k] : {std::pair{"refute/pigeon_k1.rtm", 1}, std::pair{"refute/pigeon_k2.rtm", 2}}) {
    CAPTURE(name);
    Rtm m = load(name);
    RefutationReport r = refute(m, 50'000);
    REQUIRE(r.branch == RefutationBranch::pigeonhole);
    CHECK(r.trigger_count == 4u * (k + 1));
    CHECK(r.probes.size() == r.trigger_count + 1);
    REQUIRE(r.collision);
    auto [i, j] = *r.collision;
    CHECK(i < j);
    // Data are assigned round-robin, so the first repeat is y_{k+1} against y_1.
    CHECK(i == 0);
    CHECK(j == static_cast<std::size_t>(k));
    const Configuration& ci = *r.probes[i].reached;
    const Configuration& cj = *r.probes[j].reached;
    CHECK(ci.trigger() == cj.trigger());
    bool answers_yj = false;
    for (auto& [label, next] : step(m, ci)) answers_yj = answers_yj || label == ActionLabel::output(r.probes[j].name);
    CHECK(answers_yj);
    REQUIRE(r.play);
    CHECK(replay_play(*r.play));
    CHECK_FALSE(brute_force_check(r.play->left, r.play->right, false).equivalent());
    CHECK(format_report(r).find("branch: pigeonhole") != std::string::npos);
  }
}

TEST_CASE("refute: deadlocked candidate fails the simulation") {
  RefutationReport r = refute(load("refute/deadlock_full.rtm"), 1000);
  CHECK(r.branch == RefutationBranch::simulation_failure);
  CHECK_FALSE(r.refuted());
  CHECK_FALSE(r.probes.front().reached);
}

TEST_CASE("refute: report is deterministic") {
  Rtm m = load("refute/pigeon_k2.rtm");
  CHECK(format_report(refute(m, 1000)) == format_report(refute(m, 1000)));
}
