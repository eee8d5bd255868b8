#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "rtmpi/lts.hpp"
#include "test_support.hpp"

using namespace rtmpi;

TEST_CASE("parse_aut: minimal file with one silent edge") {
  Lts lts = parse_aut_string("des (0,1,2)\n(0,\"tau\",1)\n");
  CHECK(lts.size() == 2);
  CHECK(lts.initial() == 0);
  REQUIRE(lts.transitions().size() == 1);
  CHECK(lts.transitions()[0].label.is_silent());
}

TEST_CASE("parse_aut: observable outputs and label grammar") {
  Lts lts = parse_aut_string("des (0,2,2)\n(0,\"'y1\",1)\n(0,\"'y2\",1)\n");
  REQUIRE(lts.transitions().size() == 2);
  CHECK(lts.transitions()[0].label == ActionLabel::output("y1"));
  CHECK(lts.transitions()[1].label == ActionLabel::output("y2"));

  CHECK(parse_label("i") == ActionLabel::internal());
  CHECK(parse_label("x y1") == ActionLabel::input("x", "y1"));
  CHECK(parse_label("'x n") == ActionLabel::output("x", "n"));
  CHECK(parse_label("a") == ActionLabel::input("a"));
  CHECK_THROWS_AS(parse_label("'i"), std::invalid_argument);
  CHECK_THROWS_AS(parse_label("i z"), std::invalid_argument);
}

TEST_CASE("parse_aut: errors carry line numbers") {
  try {
    parse_aut_string("des (0,1,1)\n(0,\"a\",5)\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()) == "state index out of range at line 2");
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_aut_string("dse (0,1,1)\n"), ParseError);
  CHECK_THROWS_AS(parse_aut_string("des (0,2,2)\n(0,\"a\",1)\n"), ParseError);
  CHECK_THROWS_AS(parse_aut_string("des (0,1,2)\n(0,\"'i\",1)\n"), ParseError);
  CHECK_THROWS_AS(parse_aut_string("des (0,1,2)\n(0,a,1)\n"), ParseError);
}

TEST_CASE("emit_aut: single state") {
  CHECK(emit_aut_string(Lts(1, 0, {})) == "des (0,0,1)\n");
}

TEST_CASE("emit_aut renumbers breadth-first from the initial state") {
  Lts lts(3, 2, {{2, ActionLabel::output("a"), 0}, {0, ActionLabel::silent(), 1}});
  CHECK(emit_aut_string(lts) == "des (0,2,3)\n(0,\"'a\",1)\n(1,\"tau\",2)\n");
}

namespace {

/// Brute-force isomorphism: try every bijection (fine for <= 8 states).
bool isomorphic(const Lts& a, const Lts& b) {
  if (a.size() != b.size() || a.transitions().size() != b.transitions().size()) return false;
  std::vector<StateId> perm(a.size());
  for (StateId i = 0; i < perm.size(); ++i) perm[i] = i;
  std::set<Transition> target(b.transitions().begin(), b.transitions().end());
  do {
    if (perm[a.initial()] != b.initial()) continue;
    bool ok = true;
    for (const auto& t : a.transitions())
      if (!target.count({perm[t.source], t.label, perm[t.target]})) {
        ok = false;
        break;
      }
    if (ok) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

}  // namespace

TEST_CASE("emit/parse round trip is an isomorphism on random systems") {
  std::mt19937 rng(7);
  for (int i = 0; i < 100; ++i) {
    Lts lts = testing::random_lts(rng, 7, 14);
    Lts back = parse_aut_string(emit_aut_string(lts));
    CHECK(back == canonical_renumbering(lts));
    CHECK(isomorphic(lts, back));
    CHECK(canonical_renumbering(back) == back);
  }
  Lts two = parse_aut_string("des (0,2,2)\n(0,\"'y1\",1)\n(0,\"'y2\",1)\n");
  CHECK(isomorphic(two, parse_aut_string(emit_aut_string(two))));
}

TEST_CASE("mark_divergence") {
  SUBCASE("silent self-loop") {
    Lts lts(1, 0, {{0, ActionLabel::silent(), 0}});
    CHECK(mark_divergence(lts) == std::vector<StateId>{0});
  }
  SUBCASE("silent chain without cycle") {
    Lts lts = testing::chain({ActionLabel::silent(), ActionLabel::silent()});
    CHECK(mark_divergence(lts).empty());
  }
  SUBCASE("edge into a silent two-cycle") {
    Lts lts(4, 0,
            {{0, ActionLabel::silent(), 1},
             {1, ActionLabel::silent(), 2},
             {2, ActionLabel::silent(), 1},
             {3, ActionLabel::input("a"), 0}});
    CHECK(mark_divergence(lts) == std::vector<StateId>{0, 1, 2});
  }
}

TEST_CASE("mark_divergence agrees with a reachability-and-cycle oracle") {
  std::mt19937 rng(11);
  for (int i = 0; i < 200; ++i) {
    Lts lts = testing::random_lts(rng);
    const std::size_t n = lts.size();
    // reach[s][t]: t reachable from s by one or more silent steps.
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (const auto& t : lts.transitions())
      if (t.label.is_silent()) reach[t.source][t.target] = true;
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
          if (reach[a][k] && reach[k][b]) reach[a][b] = true;
    std::vector<StateId> expected;
    for (StateId s = 0; s < n; ++s) {
      bool div = reach[s][s];
      for (StateId c = 0; c < n && !div; ++c) div = reach[s][c] && reach[c][c];
      if (div) expected.push_back(s);
    }
    CHECK(mark_divergence(lts) == expected);
  }
}

TEST_CASE("relabel") {
  const ActionLabel tau = ActionLabel::silent(), i = ActionLabel::internal();
  Lts loop(1, 0, {{0, tau, 0}});
  Lts marked = relabel(loop, tau, i);
  CHECK(marked.transitions()[0].label == i);
  CHECK(mark_divergence(marked).empty());
  CHECK(relabel(marked, i, tau) == loop);

  Lts visible(2, 0, {{0, ActionLabel::output("a"), 1}});
  CHECK(relabel(visible, tau, i) == visible);
}
