#include <doctest.h>

#include "mjpot/graph.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>
#include <utility>
#include <vector>

using namespace mjpot;

namespace {

RateGraph two_state() {
  return RateGraph::create({"a", "b"}, {{"a", "b", 2.0}, {"b", "a", 1.0}});
}

}  // namespace

TEST_CASE("states keep their given order and arcs their rates") {
  const RateGraph g = two_state();
  CHECK(g.size() == 2);
  CHECK(g.state_name(0) == "a");
  CHECK(g.state_name(1) == "b");
  CHECK(g.state_index("b") == 1);
  CHECK(g.rate(0, 1) == 2.0);
  CHECK(g.rate(1, 0) == 1.0);
  CHECK(g.rate(0, 0) == 0.0);
  CHECK(g.exit_rate(0) == 2.0);
  CHECK(g.exit_rate(1) == 1.0);
  CHECK(g.max_rate() == 2.0);
  CHECK(g.notes().empty());
}

TEST_CASE("parallel arcs merge by summing rates and leave a note") {
  const RateGraph g = RateGraph::create(
      {"a", "b"}, {{"a", "b", 2.0}, {"a", "b", 0.5}, {"b", "a", 1.0}});
  CHECK(g.rate(0, 1) == 2.5);
  REQUIRE(g.notes().size() == 1);
  CHECK(g.notes()[0].find("merged parallel arc (a, b)") != std::string::npos);

  GraphOptions strict;
  strict.merge_parallel_arcs = false;
  CHECK_THROWS_AS(RateGraph::create({"a", "b"},
                                    {{"a", "b", 2.0}, {"a", "b", 0.5}, {"b", "a", 1.0}}, strict),
                  DuplicateArc);
}

TEST_CASE("malformed inputs are rejected with specific errors") {
  CHECK_THROWS_AS(RateGraph::create({"a"}, {}), FormatError);
  CHECK_THROWS_AS(RateGraph::create({"a", "a"}, {{"a", "a", 1.0}}), FormatError);
  CHECK_THROWS_AS(RateGraph::create({"a", ""}, {{"a", "b", 1.0}}), FormatError);
  CHECK_THROWS_AS(RateGraph::create({"a", "b"}, {{"a", "c", 1.0}}), UnknownState);
  CHECK_THROWS_AS(RateGraph::create({"a", "b"}, {{"a", "a", 1.0}, {"a", "b", 1.0}, {"b", "a", 1.0}}),
                  SelfLoop);
  CHECK_THROWS_AS(RateGraph::create({"a", "b"}, {{"a", "b", 0.0}, {"b", "a", 1.0}}),
                  NonpositiveRate);
  CHECK_THROWS_AS(RateGraph::create({"a", "b"}, {{"a", "b", -2.0}, {"b", "a", 1.0}}),
                  NonpositiveRate);
  const double nan = std::nan("");
  CHECK_THROWS_AS(RateGraph::create({"a", "b"}, {{"a", "b", nan}, {"b", "a", 1.0}}),
                  NonpositiveRate);
  CHECK_THROWS_AS(two_state().state_index("zz"), UnknownState);
}

TEST_CASE("graphs must be strongly connected and the error names a witness pair") {
  try {
    RateGraph::create({"a", "b", "c"}, {{"a", "b", 1.0}, {"b", "a", 1.0}, {"a", "c", 1.0}});
    FAIL("expected NotStronglyConnected");
  } catch (const NotStronglyConnected& e) {
    CHECK(std::string(e.what()).find("from c") != std::string::npos);
  }
}

TEST_CASE("connectivity check matches breadth-first reachability on random digraphs") {
  std::mt19937 rng(2026);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + trial % 5;
    std::vector<std::pair<int, int>> arcs;
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y)
        if (x != y && coin(rng) < 0.3) arcs.emplace_back(x, y);
    bool strong = true;
    for (int x = 0; x < n && strong; ++x) {
      const auto seen = oracle::reachable(n, arcs, x);
      for (int y = 0; y < n; ++y) strong = strong && seen[y];
    }
    const auto conn = check_strong_connectivity(n, arcs);
    CHECK(conn.strongly_connected == strong);
    if (!conn.strongly_connected) {
      const auto seen = oracle::reachable(n, arcs, conn.witness_from);
      CHECK_FALSE(seen[conn.witness_to]);
    }
  }
}

TEST_CASE("generator rows sum to zero and mirror the arc rates") {
  const RateGraph g = two_state();
  const Matrix l = generator(g).matrix();
  CHECK(l(0, 1) == 2.0);
  CHECK(l(1, 0) == 1.0);
  CHECK(l(0, 0) == -2.0);
  CHECK(l(1, 1) == -1.0);
  CHECK(norm_inf(l.rowwise().sum()) == 0.0);
  CHECK((laplacian(g) + l).norm() == 0.0);
}

TEST_CASE("generator matrix validation rejects non-generators") {
  Matrix bad(2, 2);
  bad << -1.0, 1.0, 2.0, -1.0;
  CHECK_THROWS_AS(GeneratorMatrix{bad}, FormatError);  // row sum
  bad << 1.0, -1.0, 1.0, -1.0;
  CHECK_THROWS_AS(GeneratorMatrix{bad}, FormatError);  // positive diagonal
  Matrix rect(2, 3);
  rect.setZero();
  CHECK_THROWS_AS(GeneratorMatrix{rect}, FormatError);
}

TEST_CASE("parametric rates follow prefactor times exp of minus lambda barrier") {
  const ParamRateGraph pg = ParamRateGraph::create(
      {"a", "b"}, {{"a", "b", 1.0, 1.0}, {"b", "a", 2.0, 0.0}});
  const RateGraph at0 = pg.evaluate_at(0.0);
  CHECK(at0.rate(0, 1) == 1.0);
  CHECK(at0.rate(1, 0) == 2.0);
  const RateGraph at = pg.evaluate_at(std::log(4.0));
  CHECK(at.rate(0, 1) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(at.rate(1, 0) == 2.0);  // zero barrier never moves
}

TEST_CASE("underflowing parametric rates clamp to the smallest normal with a note") {
  const ParamRateGraph pg = ParamRateGraph::create(
      {"a", "b"}, {{"a", "b", 1.0, 1.0}, {"b", "a", 2.0, 0.0}});
  const RateGraph g = pg.evaluate_at(1.0e6);
  CHECK(g.rate(0, 1) > 0.0);
  REQUIRE_FALSE(g.notes().empty());
  CHECK(g.notes().back().find("clamped") != std::string::npos);
  CHECK_THROWS_AS(pg.evaluate_at(std::nan("")), FormatError);
}

TEST_CASE("parametric duplicates are rejected rather than merged") {
  CHECK_THROWS_AS(ParamRateGraph::create({"a", "b"}, {{"a", "b", 1.0, 0.0},
                                                      {"a", "b", 1.0, 1.0},
                                                      {"b", "a", 1.0, 0.0}}),
                  DuplicateArc);
  CHECK_THROWS_AS(ParamRateGraph::create({"a", "b"}, {{"a", "b", 1.0, 0.0}}),
                  NotStronglyConnected);
}

TEST_CASE("centering test weighs values by the given distribution") {
  Vector rho(2);
  rho << 1.0 / 3.0, 2.0 / 3.0;
  Vector f(2);
  f << 2.0, -1.0;
  CHECK(stationary_mean(f, rho) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(is_centered(f, rho));
  f << 1.0, 1.0;
  CHECK_FALSE(is_centered(f, rho));
}
