#include <doctest.h>

#include "mjpot/bounds.hpp"
#include "mjpot/potential.hpp"
#include "mjpot/spectral.hpp"
#include "mjpot/validate.hpp"

#include <cmath>
#include <utility>
#include <vector>

using namespace mjpot;

namespace {

ScalarField field_of(std::initializer_list<double> values) {
  Vector v(static_cast<int>(values.size()));
  int i = 0;
  for (double x : values) v(i++) = x;
  return ScalarField(std::move(v));
}

RateGraph complete_four() {
  std::vector<ArcSpec> arcs;
  const std::vector<std::string> names = {"a", "b", "c", "d"};
  for (const auto& from : names)
    for (const auto& to : names)
      if (from != to) arcs.push_back({from, to, 1.0});
  return RateGraph::create(names, arcs);
}

}  // namespace

TEST_CASE("pair bound attains equality on the two-state example") {
  const auto pb = bounds::pair_bound(validate::two_state(), field_of({2.0 / 3.0, -1.0 / 3.0}), 0, 1);
  CHECK(pb.row.bound == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(pb.row.attained == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(pb.row.pass);
  CHECK(pb.tau_xy == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(pb.tau_yx == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pb.pair_acc_xy == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(pb.pair_acc_yx == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
  CHECK(pb.f_centered_sup == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("pair bound attains equality between ring neighbors") {
  const auto pb = bounds::pair_bound(validate::three_ring(), field_of({1.0, 0.0, -1.0}), 0, 1);
  CHECK(pb.row.bound == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pb.row.attained == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pb.row.pass);
}

TEST_CASE("pair bound holds across random instances") {
  for (int i = 0; i < 60; ++i) {
    const int n = 3 + i % 5;
    const RateGraph g = validate::random_irreducible_graph(n, 500u + i);
    const Vector rho = spectral::stationary_distribution(generator(g));
    const ScalarField f = validate::random_centered_field(g, rho, 900u + i);
    const int x = i % n;
    const int y = (i / 2 + 1 + x) % n;
    const auto pb = bounds::pair_bound(g, f, x, y);
    if (x == y) continue;
    CHECK(pb.row.pass);
    CHECK(pb.row.slack >= -1e-12 * std::max(pb.row.bound, 1.0));
  }
}

TEST_CASE("pair bounds chain along paths") {
  for (std::uint64_t seed : {171u, 172u}) {
    const RateGraph g = validate::random_irreducible_graph(5, seed);
    const Vector rho = spectral::stationary_distribution(generator(g));
    const ScalarField f = validate::random_centered_field(g, rho, seed + 3000);
    const ScalarField v = potential::quasipotential(g, f);
    Matrix b(5, 5);
    for (int x = 0; x < 5; ++x)
      for (int y = 0; y < 5; ++y)
        b(x, y) = x == y ? 0.0 : bounds::pair_bound(g, f, x, y).row.bound;
    for (int x = 0; x < 5; ++x)
      for (int y = 0; y < 5; ++y)
        for (int z = 0; z < 5; ++z)
          CHECK(std::abs(v(x) - v(z)) <= b(x, y) + b(y, z) + 1e-10);
  }
}

TEST_CASE("decomposed bound is exact when the source is a generator image") {
  const RateGraph g = validate::random_irreducible_graph(5, 181);
  Vector e(5);
  e << 0.4, -1.1, 0.3, 2.0, -0.6;
  const ScalarField shift{Vector(e)};
  const ScalarField f{Vector(generator(g).matrix() * e)};

  const auto dec = bounds::decomposed_bound(g, f, shift, {});
  CHECK(dec.pass);
  CHECK(dec.h_sup <= 1e-12);
  CHECK(dec.reconstruction_spread <= 1e-10);
  for (const auto& row : dec.rows) {
    CHECK(row.bound == doctest::Approx(std::abs(e(row.x) - e(row.y))).epsilon(1e-9));
    CHECK(row.attained == doctest::Approx(row.bound).epsilon(1e-9));
  }
}

TEST_CASE("decomposed bound with no shift reduces to the weighted passage spread") {
  const RateGraph g = validate::random_irreducible_graph(4, 191);
  const Vector rho = spectral::stationary_distribution(generator(g));
  const ScalarField f = validate::random_centered_field(g, rho, 192);
  const ScalarField zero{Vector(Vector::Zero(4))};
  const std::vector<int> all = {0, 1, 2, 3};

  const auto dec = bounds::decomposed_bound(g, f, zero, all);
  const auto tau = potential::mfpt_matrix(g);
  CHECK(dec.pass);
  for (const auto& row : dec.rows) {
    double pairing = 0.0;
    for (int z = 0; z < 4; ++z) pairing += rho(z) * std::abs(tau(row.x, z) - tau(row.y, z));
    CHECK(row.bound == doctest::Approx(dec.h_sup * pairing).epsilon(1e-12));
    CHECK(row.attained <= row.bound + 1e-12 * std::max(row.bound, 1.0));
  }
}

TEST_CASE("decomposition residual outside the declared support is rejected by name") {
  const RateGraph g = validate::three_ring();
  const ScalarField f = field_of({1.0, 0.0, -1.0});
  const ScalarField zero{Vector(Vector::Zero(3))};
  try {
    bounds::decomposed_bound(g, f, zero, {0});  // f itself lives on all three states
    FAIL("expected DecompositionInvalid");
  } catch (const DecompositionInvalid& e) {
    CHECK(std::string(e.what()).find("state") != std::string::npos);
  }
}

TEST_CASE("global cap worked values and the zero source") {
  const auto two = bounds::global_bound(validate::two_state(), field_of({2.0 / 3.0, -1.0 / 3.0}));
  CHECK(two.row.bound == doctest::Approx(4.0 / 9.0).epsilon(1e-12));
  CHECK(two.row.attained == doctest::Approx(2.0 / 9.0).epsilon(1e-10));
  CHECK(two.row.pass);
  CHECK(two.two_tree_cap == doctest::Approx(2.0 / 9.0).epsilon(1e-12));
  CHECK(two.total_tree_weight == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(two.best_tree_weight == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(two.max_rate == 2.0);

  const auto ring = bounds::global_bound(validate::three_ring(), field_of({1.0, 0.0, -1.0}));
  CHECK(ring.row.bound == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ring.row.attained == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
  CHECK(ring.row.pass);

  const auto zero = bounds::global_bound(validate::two_state(), field_of({0.0, 0.0}));
  CHECK(zero.row.bound == 0.0);
  CHECK(zero.row.attained <= 1e-15);
  CHECK(zero.row.pass);
}

TEST_CASE("the rate-power cap is not a bound on dense graphs but the two-tree cap is") {
  // On the complete graph at unit rates the generator acts as -n on centered
  // fields, so V = f/4 exactly while the rate-power cap is n/W = 1/16.
  const auto k4 = bounds::global_bound(complete_four(), field_of({3.0, -1.0, -1.0, -1.0}));
  CHECK(k4.row.attained == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(k4.row.bound == doctest::Approx(3.0 / 16.0).epsilon(1e-12));
  CHECK_FALSE(k4.row.pass);
  CHECK(k4.two_tree_cap == doctest::Approx(2.25).epsilon(1e-12));
  CHECK(k4.row.attained <= k4.two_tree_cap);
}

TEST_CASE("the two-tree cap holds across random instances") {
  for (int i = 0; i < 60; ++i) {
    const int n = 3 + i % 6;
    const RateGraph g = validate::random_irreducible_graph(n, 2000u + i);
    const Vector rho = spectral::stationary_distribution(generator(g));
    const ScalarField f = validate::random_centered_field(g, rho, 2500u + i);
    const auto glob = bounds::global_bound(g, f);
    CHECK(glob.row.attained <=
          glob.two_tree_cap + 1e-12 * std::max(glob.two_tree_cap, glob.row.attained));
    CHECK(glob.best_tree_weight <= glob.total_tree_weight * (1 + 1e-12));
  }
}

TEST_CASE("sweep rows stay under the prefactor cap with a constant witness") {
  const ParamRateGraph pg = validate::sweep_example();
  const bounds::FieldSpec source = bounds::fixed_field(field_of({1.0, 0.0, -1.0}));
  std::vector<double> grid;
  for (double lambda = 0.0; lambda <= 20.0; lambda += 2.0) grid.push_back(lambda);

  const auto sweep = bounds::uniform_bound_sweep(pg, source, grid);
  CHECK(sweep.rows.size() == grid.size());
  CHECK(sweep.pass);
  CHECK(sweep.well_conditioned);
  CHECK(sweep.min_best_tree == doctest::Approx(6.0).epsilon(1e-12));
  for (std::size_t i = 0; i < sweep.rows.size(); ++i) {
    const auto& row = sweep.rows[i];
    CHECK(row.lambda == grid[i]);
    CHECK(row.pass);
    CHECK(row.clamped_rates == 0);
    CHECK(row.best_tree_weight == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(row.bound <= 3.0 * (1 + 1e-12));
    CHECK(row.attained <= row.bound + 1e-12 * std::max(row.bound, 1.0));
  }
}

TEST_CASE("clamped rates are counted and survive when the zero-barrier arcs stay connected") {
  const ParamRateGraph pg = ParamRateGraph::create({"a", "b", "c"}, {{"a", "b", 2.0, 0.0},
                                                                     {"b", "a", 3.0, 0.0},
                                                                     {"a", "c", 1.0, 0.0},
                                                                     {"c", "a", 1.0, 0.0},
                                                                     {"b", "c", 1.0, 1.0}});
  const bounds::FieldSpec source = bounds::fixed_field(field_of({1.0, 0.0, -1.0}));
  const auto sweep = bounds::uniform_bound_sweep(pg, source, {0.0, 800.0});
  REQUIRE(sweep.rows.size() == 2);
  CHECK(sweep.rows[0].clamped_rates == 0);
  CHECK(sweep.rows[1].clamped_rates == 1);
  for (const auto& row : sweep.rows) {
    CHECK(row.best_tree_weight == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(std::isfinite(row.attained));
    CHECK(row.pass);
  }
  CHECK(sweep.well_conditioned);
}

TEST_CASE("a sweep refuses to emit rows once the stationary mass underflows") {
  // At lambda = 800 every arc into one state has clamped, so that state's
  // stationary mass is below the denormal range and the solve reports the
  // rank deficiency instead of returning a silent zero.
  const ParamRateGraph pg = validate::sweep_example();
  const bounds::FieldSpec source = bounds::fixed_field(field_of({1.0, 0.0, -1.0}));
  CHECK_THROWS_AS(bounds::uniform_bound_sweep(pg, source, {800.0}), SingularBeyondNullity);
}

TEST_CASE("sweeps refuse an empty grid") {
  const ParamRateGraph pg = validate::sweep_example();
  const bounds::FieldSpec source = bounds::fixed_field(field_of({1.0, 0.0, -1.0}));
  CHECK_THROWS_AS(bounds::uniform_bound_sweep(pg, source, {}), InputError);
}
