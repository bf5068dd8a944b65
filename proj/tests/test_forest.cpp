#include <doctest.h>

#include "mjpot/forest.hpp"
#include "mjpot/validate.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

using namespace mjpot;
using forest::ForestOptions;
using forest::Route;

namespace {

constexpr double kTight = 1e-12;

bool close(double a, double b, double rel = kTight) { return rel_close(a, b, rel); }

void check_tables_against_subsets(const RateGraph& g) {
  const auto forests = oracle::all_forests(g);
  const int n = g.size();
  const auto t = forest::enumerate_tables(g);

  for (int x = 0; x < n; ++x)
    CHECK(close(t.tree_weight(x), oracle::tree_weight(forests, n, x)));
  CHECK(close(t.total_tree_weight, t.tree_weight.sum()));

  for (int m = 0; m < n; ++m) CHECK(close(t.graded(m), oracle::graded_weight(forests, m)));

  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      CHECK(close(t.pair_same(x, y), oracle::family_weight(forests, x, y, n - 2)));
      CHECK(close(t.pair_split(x, y), oracle::split_weight(forests, n, x, y)));
      for (int m = 0; m < n; ++m)
        CHECK(close(t.graded_pair[m](x, y), oracle::family_weight(forests, x, y, m)));
    }
}

}  // namespace

TEST_CASE("tree and forest weights match the arc-subset sweep on pinned instances") {
  check_tables_against_subsets(validate::two_state());
  check_tables_against_subsets(validate::three_ring());
  check_tables_against_subsets(validate::complete_three());
}

TEST_CASE("tree and forest weights match the arc-subset sweep on random graphs") {
  for (std::uint64_t seed = 11; seed <= 16; ++seed) {
    const int n = 3 + static_cast<int>(seed % 3);
    const RateGraph g = validate::random_irreducible_graph(n, seed);
    if (g.arcs().size() > 22) continue;
    check_tables_against_subsets(g);
  }
}

TEST_CASE("two-state tree weights are 1 and 2 with graded weights 1 and 3") {
  const RateGraph g = validate::two_state();
  const auto [w, total] = forest::tree_weight_vector(g);
  CHECK(w.values(0) == 1.0);
  CHECK(w.values(1) == 2.0);
  CHECK(total == 3.0);
  const Vector graded = forest::graded_forest_weights(g);
  CHECK(graded(0) == 1.0);
  CHECK(graded(1) == 3.0);
}

TEST_CASE("ring tree weights are uniform and the complete graph has three trees per root") {
  const auto [ring_w, ring_total] = forest::tree_weight_vector(validate::three_ring());
  CHECK((ring_w.values - Vector::Ones(3)).norm() == 0.0);
  CHECK(ring_total == 3.0);

  const RateGraph k3 = validate::complete_three();
  const auto [w, total] = forest::tree_weight_vector(k3);
  CHECK((w.values - 3.0 * Vector::Ones(3)).norm() == 0.0);
  CHECK(total == 9.0);
  CHECK(forest::graded_forest_weights(k3)(1) == 6.0);
  CHECK(forest::total_two_tree_weight(k3) == 6.0);
}

TEST_CASE("principal minors and the characteristic polynomial agree with enumeration") {
  for (std::uint64_t seed : {21u, 22u, 23u}) {
    const RateGraph g = validate::random_irreducible_graph(4, seed);
    const auto t = forest::enumerate_tables(g);
    const Vector minors = forest::tree_weight_minors(g);
    const Vector poly = forest::charpoly_forest_weights(generator(g));
    for (int x = 0; x < 4; ++x) CHECK(close(minors(x), t.tree_weight(x), 1e-10));
    for (int m = 0; m < 4; ++m) CHECK(close(poly(m), t.graded(m), 1e-10));
  }
}

TEST_CASE("the algebraic route reproduces the enumerated pair tables") {
  const ForestOptions algebraic{10, Route::Algebraic};
  for (std::uint64_t seed : {31u, 32u}) {
    const RateGraph g = validate::random_irreducible_graph(5, seed);
    const auto t = forest::enumerate_tables(g);
    const Matrix same = forest::pair_same_matrix(g, algebraic);
    for (int x = 0; x < 5; ++x)
      for (int y = 0; y < 5; ++y) {
        // The algebraic same-tree weight subtracts two terms of the marked
        // total's size, so its error floor scales with that column total.
        const double floor = 1e-12 * t.pair_same(y, y);
        CHECK(rel_close(same(x, y), t.pair_same(x, y), 1e-9, floor));
        const auto tt = forest::two_tree_weights(g, x, y, algebraic);
        CHECK(rel_close(tt.same, t.pair_same(x, y), 1e-9, floor));
        CHECK(rel_close(tt.split, t.pair_split(x, y), 1e-9, floor));
      }
    CHECK(close(forest::total_two_tree_weight(g, algebraic), t.graded(3), 1e-9));
  }
}

TEST_CASE("every component of a two-tree split carries a marked root") {
  const RateGraph g = validate::random_irreducible_graph(4, 41);
  const auto t = forest::enumerate_tables(g);
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 4; ++y)
      CHECK(close(t.pair_same(x, y) + t.pair_split(x, y), t.pair_same(y, y), 1e-12));
}

TEST_CASE("enumerated ensembles are valid forests with consistent totals") {
  const RateGraph g = validate::random_irreducible_graph(4, 51);
  const auto forests = oracle::all_forests(g);

  for (int root = 0; root < 4; ++root) {
    const auto e = forest::enumerate_in_trees(g, root);
    CHECK(e.descriptor.find(g.state_name(root)) != std::string::npos);
    CHECK(e.count == e.members.size());
    double total = 0.0;
    for (const auto& f : e.members) {
      CHECK(f.valid_for(g));
      CHECK(f.arc_ids.size() == 3);
      CHECK(f.roots() == std::vector<int>{root});
      total += f.weight;
    }
    CHECK(close(total, e.total_weight));
    CHECK(close(e.total_weight, oracle::tree_weight(forests, 4, root)));
  }

  const auto pairs = forest::enumerate_two_tree_forests(g);
  CHECK(close(pairs.total_weight, oracle::graded_weight(forests, 2)));
  for (const auto& f : pairs.members) {
    CHECK(f.valid_for(g));
    CHECK(f.roots().size() == 2);
  }
}

TEST_CASE("forest validity rejects tampered members") {
  const RateGraph g = validate::two_state();
  const auto e = forest::enumerate_in_trees(g, 1);
  REQUIRE(e.members.size() == 1);
  forest::RootedForest f = e.members[0];
  CHECK(f.valid_for(g));

  forest::RootedForest wrong_weight = f;
  wrong_weight.weight *= 2.0;
  CHECK_FALSE(wrong_weight.valid_for(g));

  forest::RootedForest wrong_roots = f;
  wrong_roots.root_of.assign(2, 0);
  CHECK_FALSE(wrong_roots.valid_for(g));

  forest::RootedForest doubled = f;
  doubled.arc_ids.push_back(doubled.arc_ids[0]);
  CHECK_FALSE(doubled.valid_for(g));
}

TEST_CASE("enumeration above the cap either switches route or refuses") {
  const RateGraph g = validate::random_irreducible_graph(5, 61);
  const ForestOptions tiny_auto{4, Route::Auto};
  const ForestOptions tiny_enum{4, Route::Enumerate};

  CHECK_THROWS_AS(forest::enumerate_tables(g, tiny_enum), CapExceeded);
  CHECK_THROWS_AS(forest::enumerate_in_trees(g, 0, tiny_enum), CapExceeded);

  const auto [w_auto, total_auto] = forest::tree_weight_vector(g, tiny_auto);
  const auto [w_enum, total_enum] = forest::tree_weight_vector(g);
  for (int x = 0; x < 5; ++x) CHECK(close(w_auto.values(x), w_enum.values(x), 1e-10));
  CHECK(close(total_auto, total_enum, 1e-10));
}

TEST_CASE("the best in-tree witness attains the maximum enumerated tree weight") {
  for (std::uint64_t seed : {71u, 72u, 73u}) {
    const RateGraph g = validate::random_irreducible_graph(4, seed);
    const auto forests = oracle::all_forests(g);
    double best = 0.0;
    for (const auto& f : forests)
      if (f.arc_count == 3) best = std::max(best, f.weight);
    const auto witness = forest::best_in_tree(g);
    CHECK(close(witness.weight, best, 1e-12));
    CHECK(close(witness.log_weight, std::log(best), 1e-12));
    double best_at_root = 0.0;
    for (const auto& f : forests)
      if (f.arc_count == 3 && f.root_of[witness.root] == witness.root)
        best_at_root = std::max(best_at_root, f.weight);
    CHECK(close(best_at_root, best, 1e-12));
  }
}

TEST_CASE("rational weights multiply the chosen arc rates exactly") {
  const std::vector<forest::Rational> rates = {{3, 2}, {5, 7}, {2, 1}};
  CHECK(forest::rational_weight({0, 2}, rates) == forest::Rational(3, 1));
  CHECK(forest::rational_weight({}, rates) == forest::Rational(1, 1));
  CHECK(forest::rational_weight({0, 1, 2}, rates) == forest::Rational(15, 7));
}

TEST_CASE("sweep rules force or forbid out-arcs per vertex") {
  const RateGraph g = validate::complete_three();
  std::vector<forest::OutArcRule> rule(3, forest::OutArcRule::Optional);
  rule[0] = forest::OutArcRule::Required;
  rule[2] = forest::OutArcRule::Forbidden;
  int visits = 0;
  forest::sweep_in_forests(g, rule, [&](const std::vector<int>& choice, int arcs, double weight) {
    ++visits;
    CHECK(choice[0] >= 0);
    CHECK(choice[2] == -1);
    CHECK(weight > 0.0);
    int taken = 0;
    for (int v = 0; v < 3; ++v) taken += choice[v] >= 0 ? 1 : 0;
    CHECK(taken == arcs);
  });
  CHECK(visits > 0);
}

TEST_CASE("roots of an out-arc choice reject cycles") {
  const RateGraph ring = validate::three_ring();
  // 0 -> 1 -> 2 with 2 free: roots collapse to 2
  std::vector<int> choice = {0, 1, -1};
  CHECK(forest::roots_of_choice(ring, choice) == std::vector<int>({2, 2, 2}));
  choice = {0, 1, 2};  // closes the ring
  CHECK_THROWS_AS(forest::roots_of_choice(ring, choice), Error);
}
