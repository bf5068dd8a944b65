#pragma once

#include "mjpot/graph.hpp"

#include <cstdint>

namespace mjpot::validate {

// Hand-checked instances used across the test suites.
RateGraph two_state();       // a -> b at 2, b -> a at 1
RateGraph three_ring();      // unit-rate directed 3-cycle
RateGraph complete_three();  // all six arcs at rate 1

// Three states with one zero-barrier spanning tree, so the tree-weight
// witness stays bounded away from zero along the whole parameter sweep.
ParamRateGraph sweep_example();

/// Directed cycle through all states plus extra arcs with probability ~0.35,
/// rates log-uniform in [0.1, 10]. Always irreducible.
RateGraph random_irreducible_graph(int n, std::uint64_t seed);

/// Uniform values recentered to zero stationary mean.
ScalarField random_centered_field(const RateGraph& g, const Vector& rho, std::uint64_t seed);

struct SuiteOptions {
  int n_random = 50;           // graphs per randomized suite
  std::uint64_t seed = 1u;
  bool with_mc = true;         // include the trajectory oracle suite
  Tolerances tol;
};

// One report section per acceptance criterion. Randomized sections fold each
// family of instances into a single worst-case row so the output stays
// readable at any instance count.
ValidationReport check_worked_examples(const Tolerances& tol = {});
ValidationReport check_cross_method(const SuiteOptions& opts = {});
ValidationReport check_graphical_identities(const SuiteOptions& opts = {});
ValidationReport check_exact_identities(const SuiteOptions& opts = {});
ValidationReport check_bound_suites(const SuiteOptions& opts = {});
ValidationReport check_mc_oracle(const SuiteOptions& opts = {});
ValidationReport check_sweep_application(const Tolerances& tol = {});

ValidationReport run_suite(const SuiteOptions& opts = {});

}  // namespace mjpot::validate
