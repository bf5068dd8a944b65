#pragma once

#include "mjpot/forest.hpp"
#include "mjpot/graph.hpp"

#include <vector>

namespace mjpot::potential {

/// Interior set, source on the interior, boundary data off it. Both fields
/// are full-length; entries outside their domain are ignored.
struct AbsorbingProblem {
  std::vector<int> interior;
  Vector source;
  Vector boundary;
};

/// Solves L U + f = 0 on the interior with U given off it, through the
/// stopped generator. Requires a nonempty proper interior subset.
ScalarField solve_general_poisson(const RateGraph& g, const AbsorbingProblem& problem,
                                  const Tolerances& tol = {}, ValidationReport* report = nullptr);

enum class QuasiMethod { Linear, Forest, Integral };

struct QuasipotentialOptions {
  QuasiMethod method = QuasiMethod::Linear;
  bool auto_center = true;     // subtract the stationary mean of f, with a note
  forest::ForestOptions forest;
  Tolerances tol;
};

/// The centered solution V of L V + f = 0 over the whole space, fixed by a
/// vanishing stationary mean. Three interchangeable routes: one bordered
/// solve, the two-tree forest ratio, or integrating the semigroup to a
/// horizon set by the spectral gap.
ScalarField quasipotential(const RateGraph& g, const ScalarField& f,
                           const QuasipotentialOptions& opts = {},
                           ValidationReport* report = nullptr);

/// Accumulated f until first exit from H, zero off H.
ScalarField stopped_accumulation(const RateGraph& g, const std::vector<int>& interior,
                                 const ScalarField& f, const Tolerances& tol = {});

/// Mean time to leave H, zero off H.
ScalarField mean_escape_time(const RateGraph& g, const std::vector<int>& interior,
                             const Tolerances& tol = {});

/// Stationary outflux pairing: mass entering H weighted by escape times minus
/// the stationary mass of H. Zero in exact arithmetic.
double escape_sum_rule_residual(const RateGraph& g, const std::vector<int>& interior,
                                const Tolerances& tol = {});

enum class MfptMethod { Linear, Forest, GroupInverse };

/// Mean first-passage times, tau(x, z) from x to z, zero diagonal.
struct MfptMatrix {
  Matrix tau;

  double operator()(int x, int z) const { return tau(x, z); }
  int size() const { return static_cast<int>(tau.rows()); }
};

MfptMatrix mfpt_matrix(const RateGraph& g, MfptMethod method = MfptMethod::Linear,
                       const forest::ForestOptions& fopts = {}, const Tolerances& tol = {},
                       ValidationReport* report = nullptr);

/// Quasipotential reassembled from passage times against the stationary
/// source, fixed to zero stationary mean.
ScalarField quasipotential_from_passage(const RateGraph& g, const ScalarField& f,
                                        const Tolerances& tol = {});

struct KemenyResult {
  double value = 0.0;       // stationary passage time from any start
  double max_spread = 0.0;  // deviation across starting states
};

KemenyResult kemeny_constant(const RateGraph& g, const Tolerances& tol = {});

/// Accumulated centered f from x until the first visit to y; antisymmetric
/// under swapping x and y.
double pair_accumulation(const RateGraph& g, const ScalarField& f, int x, int y,
                         const Tolerances& tol = {});

}  // namespace mjpot::potential
