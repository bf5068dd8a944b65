#pragma once

#include "mjpot/forest.hpp"
#include "mjpot/graph.hpp"
#include "mjpot/potential.hpp"

#include <functional>
#include <vector>

namespace mjpot::bounds {

/// Two-sided comparison of a proven bound with the attained value. The check
/// allows a scaled slack of 1e-12 past the bound for round-off.
struct BoundRow {
  int x = -1;
  int y = -1;
  double bound = 0.0;
  double attained = 0.0;
  double slack = 0.0;
  bool pass = false;
};

BoundRow make_row(int x, int y, double bound, double attained, const Tolerances& tol = {});

/// |V(x) - V(y)| against the centered sup norm of f times the smaller of the
/// two passage times between x and y.
struct PairBound {
  BoundRow row;
  double tau_xy = 0.0;
  double tau_yx = 0.0;
  double pair_acc_xy = 0.0;   // accumulated centered f from x to y
  double pair_acc_yx = 0.0;
  double f_centered_sup = 0.0;
};

PairBound pair_bound(const RateGraph& g, const ScalarField& f, int x, int y,
                     const Tolerances& tol = {});

/// Bound after splitting the source as f = L E + h with h supported on D:
/// |V(x) - V(y)| <= |E(x) - E(y)| + sup|h| * sum_{z in D} rho(z) * |tau(x,z) - tau(y,z)|.
struct DecomposedBound {
  std::vector<BoundRow> rows;
  double h_sup = 0.0;
  double reconstruction_spread = 0.0;  // constancy defect of V + E + passage pairing
  bool pass = false;
};

DecomposedBound decomposed_bound(const RateGraph& g, const ScalarField& f, const ScalarField& shift,
                                 const std::vector<int>& support,
                                 const std::vector<std::pair<int, int>>& pairs = {},
                                 const Tolerances& tol = {});

/// Uniform cap n * max-rate^{n-2} * sup|f| / W on the centered solution.
/// The cap is heuristic: n * max-rate^{n-2} undercounts the two-tree forest
/// weight on dense graphs and the row can then fail (complete 4-state graph
/// at unit rates: attained 3/4 vs cap 3/16). two_tree_cap replaces it with
/// the actual total two-tree weight and always holds.
struct GlobalBound {
  BoundRow row;
  double two_tree_cap = 0.0;      // total two-tree weight * sup|f| / W
  double total_tree_weight = 0.0;
  double best_tree_weight = 0.0;  // positive lower-bound witness for W
  double max_rate = 0.0;
  double f_sup = 0.0;
};

GlobalBound global_bound(const RateGraph& g, const ScalarField& f,
                         const forest::ForestOptions& fopts = {}, const Tolerances& tol = {});

/// Per-parameter source for a sweep; receives the instantiated graph.
using FieldSpec = std::function<ScalarField(double lambda, const RateGraph& g)>;

FieldSpec fixed_field(ScalarField f);

struct SweepRow {
  double lambda = 0.0;
  double total_tree_weight = 0.0;
  double best_tree_weight = 0.0;
  double bound = 0.0;
  double attained = 0.0;
  double slack = 0.0;
  bool pass = false;
  int clamped_rates = 0;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  double min_best_tree = 0.0;
  double weight_floor = 0.0;
  bool well_conditioned = false;  // best-tree witness stayed above the floor
  bool pass = false;
};

/// Evaluates the uniform bound along a parameter grid, reporting the
/// best-tree witness so a collapsing W is visible rather than silent.
SweepReport uniform_bound_sweep(const ParamRateGraph& pg, const FieldSpec& source,
                                const std::vector<double>& lambdas,
                                const forest::ForestOptions& fopts = {},
                                const Tolerances& tol = {});

}  // namespace mjpot::bounds
