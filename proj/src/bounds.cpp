#include "mjpot/bounds.hpp"

#include "mjpot/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace mjpot::bounds {

namespace {

Vector centered_values(const RateGraph& g, const ScalarField& f, const Vector& rho) {
  if (f.size() != g.size()) throw InputError("field length does not match the graph");
  return f.values.array() - stationary_mean(f.values, rho);
}

ScalarField solve_centered(const RateGraph& g, const ScalarField& f, const Tolerances& tol) {
  potential::QuasipotentialOptions opts;
  opts.tol = tol;
  return potential::quasipotential(g, f, opts, nullptr);
}

}  // namespace

BoundRow make_row(int x, int y, double bound, double attained, const Tolerances& tol) {
  BoundRow row;
  row.x = x;
  row.y = y;
  row.bound = bound;
  row.attained = attained;
  row.slack = bound - attained;
  const double scale = std::max({std::abs(bound), std::abs(attained), 1e-300});
  row.pass = attained <= bound + tol.bound_slack * scale;
  return row;
}

PairBound pair_bound(const RateGraph& g, const ScalarField& f, int x, int y,
                     const Tolerances& tol) {
  if (x < 0 || x >= g.size() || y < 0 || y >= g.size())
    throw UnknownState("#" + std::to_string(x < 0 || x >= g.size() ? x : y));
  const Vector rho = spectral::stationary_distribution(generator(g), nullptr, tol);
  const Vector fc = centered_values(g, f, rho);

  PairBound result;
  result.f_centered_sup = norm_inf(fc);
  const ScalarField v = solve_centered(g, f, tol);
  const double attained = std::abs(v(x) - v(y));
  if (x == y) {
    result.row = make_row(x, y, 0.0, attained, tol);
    return result;
  }
  const potential::MfptMatrix tau = potential::mfpt_matrix(g, potential::MfptMethod::Linear, {}, tol);
  result.tau_xy = tau(x, y);
  result.tau_yx = tau(y, x);
  result.pair_acc_xy = potential::pair_accumulation(g, f, x, y, tol);
  result.pair_acc_yx = potential::pair_accumulation(g, f, y, x, tol);
  const double anti_scale =
      std::max({std::abs(result.pair_acc_xy), std::abs(result.pair_acc_yx), result.f_centered_sup});
  if (std::abs(result.pair_acc_xy + result.pair_acc_yx) > 1e-10 * std::max(anti_scale, 1e-300))
    throw Error("pair accumulation is not antisymmetric between " + g.state_name(x) + " and " +
                g.state_name(y));
  const double bound = result.f_centered_sup * std::min(result.tau_xy, result.tau_yx);
  result.row = make_row(x, y, bound, attained, tol);
  return result;
}

DecomposedBound decomposed_bound(const RateGraph& g, const ScalarField& f,
                                 const ScalarField& shift, const std::vector<int>& support,
                                 const std::vector<std::pair<int, int>>& pairs,
                                 const Tolerances& tol) {
  const int n = g.size();
  if (f.size() != n || shift.size() != n) throw InputError("field length does not match the graph");
  std::set<int> in_support;
  for (int z : support) {
    if (z < 0 || z >= n) throw UnknownState("#" + std::to_string(z));
    in_support.insert(z);
  }

  const GeneratorMatrix gen = generator(g);
  const Vector rho = spectral::stationary_distribution(gen, nullptr, tol);
  const Vector fc = centered_values(g, f, rho);
  const Vector h = fc - gen.matrix() * shift.values;

  const double f_scale = std::max(norm_inf(fc), 1e-300);
  for (int z = 0; z < n; ++z)
    if (!in_support.count(z) && std::abs(h(z)) > 1e-12 * f_scale)
      throw DecompositionInvalid(g.state_name(z));

  DecomposedBound result;
  result.h_sup = norm_inf(h);

  const ScalarField v = solve_centered(g, f, tol);
  const potential::MfptMatrix tau = potential::mfpt_matrix(g, potential::MfptMethod::Linear, {}, tol);

  std::vector<std::pair<int, int>> wanted = pairs;
  if (wanted.empty()) {
    if (n > 32)
      throw InputError("all-pairs decomposed bound is limited to 32 states; pass a pair list");
    for (int x = 0; x < n; ++x)
      for (int y = x + 1; y < n; ++y) wanted.emplace_back(x, y);
  }

  result.pass = true;
  for (const auto& [x, y] : wanted) {
    if (x < 0 || x >= n || y < 0 || y >= n)
      throw UnknownState("#" + std::to_string(x < 0 || x >= n ? x : y));
    double pairing = 0.0;
    for (int z : in_support) pairing += rho(z) * std::abs(tau(x, z) - tau(y, z));
    const double bound = std::abs(shift(x) - shift(y)) + result.h_sup * pairing;
    const double attained = std::abs(v(x) - v(y));
    result.rows.push_back(make_row(x, y, bound, attained, tol));
    result.pass = result.pass && result.rows.back().pass;
  }

  // V + E + sum_z rho(z) h(z) tau(., z) should be constant across states.
  Vector reconstruction(n);
  for (int x = 0; x < n; ++x) {
    double acc = 0.0;
    for (int z : in_support) acc += rho(z) * h(z) * tau(x, z);
    reconstruction(x) = v(x) + shift(x) + acc;
  }
  result.reconstruction_spread = reconstruction.maxCoeff() - reconstruction.minCoeff();
  return result;
}

GlobalBound global_bound(const RateGraph& g, const ScalarField& f,
                         const forest::ForestOptions& fopts, const Tolerances& tol) {
  const int n = g.size();
  const Vector rho = spectral::stationary_distribution(generator(g), nullptr, tol);
  const Vector fc = centered_values(g, f, rho);

  GlobalBound result;
  result.f_sup = norm_inf(fc);
  result.max_rate = g.max_rate();
  const auto [w, total] = forest::tree_weight_vector(g, fopts);
  (void)w;
  result.total_tree_weight = total;
  result.best_tree_weight = forest::best_in_tree(g).weight;

  const ScalarField v = solve_centered(g, f, tol);
  const double attained = norm_inf(v.values);
  const double bound =
      static_cast<double>(n) * std::pow(result.max_rate, n - 2) * result.f_sup / total;
  result.row = make_row(-1, -1, bound, attained, tol);
  result.two_tree_cap = forest::graded_forest_weights(g, fopts)(n - 2) * result.f_sup / total;
  return result;
}

FieldSpec fixed_field(ScalarField f) {
  return [f = std::move(f)](double, const RateGraph&) { return f; };
}

SweepReport uniform_bound_sweep(const ParamRateGraph& pg, const FieldSpec& source,
                                const std::vector<double>& lambdas,
                                const forest::ForestOptions& fopts, const Tolerances& tol) {
  if (lambdas.empty()) throw InputError("parameter sweep needs a nonempty grid");
  std::vector<double> grid = lambdas;
  std::sort(grid.begin(), grid.end());

  SweepReport report;
  report.weight_floor = tol.weight_floor;
  report.min_best_tree = std::numeric_limits<double>::infinity();
  report.pass = true;
  for (double lambda : grid) {
    const RateGraph g = pg.evaluate_at(lambda);
    int clamped = 0;
    for (const auto& note : g.notes())
      if (note.find("clamped") != std::string::npos) ++clamped;
    const GlobalBound global = global_bound(g, source(lambda, g), fopts, tol);

    SweepRow row;
    row.lambda = lambda;
    row.total_tree_weight = global.total_tree_weight;
    row.best_tree_weight = global.best_tree_weight;
    row.bound = global.row.bound;
    row.attained = global.row.attained;
    row.slack = global.row.slack;
    row.pass = global.row.pass;
    row.clamped_rates = clamped;
    report.rows.push_back(row);

    report.min_best_tree = std::min(report.min_best_tree, row.best_tree_weight);
    report.pass = report.pass && row.pass;
  }
  report.well_conditioned = report.min_best_tree > report.weight_floor;
  return report;
}

}  // namespace mjpot::bounds
