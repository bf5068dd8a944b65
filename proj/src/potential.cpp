#include "mjpot/potential.hpp"

#include "mjpot/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace mjpot::potential {

namespace {

std::string short_num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::vector<int> checked_interior(const RateGraph& g, const std::vector<int>& interior,
                                  bool allow_full) {
  if (interior.empty()) throw EmptyInterior();
  std::set<int> seen;
  for (int x : interior) {
    if (x < 0 || x >= g.size()) throw UnknownState("#" + std::to_string(x));
    if (!seen.insert(x).second)
      throw InputError("state " + g.state_name(x) + " listed twice in the interior");
  }
  if (!allow_full && static_cast<int>(seen.size()) == g.size())
    throw InputError("interior covers every state; the stopped problem needs a boundary");
  return {seen.begin(), seen.end()};
}

/// One LU solve of the stopped system with a refinement pass.
Vector stopped_solve(const Matrix& l, const std::vector<int>& interior, const Vector& rhs) {
  const int m = static_cast<int>(interior.size());
  Matrix a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a(i, j) = l(interior[i], interior[j]);
  Eigen::PartialPivLU<Matrix> lu(a);
  Vector u = lu.solve(rhs);
  u += lu.solve(rhs - a * u);
  if (!u.allFinite())
    throw SingularStoppedGenerator("interior of size " + std::to_string(m));
  return u;
}

ScalarField centered_input(const RateGraph& g, const ScalarField& f, const Vector& rho,
                           bool auto_center, double tol, ValidationReport* report) {
  if (f.size() != g.size()) throw InputError("field length does not match the graph");
  const double mean = stationary_mean(f.values, rho);
  const double scale = std::max(norm_inf(f.values), 1e-300);
  if (std::abs(mean) <= tol * scale) return ScalarField(f.values, true);
  if (!auto_center) throw NotCentered(mean);
  if (report) report->note("subtracted stationary mean " + short_num(mean) + " from the source");
  return ScalarField(f.values.array() - mean, true);
}

}  // namespace

ScalarField solve_general_poisson(const RateGraph& g, const AbsorbingProblem& problem,
                                  const Tolerances& tol, ValidationReport* report) {
  const int n = g.size();
  if (problem.source.size() != n || problem.boundary.size() != n)
    throw InputError("source and boundary must be full-length fields");
  const auto interior = checked_interior(g, problem.interior, false);

  const Matrix l = generator(g).matrix();
  const int m = static_cast<int>(interior.size());
  std::vector<char> inside(n, 0);
  for (int x : interior) inside[x] = 1;

  Vector rhs(m);
  for (int i = 0; i < m; ++i) {
    double b = -problem.source(interior[i]);
    for (int y = 0; y < n; ++y)
      if (!inside[y]) b -= l(interior[i], y) * problem.boundary(y);
    rhs(i) = b;
  }
  const Vector u = stopped_solve(l, interior, rhs);

  Vector full(n);
  for (int y = 0; y < n; ++y) full(y) = inside[y] ? 0.0 : problem.boundary(y);
  for (int i = 0; i < m; ++i) full(interior[i]) = u(i);

  const Vector defect = l * full + problem.source;
  double residual = 0.0;
  for (int x : interior) residual = std::max(residual, std::abs(defect(x)));
  const double scale = norm_row_sum(l) * norm_inf(full) + norm_inf(problem.source);
  if (report) report->add("stopped Poisson residual", residual, tol.poisson_residual * std::max(scale, 1e-300));
  if (residual > tol.poisson_residual * std::max(scale, 1e-300))
    throw SingularStoppedGenerator("interior residual " + short_num(residual));
  return ScalarField(std::move(full));
}

ScalarField quasipotential(const RateGraph& g, const ScalarField& f,
                           const QuasipotentialOptions& opts, ValidationReport* report) {
  const int n = g.size();
  const GeneratorMatrix gen = generator(g);
  const Vector rho = spectral::stationary_distribution(gen, nullptr, opts.tol);
  const ScalarField fc =
      centered_input(g, f, rho, opts.auto_center, opts.tol.centering, report);

  Vector v;
  switch (opts.method) {
    case QuasiMethod::Linear: {
      // Bordered system: the generator plus a mean-zero row pins the constant.
      Matrix a = Matrix::Zero(n + 1, n + 1);
      a.topLeftCorner(n, n) = gen.matrix();
      a.topRightCorner(n, 1) = Vector::Ones(n);
      a.bottomLeftCorner(1, n) = rho.transpose();
      Vector b = Vector::Zero(n + 1);
      b.head(n) = -fc.values;
      Eigen::PartialPivLU<Matrix> lu(a);
      Vector sol = lu.solve(b);
      sol += lu.solve(b - a * sol);
      if (!sol.allFinite()) throw SingularBeyondNullity("bordered quasipotential solve");
      v = sol.head(n);
      break;
    }
    case QuasiMethod::Forest: {
      const Matrix same = forest::pair_same_matrix(g, opts.forest);
      const auto [w, total] = forest::tree_weight_vector(g, opts.forest);
      (void)w;
      v = (same * fc.values) / total;
      break;
    }
    case QuasiMethod::Integral: {
      const double gap = spectral::spectral_gap(gen);
      double horizon = std::isfinite(gap) && gap > 0 ? std::log(1e12) / gap : 1.0;
      const double f_scale = std::max(norm_inf(fc.values), 1e-300);
      int doublings = 0;
      while (norm_inf(spectral::semigroup(gen, horizon) * fc.values) >
                 opts.tol.semigroup_tail * f_scale &&
             doublings < 64) {
        horizon *= 2.0;
        ++doublings;
      }
      if (doublings == 64) throw Error("semigroup tail did not decay; horizon search failed");
      if (report)
        report->note("integrated the semigroup to horizon " + short_num(horizon) +
                     (std::isfinite(gap) ? " from spectral gap " + short_num(gap)
                                         : " by doubling, eigensolver unavailable"));
      v = spectral::integrate_semigroup(gen, fc.values, horizon);
      v.array() -= stationary_mean(v, rho);
      break;
    }
  }

  const double residual = norm_inf(gen.matrix() * v + fc.values);
  const double f_scale = std::max(norm_inf(fc.values), 1e-300);
  if (report) report->add("quasipotential residual", residual, opts.tol.quasipotential_residual * f_scale);
  if (residual > opts.tol.quasipotential_residual * f_scale)
    throw Error("quasipotential residual " + short_num(residual) + " above tolerance");
  const double mean = std::abs(stationary_mean(v, rho));
  if (mean > 1e-11 * std::max(norm_inf(v), 1e-300))
    throw Error("quasipotential mean did not vanish: " + short_num(mean));
  return ScalarField(std::move(v), true);
}

ScalarField stopped_accumulation(const RateGraph& g, const std::vector<int>& interior,
                                 const ScalarField& f, const Tolerances& tol) {
  if (f.size() != g.size()) throw InputError("field length does not match the graph");
  AbsorbingProblem problem;
  problem.interior = interior;
  problem.source = f.values;
  problem.boundary = Vector::Zero(g.size());
  return solve_general_poisson(g, problem, tol);
}

ScalarField mean_escape_time(const RateGraph& g, const std::vector<int>& interior,
                             const Tolerances& tol) {
  return stopped_accumulation(g, interior, ScalarField(Vector::Ones(g.size())), tol);
}

double escape_sum_rule_residual(const RateGraph& g, const std::vector<int>& interior,
                                const Tolerances& tol) {
  const auto inside_list = checked_interior(g, interior, false);
  const ScalarField escape = mean_escape_time(g, inside_list, tol);
  const Vector rho = spectral::stationary_distribution(generator(g), nullptr, tol);

  std::vector<char> inside(g.size(), 0);
  for (int x : inside_list) inside[x] = 1;

  double influx = 0.0;
  for (const auto& a : g.arcs())
    if (!inside[a.from] && inside[a.to]) influx += rho(a.from) * a.rate * escape(a.to);
  double mass = 0.0;
  for (int x : inside_list) mass += rho(x);
  return std::abs(influx - mass);
}

MfptMatrix mfpt_matrix(const RateGraph& g, MfptMethod method, const forest::ForestOptions& fopts,
                       const Tolerances& tol, ValidationReport* report) {
  const int n = g.size();
  const Matrix l = generator(g).matrix();
  Matrix tau = Matrix::Zero(n, n);

  switch (method) {
    case MfptMethod::Linear: {
      for (int z = 0; z < n; ++z) {
        std::vector<int> interior;
        interior.reserve(n - 1);
        for (int x = 0; x < n; ++x)
          if (x != z) interior.push_back(x);
        const Vector u = stopped_solve(l, interior, -Vector::Ones(n - 1));
        for (int i = 0; i < n - 1; ++i) tau(interior[i], z) = u(i);
      }
      break;
    }
    case MfptMethod::Forest: {
      bool enumerated = false;
      if (fopts.route == forest::Route::Enumerate ||
          (fopts.route == forest::Route::Auto && n <= fopts.enumeration_cap)) {
        const auto tables = forest::enumerate_tables(g, fopts);
        for (int z = 0; z < n; ++z)
          for (int x = 0; x < n; ++x)
            if (x != z) tau(x, z) = tables.pair_split(x, z) / tables.tree_weight(z);
        enumerated = true;
      }
      if (!enumerated) {
        const Matrix x = spectral::group_inverse(generator(g), nullptr, tol);
        const Vector rho = spectral::stationary_distribution(generator(g), nullptr, tol);
        for (int z = 0; z < n; ++z)
          for (int s = 0; s < n; ++s)
            if (s != z) tau(s, z) = (x(s, z) - x(z, z)) / rho(z);
      }
      break;
    }
    case MfptMethod::GroupInverse: {
      const Matrix x = spectral::group_inverse(generator(g), nullptr, tol);
      const Vector rho = spectral::stationary_distribution(generator(g), nullptr, tol);
      for (int z = 0; z < n; ++z)
        for (int s = 0; s < n; ++s)
          if (s != z) tau(s, z) = (x(s, z) - x(z, z)) / rho(z);
      break;
    }
  }

  // Residual of the defining column systems, scaled by the largest entry.
  const double scale = std::max(norm_max(tau), 1e-300);
  double residual = 0.0;
  for (int z = 0; z < n; ++z) {
    const Vector defect = l * tau.col(z);
    for (int x = 0; x < n; ++x) {
      if (x == z) continue;
      if (tau(x, z) <= 0)
        throw Error("passage time from " + g.state_name(x) + " to " + g.state_name(z) +
                    " is not positive: " + short_num(tau(x, z)));
      residual = std::max(residual, std::abs(defect(x) + 1.0));
    }
  }
  if (report) report->add("passage-time residual", residual, tol.mfpt_residual * scale);
  if (residual > tol.mfpt_residual * scale)
    throw Error("passage-time residual " + short_num(residual) + " above tolerance");
  return MfptMatrix{std::move(tau)};
}

ScalarField quasipotential_from_passage(const RateGraph& g, const ScalarField& f,
                                        const Tolerances& tol) {
  const int n = g.size();
  const GeneratorMatrix gen = generator(g);
  const Vector rho = spectral::stationary_distribution(gen, nullptr, tol);
  ValidationReport scratch;
  const ScalarField fc = centered_input(g, f, rho, true, tol.centering, &scratch);
  const MfptMatrix tau = mfpt_matrix(g, MfptMethod::Linear, {}, tol);

  Vector v = Vector::Zero(n);
  for (int x = 0; x < n; ++x) {
    double acc = 0.0;
    for (int z = 0; z < n; ++z) acc += rho(z) * fc(z) * tau(x, z);
    v(x) = -acc;
  }
  v.array() -= stationary_mean(v, rho);
  return ScalarField(std::move(v), true);
}

KemenyResult kemeny_constant(const RateGraph& g, const Tolerances& tol) {
  const int n = g.size();
  const Vector rho = spectral::stationary_distribution(generator(g), nullptr, tol);
  const MfptMatrix tau = mfpt_matrix(g, MfptMethod::Linear, {}, tol);
  Vector per_start = tau.tau * rho;
  KemenyResult result;
  result.value = per_start(0);
  for (int x = 0; x < n; ++x)
    result.max_spread = std::max(result.max_spread, std::abs(per_start(x) - result.value));
  return result;
}

double pair_accumulation(const RateGraph& g, const ScalarField& f, int x, int y,
                         const Tolerances& tol) {
  if (x < 0 || x >= g.size() || y < 0 || y >= g.size())
    throw UnknownState("#" + std::to_string(x < 0 || x >= g.size() ? x : y));
  if (x == y) return 0.0;
  const Vector rho = spectral::stationary_distribution(generator(g), nullptr, tol);
  ValidationReport scratch;
  const ScalarField fc = centered_input(g, f, rho, true, tol.centering, &scratch);
  std::vector<int> interior;
  interior.reserve(g.size() - 1);
  for (int s = 0; s < g.size(); ++s)
    if (s != y) interior.push_back(s);
  return stopped_accumulation(g, interior, fc, tol)(x);
}

}  // namespace mjpot::potential
