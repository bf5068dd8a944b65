#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace mjpot {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Real-valued function on states, aligned with a graph's state ordering.
/// `centered` records that the stationary mean has been subtracted.
struct ScalarField {
  Vector values;
  bool centered = false;

  ScalarField() = default;
  explicit ScalarField(Vector v, bool is_centered = false)
      : values(std::move(v)), centered(is_centered) {}

  int size() const { return static_cast<int>(values.size()); }
  double operator()(int i) const { return values(i); }
};

inline double norm_inf(const Vector& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

inline double norm_max(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// Operator infinity norm (max absolute row sum).
inline double norm_row_sum(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().rowwise().sum().maxCoeff();
}

inline bool rel_close(double a, double b, double rel, double abs_floor = 0.0) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) + abs_floor;
}

/// Numeric tolerances used across solvers and self-checks. Defaults are the
/// contract values; callers override individual fields where a looser or
/// tighter target is wanted.
struct Tolerances {
  double stationary_residual = 1e-11;   // scaled by max |entry of L|
  double centering = 1e-12;             // scaled by sup norm of the field
  double poisson_residual = 1e-10;      // scaled by |L| |U| + |f|
  double quasipotential_residual = 1e-9;
  double mfpt_residual = 1e-9;          // scaled by max entry of tau
  double semigroup_tail = 1e-12;        // truncation target for the integral route
  double identity_rel = 1e-9;           // graphical identity agreement
  double cross_method_field = 1e-7;     // quasipotential route agreement, scaled by sup f
  double cross_method_rel = 1e-8;       // mean first-passage route agreement
  double bound_slack = 1e-12;           // scaled slack allowed past a proven bound
  double mc_sigma = 4.0;                // Monte Carlo acceptance band in standard errors
  double weight_floor = 1e-300;         // underflow guard for forest weights
};

struct CheckResult {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Accumulates named residual checks plus free-form notes. A check passes
/// when its residual does not exceed its tolerance.
struct ValidationReport {
  std::vector<CheckResult> checks;
  std::vector<std::string> notes;

  bool add(std::string name, double residual, double tolerance) {
    const bool ok = residual <= tolerance;
    checks.push_back({std::move(name), residual, tolerance, ok});
    return ok;
  }

  void note(std::string text) { notes.push_back(std::move(text)); }

  void merge(ValidationReport other) {
    for (auto& c : other.checks) checks.push_back(std::move(c));
    for (auto& n : other.notes) notes.push_back(std::move(n));
  }

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }

  std::size_t fail_count() const {
    std::size_t k = 0;
    for (const auto& c : checks)
      if (!c.pass) ++k;
    return k;
  }

  double max_scaled_residual() const {
    double worst = 0.0;
    for (const auto& c : checks) {
      const double s = c.tolerance > 0 ? c.residual / c.tolerance : (c.residual > 0 ? HUGE_VAL : 0.0);
      worst = std::max(worst, s);
    }
    return worst;
  }
};

}  // namespace mjpot
