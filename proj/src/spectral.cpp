#include "mjpot/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mjpot::spectral {

namespace {

std::string short_num(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

}  // namespace

Vector stationary_distribution(const GeneratorMatrix& gen, ValidationReport* report,
                               const Tolerances& tol) {
  const int n = gen.size();
  Matrix a = gen.matrix();
  Vector pivot(n);

  // State reduction: eliminate the highest state against the rest. All
  // updates add products of nonnegative off-diagonal entries, so no
  // cancellation occurs and the result is entrywise accurate.
  for (int k = n - 1; k >= 1; --k) {
    const double s = a.row(k).head(k).sum();
    if (!(s > 0.0) || !std::isfinite(s))
      throw SingularBeyondNullity("elimination pivot " + short_num(s) + " at state " +
                                  std::to_string(k));
    pivot(k) = s;
    for (int i = 0; i < k; ++i) {
      const double f = a(i, k) / s;
      if (f == 0.0) continue;
      for (int j = 0; j < k; ++j)
        if (j != i) a(i, j) += f * a(k, j);
    }
  }

  Vector rho(n);
  rho(0) = 1.0;
  for (int k = 1; k < n; ++k) {
    double acc = 0.0;
    for (int i = 0; i < k; ++i) acc += rho(i) * a(i, k);
    rho(k) = acc / pivot(k);
  }
  const double total = rho.sum();
  if (!(total > 0.0) || !std::isfinite(total))
    throw SingularBeyondNullity("non-normalizable weight vector");
  rho /= total;
  for (int i = 0; i < n; ++i)
    if (!(rho(i) > 0.0)) throw SingularBeyondNullity("nonpositive mass at state " + std::to_string(i));

  const double residual = norm_inf(gen.matrix().transpose() * rho);
  const double scale = std::max(norm_max(gen.matrix()), 1e-300);
  if (report) report->add("stationary residual", residual, tol.stationary_residual * scale);
  if (residual > tol.stationary_residual * scale)
    throw SingularBeyondNullity("stationary residual " + short_num(residual) + " above " +
                                short_num(tol.stationary_residual * scale));
  return rho;
}

Matrix resolvent(const GeneratorMatrix& gen, double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InputError("resolvent needs alpha >= 0");
  const int n = gen.size();
  const Matrix a = Matrix::Identity(n, n) - alpha * gen.matrix();
  Eigen::PartialPivLU<Matrix> lu(a);
  Matrix r = lu.solve(Matrix::Identity(n, n));
  r += lu.solve(Matrix::Identity(n, n) - a * r);
  return r;
}

Matrix group_inverse(const GeneratorMatrix& gen, ValidationReport* report, const Tolerances& tol) {
  const int n = gen.size();
  const Vector rho = stationary_distribution(gen, nullptr, tol);
  const Matrix projector = Vector::Ones(n) * rho.transpose();
  const Matrix shifted = gen.matrix() + projector;
  Eigen::PartialPivLU<Matrix> lu(shifted);
  Matrix inv = lu.solve(Matrix::Identity(n, n));
  inv += lu.solve(Matrix::Identity(n, n) - shifted * inv);
  Matrix x = inv - projector;
  if (report) {
    report->note("shifted-generator reciprocal condition " + short_num(lu.rcond()));
    report->add("group inverse row-sum residual", norm_inf(x * Vector::Ones(n)), 1e-10);
  }
  return x;
}

ValidationReport verify_group_axioms(const GeneratorMatrix& gen, const Matrix& candidate,
                                     const Tolerances& tol) {
  ValidationReport report;
  const Matrix& l = gen.matrix();
  const double scale = tol.identity_rel * std::max(norm_max(l), 1e-300);
  report.add("axiom LXL = L", norm_max(l * candidate * l - l), scale);
  report.add("axiom XLX = X", norm_max(candidate * l * candidate - candidate), scale);
  report.add("axiom LX = XL", norm_max(l * candidate - candidate * l), scale);
  return report;
}

double spectral_gap(const GeneratorMatrix& gen) {
  Eigen::EigenSolver<Matrix> solver(gen.matrix(), false);
  if (solver.info() != Eigen::Success) return std::nan("");
  const auto values = solver.eigenvalues();
  const double zero_band = 1e-9 * std::max(norm_max(gen.matrix()), 1.0);
  double gap = std::numeric_limits<double>::infinity();
  int skipped = 0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (std::abs(values(i)) <= zero_band) {
      ++skipped;
      continue;
    }
    gap = std::min(gap, -values(i).real());
  }
  if (skipped != 1 || !(gap > 0.0) || !std::isfinite(gap)) return std::nan("");
  return gap;
}

Matrix semigroup(const GeneratorMatrix& gen, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw InputError("semigroup needs t >= 0");
  return (t * gen.matrix()).exp();
}

Vector integrate_semigroup(const GeneratorMatrix& gen, const Vector& f, double T) {
  if (!(T >= 0.0) || !std::isfinite(T)) throw InputError("integration horizon must be nonnegative");
  const int n = gen.size();
  if (f.size() != n) throw InputError("field length does not match the generator");
  if (T == 0.0) return Vector::Zero(n);

  const double scale = std::max(norm_row_sum(gen.matrix()), 1.0);
  const long long panels = std::clamp<long long>(static_cast<long long>(std::ceil(T * scale / 2.0)),
                                                 1LL, 100000LL);
  const double h = T / static_cast<double>(panels);

  // exp of [[hL, hI], [0, 0]] packs the panel propagator and its integral.
  Matrix block = Matrix::Zero(2 * n, 2 * n);
  block.topLeftCorner(n, n) = h * gen.matrix();
  block.topRightCorner(n, n) = h * Matrix::Identity(n, n);
  const Matrix packed = block.exp();
  const Matrix step = packed.topLeftCorner(n, n);
  const Matrix panel_integral = packed.topRightCorner(n, n);

  Vector acc = Vector::Zero(n);
  Vector term = panel_integral * f;
  for (long long k = 0; k < panels; ++k) {
    acc += term;
    if (k + 1 < panels) term = step * term;
  }
  return acc;
}

}  // namespace mjpot::spectral
