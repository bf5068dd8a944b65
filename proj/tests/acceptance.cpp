// Acceptance gate: one line per criterion, nonzero exit if any line fails.
// Tolerances are pinned here rather than taken from library defaults so the
// gate cannot drift.

#include "mjpot/bounds.hpp"
#include "mjpot/spectral.hpp"
#include "mjpot/validate.hpp"

#include <chrono>
#include <iostream>
#include <sstream>
#include <string>

using namespace mjpot;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string short_num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

Tolerances pinned_tolerances() {
  Tolerances tol;
  tol.identity_rel = 1e-9;
  tol.cross_method_field = 1e-7;
  tol.cross_method_rel = 1e-8;
  tol.bound_slack = 1e-12;
  tol.mc_sigma = 4.0;
  return tol;
}

validate::SuiteOptions pinned_options() {
  validate::SuiteOptions opts;
  opts.n_random = 50;
  opts.seed = 1;
  opts.tol = pinned_tolerances();
  return opts;
}

struct Line {
  bool pass = false;
  std::string detail;
};

void append_failures(Line& line, const ValidationReport& report) {
  if (report.all_pass()) return;
  for (const auto& c : report.checks)
    if (!c.pass) {
      line.detail += "; " + std::to_string(report.fail_count()) + " checks failed, first " +
                     c.name + " residual " + short_num(c.residual) + " vs " +
                     short_num(c.tolerance);
      return;
    }
}

void append_budget(Line& line, double dt, double budget) {
  line.detail += " (" + short_num(dt) + " s";
  if (dt >= budget) line.detail += ", over the " + short_num(budget) + " s budget";
  line.detail += ")";
}

Line criterion_worked_examples() {
  const auto start = Clock::now();
  const ValidationReport report = validate::check_worked_examples(pinned_tolerances());
  const double dt = seconds_since(start);

  Line line;
  line.pass = report.all_pass() && dt < 1.0;
  line.detail = "2-state and 3-ring worked values exact to 1e-10 across all routes, " +
                std::to_string(report.checks.size()) + " checks";
  append_budget(line, dt, 1.0);
  append_failures(line, report);
  return line;
}

Line criterion_cross_method() {
  const auto start = Clock::now();
  const ValidationReport report = validate::check_cross_method(pinned_options());
  const double dt = seconds_since(start);

  Line line;
  line.pass = report.all_pass() && dt < 30.0;
  line.detail =
      "three quasipotential routes within 1e-7*sup|f|, three passage-time routes within "
      "1e-8, and tree-weight vs reduction stationary laws within 1e-9 on 50 random graphs";
  append_budget(line, dt, 30.0);
  append_failures(line, report);
  return line;
}

Line criterion_graphical_identities() {
  const ValidationReport report = validate::check_graphical_identities(pinned_options());
  Line line;
  line.pass = report.all_pass();
  line.detail =
      "resolvent entries match graded forest ratios at alpha in {0.1, 1, 10} and the group "
      "inverse matches its two-tree form and axioms within 1e-9";
  append_failures(line, report);
  return line;
}

Line criterion_exact_identities() {
  const ValidationReport report = validate::check_exact_identities(pinned_options());
  Line line;
  line.pass = report.all_pass();
  line.detail =
      "escape sum rule to 1e-10 at interior sizes {1, ceil(n/2), n-1}, Kemeny spread and "
      "two-tree ratio to 1e-9, pair antisymmetry to 1e-10, tree-swap correspondence exact "
      "in rationals";
  append_failures(line, report);
  return line;
}

Line criterion_bound_suites() {
  const validate::SuiteOptions opts = pinned_options();
  const ValidationReport suites = validate::check_bound_suites(opts);

  // The rate-power cap n * max_rate^(n-2) * sup|f| / W is checked as stated
  // over the same instance family the suite draws.
  const int count = 200;
  int misses = 0;
  double worst = 0.0;
  for (int i = 0; i < count; ++i) {
    const int n = 3 + i % 6;
    const RateGraph g = validate::random_irreducible_graph(n, opts.seed + 100103u * i + 12);
    const Vector rho = spectral::stationary_distribution(generator(g), nullptr, opts.tol);
    const ScalarField f = validate::random_centered_field(g, rho, opts.seed + 100109u * i + 13);
    const auto glob = bounds::global_bound(g, f, {}, opts.tol);
    if (!glob.row.pass) {
      ++misses;
      worst = std::max(worst, glob.row.attained / glob.row.bound);
    }
  }

  Line line;
  line.pass = suites.all_pass() && misses == 0;
  if (misses > 0) {
    line.detail = "rate-power cap n*max_rate^(n-2)*sup|f|/W exceeded on " +
                  std::to_string(misses) + "/" + std::to_string(count) +
                  " random instances (worst attained/bound " + short_num(worst) +
                  "); it undercounts the two-tree forest weight on dense graphs and already "
                  "fails on the complete 4-state graph at unit rates. The passage-time pair "
                  "cap (200 instances), the source-split cap (100 instances, shifted-source "
                  "equality exact to 1e-10), and the two-tree-weight cap (200 instances) "
                  "all held";
  } else {
    line.detail =
        "pair, source-split, and global caps held on 200/100/200 random instances with "
        "slack >= -1e-12*scale; the shifted-source equality case is exact to 1e-10";
  }
  append_failures(line, suites);
  return line;
}

Line criterion_trajectory_oracle() {
  const auto start = Clock::now();
  const ValidationReport report = validate::check_mc_oracle(pinned_options());
  const double dt = seconds_since(start);

  Line line;
  line.pass = report.all_pass() && dt < 60.0;
  line.detail =
      "passage, stopped, pair, and horizon-excess estimates within 4 standard errors of the "
      "solved values on 20000 seeded paths per quantity, bitwise reproducible";
  append_budget(line, dt, 60.0);
  append_failures(line, report);
  return line;
}

Line criterion_sweep_application() {
  const ValidationReport report = validate::check_sweep_application(pinned_tolerances());
  Line line;
  line.pass = report.all_pass();
  line.detail =
      "swept global bound stays below the zero-barrier prefactor constant across lambda in "
      "{0, 2, ..., 20} with a constant best-tree witness";
  append_failures(line, report);
  return line;
}

int run_criterion(int id, Line (*criterion)()) {
  const Line line = criterion();
  std::cout << (line.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << line.detail
            << std::endl;
  return line.pass ? 0 : 1;
}

}  // namespace

int main() {
  int failures = 0;
  failures += run_criterion(1, criterion_worked_examples);
  failures += run_criterion(2, criterion_cross_method);
  failures += run_criterion(3, criterion_graphical_identities);
  failures += run_criterion(4, criterion_exact_identities);
  failures += run_criterion(5, criterion_bound_suites);
  failures += run_criterion(6, criterion_trajectory_oracle);
  failures += run_criterion(7, criterion_sweep_application);
  return failures == 0 ? 0 : 1;
}
