#include "mjpot/cli.hpp"

#include "mjpot/bounds.hpp"
#include "mjpot/errors.hpp"
#include "mjpot/forest.hpp"
#include "mjpot/io.hpp"
#include "mjpot/potential.hpp"
#include "mjpot/spectral.hpp"
#include "mjpot/validate.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace mjpot::cli {
namespace {

using io::format_double;
using io::json;

struct Rendered {
  std::vector<std::vector<std::string>> rows;  // header first
  json doc = json::object();
  std::vector<std::string> notes;
  bool failed = false;  // check-style failure, exit 1
};

std::string to_text(const Rendered& r, const std::string& format) {
  if (format == "json") {
    json doc = r.doc;
    if (!r.notes.empty()) doc["notes"] = r.notes;
    return doc.dump(2) + "\n";
  }
  if (format == "csv") {
    std::ostringstream os;
    for (const auto& row : r.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
      os << "\n";
    }
    return os.str();
  }
  std::string text = io::render_table(r.rows);
  for (const auto& n : r.notes) text += "# " + n + "\n";
  return text;
}

std::string flag(bool b) { return b ? "true" : "false"; }

struct Config {
  std::string graph_path;
  std::string field_path;
  std::string shift_path;
  std::vector<std::string> interior_names;
  std::vector<std::string> support_names;
  std::vector<std::string> methods;
  std::string pair_x;
  std::string pair_y;
  std::string lambda_spec;
  std::string format = "table";
  std::string out_path;
  std::uint64_t seed = 1;
  int n_random = 50;
  bool skip_mc = false;
  std::vector<std::string> tol_overrides;
  Tolerances tol;
};

void apply_tolerance(Tolerances& tol, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos)
    throw InputError("tolerance override must look like name=value, got '" + spec + "'");
  const std::string name = spec.substr(0, eq);
  double value = 0.0;
  try {
    value = std::stod(spec.substr(eq + 1));
  } catch (const std::exception&) {
    throw InputError("tolerance value in '" + spec + "' is not a number");
  }
  if (!(value > 0.0)) throw InputError("tolerance in '" + spec + "' must be positive");

  double* slot = name == "stationary_residual"     ? &tol.stationary_residual
                 : name == "centering"             ? &tol.centering
                 : name == "poisson_residual"      ? &tol.poisson_residual
                 : name == "quasipotential_residual" ? &tol.quasipotential_residual
                 : name == "mfpt_residual"         ? &tol.mfpt_residual
                 : name == "semigroup_tail"        ? &tol.semigroup_tail
                 : name == "identity_rel"          ? &tol.identity_rel
                 : name == "cross_method_field"    ? &tol.cross_method_field
                 : name == "cross_method_rel"      ? &tol.cross_method_rel
                 : name == "bound_slack"           ? &tol.bound_slack
                 : name == "mc_sigma"              ? &tol.mc_sigma
                 : name == "weight_floor"          ? &tol.weight_floor
                                                   : nullptr;
  if (!slot) throw InputError("unknown tolerance '" + name + "'");
  *slot = value;
}

std::vector<int> resolve_states(const RateGraph& g, const std::vector<std::string>& names) {
  std::vector<int> out;
  out.reserve(names.size());
  for (const auto& name : names) out.push_back(g.state_index(name));
  return out;
}

double parse_number(const std::string& token, const std::string& context) {
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw InputError("'" + token + "' in '" + context + "' is not a number");
  }
}

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<std::string> parts;
  std::string token;
  std::istringstream is(spec);
  while (std::getline(is, token, ':')) parts.push_back(token);

  if (parts.size() == 1) return {parse_number(parts[0], spec)};
  if (parts.size() != 3)
    throw InputError("lambda grid must be start:stop:step or a single value, got '" + spec + "'");
  const double start = parse_number(parts[0], spec);
  const double stop = parse_number(parts[1], spec);
  const double step = parse_number(parts[2], spec);
  if (!(step > 0.0)) throw InputError("sweep step must be positive in '" + spec + "'");
  if (stop < start) throw InputError("sweep range is empty in '" + spec + "'");

  std::vector<double> grid;
  for (int k = 0;; ++k) {
    const double x = start + k * step;
    if (x > stop + 1e-9 * step) break;
    grid.push_back(x);
  }
  return grid;
}

std::vector<std::pair<int, int>> pair_list(const RateGraph& g, const Config& c) {
  if (c.pair_x.empty() != c.pair_y.empty())
    throw InputError("--x and --y must be given together");
  if (!c.pair_x.empty()) {
    const int x = g.state_index(c.pair_x), y = g.state_index(c.pair_y);
    if (x == y) throw InputError("--x and --y name the same state");
    return {{x, y}};
  }
  if (g.size() > 32)
    throw InputError("listing every pair stops at 32 states; pick one with --x and --y");
  std::vector<std::pair<int, int>> pairs;
  for (int x = 0; x < g.size(); ++x)
    for (int y = x + 1; y < g.size(); ++y) pairs.push_back({x, y});
  return pairs;
}

Rendered cmd_stationary(const Config& c) {
  const RateGraph g = io::load_rate_graph(c.graph_path);
  const GeneratorMatrix gen = generator(g);
  const Vector reduction = spectral::stationary_distribution(gen, nullptr, c.tol);
  const auto [w, total] = forest::tree_weight_vector(g);
  const Vector kirchhoff = w.values / total;

  const Matrix& l = gen.matrix();
  const double res_reduction = norm_inf(l.transpose() * reduction);
  const double res_kirchhoff = norm_inf(l.transpose() * kirchhoff);

  Rendered r;
  r.rows.push_back({"state", "reduction", "kirchhoff", "rel_difference"});
  for (int i = 0; i < g.size(); ++i) {
    const double rel = std::abs(reduction(i) - kirchhoff(i)) / std::max(reduction(i), kirchhoff(i));
    r.rows.push_back({g.state_name(i), format_double(reduction(i)), format_double(kirchhoff(i)),
                      format_double(rel)});
  }
  r.notes.push_back("generator residual: reduction " + format_double(res_reduction) +
                    ", kirchhoff " + format_double(res_kirchhoff));
  r.notes.push_back("total tree weight " + format_double(total));
  r.doc["reduction"] = io::field_to_json(g, reduction);
  r.doc["kirchhoff"] = io::field_to_json(g, kirchhoff);
  r.doc["residuals"] = {{"reduction", res_reduction}, {"kirchhoff", res_kirchhoff}};
  r.doc["total_tree_weight"] = total;
  return r;
}

Rendered cmd_quasipotential(const Config& c) {
  const RateGraph g = io::load_rate_graph(c.graph_path);
  const ScalarField f = io::load_field(c.field_path, g);
  const GeneratorMatrix gen = generator(g);
  const Vector rho = spectral::stationary_distribution(gen, nullptr, c.tol);
  const double mean = rho.dot(f.values);
  const Vector fc = f.values.array() - mean;

  const std::vector<std::pair<std::string, potential::QuasiMethod>> routes = {
      {"linear", potential::QuasiMethod::Linear},
      {"forest", potential::QuasiMethod::Forest},
      {"integral", potential::QuasiMethod::Integral}};

  Rendered r;
  std::vector<Vector> solutions;
  json residuals = json::object();
  ValidationReport notes_report;
  for (const auto& [name, method] : routes) {
    potential::QuasipotentialOptions qopts;
    qopts.method = method;
    qopts.tol = c.tol;
    const ScalarField v =
        potential::quasipotential(g, f, qopts, solutions.empty() ? &notes_report : nullptr);
    const double residual = norm_inf(gen.matrix() * v.values + fc);
    residuals[name] = residual;
    r.doc[name] = io::field_to_json(g, v.values);
    r.notes.push_back(name + " residual " + format_double(residual));
    solutions.push_back(v.values);
  }

  r.rows.push_back({"state", "linear", "forest", "integral"});
  for (int i = 0; i < g.size(); ++i)
    r.rows.push_back({g.state_name(i), format_double(solutions[0](i)),
                      format_double(solutions[1](i)), format_double(solutions[2](i))});

  r.doc["residuals"] = std::move(residuals);
  r.doc["stationary_mean_of_f"] = mean;
  for (const auto& n : notes_report.notes) r.notes.push_back(n);
  return r;
}

Rendered cmd_mfpt(const Config& c) {
  const RateGraph g = io::load_rate_graph(c.graph_path);

  std::vector<std::pair<std::string, potential::MfptMethod>> chosen;
  const auto add_method = [&](const std::string& name) {
    if (name == "linear") chosen.push_back({name, potential::MfptMethod::Linear});
    if (name == "forest") chosen.push_back({name, potential::MfptMethod::Forest});
    if (name == "group") chosen.push_back({name, potential::MfptMethod::GroupInverse});
  };
  std::vector<std::string> wanted = c.methods.empty() ? std::vector<std::string>{"all"} : c.methods;
  for (const auto& name : wanted) {
    if (name == "all") {
      add_method("linear");
      add_method("forest");
      add_method("group");
    } else {
      add_method(name);
    }
  }

  Rendered r;
  std::vector<std::string> header = {"method", "from"};
  for (int i = 0; i < g.size(); ++i) header.push_back(g.state_name(i));
  r.rows.push_back(std::move(header));
  for (const auto& [name, method] : chosen) {
    const auto tau = potential::mfpt_matrix(g, method, {}, c.tol);
    for (int x = 0; x < g.size(); ++x) {
      std::vector<std::string> row = {name, g.state_name(x)};
      for (int z = 0; z < g.size(); ++z) row.push_back(format_double(tau(x, z)));
      r.rows.push_back(std::move(row));
    }
    r.doc[name] = io::matrix_to_json(g, tau.tau);
  }
  return r;
}

Rendered cmd_escape(const Config& c) {
  const RateGraph g = io::load_rate_graph(c.graph_path);
  const std::vector<int> interior = resolve_states(g, c.interior_names);
  const ScalarField escape = potential::mean_escape_time(g, interior, c.tol);
  const double residual = potential::escape_sum_rule_residual(g, interior, c.tol);

  Rendered r;
  r.rows.push_back({"state", "escape_time"});
  for (int i = 0; i < g.size(); ++i)
    r.rows.push_back({g.state_name(i), format_double(escape(i))});
  r.notes.push_back("sum rule residual " + format_double(residual));
  r.doc["escape_time"] = io::field_to_json(g, escape.values);
  json inside = json::array();
  for (int x : interior) inside.push_back(g.state_name(x));
  r.doc["interior"] = std::move(inside);
  r.doc["sum_rule_residual"] = residual;
  return r;
}

Rendered cmd_kemeny(const Config& c) {
  const RateGraph g = io::load_rate_graph(c.graph_path);
  const auto kem = potential::kemeny_constant(g, c.tol);
  const double total = forest::tree_weight_vector(g).second;
  const double two_tree_ratio = forest::total_two_tree_weight(g) / total;

  Rendered r;
  r.rows.push_back({"quantity", "value"});
  r.rows.push_back({"kemeny", format_double(kem.value)});
  r.rows.push_back({"spread_over_starts", format_double(kem.max_spread)});
  r.rows.push_back({"two_tree_ratio", format_double(two_tree_ratio)});
  r.rows.push_back({"difference", format_double(std::abs(kem.value - two_tree_ratio))});
  r.doc["kemeny"] = kem.value;
  r.doc["spread_over_starts"] = kem.max_spread;
  r.doc["two_tree_ratio"] = two_tree_ratio;
  r.doc["difference"] = std::abs(kem.value - two_tree_ratio);
  return r;
}

json bound_row_json(const RateGraph& g, const std::string& kind, const bounds::BoundRow& row) {
  json doc = json::object();
  doc["kind"] = kind;
  if (row.x >= 0) doc["x"] = g.state_name(row.x);
  if (row.y >= 0) doc["y"] = g.state_name(row.y);
  doc["bound"] = row.bound;
  doc["attained"] = row.attained;
  doc["slack"] = row.slack;
  doc["pass"] = row.pass;
  return doc;
}

Rendered cmd_bounds(const Config& c) {
  const RateGraph g = io::load_rate_graph(c.graph_path);
  const ScalarField f = io::load_field(c.field_path, g);
  if (c.shift_path.empty() != c.support_names.empty())
    throw InputError("--E and --D must be given together");
  const auto pairs = pair_list(g, c);

  Rendered r;
  r.rows.push_back({"kind", "x", "y", "bound", "attained", "slack", "pass"});
  json rows_json = json::array();

  const auto push_row = [&](const std::string& kind, const bounds::BoundRow& row) {
    r.rows.push_back({kind, row.x >= 0 ? g.state_name(row.x) : std::string{},
                      row.y >= 0 ? g.state_name(row.y) : std::string{},
                      format_double(row.bound), format_double(row.attained),
                      format_double(row.slack), flag(row.pass)});
    rows_json.push_back(bound_row_json(g, kind, row));
    r.failed = r.failed || !row.pass;
  };

  const auto global = bounds::global_bound(g, f, {}, c.tol);
  push_row("global", global.row);
  r.doc["global"] = {{"bound", global.row.bound},
                     {"attained", global.row.attained},
                     {"two_tree_cap", global.two_tree_cap},
                     {"total_tree_weight", global.total_tree_weight},
                     {"best_tree_weight", global.best_tree_weight},
                     {"max_rate", global.max_rate},
                     {"f_sup", global.f_sup},
                     {"pass", global.row.pass}};
  r.notes.push_back("two-tree cap " + format_double(global.two_tree_cap) +
                    " (total two-tree weight * sup|f| / W); the n*max_rate^(n-2) row can "
                    "fail on dense graphs, the two-tree cap cannot");

  for (const auto& [x, y] : pairs) {
    const auto pb = bounds::pair_bound(g, f, x, y, c.tol);
    push_row("pair", pb.row);
  }

  if (!c.shift_path.empty()) {
    const ScalarField shift = io::load_field(c.shift_path, g);
    const std::vector<int> support = resolve_states(g, c.support_names);
    const auto dec = bounds::decomposed_bound(g, f, shift, support, pairs, c.tol);
    for (const auto& row : dec.rows) push_row("decomposed", row);
    r.doc["decomposed"] = {{"h_sup", dec.h_sup},
                           {"reconstruction_spread", dec.reconstruction_spread},
                           {"pass", dec.pass}};
    r.notes.push_back("decomposed source sup " + format_double(dec.h_sup) +
                      ", reconstruction spread " + format_double(dec.reconstruction_spread));
  }

  r.doc["rows"] = std::move(rows_json);
  return r;
}

Rendered cmd_sweep(const Config& c) {
  const ParamRateGraph pg = io::load_param_graph(c.graph_path);
  const std::vector<double> grid = parse_grid(c.lambda_spec);
  const RateGraph at_first = pg.evaluate_at(grid.front());
  const ScalarField f = io::load_field(c.field_path, at_first);

  const auto sweep =
      bounds::uniform_bound_sweep(pg, bounds::fixed_field(f), grid, {}, c.tol);

  Rendered r;
  r.rows.push_back({"lambda", "bound", "attained", "slack", "total_tree_weight",
                    "best_tree_weight", "clamped_rates", "pass"});
  json rows_json = json::array();
  for (const auto& row : sweep.rows) {
    r.rows.push_back({format_double(row.lambda), format_double(row.bound),
                      format_double(row.attained), format_double(row.slack),
                      format_double(row.total_tree_weight), format_double(row.best_tree_weight),
                      std::to_string(row.clamped_rates), flag(row.pass)});
    rows_json.push_back({{"lambda", row.lambda},
                         {"bound", row.bound},
                         {"attained", row.attained},
                         {"slack", row.slack},
                         {"total_tree_weight", row.total_tree_weight},
                         {"best_tree_weight", row.best_tree_weight},
                         {"clamped_rates", row.clamped_rates},
                         {"pass", row.pass}});
    r.failed = r.failed || !row.pass;
  }
  r.doc["rows"] = std::move(rows_json);
  r.doc["min_best_tree"] = sweep.min_best_tree;
  r.doc["well_conditioned"] = sweep.well_conditioned;
  r.doc["pass"] = sweep.pass;
  r.notes.push_back("smallest best-tree witness " + format_double(sweep.min_best_tree) +
                    (sweep.well_conditioned ? " (above the weight floor)"
                                            : " (at or below the weight floor)"));
  return r;
}

Rendered cmd_validate(const Config& c) {
  validate::SuiteOptions opts;
  opts.n_random = c.n_random;
  opts.seed = c.seed;
  opts.with_mc = !c.skip_mc;
  opts.tol = c.tol;
  const ValidationReport report = validate::run_suite(opts);

  Rendered r;
  r.rows.push_back({"check", "residual", "tolerance", "pass"});
  json checks = json::array();
  for (const auto& check : report.checks) {
    r.rows.push_back({check.name, format_double(check.residual), format_double(check.tolerance),
                      flag(check.pass)});
    checks.push_back({{"name", check.name},
                      {"residual", check.residual},
                      {"tolerance", check.tolerance},
                      {"pass", check.pass}});
  }
  r.doc["checks"] = std::move(checks);
  r.doc["pass"] = report.all_pass();
  for (const auto& n : report.notes) r.notes.push_back(n);
  r.notes.push_back(std::to_string(report.checks.size()) + " checks, " +
                    std::to_string(report.fail_count()) + " failed");
  r.failed = !report.all_pass();
  return r;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config c;
  CLI::App app{"potential theory for finite irreducible Markov jump processes"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--format", c.format, "table, csv or json")
      ->check(CLI::IsMember({"table", "csv", "json"}));
  app.add_option("--out", c.out_path, "write the report to a file instead of stdout");
  app.add_option("--seed", c.seed, "seed for every randomized computation");
  app.add_option("--tol", c.tol_overrides, "override a named tolerance, name=value");

  auto* stationary = app.add_subcommand(
      "stationary", "stationary distribution by state reduction and by tree weights");
  stationary->add_option("graph", c.graph_path, "graph file")->required();

  auto* quasipotential =
      app.add_subcommand("quasipotential", "centered solution of LV + f = 0 by all three routes");
  quasipotential->add_option("graph", c.graph_path, "graph file")->required();
  quasipotential->add_option("--f", c.field_path, "source field file")->required();

  auto* mfpt = app.add_subcommand("mfpt", "mean first-passage time matrix");
  mfpt->add_option("graph", c.graph_path, "graph file")->required();
  mfpt->add_option("--method", c.methods, "linear, forest, group or all")
      ->check(CLI::IsMember({"linear", "forest", "group", "all"}));

  auto* escape = app.add_subcommand("escape", "mean escape time from a state set");
  escape->add_option("graph", c.graph_path, "graph file")->required();
  escape->add_option("--H", c.interior_names, "interior states")->required()->delimiter(',');

  auto* bounds_cmd = app.add_subcommand("bounds", "quasipotential bounds against attained values");
  bounds_cmd->add_option("graph", c.graph_path, "graph file")->required();
  bounds_cmd->add_option("--f", c.field_path, "source field file")->required();
  bounds_cmd->add_option("--E", c.shift_path, "shift field for the decomposed bound");
  bounds_cmd->add_option("--D", c.support_names, "support states for the decomposed bound")
      ->delimiter(',');
  bounds_cmd->add_option("--x", c.pair_x, "first state of a single pair");
  bounds_cmd->add_option("--y", c.pair_y, "second state of a single pair");

  auto* sweep = app.add_subcommand("sweep", "uniform bound along a rate-family parameter grid");
  sweep->add_option("graph", c.graph_path, "parametric graph file")->required();
  sweep->add_option("--f", c.field_path, "source field file")->required();
  sweep->add_option("--lambda", c.lambda_spec, "grid as start:stop:step or a single value")
      ->required();

  auto* validate_cmd =
      app.add_subcommand("validate", "run the full cross-validation suite");
  validate_cmd->add_option("--n-random", c.n_random, "random graphs per suite")
      ->check(CLI::PositiveNumber);
  validate_cmd->add_flag("--skip-mc", c.skip_mc, "skip the trajectory oracle");

  auto* kemeny = app.add_subcommand("kemeny", "stationary passage-time constant");
  kemeny->add_option("graph", c.graph_path, "graph file")->required();

  std::vector<const char*> argv;
  argv.push_back("mjpot");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    for (const auto& spec : c.tol_overrides) apply_tolerance(c.tol, spec);

    Rendered r;
    if (stationary->parsed()) r = cmd_stationary(c);
    else if (quasipotential->parsed()) r = cmd_quasipotential(c);
    else if (mfpt->parsed()) r = cmd_mfpt(c);
    else if (escape->parsed()) r = cmd_escape(c);
    else if (bounds_cmd->parsed()) r = cmd_bounds(c);
    else if (sweep->parsed()) r = cmd_sweep(c);
    else if (validate_cmd->parsed()) r = cmd_validate(c);
    else if (kemeny->parsed()) r = cmd_kemeny(c);

    const std::string text = to_text(r, c.format);
    if (c.out_path.empty())
      out << text;
    else
      io::write_file(c.out_path, text);
    return r.failed ? 1 : 0;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "unexpected error: " << e.what() << "\n";
    return 1;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace mjpot::cli
