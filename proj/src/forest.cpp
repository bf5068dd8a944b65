#include "mjpot/forest.hpp"

#include "mjpot/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace mjpot::forest {

namespace {

std::string short_num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

void require_state(const RateGraph& g, int x) {
  if (x < 0 || x >= g.size()) throw UnknownState("#" + std::to_string(x));
}

/// Depth-first sweep over out-arc choices, one vertex at a time. `next`
/// mirrors `choice` as a vertex-to-vertex map so cycle checks are pointer
/// chases; a cycle closing at the current vertex is the only way one can
/// appear, because everything assigned earlier was already acyclic.
template <class Visit>
void sweep_impl(const RateGraph& g, const std::vector<OutArcRule>& rule, Visit&& visit) {
  const int n = g.size();
  std::vector<int> choice(n, -1);
  std::vector<int> next(n, -1);

  auto rec = [&](auto&& self, int v, int arc_count, double weight) -> void {
    if (v == n) {
      visit(choice, next, arc_count, weight);
      return;
    }
    if (rule[v] != OutArcRule::Required) self(self, v + 1, arc_count, weight);
    if (rule[v] == OutArcRule::Forbidden) return;
    for (int id : g.out_arcs(v)) {
      const int u = g.arcs()[id].to;
      bool closes_cycle = false;
      for (int w = u; w != -1; w = next[w])
        if (w == v) {
          closes_cycle = true;
          break;
        }
      if (closes_cycle) continue;
      choice[v] = id;
      next[v] = u;
      self(self, v + 1, arc_count + 1, weight * g.arcs()[id].rate);
      choice[v] = -1;
      next[v] = -1;
    }
  };
  rec(rec, 0, 0, 1.0);
}

/// Roots for a complete assignment, written into `root` (path compression
/// over the shared scratch keeps this near O(n) per call).
void fill_roots(const std::vector<int>& next, std::vector<int>& root, std::vector<int>& path) {
  const int n = static_cast<int>(next.size());
  root.assign(n, -1);
  for (int v = 0; v < n; ++v) {
    if (root[v] != -1) continue;
    path.clear();
    int w = v;
    while (root[w] == -1 && next[w] != -1) {
      path.push_back(w);
      w = next[w];
    }
    const int r = root[w] == -1 ? w : root[w];
    root[w] = r;
    for (int p : path) root[p] = r;
  }
}

void check_cap(const RateGraph& g, const ForestOptions& opts) {
  if (g.size() > opts.enumeration_cap) throw CapExceeded(g.size(), opts.enumeration_cap);
}

bool use_enumeration(const RateGraph& g, const ForestOptions& opts) {
  switch (opts.route) {
    case Route::Enumerate:
      check_cap(g, opts);
      return true;
    case Route::Algebraic:
      return false;
    case Route::Auto:
      return g.size() <= opts.enumeration_cap;
  }
  return true;
}

Vector enumerated_tree_weights(const RateGraph& g) {
  const int n = g.size();
  Vector w = Vector::Zero(n);
  std::vector<OutArcRule> rule(n, OutArcRule::Required);
  for (int r = 0; r < n; ++r) {
    rule[r] = OutArcRule::Forbidden;
    double total = 0.0;
    sweep_impl(g, rule, [&](const std::vector<int>&, const std::vector<int>&, int, double weight) {
      total += weight;
    });
    w(r) = total;
    rule[r] = OutArcRule::Required;
  }
  return w;
}

/// Mean first-passage time to z by the absorbing linear system: the
/// generator restricted to the complement of z, one refinement step.
Vector hitting_times_linear(const Matrix& l, int z) {
  const int n = static_cast<int>(l.rows());
  std::vector<int> inside;
  inside.reserve(n - 1);
  for (int x = 0; x < n; ++x)
    if (x != z) inside.push_back(x);
  const int m = static_cast<int>(inside.size());
  Matrix a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a(i, j) = -l(inside[i], inside[j]);
  Eigen::PartialPivLU<Matrix> lu(a);
  const Vector ones = Vector::Ones(m);
  Vector u = lu.solve(ones);
  u += lu.solve(ones - a * u);
  if (!u.allFinite()) throw SingularStoppedGenerator("hitting-time system for state " + std::to_string(z));
  Vector full = Vector::Zero(n);
  for (int i = 0; i < m; ++i) full(inside[i]) = u(i);
  return full;
}

struct AlgebraicTables {
  Vector tree_weight;
  double total = 0.0;
  Vector graded;
  Matrix group_inv;
  Vector rho;
};

AlgebraicTables algebraic_tables(const RateGraph& g) {
  AlgebraicTables t;
  t.tree_weight = tree_weight_minors(g);
  t.total = t.tree_weight.sum();
  const GeneratorMatrix gen = generator(g);
  t.graded = charpoly_forest_weights(gen);
  t.group_inv = spectral::group_inverse(gen);
  t.rho = spectral::stationary_distribution(gen);
  return t;
}

}  // namespace

std::vector<int> RootedForest::roots() const {
  std::vector<int> r(root_of);
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());
  return r;
}

bool RootedForest::valid_for(const RateGraph& g) const {
  const int n = g.size();
  if (static_cast<int>(root_of.size()) != n) return false;
  std::vector<int> next(n, -1);
  double product = 1.0;
  for (std::size_t i = 0; i < arc_ids.size(); ++i) {
    const int id = arc_ids[i];
    if (id < 0 || id >= static_cast<int>(g.arcs().size())) return false;
    if (i > 0 && arc_ids[i - 1] >= id) return false;
    const Arc& a = g.arcs()[id];
    if (next[a.from] != -1) return false;
    next[a.from] = a.to;
    product *= a.rate;
  }
  for (int v = 0; v < n; ++v) {
    int w = v;
    for (int steps = 0; next[w] != -1; ++steps) {
      if (steps > n) return false;
      w = next[w];
    }
    if (root_of[v] != w) return false;
  }
  return rel_close(product, weight, 1e-12);
}

void sweep_in_forests(const RateGraph& g, const std::vector<OutArcRule>& rule,
                      const std::function<void(const std::vector<int>&, int, double)>& visit) {
  if (static_cast<int>(rule.size()) != g.size())
    throw Error("out-arc rule length does not match the graph");
  sweep_impl(g, rule,
             [&](const std::vector<int>& choice, const std::vector<int>&, int arc_count,
                 double weight) { visit(choice, arc_count, weight); });
}

std::vector<int> roots_of_choice(const RateGraph& g, const std::vector<int>& choice) {
  const int n = g.size();
  std::vector<int> next(n, -1);
  for (int v = 0; v < n; ++v)
    if (choice[v] >= 0) next[v] = g.arcs()[choice[v]].to;
  for (int v = 0; v < n; ++v) {
    int w = v;
    for (int steps = 0; next[w] != -1; ++steps) {
      if (steps > n) throw Error("out-arc choice contains a cycle");
      w = next[w];
    }
  }
  std::vector<int> root, path;
  fill_roots(next, root, path);
  return root;
}

ForestTables enumerate_tables(const RateGraph& g, const ForestOptions& opts) {
  check_cap(g, opts);
  const int n = g.size();
  ForestTables t;
  t.tree_weight = Vector::Zero(n);
  t.graded = Vector::Zero(n);
  t.pair_same = Matrix::Zero(n, n);
  t.pair_split = Matrix::Zero(n, n);
  t.graded_pair.assign(n, Matrix::Zero(n, n));

  std::vector<OutArcRule> rule(n, OutArcRule::Optional);
  std::vector<int> root, path;
  sweep_impl(g, rule,
             [&](const std::vector<int>&, const std::vector<int>& next, int arc_count,
                 double weight) {
               fill_roots(next, root, path);
               t.graded(arc_count) += weight;
               Matrix& layer = t.graded_pair[arc_count];
               for (int x = 0; x < n; ++x) layer(x, root[x]) += weight;
               if (arc_count == n - 2) {
                 int r1 = -1, r2 = -1;
                 for (int v = 0; v < n; ++v)
                   if (next[v] == -1) (r1 == -1 ? r1 : r2) = v;
                 for (int x = 0; x < n; ++x) t.pair_split(x, root[x] == r1 ? r2 : r1) += weight;
               }
             });

  t.pair_same = t.graded_pair[n - 2];
  for (int r = 0; r < n; ++r) t.tree_weight(r) = t.graded_pair[n - 1](0, r);
  t.total_tree_weight = t.tree_weight.sum();
  return t;
}

ForestEnsemble enumerate_in_trees(const RateGraph& g, int root, const ForestOptions& opts) {
  check_cap(g, opts);
  require_state(g, root);
  const int n = g.size();
  ForestEnsemble e;
  e.descriptor = "spanning in-trees rooted at " + g.state_name(root);

  std::vector<OutArcRule> rule(n, OutArcRule::Required);
  rule[root] = OutArcRule::Forbidden;
  sweep_impl(g, rule,
             [&](const std::vector<int>& choice, const std::vector<int>&, int, double weight) {
               RootedForest f;
               f.weight = weight;
               f.root_of.assign(n, root);
               f.arc_ids.reserve(n - 1);
               for (int v = 0; v < n; ++v)
                 if (choice[v] >= 0) f.arc_ids.push_back(choice[v]);
               e.total_weight += weight;
               ++e.count;
               e.members.push_back(std::move(f));
             });
  return e;
}

ForestEnsemble enumerate_two_tree_forests(const RateGraph& g, const ForestOptions& opts) {
  check_cap(g, opts);
  const int n = g.size();
  ForestEnsemble e;
  e.descriptor = "two-component spanning in-forests";

  std::vector<OutArcRule> rule(n, OutArcRule::Optional);
  std::vector<int> root, path;
  sweep_impl(g, rule,
             [&](const std::vector<int>& choice, const std::vector<int>& next, int arc_count,
                 double weight) {
               if (arc_count != n - 2) return;
               fill_roots(next, root, path);
               RootedForest f;
               f.weight = weight;
               f.root_of = root;
               for (int v = 0; v < n; ++v)
                 if (choice[v] >= 0) f.arc_ids.push_back(choice[v]);
               e.total_weight += weight;
               ++e.count;
               e.members.push_back(std::move(f));
             });
  return e;
}

Vector tree_weight_minors(const RateGraph& g) {
  const int n = g.size();
  const Matrix lap = laplacian(g);
  Vector w(n);
  for (int x = 0; x < n; ++x) {
    Matrix minor(n - 1, n - 1);
    for (int i = 0, im = 0; i < n; ++i) {
      if (i == x) continue;
      for (int j = 0, jm = 0; j < n; ++j) {
        if (j == x) continue;
        minor(im, jm) = lap(i, j);
        ++jm;
      }
      ++im;
    }
    w(x) = minor.determinant();
  }
  return w;
}

Vector charpoly_forest_weights(const GeneratorMatrix& gen) {
  const int n = gen.size();
  const Matrix& a = gen.matrix();
  Vector coef = Vector::Zero(n + 1);
  coef(n) = 1.0;
  Matrix m = Matrix::Zero(n, n);
  for (int k = 1; k <= n; ++k) {
    m = (a * m).eval();
    m.diagonal().array() += coef(n - k + 1);
    coef(n - k) = -(a * m).trace() / static_cast<double>(k);
  }
  Vector graded(n);
  for (int level = 0; level < n; ++level) graded(level) = coef(n - level);
  return graded;
}

std::pair<ScalarField, double> tree_weight_vector(const RateGraph& g, const ForestOptions& opts) {
  Vector w;
  if (use_enumeration(g, opts)) {
    w = enumerated_tree_weights(g);
    const Vector minors = tree_weight_minors(g);
    // The determinant route carries absolute error at the scale of the
    // dominant weight, so states whose weight is exponentially smaller (far
    // in rate) cannot match entrywise; the total-weight floor covers them.
    const double floor = 1e-12 * w.sum();
    for (int x = 0; x < g.size(); ++x)
      if (!rel_close(w(x), minors(x), 1e-9, floor))
        throw Error("tree-weight routes disagree at state " + g.state_name(x) + ": " +
                    short_num(w(x)) + " vs " + short_num(minors(x)));
  } else {
    w = tree_weight_minors(g);
  }
  const double total = w.sum();
  if (!(total >= 0.0) || !std::isfinite(total)) throw Error("total tree weight is not finite");
  return {ScalarField(std::move(w)), total};
}

Vector graded_forest_weights(const RateGraph& g, const ForestOptions& opts) {
  if (use_enumeration(g, opts)) {
    const ForestTables t = enumerate_tables(g, opts);
    const Vector poly = charpoly_forest_weights(generator(g));
    const double floor = 1e-12 * t.graded.maxCoeff();
    for (int m = 0; m < g.size(); ++m)
      if (!rel_close(t.graded(m), poly(m), 1e-9, floor))
        throw Error("graded weight routes disagree at arc count " + std::to_string(m));
    return t.graded;
  }
  return charpoly_forest_weights(generator(g));
}

TwoTreeWeights two_tree_weights(const RateGraph& g, int x, int y, const ForestOptions& opts) {
  require_state(g, x);
  require_state(g, y);
  TwoTreeWeights result;
  double marked_total = 0.0;
  if (use_enumeration(g, opts)) {
    const ForestTables t = enumerate_tables(g, opts);
    result.same = t.pair_same(x, y);
    result.split = t.pair_split(x, y);
    marked_total = t.pair_same(y, y);
  } else {
    const AlgebraicTables t = algebraic_tables(g);
    const double two_tree_total = t.graded(g.size() - 2);
    result.same = t.rho(y) * two_tree_total - t.total * t.group_inv(x, y);
    marked_total = t.rho(y) * two_tree_total - t.total * t.group_inv(y, y);
    if (x == y) {
      result.split = 0.0;
    } else {
      const Vector tau = hitting_times_linear(generator(g).matrix(), y);
      result.split = tau(x) * t.tree_weight(y);
    }
  }
  if (!rel_close(result.same + result.split, marked_total, 1e-10))
    throw Error("two-tree weight split is inconsistent: " + short_num(result.same) + " + " +
                short_num(result.split) + " vs " + short_num(marked_total));
  return result;
}

Matrix pair_same_matrix(const RateGraph& g, const ForestOptions& opts) {
  if (use_enumeration(g, opts)) return enumerate_tables(g, opts).pair_same;
  const AlgebraicTables t = algebraic_tables(g);
  const int n = g.size();
  const double two_tree_total = t.graded(n - 2);
  Matrix same(n, n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) same(x, y) = t.rho(y) * two_tree_total - t.total * t.group_inv(x, y);
  return same;
}

double total_two_tree_weight(const RateGraph& g, const ForestOptions& opts) {
  const int n = g.size();
  Vector by_probe = Vector::Zero(n);
  if (use_enumeration(g, opts)) {
    const ForestTables t = enumerate_tables(g, opts);
    for (int x = 0; x < n; ++x) by_probe(x) = t.pair_split.row(x).sum();
  } else {
    const Vector w = tree_weight_minors(g);
    const Matrix l = generator(g).matrix();
    for (int z = 0; z < n; ++z) {
      const Vector tau = hitting_times_linear(l, z);
      for (int x = 0; x < n; ++x) by_probe(x) += tau(x) * w(z);
    }
  }
  const double lo = by_probe.minCoeff();
  const double hi = by_probe.maxCoeff();
  if (hi - lo > 1e-10 * std::max(std::abs(hi), std::abs(lo)))
    throw XDependenceDetected(hi - lo);
  return by_probe.mean();
}

namespace {

struct LogEdge {
  int from = -1;
  int to = -1;
  double w = 0.0;
};

/// Maximum-weight spanning arborescence rooted at `root` (each other vertex
/// takes exactly one incoming edge), weight-only Chu-Liu/Edmonds. Returns
/// -infinity when no arborescence exists.
double max_arborescence(int n, std::vector<LogEdge> edges, int root) {
  const double ninf = -std::numeric_limits<double>::infinity();
  double total = 0.0;
  while (true) {
    std::vector<double> best_w(n, ninf);
    std::vector<int> best_from(n, -1);
    for (const auto& e : edges) {
      if (e.to == root || e.from == e.to) continue;
      if (e.w > best_w[e.to]) {
        best_w[e.to] = e.w;
        best_from[e.to] = e.from;
      }
    }
    for (int v = 0; v < n; ++v)
      if (v != root && best_from[v] == -1) return ninf;

    // Chase parent pointers to find cycles among the best picks.
    std::vector<int> mark(n, -1);
    std::vector<int> cycle_id(n, -1);
    int cycles = 0;
    for (int v = 0; v < n; ++v) {
      if (v == root) continue;
      int w = v;
      while (w != root && mark[w] == -1) {
        mark[w] = v;
        w = best_from[w];
      }
      if (w != root && mark[w] == v && cycle_id[w] == -1) {
        for (int u = best_from[w]; ; u = best_from[u]) {
          cycle_id[u] = cycles;
          if (u == w) break;
        }
        ++cycles;
      }
    }
    if (cycles == 0) {
      for (int v = 0; v < n; ++v)
        if (v != root) total += best_w[v];
      return total;
    }

    // Contract every cycle; only the cycle picks are committed this round.
    std::vector<int> relabel(n, -1);
    int next_id = cycles;
    for (int v = 0; v < n; ++v) relabel[v] = cycle_id[v] >= 0 ? cycle_id[v] : next_id++;
    for (int v = 0; v < n; ++v)
      if (v != root && cycle_id[v] >= 0) total += best_w[v];

    std::vector<LogEdge> contracted;
    contracted.reserve(edges.size());
    for (const auto& e : edges) {
      const int u = relabel[e.from];
      const int v = relabel[e.to];
      if (u == v) continue;
      double w = e.w;
      if (cycle_id[e.to] >= 0) w -= best_w[e.to];
      contracted.push_back({u, v, w});
    }
    edges = std::move(contracted);
    root = relabel[root];
    n = next_id;
  }
}

}  // namespace

BestTree best_in_tree(const RateGraph& g) {
  const int n = g.size();
  std::vector<LogEdge> reversed;
  reversed.reserve(g.arcs().size());
  for (const auto& a : g.arcs()) reversed.push_back({a.to, a.from, std::log(a.rate)});

  BestTree best;
  best.log_weight = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < n; ++r) {
    const double lw = max_arborescence(n, reversed, r);
    if (lw > best.log_weight) {
      best.log_weight = lw;
      best.root = r;
    }
  }
  if (best.root == -1 || !std::isfinite(best.log_weight))
    throw Error("no spanning in-tree found; the graph should not have validated");
  best.weight = std::exp(best.log_weight);
  return best;
}

Rational rational_weight(const std::vector<int>& arc_ids, const std::vector<Rational>& arc_rates) {
  Rational product(1);
  for (int id : arc_ids) product *= arc_rates.at(static_cast<std::size_t>(id));
  return product;
}

}  // namespace mjpot::forest
