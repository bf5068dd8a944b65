#pragma once

#include "mjpot/graph.hpp"

#include <boost/rational.hpp>

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace mjpot::forest {

using Rational = boost::rational<long long>;

enum class Route {
  Auto,       // enumerate up to the cap, switch to linear algebra above it
  Enumerate,  // force enumeration, CapExceeded above the cap
  Algebraic,  // force the linear-algebra route
};

struct ForestOptions {
  int enumeration_cap = 10;
  Route route = Route::Auto;
};

/// Spanning in-forest: a set of arcs in which every non-root vertex has
/// exactly one outgoing arc and following arcs always reaches a root.
/// A forest with n-1 arcs is a spanning in-tree.
struct RootedForest {
  std::vector<int> arc_ids;   // sorted ids into RateGraph::arcs()
  std::vector<int> root_of;   // component root for every vertex
  double weight = 1.0;

  std::vector<int> roots() const;
  bool valid_for(const RateGraph& g) const;
};

struct ForestEnsemble {
  std::string descriptor;
  double total_weight = 0.0;
  std::size_t count = 0;
  std::vector<RootedForest> members;
};

/// Everything one enumeration sweep can aggregate:
///  - tree_weight(x): total weight of spanning in-trees rooted at x
///  - graded(m): total weight of m-arc in-forests
///  - pair_same(x,y): two-component forests (n-2 arcs) with x and y in the
///    same component rooted at y; the diagonal fixes only y's root
///  - pair_split(x,y): two-component forests separating x from y, with y a
///    root of its own component
///  - graded_pair[m](x,y): m-arc forests with x in the component rooted at y
struct ForestTables {
  Vector tree_weight;
  double total_tree_weight = 0.0;
  Vector graded;
  Matrix pair_same;
  Matrix pair_split;
  std::vector<Matrix> graded_pair;
};

ForestTables enumerate_tables(const RateGraph& g, const ForestOptions& opts = {});

ForestEnsemble enumerate_in_trees(const RateGraph& g, int root, const ForestOptions& opts = {});
ForestEnsemble enumerate_two_tree_forests(const RateGraph& g, const ForestOptions& opts = {});

/// Tree weights by root plus their total. Below the cap both the enumeration
/// and the principal-minor route are computed and must agree.
std::pair<ScalarField, double> tree_weight_vector(const RateGraph& g, const ForestOptions& opts = {});

/// w(x) as the principal minor of the Laplacian with row and column x removed.
Vector tree_weight_minors(const RateGraph& g);

/// Graded forest weights from the characteristic polynomial of the Laplacian
/// (Faddeev-LeVerrier recurrence); entry m is the total m-arc forest weight.
Vector charpoly_forest_weights(const GeneratorMatrix& gen);

Vector graded_forest_weights(const RateGraph& g, const ForestOptions& opts = {});

struct TwoTreeWeights {
  double same = 0.0;   // x in the component rooted at y
  double split = 0.0;  // x separated from y's component
};

TwoTreeWeights two_tree_weights(const RateGraph& g, int x, int y, const ForestOptions& opts = {});
Matrix pair_same_matrix(const RateGraph& g, const ForestOptions& opts = {});

/// Total weight of two-component forests with a marked root; independent of
/// the probe state used to split, which is verified across all probes.
double total_two_tree_weight(const RateGraph& g, const ForestOptions& opts = {});

struct BestTree {
  double weight = 0.0;
  double log_weight = 0.0;
  int root = -1;
};

/// Maximum-weight spanning in-tree over all roots, computed in log space
/// with the Chu-Liu/Edmonds contraction. Serves as a positive lower-bound
/// witness for the total tree weight.
BestTree best_in_tree(const RateGraph& g);

/// Exact weight of an enumerated forest for rational-rate cross-checks; the
/// ids index into the graph's arc list, rates are supplied separately.
Rational rational_weight(const std::vector<int>& arc_ids, const std::vector<Rational>& arc_rates);

enum class OutArcRule : unsigned char { Optional, Required, Forbidden };

/// Low-level sweep over all in-forests compatible with the per-vertex rule.
/// The visitor sees (choice, arc_count, weight) where choice[v] is the arc id
/// taken by v or -1.
void sweep_in_forests(const RateGraph& g, const std::vector<OutArcRule>& rule,
                      const std::function<void(const std::vector<int>&, int, double)>& visit);

/// Component roots induced by an out-arc choice vector.
std::vector<int> roots_of_choice(const RateGraph& g, const std::vector<int>& choice);

}  // namespace mjpot::forest
