#pragma once

#include "mjpot/errors.hpp"
#include "mjpot/types.hpp"

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace mjpot {

struct Arc {
  int from = -1;
  int to = -1;
  double rate = 0.0;
};

struct ArcSpec {
  std::string from;
  std::string to;
  double rate = 0.0;
};

struct ParamArc {
  int from = -1;
  int to = -1;
  double prefactor = 0.0;
  double barrier = 0.0;
};

struct ParamArcSpec {
  std::string from;
  std::string to;
  double prefactor = 0.0;
  double barrier = 0.0;
};

/// Strong-connectivity certificate. On failure the witness pair names two
/// states with no directed path from the first to the second.
struct Connectivity {
  bool strongly_connected = false;
  int witness_from = -1;
  int witness_to = -1;
};

Connectivity check_strong_connectivity(int n, const std::vector<std::pair<int, int>>& arcs);

struct GraphOptions {
  /// Parallel (from, to) arcs are merged by summing rates, with a note.
  /// Disable to reject them instead.
  bool merge_parallel_arcs = true;
};

/// Finite state space with positive directed jump rates, strongly connected
/// by construction. Arcs are stored row-major by (from, to); state order is
/// the order given at creation.
class RateGraph {
 public:
  static RateGraph create(std::vector<std::string> states, const std::vector<ArcSpec>& arcs,
                          const GraphOptions& opts = {});
  static RateGraph create_indexed(std::vector<std::string> states, std::vector<Arc> arcs,
                                  const GraphOptions& opts = {});

  int size() const { return static_cast<int>(states_.size()); }
  const std::vector<std::string>& states() const { return states_; }
  const std::string& state_name(int i) const { return states_[i]; }
  int state_index(const std::string& name) const;
  const std::vector<Arc>& arcs() const { return arcs_; }
  const std::vector<int>& out_arcs(int x) const { return out_[x]; }
  double rate(int x, int y) const;
  double exit_rate(int x) const { return exit_[x]; }
  double max_rate() const { return max_rate_; }
  const std::vector<std::string>& notes() const { return notes_; }
  void add_note(std::string note) { notes_.push_back(std::move(note)); }

 private:
  RateGraph() = default;

  std::vector<std::string> states_;
  std::unordered_map<std::string, int> index_;
  std::vector<Arc> arcs_;
  std::vector<std::vector<int>> out_;
  std::vector<double> exit_;
  double max_rate_ = 0.0;
  std::vector<std::string> notes_;
};

Connectivity check_irreducible(const RateGraph& g);

/// One-parameter rate family k(x,y) = prefactor * exp(-lambda * barrier).
/// Topology, and hence irreducibility, is fixed by the prefactors alone.
class ParamRateGraph {
 public:
  static ParamRateGraph create(std::vector<std::string> states,
                               const std::vector<ParamArcSpec>& arcs,
                               const GraphOptions& opts = {});

  /// Instantiates the rates at one parameter value. Rates that underflow are
  /// clamped to the smallest positive normal double, with a note on the
  /// returned graph.
  RateGraph evaluate_at(double lambda) const;

  int size() const { return static_cast<int>(states_.size()); }
  const std::vector<std::string>& states() const { return states_; }
  const std::vector<ParamArc>& arcs() const { return arcs_; }

 private:
  ParamRateGraph() = default;

  std::vector<std::string> states_;
  std::vector<ParamArc> arcs_;
};

/// Backward generator: off-diagonal entries are jump rates, each diagonal
/// entry the negated exit rate, so rows sum to zero.
class GeneratorMatrix {
 public:
  explicit GeneratorMatrix(Matrix m);

  const Matrix& matrix() const { return m_; }
  int size() const { return static_cast<int>(m_.rows()); }

 private:
  Matrix m_;
};

GeneratorMatrix generator(const RateGraph& g);

/// Negated generator; principal minors of this matrix carry the forest
/// weights used throughout.
Matrix laplacian(const RateGraph& g);

double stationary_mean(const Vector& f, const Vector& rho);
bool is_centered(const Vector& f, const Vector& rho, double tol = 1e-12);

}  // namespace mjpot
