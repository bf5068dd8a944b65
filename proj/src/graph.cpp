#include "mjpot/graph.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <map>
#include <sstream>

namespace mjpot {

namespace {

std::unordered_map<std::string, int> build_index(const std::vector<std::string>& states) {
  if (states.size() < 2) throw FormatError("a rate graph needs at least two states");
  std::unordered_map<std::string, int> index;
  index.reserve(states.size());
  for (int i = 0; i < static_cast<int>(states.size()); ++i) {
    if (states[i].empty()) throw FormatError("empty state name");
    if (!index.emplace(states[i], i).second) throw FormatError("duplicate state name " + states[i]);
  }
  return index;
}

std::string format_value(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

Connectivity check_strong_connectivity(int n, const std::vector<std::pair<int, int>>& arcs) {
  std::vector<std::vector<int>> fwd(n), bwd(n);
  for (const auto& [u, v] : arcs) {
    fwd[u].push_back(v);
    bwd[v].push_back(u);
  }
  auto reach = [n](const std::vector<std::vector<int>>& adj) {
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v : adj[u])
        if (!seen[v]) {
          seen[v] = 1;
          stack.push_back(v);
        }
    }
    return seen;
  };
  if (n <= 0) return {true, -1, -1};
  auto down = reach(fwd);
  for (int v = 0; v < n; ++v)
    if (!down[v]) return {false, 0, v};
  auto up = reach(bwd);
  for (int v = 0; v < n; ++v)
    if (!up[v]) return {false, v, 0};
  return {true, -1, -1};
}

RateGraph RateGraph::create(std::vector<std::string> states, const std::vector<ArcSpec>& arcs,
                            const GraphOptions& opts) {
  auto index = build_index(states);
  std::vector<Arc> indexed;
  indexed.reserve(arcs.size());
  for (const auto& a : arcs) {
    auto from = index.find(a.from);
    if (from == index.end()) throw UnknownState(a.from);
    auto to = index.find(a.to);
    if (to == index.end()) throw UnknownState(a.to);
    indexed.push_back({from->second, to->second, a.rate});
  }
  return create_indexed(std::move(states), std::move(indexed), opts);
}

RateGraph RateGraph::create_indexed(std::vector<std::string> states, std::vector<Arc> arcs,
                                    const GraphOptions& opts) {
  RateGraph g;
  g.states_ = std::move(states);
  g.index_ = build_index(g.states_);
  const int n = g.size();

  std::map<std::pair<int, int>, double> merged;
  for (const auto& a : arcs) {
    if (a.from < 0 || a.from >= n || a.to < 0 || a.to >= n)
      throw UnknownState("#" + std::to_string(a.from < 0 || a.from >= n ? a.from : a.to));
    if (a.from == a.to) throw SelfLoop(g.states_[a.from]);
    if (!(a.rate > 0.0) || !std::isfinite(a.rate))
      throw NonpositiveRate(g.states_[a.from], g.states_[a.to], a.rate);
    auto [it, fresh] = merged.emplace(std::make_pair(a.from, a.to), a.rate);
    if (!fresh) {
      if (!opts.merge_parallel_arcs) throw DuplicateArc(g.states_[a.from], g.states_[a.to]);
      it->second += a.rate;
      g.notes_.push_back("merged parallel arc (" + g.states_[a.from] + ", " + g.states_[a.to] +
                         ") by summing rates");
    }
  }

  g.arcs_.reserve(merged.size());
  for (const auto& [key, rate] : merged) g.arcs_.push_back({key.first, key.second, rate});

  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(g.arcs_.size());
  for (const auto& a : g.arcs_) pairs.emplace_back(a.from, a.to);
  auto conn = check_strong_connectivity(n, pairs);
  if (!conn.strongly_connected)
    throw NotStronglyConnected(g.states_[conn.witness_from], g.states_[conn.witness_to]);

  g.out_.assign(n, {});
  g.exit_.assign(n, 0.0);
  for (int id = 0; id < static_cast<int>(g.arcs_.size()); ++id) {
    const Arc& a = g.arcs_[id];
    g.out_[a.from].push_back(id);
    g.exit_[a.from] += a.rate;
    g.max_rate_ = std::max(g.max_rate_, a.rate);
  }
  return g;
}

int RateGraph::state_index(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw UnknownState(name);
  return it->second;
}

double RateGraph::rate(int x, int y) const {
  for (int id : out_[x])
    if (arcs_[id].to == y) return arcs_[id].rate;
  return 0.0;
}

Connectivity check_irreducible(const RateGraph& g) {
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(g.arcs().size());
  for (const auto& a : g.arcs()) pairs.emplace_back(a.from, a.to);
  return check_strong_connectivity(g.size(), pairs);
}

ParamRateGraph ParamRateGraph::create(std::vector<std::string> states,
                                      const std::vector<ParamArcSpec>& arcs,
                                      const GraphOptions& opts) {
  ParamRateGraph pg;
  pg.states_ = std::move(states);
  auto index = build_index(pg.states_);

  std::map<std::pair<int, int>, ParamArc> merged;
  for (const auto& a : arcs) {
    auto from = index.find(a.from);
    if (from == index.end()) throw UnknownState(a.from);
    auto to = index.find(a.to);
    if (to == index.end()) throw UnknownState(a.to);
    if (from->second == to->second) throw SelfLoop(a.from);
    if (!(a.prefactor > 0.0) || !std::isfinite(a.prefactor))
      throw NonpositiveRate(a.from, a.to, a.prefactor);
    if (!std::isfinite(a.barrier)) throw FormatError("non-finite barrier on arc (" + a.from + ", " + a.to + ")");
    ParamArc pa{from->second, to->second, a.prefactor, a.barrier};
    // No merge rule across distinct barriers, so parametric duplicates are
    // always rejected.
    if (!merged.emplace(std::make_pair(pa.from, pa.to), pa).second)
      throw DuplicateArc(a.from, a.to);
  }
  (void)opts;

  pg.arcs_.reserve(merged.size());
  std::vector<std::pair<int, int>> pairs;
  for (const auto& [key, pa] : merged) {
    pg.arcs_.push_back(pa);
    pairs.emplace_back(key.first, key.second);
  }
  auto conn = check_strong_connectivity(pg.size(), pairs);
  if (!conn.strongly_connected)
    throw NotStronglyConnected(pg.states_[conn.witness_from], pg.states_[conn.witness_to]);
  return pg;
}

RateGraph ParamRateGraph::evaluate_at(double lambda) const {
  if (!std::isfinite(lambda)) throw FormatError("non-finite parameter value");
  std::vector<Arc> arcs;
  arcs.reserve(arcs_.size());
  std::vector<std::string> clamped;
  for (const auto& a : arcs_) {
    double k = a.prefactor * std::exp(-lambda * a.barrier);
    if (!(k >= DBL_MIN)) {
      k = DBL_MIN;
      clamped.push_back("clamped rate of arc (" + states_[a.from] + ", " + states_[a.to] +
                        ") to the smallest positive normal at lambda=" + format_value(lambda));
    }
    if (!std::isfinite(k))
      throw NonpositiveRate(states_[a.from], states_[a.to], k);
    arcs.push_back({a.from, a.to, k});
  }
  RateGraph g = RateGraph::create_indexed(states_, std::move(arcs));
  for (auto& note : clamped) g.add_note(std::move(note));
  return g;
}

GeneratorMatrix::GeneratorMatrix(Matrix m) : m_(std::move(m)) {
  const auto n = m_.rows();
  if (n != m_.cols() || n < 2) throw FormatError("generator matrix must be square, size at least two");
  const double scale = norm_max(m_);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (m_(i, i) > 0) throw FormatError("generator diagonal must be nonpositive");
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j && m_(i, j) < 0) throw FormatError("generator off-diagonal must be nonnegative");
    if (std::abs(m_.row(i).sum()) > 1e-12 * std::max(scale, 1.0))
      throw FormatError("generator row " + std::to_string(i) + " does not sum to zero");
  }
}

GeneratorMatrix generator(const RateGraph& g) {
  const int n = g.size();
  Matrix m = Matrix::Zero(n, n);
  for (const auto& a : g.arcs()) m(a.from, a.to) = a.rate;
  for (int x = 0; x < n; ++x) m(x, x) = -g.exit_rate(x);
  return GeneratorMatrix(std::move(m));
}

Matrix laplacian(const RateGraph& g) { return -generator(g).matrix(); }

double stationary_mean(const Vector& f, const Vector& rho) { return rho.dot(f); }

bool is_centered(const Vector& f, const Vector& rho, double tol) {
  return std::abs(stationary_mean(f, rho)) <= tol * std::max(norm_inf(f), 0.0) + 1e-300;
}

}  // namespace mjpot
