#pragma once

// Brute-force references for the forest combinatorics. Candidate forests are
// found by testing every subset of the arc list, which shares nothing with
// the library's per-vertex choice sweep beyond the graph itself, so the two
// routes pin each other.

#include "mjpot/graph.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

struct Forest {
  std::vector<int> arc_ids;
  std::vector<int> root_of;
  int arc_count = 0;
  double weight = 1.0;
};

inline std::vector<Forest> all_forests(const mjpot::RateGraph& g) {
  const auto& arcs = g.arcs();
  const int n = g.size();
  const int m = static_cast<int>(arcs.size());
  if (m > 22)
    throw std::runtime_error("subset sweep wants at most 22 arcs, got " + std::to_string(m));
  std::vector<Forest> found;
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    std::vector<int> next(n, -1);
    bool ok = true;
    for (int a = 0; a < m && ok; ++a) {
      if (!((mask >> a) & 1u)) continue;
      if (next[arcs[a].from] != -1) ok = false;
      next[arcs[a].from] = arcs[a].to;
    }
    if (!ok) continue;
    Forest f;
    f.root_of.assign(n, -1);
    for (int v = 0; v < n && ok; ++v) {
      int cur = v;
      int steps = 0;
      while (next[cur] != -1) {
        cur = next[cur];
        if (++steps > n) {
          ok = false;
          break;
        }
      }
      f.root_of[v] = cur;
    }
    if (!ok) continue;
    for (int a = 0; a < m; ++a) {
      if (!((mask >> a) & 1u)) continue;
      f.arc_ids.push_back(a);
      f.weight *= arcs[a].rate;
    }
    f.arc_count = static_cast<int>(f.arc_ids.size());
    found.push_back(std::move(f));
  }
  return found;
}

inline double tree_weight(const std::vector<Forest>& forests, int n, int root) {
  double total = 0.0;
  for (const auto& f : forests)
    if (f.arc_count == n - 1 && f.root_of[root] == root) total += f.weight;
  return total;
}

inline double graded_weight(const std::vector<Forest>& forests, int m) {
  double total = 0.0;
  for (const auto& f : forests)
    if (f.arc_count == m) total += f.weight;
  return total;
}

// m-arc forests in which y is the root of x's component.
inline double family_weight(const std::vector<Forest>& forests, int x, int y, int m) {
  double total = 0.0;
  for (const auto& f : forests)
    if (f.arc_count == m && f.root_of[x] == y) total += f.weight;
  return total;
}

// Two-component forests with y a root and x in the other component.
inline double split_weight(const std::vector<Forest>& forests, int n, int x, int y) {
  double total = 0.0;
  for (const auto& f : forests)
    if (f.arc_count == n - 2 && f.root_of[y] == y && f.root_of[x] != y) total += f.weight;
  return total;
}

inline std::vector<char> reachable(int n, const std::vector<std::pair<int, int>>& arcs, int from) {
  std::vector<char> seen(n, 0);
  std::vector<int> queue = {from};
  seen[from] = 1;
  while (!queue.empty()) {
    const int v = queue.back();
    queue.pop_back();
    for (const auto& [a, b] : arcs)
      if (a == v && !seen[b]) {
        seen[b] = 1;
        queue.push_back(b);
      }
  }
  return seen;
}

}  // namespace oracle
