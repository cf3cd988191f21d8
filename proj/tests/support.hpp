#pragma once

// Test-only reference implementations, independent of the library's
// algorithmic paths they are used to check.

#include <algorithm>
#include <cmath>
#include <vector>

#include "gtr/oracle.hpp"
#include "gtr/space_graph.hpp"

namespace gtr::testing {

// Floyd-Warshall all-pairs table over the same metric weights as apsp().
inline std::vector<std::vector<double>> floyd_warshall(const SpaceGraph& g) {
  const int n = g.size();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, kInf));
  for (int v = 0; v < n; ++v) {
    d[v][v] = 0.0;
    for (NodeId u : g.neighbors(v)) d[v][u] = g.metric_distance(v, u);
  }
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      if (d[i][k] == kInf) continue;
      for (int j = 0; j < n; ++j) {
        const double via = d[i][k] + d[k][j];
        if (via < d[i][j]) d[i][j] = via;
      }
    }
  }
  return d;
}

// Exhaustive action-value oracle: Q(v,u) = r(v,u) plus the best cumulative
// reward over simple continuations u -> ... -> D (the continuation is simple
// on its own; it may pass through v). Memoized over (node, visited bitmask);
// graphs must have n <= ~20 for the mask to fit, intended for n <= 12.
class ExhaustiveDp {
 public:
  ExhaustiveDp(const SpaceGraph& g, const PairContext& ctx, double penalty_c)
      : g_(g),
        ctx_(ctx),
        penalty_c_(penalty_c),
        dist_(dijkstra(g, ctx.dest)),
        memo_(static_cast<std::size_t>(g.size()) << g.size(), kNotComputed) {}

  double qvalue(NodeId v, NodeId u) {
    const double r = reward(ctx_, g_, v, u, dist_, penalty_c_);
    if (u == ctx_.dest) return r;
    const double cont = best(u, 1u << u);
    return cont == -kInf ? -kInf : r + cont;
  }

 private:
  static constexpr double kNotComputed = 1.0;  // rewards are never positive

  double best(NodeId at, unsigned mask) {
    double& slot = memo_[(static_cast<std::size_t>(at) << g_.size()) | mask];
    if (slot != kNotComputed) return slot;
    double value = -kInf;
    for (NodeId w : g_.neighbors(at)) {
      if (mask & (1u << w)) continue;
      if (!std::isfinite(dist_[w])) continue;
      const double r = reward(ctx_, g_, at, w, dist_, penalty_c_);
      if (w == ctx_.dest) {
        value = std::max(value, r);
        continue;
      }
      const double cont = best(w, mask | (1u << w));
      if (cont != -kInf) value = std::max(value, r + cont);
    }
    slot = value;
    return value;
  }

  const SpaceGraph& g_;
  PairContext ctx_;
  double penalty_c_;
  std::vector<double> dist_;
  std::vector<double> memo_;
};

// Brute-force path-stretch check by enumerating all simple paths.
inline double min_simple_path_length(const SpaceGraph& g, NodeId from,
                                     NodeId to) {
  double best = kInf;
  std::vector<char> visited(g.size(), 0);
  std::vector<NodeId> stack;
  const auto walk = [&](auto&& self, NodeId v, double len) -> void {
    if (len >= best) return;
    if (v == to) {
      best = len;
      return;
    }
    visited[v] = 1;
    for (NodeId u : g.neighbors(v)) {
      if (!visited[u]) self(self, u, len + g.metric_distance(v, u));
    }
    visited[v] = 0;
  };
  walk(walk, from, 0.0);
  return best;
}

inline SpaceGraph line_graph(int n, double spacing = 1.0, double radius = 1.1) {
  std::vector<Coord> pts;
  for (int i = 0; i < n; ++i) pts.push_back({spacing * i, 0.0});
  return SpaceGraph::from_points(Space::Euclidean, radius, pts);
}

}  // namespace gtr::testing
