#include "gtr/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <queue>

namespace gtr {

std::vector<double> dijkstra(const SpaceGraph& g, NodeId source) {
  const int n = g.size();
  std::vector<double> dist(n, kInf);
  using Entry = std::pair<double, NodeId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  dist[source] = 0.0;
  heap.push({0.0, source});
  while (!heap.empty()) {
    const auto [d, v] = heap.top();
    heap.pop();
    if (d > dist[v]) continue;
    for (NodeId u : g.neighbors(v)) {
      const double nd = d + g.metric_distance(v, u);
      if (nd < dist[u]) {
        dist[u] = nd;
        heap.push({nd, u});
      }
    }
  }
  return dist;
}

std::vector<std::vector<double>> apsp(const SpaceGraph& g) {
  std::vector<std::vector<double>> table;
  table.reserve(g.size());
  for (NodeId s = 0; s < g.size(); ++s) table.push_back(dijkstra(g, s));
  return table;
}

PairContext pair_context(const SpaceGraph& g, NodeId origin, NodeId dest,
                         double epsilon) {
  const auto dist = dijkstra(g, dest);
  return pair_context(g, origin, dest, epsilon, dist);
}

PairContext pair_context(const SpaceGraph& g, NodeId origin, NodeId dest,
                         double epsilon, std::span<const double> dist_to_dest) {
  if (origin == dest) throw DegeneratePairError("origin equals destination");
  PairContext ctx;
  ctx.origin = origin;
  ctx.dest = dest;
  ctx.epsilon = epsilon;
  ctx.d_e = g.metric_distance(origin, dest);
  ctx.d_sp = dist_to_dest[origin];
  if (!std::isfinite(ctx.d_sp)) {
    throw NoPathError("destination unreachable from origin");
  }
  if (ctx.d_e <= 0.0) {
    throw DegeneratePairError("coincident endpoints: path stretch undefined");
  }
  ctx.zeta = ctx.d_sp / ctx.d_e;
  return ctx;
}

double reward(const PairContext& ctx, const SpaceGraph& g, NodeId v, NodeId u,
              std::span<const double> dist_to_dest, double penalty_c) {
  if (v == ctx.dest) {
    throw std::domain_error("no actions from the destination state");
  }
  const double step = g.metric_distance(v, u);
  const double continuation = step + dist_to_dest[u];
  const double margin = dist_to_dest[v] * ctx.stretch_bound();
  if (continuation <= margin) return -step;
  return -step - penalty_c * (continuation - margin);
}

std::vector<double> qstar_row(const SpaceGraph& g, const PairContext& ctx,
                              std::span<const double> dist_to_dest, NodeId v,
                              double penalty_c) {
  const auto& nbrs = g.neighbors(v);
  std::vector<double> row(nbrs.size(), -kInf);
  if (v == ctx.dest) return row;
  const double margin = dist_to_dest[v] * ctx.stretch_bound();
  for (std::size_t k = 0; k < nbrs.size(); ++k) {
    const NodeId u = nbrs[k];
    if (!std::isfinite(dist_to_dest[u])) continue;  // -inf sentinel stays
    const double step = g.metric_distance(v, u);
    const double continuation = step + dist_to_dest[u];
    if (continuation <= margin) {
      row[k] = -continuation;
    } else {
      // max_w Q*(u,w) = -d_sp(u,D): attained by u's shortest-path successor,
      // whose whole continuation is bound-respecting; every alternative pays
      // at least its extra length.
      row[k] = -step - penalty_c * (continuation - margin) - dist_to_dest[u];
    }
  }
  return row;
}

OracleTable optimal_q(const SpaceGraph& g, const PairContext& ctx,
                      double penalty_c) {
  OracleTable table;
  table.origin = ctx.origin;
  table.dest = ctx.dest;
  table.zeta = ctx.zeta;
  table.epsilon = ctx.epsilon;
  table.penalty_c = penalty_c;
  table.dist_to_dest = dijkstra(g, ctx.dest);
  table.qstar.resize(g.size());

  // Process nodes in increasing d_sp(.,D); the value of each node is fixed by
  // its bound-respecting edges before any penalty edge pointing back at it is
  // evaluated.
  std::vector<NodeId> order(g.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    return table.dist_to_dest[a] < table.dist_to_dest[b];
  });
  for (NodeId v : order) {
    if (v == ctx.dest) continue;
    table.qstar[v] = qstar_row(g, ctx, table.dist_to_dest, v, penalty_c);
  }
  return table;
}

void dump_oracle(std::ostream& out, const SpaceGraph& g, const OracleTable& t) {
  out << "D v u d_sp(v,D) qstar(v,u)\n";
  for (NodeId v = 0; v < g.size(); ++v) {
    const auto& nbrs = g.neighbors(v);
    for (std::size_t k = 0; k < t.qstar[v].size(); ++k) {
      out << t.dest << ' ' << v << ' ' << nbrs[k] << ' '
          << t.dist_to_dest[v] << ' ' << t.qstar[v][k] << "\n";
    }
  }
}

}  // namespace gtr
