#include "gtr/policy.hpp"

#include <algorithm>
#include <cmath>

namespace gtr {

Policy Policy::neural(const QNetwork* net, std::string label) {
  Policy p;
  p.kind_ = Kind::NeuralQ;
  p.net_ = net;
  p.name_ = std::move(label);
  return p;
}
Policy Policy::greedy_forwarding() {
  Policy p;
  p.kind_ = Kind::GreedyForwarding;
  p.name_ = "gf";
  return p;
}
Policy Policy::sr_node_stretch() {
  Policy p;
  p.kind_ = Kind::SrNodeStretch;
  p.name_ = "sr-ns";
  return p;
}
Policy Policy::two_linear(TwoLinearParams params) {
  Policy p;
  p.kind_ = Kind::TwoLinearAction;
  p.params_ = params;
  p.name_ = "two-linear";
  return p;
}
Policy Policy::oracle_shortest() {
  Policy p;
  p.kind_ = Kind::OracleShortest;
  p.name_ = "oracle";
  return p;
}

std::optional<NodeId> Policy::choose(const LocalView& view) const {
  if (view.neighbors.empty()) return std::nullopt;
  const double inv_r = 1.0 / view.norm_radius;

  // Higher key wins; ties go to the lowest node id (neighbors are id-sorted,
  // so a strict > keeps the first of a tie).
  std::vector<double> key(view.neighbors.size());
  switch (kind_) {
    case Kind::NeuralQ: {
      const QNetwork& net = *net_;
      std::vector<double> feats(view.neighbors.size() * net.omega);
      for (std::size_t i = 0; i < view.neighbors.size(); ++i) {
        const auto& nb = view.neighbors[i];
        double* f = feats.data() + i * net.omega;
        if (net.schema == FeatureSchema::DistOnly) {
          f[0] = view.dist_to_dest * inv_r;
          f[1] = nb.dist_to_dest * inv_r;
        } else {
          f[0] = view.dist_to_dest * inv_r;
          f[1] = view.stretch;
          f[2] = nb.dist_to_dest * inv_r;
          f[3] = nb.stretch;
        }
      }
      net.forward_batch(feats, view.neighbors.size(), key.data());
      break;
    }
    case Kind::GreedyForwarding:
      for (std::size_t i = 0; i < key.size(); ++i) {
        key[i] = -view.neighbors[i].dist_to_dest;
      }
      break;
    case Kind::SrNodeStretch:
      // The published +0.64 offset does not move the argmin.
      for (std::size_t i = 0; i < key.size(); ++i) {
        key[i] = -view.neighbors[i].stretch;
      }
      break;
    case Kind::TwoLinearAction:
      for (std::size_t i = 0; i < key.size(); ++i) {
        const auto& nb = view.neighbors[i];
        key[i] = params_.score(view.dist_to_dest * inv_r, nb.stretch,
                               nb.dist_to_dest * inv_r);
      }
      break;
    case Kind::OracleShortest:
      for (std::size_t i = 0; i < key.size(); ++i) {
        key[i] = -view.neighbors[i].oracle_cost;
      }
      break;
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < key.size(); ++i) {
    if (key[i] > key[best]) best = i;
  }
  return view.neighbors[best].id;
}

LocalView make_local_view(const SpaceGraph& g, const PairContext& ctx, NodeId v,
                          const std::vector<char>& excluded,
                          const std::vector<double>* oracle_dist) {
  LocalView view;
  view.node = v;
  view.norm_radius = g.radius();
  view.dist_to_dest = g.metric_distance(v, ctx.dest);
  view.stretch = node_stretch(g, ctx.origin, ctx.dest, v);
  for (NodeId u : g.neighbors(v)) {
    if (excluded[u]) continue;
    NeighborView nb;
    nb.id = u;
    nb.edge_len = g.metric_distance(v, u);
    nb.dist_to_dest = g.metric_distance(u, ctx.dest);
    nb.stretch = node_stretch(g, ctx.origin, ctx.dest, u);
    if (oracle_dist) nb.oracle_cost = nb.edge_len + (*oracle_dist)[u];
    view.neighbors.push_back(nb);
  }
  return view;
}

std::optional<NodeId> choose_forwarder(const Policy& policy, const SpaceGraph& g,
                                       const PairContext& ctx, NodeId v,
                                       const std::vector<char>& visited,
                                       const std::vector<double>* oracle_dist) {
  return policy.choose(make_local_view(g, ctx, v, visited, oracle_dist));
}

namespace {

// Depth-first recovery from `start` restricted to {w : ns(O,D,w) <= bound}
// (start and destination are always admitted). Neighbors expand in id order.
// Traversal cost counts every move including backtracks; the final walk is
// the stack when the destination is found.
struct DfsOutcome {
  bool found = false;
  std::vector<NodeId> walk;
  double traversal_len = 0.0;
  double walk_len = 0.0;
};

DfsOutcome dfs_in_ellipse(const SpaceGraph& g, const PairContext& ctx,
                          NodeId start, double bound,
                          const std::vector<char>& removed) {
  const int n = g.size();
  std::vector<char> admitted(n, 0);
  for (NodeId w = 0; w < n; ++w) {
    if (removed[w]) continue;
    if (w == start || w == ctx.dest ||
        node_stretch(g, ctx.origin, ctx.dest, w) <= bound) {
      admitted[w] = 1;
    }
  }
  DfsOutcome out;
  std::vector<char> seen(n, 0);
  std::vector<NodeId> stack{start};
  std::vector<std::size_t> next_idx{0};
  seen[start] = 1;
  out.walk.push_back(start);
  while (!stack.empty()) {
    const NodeId v = stack.back();
    if (v == ctx.dest) {
      out.found = true;
      out.walk = stack;
      double len = 0.0;
      for (std::size_t i = 1; i < stack.size(); ++i) {
        len += g.metric_distance(stack[i - 1], stack[i]);
      }
      out.walk_len = len;
      return out;
    }
    const auto& nbrs = g.neighbors(v);
    bool advanced = false;
    while (next_idx.back() < nbrs.size()) {
      const NodeId u = nbrs[next_idx.back()++];
      if (!admitted[u] || seen[u]) continue;
      seen[u] = 1;
      out.traversal_len += g.metric_distance(v, u);
      stack.push_back(u);
      next_idx.push_back(0);
      advanced = true;
      break;
    }
    if (!advanced) {
      stack.pop_back();
      next_idx.pop_back();
      if (!stack.empty()) {
        out.traversal_len += g.metric_distance(v, stack.back());
      }
    }
  }
  return out;
}

}  // namespace

RouteResult route(const Policy& policy, const SpaceGraph& g,
                  const PairContext& ctx, Fallback fallback,
                  double ellipse_bound,
                  const std::vector<double>* oracle_dist) {
  RouteResult res;
  std::vector<char> visited(g.size(), 0);
  std::vector<char> removed(g.size(), 0);
  res.path.push_back(ctx.origin);
  visited[ctx.origin] = 1;
  double len = 0.0;
  NodeId v = ctx.origin;
  while (v != ctx.dest) {
    const auto next = choose_forwarder(policy, g, ctx, v, visited, oracle_dist);
    if (!next) break;
    len += g.metric_distance(v, *next);
    v = *next;
    visited[v] = 1;
    res.path.push_back(v);
    ++res.greedy_hops;
  }
  if (v == ctx.dest) {
    res.delivered = true;
    res.d_p = len;
    res.d_p_final = len;
    return res;
  }
  if (fallback == Fallback::DfsInEllipse) {
    res.used_fallback = true;
    const double bound =
        ellipse_bound > 0.0 ? ellipse_bound : ctx.stretch_bound();
    const auto dfs = dfs_in_ellipse(g, ctx, v, bound, removed);
    if (dfs.found) {
      res.delivered = true;
      res.d_p = len + dfs.traversal_len;
      res.d_p_final = len + dfs.walk_len;
      res.path.insert(res.path.end(), dfs.walk.begin() + 1, dfs.walk.end());
      return res;
    }
  }
  res.delivered = false;
  res.d_p = kInf;
  res.d_p_final = kInf;
  return res;
}

DynamicsResult dynamics_run(const Policy& policy, const SpaceGraph& g,
                            const PairContext& ctx,
                            std::span<const RemovalEvent> schedule,
                            Fallback fallback, double ellipse_bound) {
  DynamicsResult res;
  const int n = g.size();
  std::vector<char> removed(n, 0);
  std::vector<char> blocked(n, 0);  // visited or removed
  res.path.push_back(ctx.origin);
  blocked[ctx.origin] = 1;
  double len = 0.0;
  NodeId v = ctx.origin;
  int hop = 0;
  while (v != ctx.dest) {
    for (const auto& ev : schedule) {
      if (ev.at_hop != hop) continue;
      DynamicsLogEntry entry;
      entry.hop = hop;
      entry.holder = v;
      for (NodeId w : ev.nodes) {
        if (w == v || w == ctx.dest) {
          entry.skipped.push_back(w);
          continue;
        }
        removed[w] = 1;
        blocked[w] = 1;
        entry.removed.push_back(w);
      }
      res.log.push_back(std::move(entry));
    }
    const auto next = choose_forwarder(policy, g, ctx, v, blocked, nullptr);
    if (!next) break;
    len += g.metric_distance(v, *next);
    v = *next;
    blocked[v] = 1;
    res.path.push_back(v);
    ++hop;
  }
  if (v == ctx.dest) {
    res.delivered = true;
    res.d_p = len;
    return res;
  }
  if (fallback == Fallback::DfsInEllipse) {
    const double bound =
        ellipse_bound > 0.0 ? ellipse_bound : ctx.stretch_bound();
    const auto dfs = dfs_in_ellipse(g, ctx, v, bound, removed);
    if (dfs.found) {
      res.delivered = true;
      res.d_p = len + dfs.traversal_len;
      res.path.insert(res.path.end(), dfs.walk.begin() + 1, dfs.walk.end());
      return res;
    }
  }
  res.fail_reason = "no admissible neighbor before reaching the destination";
  return res;
}

}  // namespace gtr
