#pragma once

#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "gtr/space_graph.hpp"

namespace gtr {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct NoPathError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegeneratePairError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Origin-destination pair with cached metric distance, shortest-path length
// and path stretch zeta = d_sp / d_e (>= 1 in a metric graph).
struct PairContext {
  NodeId origin = -1;
  NodeId dest = -1;
  double d_e = 0.0;
  double d_sp = 0.0;
  double zeta = 1.0;
  double epsilon = 0.0;
  // Near-shortest bound on admissible path length, relative to d_sp.
  double stretch_bound() const { return zeta * (1.0 + epsilon); }
};

// Single-source shortest-path lengths under metric edge weights.
// Unreachable nodes carry the +inf sentinel.
std::vector<double> dijkstra(const SpaceGraph& g, NodeId source);

// All-pairs table, one Dijkstra per source; result[s][v] = d_sp(s, v).
std::vector<std::vector<double>> apsp(const SpaceGraph& g);

PairContext pair_context(const SpaceGraph& g, NodeId origin, NodeId dest,
                         double epsilon);
// Same, with a precomputed distance vector from `dest`.
PairContext pair_context(const SpaceGraph& g, NodeId origin, NodeId dest,
                         double epsilon, std::span<const double> dist_to_dest);

// Instantaneous reward for forwarding v -> u (u must neighbor v):
//   -d_e(v,u)                       when the step keeps the continuation
//                                   within the near-shortest bound,
//   -d_e(v,u) - C * overrun         otherwise,
// where overrun = (d_e(v,u) + d_sp(u,D)) - d_sp(v,D) * zeta * (1+epsilon).
double reward(const PairContext& ctx, const SpaceGraph& g, NodeId v, NodeId u,
              std::span<const double> dist_to_dest, double penalty_c);

// Per-pair table of optimal action values: qstar[v][k] for the k-th neighbor
// of v. Rows of the destination are empty (no actions from the terminal).
struct OracleTable {
  NodeId origin = -1;
  NodeId dest = -1;
  double zeta = 1.0;
  double epsilon = 0.0;
  double penalty_c = 1.0;
  std::vector<double> dist_to_dest;
  std::vector<std::vector<double>> qstar;
};

// Q*(v,u) = -(d_e(v,u) + d_sp(u,D)) on bound-respecting edges; on penalty
// edges Q*(v,u) = r(v,u) + max_w Q*(u,w), evaluated over the ordering of
// increasing d_sp(.,D) where the max is realized by u's shortest-path
// successor. Unreachable continuations get the -inf sentinel.
OracleTable optimal_q(const SpaceGraph& g, const PairContext& ctx,
                      double penalty_c);

// One row of the table without materializing the rest.
std::vector<double> qstar_row(const SpaceGraph& g, const PairContext& ctx,
                              std::span<const double> dist_to_dest, NodeId v,
                              double penalty_c);

// Debugging dump: one line per (v, u) edge with d_sp(v,D) and Q*(v,u).
void dump_oracle(std::ostream& out, const SpaceGraph& g, const OracleTable& t);

}  // namespace gtr
