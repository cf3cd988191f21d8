#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gtr/qnet.hpp"

namespace gtr {

// Per-neighbor state visible to a forwarding decision. Distances are raw
// lengths; policies that need normalized units divide by norm_radius.
struct NeighborView {
  NodeId id = -1;
  double edge_len = 0.0;
  double dist_to_dest = 0.0;
  double stretch = 0.0;             // ns(O, D, u)
  double oracle_cost = kInf;        // d_e(v,u) + d_sp(u,D); only when attached
};

// Everything a policy may consume: the holder's own state plus its one-hop
// neighborhood. Policies cannot see past this struct, which is what makes
// the forwarding rule self-stabilizing under topology changes.
struct LocalView {
  NodeId node = -1;
  double dist_to_dest = 0.0;
  double stretch = 0.0;  // ns(O, D, v)
  double norm_radius = 1.0;
  std::vector<NeighborView> neighbors;
};

// Guarded two-action scorer over normalized features:
//   z = a1*d(v,D) + a2*ns(O,D,u) + a3*d(u,D) + a0
//       when d(u,D) < g1*d(v,D) + g2*ns(O,D,u) + g0,
//   z = b1*d(v,D) + b2*d(u,D) + b0 otherwise.
struct TwoLinearParams {
  double g1 = 1.02, g2 = 0.57, g0 = -0.69;
  double a1 = -0.01, a2 = -0.02, a3 = -0.01, a0 = -0.06;
  double b1 = 0.03, b2 = -0.04, b0 = -0.15;

  bool guard(double dv, double nsu, double du) const {
    return du < g1 * dv + g2 * nsu + g0;
  }
  double score(double dv, double nsu, double du) const {
    if (guard(dv, nsu, du)) return a1 * dv + a2 * nsu + a3 * du + a0;
    return b1 * dv + b2 * du + b0;
  }
};

class Policy {
 public:
  enum class Kind {
    NeuralQ,
    GreedyForwarding,
    SrNodeStretch,
    TwoLinearAction,
    OracleShortest,
  };

  static Policy neural(const QNetwork* net, std::string label = "neural");
  static Policy greedy_forwarding();
  static Policy sr_node_stretch();
  static Policy two_linear(TwoLinearParams params);
  static Policy oracle_shortest();

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const QNetwork* network() const { return net_; }
  const TwoLinearParams& two_linear_params() const { return params_; }

  // The local forwarding decision; ties resolve to the lowest node id,
  // nullopt when the view offers no neighbor.
  std::optional<NodeId> choose(const LocalView& view) const;

 private:
  Kind kind_ = Kind::GreedyForwarding;
  std::string name_;
  const QNetwork* net_ = nullptr;
  TwoLinearParams params_{};
};

// Builds the holder's view from the live graph, excluding nodes flagged in
// `excluded` (visited or removed). oracle_dist supplies d_sp(.,D) for the
// oracle policy only.
LocalView make_local_view(const SpaceGraph& g, const PairContext& ctx, NodeId v,
                          const std::vector<char>& excluded,
                          const std::vector<double>* oracle_dist = nullptr);

std::optional<NodeId> choose_forwarder(const Policy& policy, const SpaceGraph& g,
                                       const PairContext& ctx, NodeId v,
                                       const std::vector<char>& visited,
                                       const std::vector<double>* oracle_dist =
                                           nullptr);

enum class Fallback { None, DfsInEllipse };

struct RouteResult {
  bool delivered = false;
  std::vector<NodeId> path;    // final walk, greedy prefix plus recovery
  double d_p = kInf;           // traversal length (recovery backtracks cost)
  double d_p_final = kInf;     // length of the final walk only
  int greedy_hops = 0;
  bool used_fallback = false;
};

// Iterated forwarding with a visited set; terminates within n hops. On a
// dead end with DfsInEllipse, depth-first search over the subgraph
// {w : ns(O,D,w) <= ellipse_bound} resumes from the stuck node.
RouteResult route(const Policy& policy, const SpaceGraph& g,
                  const PairContext& ctx, Fallback fallback,
                  double ellipse_bound = 0.0,
                  const std::vector<double>* oracle_dist = nullptr);

struct RemovalEvent {
  int at_hop = 0;
  std::vector<NodeId> nodes;
};

struct DynamicsLogEntry {
  int hop = 0;
  NodeId holder = -1;
  std::vector<NodeId> removed;
  std::vector<NodeId> skipped;  // scheduled but protected (holder/dest)
};

struct DynamicsResult {
  bool delivered = false;
  std::vector<NodeId> path;
  double d_p = kInf;
  std::vector<DynamicsLogEntry> log;
  std::string fail_reason;
};

// route() against a mutating copy of the graph: scheduled removals fire by
// hop index and forwarding continues from refreshed neighbor views only.
// Scheduled removals of the current holder or the destination are skipped
// and logged.
DynamicsResult dynamics_run(const Policy& policy, const SpaceGraph& g,
                            const PairContext& ctx,
                            std::span<const RemovalEvent> schedule,
                            Fallback fallback = Fallback::None,
                            double ellipse_bound = 0.0);

}  // namespace gtr
