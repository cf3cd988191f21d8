#pragma once

#include <functional>
#include <vector>

#include "gtr/qnet.hpp"

namespace gtr {

struct RlConfig {
  int episodes = 20;      // EpiNum
  int iterations = 1000;  // fitting steps per episode
  std::vector<NodeId> sources;  // Phi
  NodeId dest = -1;
  double gamma = 1.0;
  double penalty_c = 1.0;
  double epsilon = 0.05;
  double lr = 1e-3;
  // OracleZeta uses the true per-pair stretch inside the reward; FixedFactor
  // substitutes a constant bound for a fully oracle-free run.
  enum class StretchBound { OracleZeta, FixedFactor };
  StretchBound mode = StretchBound::OracleZeta;
  double fixed_zeta = 1.5;
};

// Greedy rollout: from O repeatedly move to the unvisited neighbor with the
// highest predicted value; stops at D or at a dead end (each node is visited
// at most once). The returned path may omit D.
std::vector<NodeId> rollout_path(const QNetwork& net, const SpaceGraph& g,
                                 const PairContext& ctx);

// Normalized value estimate for the edge (v, u) under a pair context.
using EdgeScorer =
    std::function<double(const PairContext& ctx, NodeId v, NodeId u)>;

struct Rollout {
  PairContext ctx;
  std::vector<NodeId> path;
};

// Bootstrap targets over every (path node v, neighbor u):
//   Y = r(v,u)/R + gamma * max_w scorer(u, w),   terminal u = D: Y = r(v,D)/R.
// Rewards use the configured stretch-bound mode.
SampleSet collect_episode_samples(const EdgeScorer& scorer, const SpaceGraph& g,
                                  std::span<const Rollout> rollouts,
                                  const RlConfig& cfg,
                                  std::span<const double> dist_to_dest,
                                  FeatureSchema schema);

struct EpisodeMetrics {
  int episode = 0;
  double mean_td_error = 0.0;      // mean |Y - prediction| at collection time
  double rollout_success = 0.0;    // delivered rollouts / |Phi|
  double mean_path_stretch = 0.0;  // mean d_p/d_sp over delivered rollouts
  double final_fit_loss = 0.0;
  std::size_t samples = 0;
};

struct RlResult {
  std::vector<EpisodeMetrics> episodes;
};

// Episodic loop: fresh greedy rollouts from every source, a fresh bootstrap
// dataset, then a fixed number of fitting steps per episode. Deterministic
// for fixed (net state, graph, config).
RlResult train_rl(QNetwork& net, const SpaceGraph& g, const RlConfig& cfg);

void write_episode_csv(std::ostream& out, std::span<const EpisodeMetrics> eps);

}  // namespace gtr
