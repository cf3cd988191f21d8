#include "gtr/rl.hpp"

#include <algorithm>
#include <cstdlib>
#include <cmath>
#include <ostream>

namespace gtr {
namespace {

// Context with the zeta the reward should use under the configured mode.
PairContext reward_context(const PairContext& ctx, const RlConfig& cfg) {
  PairContext rc = ctx;
  rc.epsilon = cfg.epsilon;
  if (cfg.mode == RlConfig::StretchBound::FixedFactor) rc.zeta = cfg.fixed_zeta;
  return rc;
}

}  // namespace

std::vector<NodeId> rollout_path(const QNetwork& net, const SpaceGraph& g,
                                 const PairContext& ctx) {
  std::vector<char> visited(g.size(), 0);
  std::vector<NodeId> path{ctx.origin};
  visited[ctx.origin] = 1;
  NodeId v = ctx.origin;
  std::vector<double> feats, scores;
  while (v != ctx.dest) {
    const auto& nbrs = g.neighbors(v);
    std::vector<NodeId> open;
    for (NodeId u : nbrs) {
      if (!visited[u]) open.push_back(u);
    }
    if (open.empty()) break;
    feats.resize(open.size() * net.omega);
    for (std::size_t i = 0; i < open.size(); ++i) {
      const auto f = make_features(g, ctx, v, open[i], net.schema);
      std::copy_n(f.x.begin(), net.omega, feats.begin() + i * net.omega);
    }
    scores.resize(open.size());
    net.forward_batch(feats, open.size(), scores.data());
    std::size_t best = 0;
    for (std::size_t i = 1; i < open.size(); ++i) {
      if (scores[i] > scores[best]) best = i;  // ties keep the lowest id
    }
    v = open[best];
    visited[v] = 1;
    path.push_back(v);
  }
  return path;
}

SampleSet collect_episode_samples(const EdgeScorer& scorer, const SpaceGraph& g,
                                  std::span<const Rollout> rollouts,
                                  const RlConfig& cfg,
                                  std::span<const double> dist_to_dest,
                                  FeatureSchema schema) {
  SampleSet set;
  set.schema = schema;
  set.norm_radius = g.radius();
  const double inv_r = 1.0 / g.radius();
  for (const auto& rollout : rollouts) {
    const PairContext rc = reward_context(rollout.ctx, cfg);
    for (NodeId v : rollout.path) {
      if (v == rc.dest) continue;  // no actions from the terminal state
      const auto& nbrs = g.neighbors(v);
      for (NodeId u : nbrs) {
        const double r = reward(rc, g, v, u, dist_to_dest, cfg.penalty_c);
        double target = r * inv_r;
        if (u != rc.dest) {
          double best = -kInf;
          for (NodeId w : g.neighbors(u)) {
            best = std::max(best, scorer(rollout.ctx, u, w));
          }
          target += cfg.gamma * best;
        }
        set.X.push_back(make_features(g, rollout.ctx, v, u, schema));
        set.Y.push_back(target);
        set.provenance.push_back({g.seed(), v, u, rc.origin, rc.dest});
      }
    }
  }
  return set;
}

RlResult train_rl(QNetwork& net, const SpaceGraph& g, const RlConfig& cfg) {
  if (cfg.sources.empty()) throw std::invalid_argument("empty source set");
  if (cfg.dest < 0 || cfg.dest >= g.size()) {
    throw std::invalid_argument("invalid destination");
  }
  const auto dist = dijkstra(g, cfg.dest);
  std::vector<PairContext> contexts;
  for (NodeId origin : cfg.sources) {
    if (origin == cfg.dest) throw std::invalid_argument("source equals destination");
    contexts.push_back(pair_context(g, origin, cfg.dest, cfg.epsilon, dist));
  }

  const EdgeScorer net_scorer = [&](const PairContext& ctx, NodeId v, NodeId u) {
    return net.forward(make_features(g, ctx, v, u, net.schema));
  };

  Trainer trainer(net, cfg.lr);
  RlResult result;
  for (int episode = 0; episode < cfg.episodes; ++episode) {
    std::vector<Rollout> rollouts;
    int delivered = 0;
    double stretch_sum = 0.0;
    for (const auto& ctx : contexts) {
      Rollout r{ctx, rollout_path(net, g, ctx)};
      if (!r.path.empty() && r.path.back() == ctx.dest) {
        ++delivered;
        double dp = 0.0;
        for (std::size_t i = 1; i < r.path.size(); ++i) {
          dp += g.metric_distance(r.path[i - 1], r.path[i]);
        }
        stretch_sum += dp / ctx.d_sp;
      }
      rollouts.push_back(std::move(r));
    }

    if (const char* decay = std::getenv("GTR_RL_LR_DECAY")) {
      trainer.set_lr(cfg.lr / (1.0 + atof(decay) * episode));
    }
    SampleSet samples = collect_episode_samples(net_scorer, g, rollouts, cfg,
                                                dist, net.schema);
    EpisodeMetrics m;
    m.episode = episode;
    m.rollout_success = static_cast<double>(delivered) / contexts.size();
    m.mean_path_stretch = delivered ? stretch_sum / delivered : 0.0;
    m.samples = samples.X.size();
    if (!samples.X.empty()) {
      double td = 0.0;
      for (std::size_t i = 0; i < samples.X.size(); ++i) {
        td += std::fabs(samples.Y[i] - net.forward(samples.X[i]));
      }
      m.mean_td_error = td / static_cast<double>(samples.X.size());

      const std::size_t B = samples.X.size();
      std::vector<double> X(B * net.omega);
      for (std::size_t i = 0; i < B; ++i) {
        std::copy_n(samples.X[i].x.begin(), net.omega,
                    X.begin() + i * net.omega);
      }
      if (std::getenv("GTR_RL_PERSIST_ADAM") == nullptr) trainer.reset();
      double loss = 0.0;
      for (int it = 0; it < cfg.iterations; ++it) {
        loss = trainer.step(X, samples.Y);
        if (!std::isfinite(loss)) {
          throw TrainingDivergenceError("rl training diverged in episode " +
                                        std::to_string(episode));
        }
      }
      m.final_fit_loss = loss;
    }
    result.episodes.push_back(m);
  }
  return result;
}

void write_episode_csv(std::ostream& out, std::span<const EpisodeMetrics> eps) {
  out << "episode,mean_td_error,rollout_success_rate,mean_path_stretch,"
         "final_fit_loss,samples\n";
  for (const auto& m : eps) {
    out << m.episode << ',' << m.mean_td_error << ',' << m.rollout_success
        << ',' << m.mean_path_stretch << ',' << m.final_fit_loss << ','
        << m.samples << "\n";
  }
}

}  // namespace gtr
