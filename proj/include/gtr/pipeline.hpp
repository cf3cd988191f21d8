#pragma once

#include "gtr/config.hpp"
#include "gtr/eval.hpp"
#include "gtr/rl.hpp"

namespace gtr {

struct TrainedModel {
  QNetwork net;
  std::uint64_t seed_graph_seed = 0;
  double seed_sim_g = 0.0;
  PairContext train_pair;
  std::size_t sample_count = 0;
  std::vector<double> loss_trace;        // supervised runs
  std::vector<EpisodeMetrics> episodes;  // rl runs
};

// Deterministic per-cell evaluation graph: all randomness flows from the
// master seed through named substreams.
SpaceGraph make_cell_graph(const ExperimentConfig& cfg, Space space, int n,
                           double density, int index);

// Seed-graph candidates for training (Euclidean, N_train x rho_train cells).
std::vector<SeedCandidate> seed_graph_candidates(const ExperimentConfig& cfg);

// Full supervised pipeline: candidate generation, similarity-ranked seed
// graph selection, training-pair choice, phi-node subsampling, fitting.
// phi_override: <0 keeps cfg.phi, 0 selects every eligible node.
TrainedModel train_supervised_pipeline(const ExperimentConfig& cfg,
                                       FeatureSchema schema,
                                       int phi_override = -1);

TrainedModel train_rl_pipeline(const ExperimentConfig& cfg,
                               FeatureSchema schema);

}  // namespace gtr
