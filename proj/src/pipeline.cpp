#include "gtr/pipeline.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "gtr/rng.hpp"

namespace gtr {
namespace {

std::uint64_t cell_key(Space space, int n, double density, int index) {
  const std::uint64_t dbits = std::bit_cast<std::uint64_t>(density);
  return mix64((static_cast<std::uint64_t>(n) << 32) ^ dbits ^
               mix64(static_cast<std::uint64_t>(index) ^
                     (space == Space::Hyperbolic ? 0x9e37ULL : 0)));
}

RankingMetric metric_for(FeatureSchema schema) {
  return schema == FeatureSchema::DistOnly ? RankingMetric::m1()
                                           : RankingMetric::m2();
}

struct SeedSelection {
  SpaceGraph graph;
  std::uint64_t seed;
  double sim_g;
};

SeedSelection select_training_seed(const ExperimentConfig& cfg,
                                   FeatureSchema schema) {
  const auto candidates = seed_graph_candidates(cfg);
  SimGraphOptions opt;
  opt.epsilon = cfg.epsilon;
  opt.penalty_c = cfg.penalty_c;
  auto ranked = select_seed_graph(candidates, metric_for(schema), opt);
  auto& top = ranked.front();
  return {std::move(top.graph), top.candidate.seed, top.sim_g};
}

std::string pair_line(const PairContext& ctx) {
  std::ostringstream os;
  os << "train_pair O=" << ctx.origin << " D=" << ctx.dest << " d_e=" << ctx.d_e
     << " zeta=" << ctx.zeta;
  return os.str();
}

}  // namespace

SpaceGraph make_cell_graph(const ExperimentConfig& cfg, Space space, int n,
                           double density, int index) {
  const std::uint64_t seed = derive_seed(cfg.master_seed, "graph-gen",
                                         cell_key(space, n, density, index));
  if (space == Space::Euclidean) {
    return SpaceGraph::generate_euclidean(n, density, cfg.radius, seed);
  }
  return SpaceGraph::generate_hyperbolic(n, density, cfg.alpha, std::nullopt,
                                         seed);
}

std::vector<SeedCandidate> seed_graph_candidates(const ExperimentConfig& cfg) {
  std::vector<SeedCandidate> candidates;
  for (int i = 0; i < cfg.seed_candidates; ++i) {
    SeedCandidate c;
    c.space = Space::Euclidean;
    c.n = cfg.n_train;
    c.density = cfg.rho_train;
    c.radius = cfg.radius;
    c.alpha = cfg.alpha;
    c.seed = derive_seed(cfg.master_seed, "seed-candidates", i);
    candidates.push_back(c);
  }
  return candidates;
}

TrainedModel train_supervised_pipeline(const ExperimentConfig& cfg,
                                       FeatureSchema schema,
                                       int phi_override) {
  TrainedModel model;
  auto selection = select_training_seed(cfg, schema);
  model.seed_graph_seed = selection.seed;
  model.seed_sim_g = selection.sim_g;
  const SpaceGraph& g = selection.graph;

  model.train_pair = pick_training_pair(
      g, cfg.epsilon, cfg.pair_candidates,
      derive_seed(cfg.master_seed, "train-pair"));
  const auto oracle = optimal_q(g, model.train_pair, cfg.penalty_c);
  const int phi = phi_override < 0 ? cfg.phi : phi_override;
  const auto samples =
      subsample(g, model.train_pair, phi, metric_for(schema), oracle, schema);
  model.sample_count = samples.X.size();

  model.net = QNetwork::init(schema, cfg.radius,
                             derive_seed(cfg.master_seed, "init"));
  TrainConfig tc;
  tc.iterations = cfg.iter_supervised;
  tc.lr = cfg.lr;
  auto result = train_supervised(model.net, samples, tc);
  model.loss_trace = std::move(result.loss_trace);

  std::ostringstream seed_line;
  seed_line << "seed_graph euclidean n=" << cfg.n_train
            << " rho=" << cfg.rho_train << " seed=" << selection.seed
            << " sim_g=" << selection.sim_g;
  model.net.provenance = {"trained supervised phi=" + std::to_string(phi),
                          seed_line.str(), pair_line(model.train_pair)};
  return model;
}

TrainedModel train_rl_pipeline(const ExperimentConfig& cfg,
                               FeatureSchema schema) {
  TrainedModel model;
  auto selection = select_training_seed(cfg, schema);
  model.seed_graph_seed = selection.seed;
  model.seed_sim_g = selection.sim_g;
  const SpaceGraph& g = selection.graph;

  model.train_pair = pick_training_pair(
      g, cfg.epsilon, cfg.pair_candidates,
      derive_seed(cfg.master_seed, "train-pair"));

  RlConfig rl;
  rl.episodes = cfg.episodes;
  rl.iterations = cfg.iter_rl;
  rl.dest = model.train_pair.dest;
  rl.gamma = cfg.gamma;
  rl.penalty_c = cfg.penalty_c;
  rl.epsilon = cfg.epsilon;
  rl.lr = cfg.lr;

  // Phi: the reachable nodes farthest from the destination, one per phi.
  const auto dist = dijkstra(g, rl.dest);
  std::vector<NodeId> order;
  for (NodeId v = 0; v < g.size(); ++v) {
    if (v == rl.dest || !std::isfinite(dist[v])) continue;
    if (g.metric_distance(v, rl.dest) <= 0.0) continue;
    order.push_back(v);
  }
  std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    const double da = g.metric_distance(a, rl.dest);
    const double db = g.metric_distance(b, rl.dest);
    if (da != db) return da > db;
    return a < b;
  });
  const std::size_t want = std::min<std::size_t>(cfg.phi, order.size());
  rl.sources.assign(order.begin(), order.begin() + want);

  model.net = QNetwork::init(schema, cfg.radius,
                             derive_seed(cfg.master_seed, "init-rl"));
  auto result = train_rl(model.net, g, rl);
  model.episodes = std::move(result.episodes);
  model.sample_count =
      model.episodes.empty() ? 0 : model.episodes.back().samples;

  std::ostringstream seed_line;
  seed_line << "seed_graph euclidean n=" << cfg.n_train
            << " rho=" << cfg.rho_train << " seed=" << selection.seed
            << " sim_g=" << selection.sim_g;
  std::ostringstream src_line;
  src_line << "rl dest=" << rl.dest << " sources=";
  for (std::size_t i = 0; i < rl.sources.size(); ++i) {
    if (i) src_line << ';';
    src_line << rl.sources[i];
  }
  model.net.provenance = {"trained rl", seed_line.str(), src_line.str()};
  return model;
}

}  // namespace gtr
