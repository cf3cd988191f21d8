#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gtr/oracle.hpp"
#include "gtr/space_graph.hpp"

namespace gtr {

enum class FeatureSchema { DistOnly, DistAndStretch };

constexpr int feature_width(FeatureSchema s) {
  return s == FeatureSchema::DistOnly ? 2 : 4;
}
const char* schema_name(FeatureSchema s);
FeatureSchema schema_from_name(const std::string& name);

// Concatenated state/action features. Distances are normalized by the
// connection radius; node stretch is already a ratio.
//   DistOnly:       (d(v,D)/R, d(u,D)/R)
//   DistAndStretch: (d(v,D)/R, ns(O,D,v), d(u,D)/R, ns(O,D,u))
struct FeatureVec {
  std::array<double, 4> x{};
  int width = 0;
  std::span<const double> values() const { return {x.data(), static_cast<std::size_t>(width)}; }
};

// (d(O,w) + d(w,D)) / d(O,D); equals 1 exactly on the O-D segment.
double node_stretch(const SpaceGraph& g, NodeId origin, NodeId dest, NodeId w);

FeatureVec make_features(const SpaceGraph& g, const PairContext& ctx, NodeId v,
                         NodeId u, FeatureSchema schema);

// Linear scoring function over the action features. Higher is better.
struct RankingMetric {
  enum class Id { M1, M2, Custom };
  Id id = Id::Custom;
  FeatureSchema schema = FeatureSchema::DistOnly;
  std::array<double, 4> weights{};  // applied to the FeatureVec components

  double score(const FeatureVec& f) const {
    double s = 0.0;
    for (int i = 0; i < f.width; ++i) s += weights[i] * f.x[i];
    return s;
  }
  const char* name() const;

  // -d(u,D)
  static RankingMetric m1() {
    return {Id::M1, FeatureSchema::DistOnly, {0.0, -1.0, 0.0, 0.0}};
  }
  // -0.875 d(u,D) - 0.277 ns(O,D,u)
  static RankingMetric m2() {
    return {Id::M2, FeatureSchema::DistAndStretch, {0.0, 0.0, -0.875, -0.277}};
  }
  static RankingMetric custom(FeatureSchema schema, std::array<double, 4> w) {
    return {Id::Custom, schema, w};
  }
};

// DCG at cutoff tau over 1-indexed graded relevances (rel[0] = position 1).
double dcg(std::span<const double> rel, int tau);

// Graded-relevance ranking similarity between an ideal id sequence A and an
// estimated sequence B: rel_A[i] = (L-i+1)^2 at 1-indexed position i,
// rel_B[j] = rel_A at B[j]'s position in A (0 when absent), result is
// DCG_tau(B) / DCG_tau(A).
double ranking_similarity(std::span<const int> ideal,
                          std::span<const int> estimated, int tau);

// Per-node similarity between the metric ordering of v's neighbors and the
// ordering by optimal action values, at tau = degree(v). Best-first: both
// sequences are sorted descending, ties broken by ascending node id.
// nullopt when every neighbor is unreachable (excluded from averages).
std::optional<double> sim_v_point(const SpaceGraph& g, const PairContext& ctx,
                                  std::span<const double> dist_to_dest,
                                  NodeId v, const RankingMetric& metric,
                                  double penalty_c);
std::optional<double> sim_v(const SpaceGraph& g, const PairContext& ctx,
                            NodeId v, const RankingMetric& metric,
                            const OracleTable& oracle);

struct SimGraphOptions {
  double epsilon = 0.05;
  double penalty_c = 1.0;
  // For the 4-feature metric on graphs larger than this, (O,D,v) triples are
  // sampled instead of enumerated.
  int exhaustive_limit = 100;
  std::size_t triple_cap = 100000;
  std::uint64_t sample_seed = 0;
};

struct SimGraphResult {
  double sim_g = 0.0;
  std::size_t points = 0;
  std::vector<double> point_values;  // populated when collect_points
};

// Mean sim_v over (v,D) pairs for a 2-feature metric (origin = v), or over
// (O,D,v) triples for a 4-feature metric. Undefined points are excluded.
SimGraphResult sim_graph(const SpaceGraph& g, const RankingMetric& metric,
                         const SimGraphOptions& opt,
                         bool collect_points = false);

struct MonotonicityReport {
  bool monotone = true;
  // Indices of the comparable pair whose scores contradict the direction
  // established by an earlier pair.
  std::optional<std::pair<std::size_t, std::size_t>> witness;
};

// A metric is pointwise monotone over the sample when the scores of every
// componentwise-comparable pair move in one consistent direction.
MonotonicityReport check_pointwise_monotonicity(const RankingMetric& metric,
                                                std::span<const FeatureVec> pts);

struct SeedCandidate {
  Space space = Space::Euclidean;
  int n = 50;
  double density = 5.0;  // rho or delta
  double radius = 1000.0;
  double alpha = 0.6;
  std::uint64_t seed = 0;
};

struct RankedSeed {
  SeedCandidate candidate;
  double sim_g = 0.0;
  SpaceGraph graph;
};

// Generates every candidate, scores it by sim_graph and returns the list in
// descending similarity (ties by seed). Front element is the seed graph.
std::vector<RankedSeed> select_seed_graph(std::span<const SeedCandidate> cands,
                                          const RankingMetric& metric,
                                          const SimGraphOptions& opt);

struct SampleSet {
  FeatureSchema schema = FeatureSchema::DistAndStretch;
  double norm_radius = 1.0;
  std::vector<FeatureVec> X;
  std::vector<double> Y;  // target action values, in units of norm_radius
  struct Provenance {
    std::uint64_t graph_seed;
    NodeId v, u, origin, dest;
  };
  std::vector<Provenance> provenance;
  bool truncated = false;  // fewer eligible nodes than requested

  void save(std::ostream& out) const;
  static SampleSet load(std::istream& in);
};

// Knowledge-guided subsample for one (O,D) pair: picks `phi` nodes ranked by
// (sim_v desc, degree desc, id asc) and emits one sample per chosen node and
// neighbor. phi <= 0 selects every eligible node. Samples with unreachable
// continuations are dropped.
SampleSet subsample(const SpaceGraph& g, const PairContext& ctx, int phi,
                    const RankingMetric& metric, const OracleTable& oracle,
                    FeatureSchema schema);

// The (O,D) pair used for training: the metric-longest among `candidates`
// random origin-destination pairs with a finite shortest path.
PairContext pick_training_pair(const SpaceGraph& g, double epsilon,
                               int candidates, std::uint64_t seed);

}  // namespace gtr
