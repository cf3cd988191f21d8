#include "gtr/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <istream>

#include "gtr/rng.hpp"

namespace gtr {

const char* schema_name(FeatureSchema s) {
  return s == FeatureSchema::DistOnly ? "dist" : "dist_ns";
}

FeatureSchema schema_from_name(const std::string& name) {
  if (name == "dist") return FeatureSchema::DistOnly;
  if (name == "dist_ns" || name == "dist+ns") return FeatureSchema::DistAndStretch;
  throw std::invalid_argument("unknown feature schema: " + name);
}

const char* RankingMetric::name() const {
  switch (id) {
    case Id::M1: return "m1";
    case Id::M2: return "m2";
    default: return "custom";
  }
}

double node_stretch(const SpaceGraph& g, NodeId origin, NodeId dest, NodeId w) {
  const double direct = g.metric_distance(origin, dest);
  if (direct <= 0.0) {
    throw DegeneratePairError("node stretch undefined for coincident pair");
  }
  return (g.metric_distance(origin, w) + g.metric_distance(w, dest)) / direct;
}

FeatureVec make_features(const SpaceGraph& g, const PairContext& ctx, NodeId v,
                         NodeId u, FeatureSchema schema) {
  FeatureVec f;
  const double r = g.radius();
  if (schema == FeatureSchema::DistOnly) {
    f.width = 2;
    f.x[0] = g.metric_distance(v, ctx.dest) / r;
    f.x[1] = g.metric_distance(u, ctx.dest) / r;
  } else {
    f.width = 4;
    f.x[0] = g.metric_distance(v, ctx.dest) / r;
    f.x[1] = node_stretch(g, ctx.origin, ctx.dest, v);
    f.x[2] = g.metric_distance(u, ctx.dest) / r;
    f.x[3] = node_stretch(g, ctx.origin, ctx.dest, u);
  }
  return f;
}

double dcg(std::span<const double> rel, int tau) {
  if (tau < 1 || static_cast<std::size_t>(tau) > rel.size()) {
    throw std::invalid_argument("dcg cutoff out of range");
  }
  double acc = 0.0;
  for (int i = 1; i <= tau; ++i) {
    acc += rel[i - 1] / std::log2(static_cast<double>(i) + 1.0);
  }
  return acc;
}

double ranking_similarity(std::span<const int> ideal,
                          std::span<const int> estimated, int tau) {
  const int len = static_cast<int>(ideal.size());
  std::vector<double> rel_a(len);
  for (int i = 1; i <= len; ++i) {
    const double w = static_cast<double>(len - i + 1);
    rel_a[i - 1] = w * w;
  }
  std::vector<double> rel_b(estimated.size(), 0.0);
  for (std::size_t j = 0; j < estimated.size(); ++j) {
    for (int i = 0; i < len; ++i) {
      if (ideal[i] == estimated[j]) {
        rel_b[j] = rel_a[i];
        break;
      }
    }
  }
  return dcg(rel_b, tau) / dcg(rel_a, tau);
}

namespace {

// Neighbor ids sorted best-first by key (descending), ties by ascending id.
std::vector<int> order_desc(const std::vector<NodeId>& nbrs,
                            const std::vector<double>& key) {
  std::vector<int> idx(nbrs.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (key[a] != key[b]) return key[a] > key[b];
    return nbrs[a] < nbrs[b];
  });
  std::vector<int> ids(nbrs.size());
  for (std::size_t i = 0; i < idx.size(); ++i) ids[i] = nbrs[idx[i]];
  return ids;
}

}  // namespace

std::optional<double> sim_v_point(const SpaceGraph& g, const PairContext& ctx,
                                  std::span<const double> dist_to_dest,
                                  NodeId v, const RankingMetric& metric,
                                  double penalty_c) {
  const auto& nbrs = g.neighbors(v);
  if (nbrs.empty() || v == ctx.dest) return std::nullopt;
  const auto q = qstar_row(g, ctx, dist_to_dest, v, penalty_c);
  if (std::none_of(q.begin(), q.end(),
                   [](double x) { return std::isfinite(x); })) {
    return std::nullopt;
  }
  std::vector<double> scores(nbrs.size());
  for (std::size_t k = 0; k < nbrs.size(); ++k) {
    scores[k] = metric.score(make_features(g, ctx, v, nbrs[k], metric.schema));
  }
  const auto ideal = order_desc(nbrs, q);
  const auto estimated = order_desc(nbrs, scores);
  return ranking_similarity(ideal, estimated, static_cast<int>(nbrs.size()));
}

std::optional<double> sim_v(const SpaceGraph& g, const PairContext& ctx,
                            NodeId v, const RankingMetric& metric,
                            const OracleTable& oracle) {
  return sim_v_point(g, ctx, oracle.dist_to_dest, v, metric, oracle.penalty_c);
}

SimGraphResult sim_graph(const SpaceGraph& g, const RankingMetric& metric,
                         const SimGraphOptions& opt, bool collect_points) {
  SimGraphResult res;
  double total = 0.0;
  auto add = [&](std::optional<double> s) {
    if (!s) return;
    total += *s;
    ++res.points;
    if (collect_points) res.point_values.push_back(*s);
  };

  const int n = g.size();
  if (metric.schema == FeatureSchema::DistOnly) {
    for (NodeId dest = 0; dest < n; ++dest) {
      const auto dist = dijkstra(g, dest);
      for (NodeId v = 0; v < n; ++v) {
        if (v == dest || g.degree(v) == 0) continue;
        if (!std::isfinite(dist[v]) || g.metric_distance(v, dest) <= 0.0) continue;
        PairContext ctx;
        ctx.origin = v;
        ctx.dest = dest;
        ctx.epsilon = opt.epsilon;
        ctx.d_e = g.metric_distance(v, dest);
        ctx.d_sp = dist[v];
        ctx.zeta = ctx.d_sp / ctx.d_e;
        add(sim_v_point(g, ctx, dist, v, metric, opt.penalty_c));
      }
    }
  } else if (n <= opt.exhaustive_limit) {
    for (NodeId dest = 0; dest < n; ++dest) {
      const auto dist = dijkstra(g, dest);
      for (NodeId origin = 0; origin < n; ++origin) {
        if (origin == dest || !std::isfinite(dist[origin])) continue;
        if (g.metric_distance(origin, dest) <= 0.0) continue;
        PairContext ctx;
        ctx.origin = origin;
        ctx.dest = dest;
        ctx.epsilon = opt.epsilon;
        ctx.d_e = g.metric_distance(origin, dest);
        ctx.d_sp = dist[origin];
        ctx.zeta = ctx.d_sp / ctx.d_e;
        for (NodeId v = 0; v < n; ++v) {
          if (v == dest || g.degree(v) == 0) continue;
          add(sim_v_point(g, ctx, dist, v, metric, opt.penalty_c));
        }
      }
    }
  } else {
    // Desk-scale cap: sample triples uniformly; distance vectors per
    // destination are cached on first use.
    Rng rng(derive_seed(opt.sample_seed, "simg-triples"));
    std::vector<std::vector<double>> dist_cache(n);
    for (std::size_t t = 0; t < opt.triple_cap; ++t) {
      const NodeId dest = static_cast<NodeId>(rng.below(n));
      const NodeId origin = static_cast<NodeId>(rng.below(n));
      const NodeId v = static_cast<NodeId>(rng.below(n));
      if (origin == dest || v == dest || g.degree(v) == 0) continue;
      if (dist_cache[dest].empty()) dist_cache[dest] = dijkstra(g, dest);
      const auto& dist = dist_cache[dest];
      if (!std::isfinite(dist[origin])) continue;
      if (g.metric_distance(origin, dest) <= 0.0) continue;
      PairContext ctx;
      ctx.origin = origin;
      ctx.dest = dest;
      ctx.epsilon = opt.epsilon;
      ctx.d_e = g.metric_distance(origin, dest);
      ctx.d_sp = dist[origin];
      ctx.zeta = ctx.d_sp / ctx.d_e;
      add(sim_v_point(g, ctx, dist, v, metric, opt.penalty_c));
    }
  }
  res.sim_g = res.points ? total / static_cast<double>(res.points) : 0.0;
  return res;
}

MonotonicityReport check_pointwise_monotonicity(const RankingMetric& metric,
                                                std::span<const FeatureVec> pts) {
  MonotonicityReport report;
  std::vector<double> scores(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) scores[i] = metric.score(pts[i]);

  int direction = 0;  // +1 score rises with the order, -1 falls, 0 unknown
  for (std::size_t i = 0; i < pts.size() && report.monotone; ++i) {
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (i == j || pts[i].width != pts[j].width) continue;
      bool le = true;
      for (int k = 0; k < pts[i].width; ++k) {
        if (pts[i].x[k] > pts[j].x[k]) {
          le = false;
          break;
        }
      }
      if (!le) continue;  // not comparable in this direction
      const double diff = scores[j] - scores[i];
      if (diff == 0.0) continue;
      const int d = diff > 0.0 ? 1 : -1;
      if (direction == 0) {
        direction = d;
      } else if (d != direction) {
        report.monotone = false;
        report.witness = {i, j};
        break;
      }
    }
  }
  return report;
}

std::vector<RankedSeed> select_seed_graph(std::span<const SeedCandidate> cands,
                                          const RankingMetric& metric,
                                          const SimGraphOptions& opt) {
  std::vector<RankedSeed> ranked;
  ranked.reserve(cands.size());
  for (const auto& c : cands) {
    SpaceGraph g = c.space == Space::Euclidean
                       ? SpaceGraph::generate_euclidean(c.n, c.density,
                                                        c.radius, c.seed)
                       : SpaceGraph::generate_hyperbolic(c.n, c.density,
                                                         c.alpha, std::nullopt,
                                                         c.seed);
    SimGraphOptions o = opt;
    o.sample_seed = c.seed;
    const auto sim = sim_graph(g, metric, o);
    ranked.push_back({c, sim.sim_g, std::move(g)});
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.sim_g != b.sim_g) return a.sim_g > b.sim_g;
    return a.candidate.seed < b.candidate.seed;
  });
  return ranked;
}

SampleSet subsample(const SpaceGraph& g, const PairContext& ctx, int phi,
                    const RankingMetric& metric, const OracleTable& oracle,
                    FeatureSchema schema) {
  struct Eligible {
    NodeId v;
    double sim;
    int degree;
  };
  std::vector<Eligible> eligible;
  for (NodeId v = 0; v < g.size(); ++v) {
    if (v == ctx.dest || g.degree(v) == 0) continue;
    const auto s = sim_v(g, ctx, v, metric, oracle);
    if (!s) continue;
    eligible.push_back({v, *s, g.degree(v)});
  }
  // High-similarity nodes qualify; among them richer neighborhoods first.
  // Ranking purely by similarity would flood the pick with degree-1 nodes,
  // whose single-neighbor orderings are trivially perfect but carry almost
  // no training signal.
  double sim_floor = 0.90;
  std::size_t qualifying = 0;
  for (const auto& e : eligible) qualifying += e.sim >= sim_floor;
  if (phi > 0 && qualifying < static_cast<std::size_t>(phi)) sim_floor = 0.0;
  std::sort(eligible.begin(), eligible.end(), [&](const auto& a, const auto& b) {
    const bool qa = a.sim >= sim_floor, qb = b.sim >= sim_floor;
    if (qa != qb) return qa;
    if (a.degree != b.degree) return a.degree > b.degree;
    if (a.sim != b.sim) return a.sim > b.sim;
    return a.v < b.v;
  });

  SampleSet set;
  set.schema = schema;
  set.norm_radius = g.radius();
  const std::size_t want = phi <= 0 ? eligible.size()
                                    : static_cast<std::size_t>(phi);
  if (phi > 0 && eligible.size() < want) set.truncated = true;
  const std::size_t take = std::min(want, eligible.size());
  for (std::size_t i = 0; i < take; ++i) {
    const NodeId v = eligible[i].v;
    const auto& nbrs = g.neighbors(v);
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
      const double q = oracle.qstar[v][k];
      if (!std::isfinite(q)) continue;
      set.X.push_back(make_features(g, ctx, v, nbrs[k], schema));
      set.Y.push_back(q / g.radius());
      set.provenance.push_back({g.seed(), v, nbrs[k], ctx.origin, ctx.dest});
    }
  }
  return set;
}

PairContext pick_training_pair(const SpaceGraph& g, double epsilon,
                               int candidates, std::uint64_t seed) {
  Rng rng(seed);
  const int n = g.size();
  std::optional<PairContext> best;
  for (int i = 0; i < candidates; ++i) {
    const NodeId origin = static_cast<NodeId>(rng.below(n));
    const NodeId dest = static_cast<NodeId>(rng.below(n));
    if (origin == dest) continue;
    if (g.metric_distance(origin, dest) <= 0.0) continue;
    const auto dist = dijkstra(g, dest);
    if (!std::isfinite(dist[origin])) continue;
    auto ctx = pair_context(g, origin, dest, epsilon, dist);
    if (!best || ctx.d_e > best->d_e) best = ctx;
  }
  if (!best) throw NoPathError("no connected candidate pair found");
  return *best;
}

void SampleSet::save(std::ostream& out) const {
  out << "gtr-samples v1\n";
  out << "schema " << schema_name(schema) << "\n";
  out << "R ";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", norm_radius);
  out << buf << "\n";
  out << "truncated " << (truncated ? 1 : 0) << "\n";
  out << "count " << X.size() << "\n";
  for (std::size_t i = 0; i < X.size(); ++i) {
    for (int k = 0; k < X[i].width; ++k) {
      std::snprintf(buf, sizeof(buf), "%.17g", X[i].x[k]);
      out << buf << ' ';
    }
    std::snprintf(buf, sizeof(buf), "%.17g", Y[i]);
    out << buf;
    const auto& p = provenance[i];
    out << ' ' << p.graph_seed << ' ' << p.v << ' ' << p.u << ' ' << p.origin
        << ' ' << p.dest << "\n";
  }
}

SampleSet SampleSet::load(std::istream& in) {
  std::string magic, version;
  in >> magic >> version;
  if (magic != "gtr-samples" || version != "v1") {
    throw std::runtime_error("not a gtr-samples v1 file");
  }
  SampleSet set;
  std::string key, schema;
  std::size_t count = 0;
  int truncated = 0;
  in >> key >> schema;
  set.schema = schema_from_name(schema);
  in >> key >> set.norm_radius;
  in >> key >> truncated;
  set.truncated = truncated != 0;
  in >> key >> count;
  const int width = feature_width(set.schema);
  for (std::size_t i = 0; i < count; ++i) {
    FeatureVec f;
    f.width = width;
    for (int k = 0; k < width; ++k) in >> f.x[k];
    double y;
    Provenance p{};
    in >> y >> p.graph_seed >> p.v >> p.u >> p.origin >> p.dest;
    set.X.push_back(f);
    set.Y.push_back(y);
    set.provenance.push_back(p);
  }
  if (!in) throw std::runtime_error("truncated sample file");
  return set;
}

}  // namespace gtr
