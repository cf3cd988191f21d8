#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gtr/ranking.hpp"
#include "gtr/rng.hpp"
#include "support.hpp"

using namespace gtr;
using gtr::testing::line_graph;

TEST_CASE("node stretch basics") {
  const auto g = SpaceGraph::from_points(
      Space::Euclidean, 10.0, {{0, 0}, {4, 0}, {2, 2}, {2, 0}});
  // w on the O-D segment.
  CHECK(node_stretch(g, 0, 1, 3) == doctest::Approx(1.0).epsilon(1e-12));
  // w = O.
  CHECK(node_stretch(g, 0, 1, 0) == doctest::Approx(1.0).epsilon(1e-12));
  // Off-segment point: (sqrt(8) + sqrt(8)) / 4.
  CHECK(node_stretch(g, 0, 1, 2) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("node stretch degenerate pair") {
  const auto g = SpaceGraph::from_points(Space::Euclidean, 10.0,
                                         {{0, 0}, {0, 0}, {1, 1}});
  CHECK_THROWS_AS(node_stretch(g, 0, 1, 2), DegeneratePairError);
}

TEST_CASE("node stretch is at least 1 on random triples") {
  Rng rng(123);
  for (const bool hyperbolic : {false, true}) {
    const auto g =
        hyperbolic ? SpaceGraph::generate_hyperbolic(40, 3.0, 0.6, {}, 3)
                   : SpaceGraph::generate_euclidean(40, 4.0, 1000.0, 3);
    for (int i = 0; i < 10000; ++i) {
      const NodeId o = static_cast<NodeId>(rng.below(g.size()));
      const NodeId d = static_cast<NodeId>(rng.below(g.size()));
      const NodeId w = static_cast<NodeId>(rng.below(g.size()));
      if (o == d || g.metric_distance(o, d) <= 0.0) continue;
      CHECK(node_stretch(g, o, d, w) >= 1.0 - 1e-12);
    }
  }
}

TEST_CASE("dcg worked example") {
  // Ideal ranking [4,1,3,2,5]: graded relevances (L-i+1)^2 = 25,16,9,4,1.
  const std::vector<double> rel = {25, 16, 9, 4, 1};
  CHECK(dcg(rel, 3) == doctest::Approx(39.595).epsilon(2.6e-5));
  CHECK(dcg(rel, 1) == 25.0);
  CHECK_THROWS_AS(dcg(rel, 0), std::invalid_argument);
  CHECK_THROWS_AS(dcg(rel, 6), std::invalid_argument);
}

TEST_CASE("ranking similarity reproduces the reference tables") {
  const std::vector<int> ideal = {4, 1, 3, 2, 5};
  const std::vector<int> estimated = {1, 2, 4, 5, 6};
  // rel_B = [16, 4, 25, 1, 0]; DCG_3(B) = 31.024, DCG_3(A) = 39.595.
  const double sim = ranking_similarity(ideal, estimated, 3);
  CHECK(sim == doctest::Approx(31.024 / 39.595).epsilon(1e-4));
  CHECK(ranking_similarity(ideal, ideal, 3) == doctest::Approx(1.0));
  // Single element.
  const std::vector<int> one = {9};
  CHECK(ranking_similarity(one, one, 1) == doctest::Approx(1.0));
}

TEST_CASE("sim_v identity and degree-1 cases") {
  const auto g = line_graph(4);
  const auto ctx = pair_context(g, 0, 3, 0.05);
  const auto table = optimal_q(g, ctx, 1.0);
  // Degree-1 node: similarity 1 trivially.
  CHECK(sim_v(g, ctx, 0, RankingMetric::m1(), table) == doctest::Approx(1.0));
  // On a line, distance ordering equals the optimal ordering.
  CHECK(sim_v(g, ctx, 1, RankingMetric::m1(), table) == doctest::Approx(1.0));
  CHECK(sim_v(g, ctx, 2, RankingMetric::m2(), table) == doctest::Approx(1.0));
}

TEST_CASE("sim_v is undefined when every neighbor is unreachable") {
  // 0-1 component and 2-3 component; destination in the other component.
  const auto g = SpaceGraph::from_points(
      Space::Euclidean, 1.5, {{0, 0}, {1, 0}, {10, 0}, {11, 0}});
  PairContext ctx;
  ctx.origin = 0;
  ctx.dest = 2;
  ctx.epsilon = 0.05;
  ctx.d_e = g.metric_distance(0, 2);
  ctx.d_sp = kInf;
  ctx.zeta = 1.0;
  const auto dist = dijkstra(g, 2);
  CHECK_FALSE(sim_v_point(g, ctx, dist, 0, RankingMetric::m1(), 1.0));
}

TEST_CASE("sim_v is invariant under positive affine transforms of the metric") {
  const auto g = SpaceGraph::generate_euclidean(30, 5.0, 1000.0, 17);
  const auto d = apsp(g);
  Rng rng(4);
  const auto m2 = RankingMetric::m2();
  // 3 * score - 7 preserves the ordering.
  auto scaled = RankingMetric::custom(
      m2.schema, {3 * m2.weights[0], 3 * m2.weights[1], 3 * m2.weights[2],
                  3 * m2.weights[3]});
  for (int trial = 0; trial < 50; ++trial) {
    const NodeId o = static_cast<NodeId>(rng.below(30));
    const NodeId dd = static_cast<NodeId>(rng.below(30));
    const NodeId v = static_cast<NodeId>(rng.below(30));
    if (o == dd || v == dd || std::isinf(d[dd][o]) || g.degree(v) == 0) continue;
    if (g.metric_distance(o, dd) <= 0.0) continue;
    const auto ctx = pair_context(g, o, dd, 0.05, d[dd]);
    const auto a = sim_v_point(g, ctx, d[dd], v, m2, 1.0);
    const auto b = sim_v_point(g, ctx, d[dd], v, scaled, 1.0);
    if (!a) continue;  // v's whole neighborhood disconnected from dd
    REQUIRE(b.has_value());
    CHECK(*a == doctest::Approx(*b).epsilon(1e-12));
  }
}

TEST_CASE("sim_v equals 1 whenever metric argsort equals q-star argsort") {
  // Exhaustive over degree <= 6 nodes of small graphs.
  for (int s = 0; s < 6; ++s) {
    const auto g = SpaceGraph::generate_euclidean(14, 3.0, 1000.0, 60 + s);
    const auto d = apsp(g);
    for (NodeId dd = 0; dd < g.size(); ++dd) {
      for (NodeId v = 0; v < g.size(); ++v) {
        if (v == dd || g.degree(v) == 0 || g.degree(v) > 6) continue;
        if (std::isinf(d[dd][v]) || g.metric_distance(v, dd) <= 0.0) continue;
        const auto ctx = pair_context(g, v, dd, 0.05, d[dd]);
        const auto q = qstar_row(g, ctx, d[dd], v, 1.0);
        const auto& nbrs = g.neighbors(v);
        std::vector<double> scores(nbrs.size());
        for (std::size_t k = 0; k < nbrs.size(); ++k) {
          scores[k] = RankingMetric::m1().score(
              make_features(g, ctx, v, nbrs[k], FeatureSchema::DistOnly));
        }
        auto argsort = [&](const std::vector<double>& key) {
          std::vector<int> idx(key.size());
          for (std::size_t i = 0; i < key.size(); ++i) idx[i] = static_cast<int>(i);
          std::sort(idx.begin(), idx.end(), [&](int a, int b) {
            if (key[a] != key[b]) return key[a] > key[b];
            return nbrs[a] < nbrs[b];
          });
          return idx;
        };
        if (argsort(q) == argsort(scores)) {
          const auto s_v = sim_v_point(g, ctx, d[dd], v, RankingMetric::m1(), 1.0);
          REQUIRE(s_v.has_value());
          CHECK(*s_v == doctest::Approx(1.0).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("dcg is strictly monotone in any single relevance increase") {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> rel(5);
    for (auto& r : rel) r = rng.uniform(0.0, 20.0);
    const int tau = 1 + static_cast<int>(rng.below(5));
    const double base = dcg(rel, tau);
    const int bump = static_cast<int>(rng.below(tau));
    rel[bump] += 1.0;
    CHECK(dcg(rel, tau) > base);
  }
}

TEST_CASE("pointwise monotonicity of the reference metrics") {
  Rng rng(21);
  for (int set = 0; set < 100; ++set) {
    std::vector<FeatureVec> pts;
    const double fs0 = rng.uniform(0.0, 3.0);
    const double fs1 = rng.uniform(1.0, 2.0);
    for (int i = 0; i < 12; ++i) {
      FeatureVec f;
      f.width = 4;
      f.x = {fs0, fs1, rng.uniform(0.0, 3.0), rng.uniform(1.0, 2.0)};
      pts.push_back(f);
    }
    CHECK(check_pointwise_monotonicity(RankingMetric::m2(), pts).monotone);
    std::vector<FeatureVec> pts2;
    for (int i = 0; i < 12; ++i) {
      FeatureVec f;
      f.width = 2;
      f.x = {fs0, rng.uniform(0.0, 3.0), 0, 0};
      pts2.push_back(f);
    }
    CHECK(check_pointwise_monotonicity(RankingMetric::m1(), pts2).monotone);
  }
}

TEST_CASE("mixed-sign weights fail monotonicity with a witness") {
  const auto bad =
      RankingMetric::custom(FeatureSchema::DistAndStretch, {0, 0, 1.0, -1.0});
  std::vector<FeatureVec> pts;
  FeatureVec lo;
  lo.width = 4;
  lo.x = {1.0, 1.0, 0.0, 1.0};
  FeatureVec hi_du = lo;
  hi_du.x[2] = 2.0;  // raises the score
  FeatureVec hi_nsu = lo;
  hi_nsu.x[3] = 2.0;  // lowers the score
  pts = {lo, hi_du, hi_nsu};
  const auto report = check_pointwise_monotonicity(bad, pts);
  CHECK_FALSE(report.monotone);
  REQUIRE(report.witness.has_value());
}

TEST_CASE("sim_graph on a triangle consistent with m1 is 1") {
  // Equilateral-ish triangle: complete graph, distances determine both the
  // metric and the optimal values, so every ranking matches.
  const auto g = SpaceGraph::from_points(Space::Euclidean, 5.0,
                                         {{0, 0}, {1, 0}, {0.5, 0.9}});
  SimGraphOptions opt;
  const auto res = sim_graph(g, RankingMetric::m1(), opt);
  CHECK(res.sim_g == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(res.points == 6);
}

TEST_CASE("seed graph selection basics") {
  SimGraphOptions opt;
  // A single candidate ranks first trivially.
  const SeedCandidate only{Space::Euclidean, 20, 4.0, 1000.0, 0.6, 42};
  const auto one = select_seed_graph({&only, 1}, RankingMetric::m1(), opt);
  REQUIRE(one.size() == 1);
  CHECK(one[0].candidate.seed == 42);

  // Top of a pool is at least the median.
  std::vector<SeedCandidate> pool;
  for (int i = 0; i < 9; ++i) {
    pool.push_back({Space::Euclidean, 25, 4.0, 1000.0, 0.6,
                    static_cast<std::uint64_t>(2000 + i)});
  }
  const auto ranked = select_seed_graph(pool, RankingMetric::m1(), opt);
  REQUIRE(ranked.size() == 9);
  for (std::size_t i = 1; i < ranked.size(); ++i) {
    CHECK(ranked[i - 1].sim_g >= ranked[i].sim_g);
  }
  CHECK(ranked.front().sim_g >= ranked[4].sim_g);
}

TEST_CASE("density-5 seed candidates are reliably good, density-3 are not") {
  // Measured over mixed rho {3,5} pools at n=50: every density-5 candidate
  // scores SIM_G >= 0.90 (min observed 0.9147 over 30 graphs) while
  // density-3 pools dip below 0.90 (min observed 0.8931). The top-of-pool
  // winner alternates between densities, so reliability, not pool-max, is
  // the frozen claim.
  SimGraphOptions opt;
  double min5 = 1.0, min3 = 1.0;
  for (int t = 0; t < 10; ++t) {
    std::vector<SeedCandidate> pool;
    for (int i = 0; i < 3; ++i) {
      pool.push_back({Space::Euclidean, 50, 3.0, 1000.0, 0.6,
                      static_cast<std::uint64_t>(5000 + 10 * t + i)});
      pool.push_back({Space::Euclidean, 50, 5.0, 1000.0, 0.6,
                      static_cast<std::uint64_t>(6000 + 10 * t + i)});
    }
    const auto ranked = select_seed_graph(pool, RankingMetric::m1(), opt);
    CHECK(ranked.front().sim_g >= 0.90);
    for (const auto& r : ranked) {
      (r.candidate.density == 5.0 ? min5 : min3) =
          std::min(r.candidate.density == 5.0 ? min5 : min3, r.sim_g);
    }
  }
  CHECK(min5 >= 0.90);
  CHECK(min3 < min5);
}

TEST_CASE("subsample counts follow the chosen degrees") {
  // Star graph: center 0 with 5 leaves; destination is a leaf.
  std::vector<Coord> pts = {{0, 0}};
  for (int i = 0; i < 5; ++i) {
    const double ang = 2.0 * M_PI * i / 5;
    pts.push_back({std::cos(ang), std::sin(ang)});
  }
  const auto g = SpaceGraph::from_points(Space::Euclidean, 1.05, pts);
  REQUIRE(g.degree(0) == 5);
  const auto ctx = pair_context(g, 3, 1, 0.05);
  const auto oracle = optimal_q(g, ctx, 1.0);
  const auto set = subsample(g, ctx, 1, RankingMetric::m2(), oracle,
                             FeatureSchema::DistAndStretch);
  // phi=1 picks the center (highest degree among max-sim nodes).
  CHECK(set.X.size() == static_cast<std::size_t>(g.degree(set.provenance[0].v)));
  CHECK_FALSE(set.truncated);
  CHECK(set.X.size() == set.Y.size());
}

TEST_CASE("subsample on a seed-scale graph emits phi x degree samples") {
  const auto g = SpaceGraph::generate_euclidean(50, 5.0, 1000.0, 19);
  const auto ctx = pick_training_pair(g, 0.05, 32, 99);
  const auto oracle = optimal_q(g, ctx, 1.0);
  const auto set = subsample(g, ctx, 3, RankingMetric::m2(), oracle,
                             FeatureSchema::DistAndStretch);
  // Provenance nodes are distinct and contribute their degrees.
  std::vector<NodeId> chosen;
  for (const auto& p : set.provenance) {
    if (chosen.empty() || chosen.back() != p.v) chosen.push_back(p.v);
  }
  CHECK(chosen.size() == 3);
  std::size_t expect = 0;
  for (NodeId v : chosen) expect += g.degree(v);
  CHECK(set.X.size() == expect);
  for (double y : set.Y) {
    CHECK(std::isfinite(y));
    CHECK(y <= 0.0);
  }
}

TEST_CASE("subsample requesting more nodes than eligible flags truncation") {
  const auto g = line_graph(4);
  const auto ctx = pair_context(g, 0, 3, 0.05);
  const auto oracle = optimal_q(g, ctx, 1.0);
  const auto set = subsample(g, ctx, 10, RankingMetric::m1(), oracle,
                             FeatureSchema::DistOnly);
  CHECK(set.truncated);
  CHECK(set.X.size() == 5);  // degrees 1+2+2 of the three non-dest nodes
}

TEST_CASE("subsample selection ignores the excluded low-sim decile") {
  const auto g = SpaceGraph::generate_euclidean(50, 5.0, 1000.0, 23);
  const auto ctx = pick_training_pair(g, 0.05, 32, 5);
  const auto oracle = optimal_q(g, ctx, 1.0);
  const auto metric = RankingMetric::m2();
  const auto full = subsample(g, ctx, 3, metric, oracle,
                              FeatureSchema::DistAndStretch);

  // Rank nodes by sim, worst first; removing the bottom decile from
  // eligibility must not change the chosen set. Emulate the removal by
  // checking the chosen nodes are never in that decile.
  std::vector<std::pair<double, NodeId>> sims;
  for (NodeId v = 0; v < g.size(); ++v) {
    if (v == ctx.dest || g.degree(v) == 0) continue;
    const auto s = sim_v(g, ctx, v, metric, oracle);
    if (s) sims.push_back({*s, v});
  }
  std::sort(sims.begin(), sims.end());
  const std::size_t decile = sims.size() / 10;
  for (const auto& p : full.provenance) {
    for (std::size_t i = 0; i < decile; ++i) {
      CHECK(p.v != sims[i].second);
    }
  }
}

TEST_CASE("sample set round trips through its text format") {
  const auto g = line_graph(5);
  const auto ctx = pair_context(g, 0, 4, 0.05);
  const auto oracle = optimal_q(g, ctx, 1.0);
  const auto set = subsample(g, ctx, 2, RankingMetric::m1(), oracle,
                             FeatureSchema::DistOnly);
  std::stringstream buf;
  set.save(buf);
  const auto loaded = SampleSet::load(buf);
  CHECK(loaded.X.size() == set.X.size());
  for (std::size_t i = 0; i < set.X.size(); ++i) {
    CHECK(loaded.Y[i] == set.Y[i]);
    for (int k = 0; k < set.X[i].width; ++k) {
      CHECK(loaded.X[i].x[k] == set.X[i].x[k]);
    }
    CHECK(loaded.provenance[i].v == set.provenance[i].v);
  }
}
