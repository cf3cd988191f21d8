#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <sstream>

#include "gtr/oracle.hpp"
#include "gtr/rng.hpp"
#include "support.hpp"

using namespace gtr;
using gtr::testing::ExhaustiveDp;
using gtr::testing::floyd_warshall;
using gtr::testing::line_graph;

TEST_CASE("apsp on a line graph") {
  const auto g = line_graph(3);
  const auto d = apsp(g);
  CHECK(d[0][2] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(d[0][0] == 0.0);
  CHECK(d[2][0] == d[0][2]);
}

TEST_CASE("disconnected pairs carry the infinity sentinel") {
  const auto g = SpaceGraph::from_points(
      Space::Euclidean, 1.5, {{0, 0}, {1, 0}, {10, 0}, {11, 0}});
  const auto d = apsp(g);
  CHECK(d[0][1] == doctest::Approx(1.0));
  CHECK(std::isinf(d[0][2]));
  CHECK(std::isinf(d[1][3]));
}

TEST_CASE("dijkstra equals floyd-warshall on random graphs") {
  for (int s = 0; s < 50; ++s) {
    const int n = 10 + static_cast<int>(Rng(s).below(21));  // 10..30
    const auto g = SpaceGraph::generate_euclidean(n, 3.0, 1000.0, 1000 + s);
    const auto fast = apsp(g);
    const auto slow = floyd_warshall(g);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (std::isinf(slow[i][j])) {
          CHECK(std::isinf(fast[i][j]));
        } else {
          CHECK(fast[i][j] ==
                doctest::Approx(slow[i][j]).epsilon(1e-9));
        }
      }
    }
  }
}

TEST_CASE("pair context on straight-line configurations") {
  const auto g = line_graph(3);
  const auto ctx = pair_context(g, 0, 2, 0.05);
  CHECK(ctx.d_e == doctest::Approx(2.0));
  CHECK(ctx.d_sp == doctest::Approx(2.0));
  CHECK(ctx.zeta == doctest::Approx(1.0));

  // Adjacent endpoints: d_sp equals the edge length equals d_e.
  const auto ctx2 = pair_context(g, 0, 1, 0.0);
  CHECK(ctx2.zeta == 1.0);
}

TEST_CASE("pair context error paths") {
  const auto g = SpaceGraph::from_points(
      Space::Euclidean, 1.5, {{0, 0}, {1, 0}, {10, 0}});
  CHECK_THROWS_AS(pair_context(g, 0, 0, 0.05), DegeneratePairError);
  CHECK_THROWS_AS(pair_context(g, 0, 2, 0.05), NoPathError);
}

TEST_CASE("zeta cross-checked by exhaustive path enumeration") {
  Rng rng(5);
  for (int s = 0; s < 10; ++s) {
    const auto g = SpaceGraph::generate_euclidean(10, 2.5, 1000.0, 400 + s);
    const auto d = apsp(g);
    for (int trial = 0; trial < 8; ++trial) {
      const NodeId o = static_cast<NodeId>(rng.below(10));
      const NodeId dd = static_cast<NodeId>(rng.below(10));
      if (o == dd || std::isinf(d[dd][o])) continue;
      const auto ctx = pair_context(g, o, dd, 0.05, d[dd]);
      const double brute = gtr::testing::min_simple_path_length(g, o, dd);
      CHECK(ctx.zeta ==
            doctest::Approx(brute / ctx.d_e).epsilon(1e-12));
      CHECK(ctx.zeta >= 1.0 - 1e-12);
    }
  }
}

TEST_CASE("reward branches") {
  // O -- v -- u -- D evenly spaced; also a detour node.
  const auto g = line_graph(4);
  const auto dist = dijkstra(g, 3);
  const auto ctx = pair_context(g, 0, 3, 0.05, dist);
  CHECK(ctx.zeta == doctest::Approx(1.0));

  // On-path step with slack: no penalty.
  CHECK(reward(ctx, g, 1, 2, dist, 1.0) == doctest::Approx(-1.0));
  // Backward step exceeds the margin: penalty branch.
  // d_e(1,0)=1, d_sp(0,D)=3, d_sp(1,D)=2, bound=1.05 -> margin=2.1,
  // delta = (1+3) - 2.1 = 1.9.
  CHECK(reward(ctx, g, 1, 0, dist, 1.0) == doctest::Approx(-1.0 - 1.9));
  // With C=2 the overrun is charged twice.
  CHECK(reward(ctx, g, 1, 0, dist, 2.0) == doctest::Approx(-1.0 - 3.8));
  CHECK_THROWS_AS(reward(ctx, g, 3, 2, dist, 1.0), std::domain_error);
}

TEST_CASE("reward boundary is inclusive") {
  // epsilon=0 and zeta=1: an exact shortest-path step sits exactly on the
  // boundary and must not be penalized.
  const auto g = line_graph(2);
  const auto dist = dijkstra(g, 1);
  const auto ctx = pair_context(g, 0, 1, 0.0, dist);
  CHECK(ctx.zeta == 1.0);
  CHECK(reward(ctx, g, 0, 1, dist, 1.0) == -1.0);
}

TEST_CASE("optimal q on the line: cumulative negative path lengths") {
  const auto g = line_graph(3);
  const auto ctx = pair_context(g, 0, 2, 0.05);
  const auto table = optimal_q(g, ctx, 1.0);
  // Q*(O, v) = -2, Q*(v, D) = -1.
  const auto& nbrs0 = g.neighbors(0);
  REQUIRE(nbrs0.size() == 1);
  CHECK(table.qstar[0][0] == doctest::Approx(-2.0));
  const auto& nbrs1 = g.neighbors(1);
  REQUIRE(nbrs1.size() == 2);
  // neighbor order is sorted by id: [0, 2]
  CHECK(table.qstar[1][1] == doctest::Approx(-1.0));
  // Destination row has no actions.
  CHECK(table.qstar[2].empty());
}

TEST_CASE("penalty-free edges have the closed-form value") {
  for (int s = 0; s < 10; ++s) {
    const auto g = SpaceGraph::generate_euclidean(25, 4.0, 1000.0, 500 + s);
    const auto d = apsp(g);
    Rng rng(s);
    for (int trial = 0; trial < 5; ++trial) {
      const NodeId o = static_cast<NodeId>(rng.below(25));
      const NodeId dd = static_cast<NodeId>(rng.below(25));
      if (o == dd || std::isinf(d[dd][o])) continue;
      const auto ctx = pair_context(g, o, dd, 0.05, d[dd]);
      const auto table = optimal_q(g, ctx, 1.0);
      for (NodeId v = 0; v < g.size(); ++v) {
        if (v == dd) continue;
        const auto& nbrs = g.neighbors(v);
        for (std::size_t k = 0; k < nbrs.size(); ++k) {
          const NodeId u = nbrs[k];
          if (std::isinf(d[dd][u]) || std::isinf(d[dd][v])) continue;
          const double continuation = g.metric_distance(v, u) + d[dd][u];
          if (continuation <= d[dd][v] * ctx.stretch_bound()) {
            CHECK(table.qstar[v][k] == doctest::Approx(-continuation));
          } else {
            CHECK(table.qstar[v][k] < -continuation);
          }
        }
      }
    }
  }
}

TEST_CASE("optimal q equals the exhaustive simple-path dp oracle") {
  int contexts = 0;
  for (int s = 0; s < 20; ++s) {
    const auto g = SpaceGraph::generate_euclidean(
        10 + (s % 3), 2.5 + 0.5 * (s % 4), 1000.0, 700 + s);
    const auto d = apsp(g);
    Rng rng(s);
    for (int trial = 0; trial < 4; ++trial) {
      const NodeId o = static_cast<NodeId>(rng.below(g.size()));
      const NodeId dd = static_cast<NodeId>(rng.below(g.size()));
      if (o == dd || std::isinf(d[dd][o])) continue;
      const auto ctx = pair_context(g, o, dd, 0.05, d[dd]);
      const auto table = optimal_q(g, ctx, 1.0);
      ExhaustiveDp dp(g, ctx, 1.0);
      ++contexts;
      for (NodeId v = 0; v < g.size(); ++v) {
        if (v == dd) continue;
        const auto& nbrs = g.neighbors(v);
        for (std::size_t k = 0; k < nbrs.size(); ++k) {
          const double expect = dp.qvalue(v, nbrs[k]);
          const double got = table.qstar[v][k];
          if (std::isinf(expect)) {
            CHECK(std::isinf(got));
          } else {
            CHECK(got == doctest::Approx(expect).epsilon(1e-6));
          }
        }
      }
    }
  }
  CHECK(contexts >= 20);
}

TEST_CASE("argmax of q-star includes a true shortest-path neighbor") {
  for (int s = 0; s < 20; ++s) {
    const auto g = SpaceGraph::generate_euclidean(18, 4.0, 1000.0, 900 + s);
    const auto d = apsp(g);
    for (NodeId dd = 0; dd < g.size(); ++dd) {
      for (NodeId v = 0; v < g.size(); ++v) {
        if (v == dd || std::isinf(d[dd][v]) || g.degree(v) == 0) continue;
        if (g.metric_distance(v, dd) <= 0.0) continue;
        const auto ctx = pair_context(g, v, dd, 0.05, d[dd]);
        const auto row = qstar_row(g, ctx, d[dd], v, 1.0);
        double best = -kInf;
        for (double q : row) best = std::max(best, q);
        bool found = false;
        const auto& nbrs = g.neighbors(v);
        for (std::size_t k = 0; k < nbrs.size(); ++k) {
          const bool on_sp =
              std::fabs(g.metric_distance(v, nbrs[k]) + d[dd][nbrs[k]] -
                        d[dd][v]) <= 1e-9 * d[dd][v];
          if (on_sp && row[k] >= best - 1e-9 * std::fabs(best)) {
            found = true;
            break;
          }
        }
        CHECK(found);
      }
    }
  }
}

TEST_CASE("monotone dominance among penalty-free edges") {
  for (int s = 0; s < 5; ++s) {
    const auto g = SpaceGraph::generate_euclidean(30, 5.0, 1000.0, 40 + s);
    const auto d = apsp(g);
    Rng rng(s);
    for (int trial = 0; trial < 10; ++trial) {
      const NodeId o = static_cast<NodeId>(rng.below(30));
      const NodeId dd = static_cast<NodeId>(rng.below(30));
      if (o == dd || std::isinf(d[dd][o])) continue;
      const auto ctx = pair_context(g, o, dd, 0.05, d[dd]);
      const auto table = optimal_q(g, ctx, 1.0);
      for (NodeId v = 0; v < g.size(); ++v) {
        if (v == dd) continue;
        const auto& nbrs = g.neighbors(v);
        const double margin = d[dd][v] * ctx.stretch_bound();
        for (std::size_t i = 0; i < nbrs.size(); ++i) {
          for (std::size_t j = 0; j < nbrs.size(); ++j) {
            const double ci = g.metric_distance(v, nbrs[i]) + d[dd][nbrs[i]];
            const double cj = g.metric_distance(v, nbrs[j]) + d[dd][nbrs[j]];
            if (ci <= margin && cj <= margin && ci < cj) {
              CHECK(table.qstar[v][i] > table.qstar[v][j]);
            }
          }
        }
      }
    }
  }
}

TEST_CASE("oracle dump emits one row per edge") {
  const auto g = line_graph(3);
  const auto ctx = pair_context(g, 0, 2, 0.05);
  const auto table = optimal_q(g, ctx, 1.0);
  std::ostringstream out;
  dump_oracle(out, g, table);
  // header + edges of nodes 0 and 1 (destination row is empty)
  int lines = 0;
  std::string line;
  std::istringstream in(out.str());
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 1 + 3);
}
