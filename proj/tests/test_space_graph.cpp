#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <sstream>

#include "gtr/rng.hpp"
#include "gtr/space_graph.hpp"
#include "support.hpp"

using namespace gtr;

TEST_CASE("euclidean generation square side follows n, rho, R") {
  const auto g = SpaceGraph::generate_euclidean(50, 5.0, 1000.0, 19);
  CHECK(g.side() == doctest::Approx(std::sqrt(1e7)).epsilon(1e-12));
  for (NodeId v = 0; v < g.size(); ++v) {
    CHECK(g.coord(v).a >= 0.0);
    CHECK(g.coord(v).a <= g.side());
    CHECK(g.coord(v).b >= 0.0);
    CHECK(g.coord(v).b <= g.side());
  }
}

TEST_CASE("two far nodes yield an empty symmetric adjacency") {
  const auto g = SpaceGraph::generate_euclidean(2, 1e-6, 1.0, 7);
  CHECK(g.side() > 100.0);
  CHECK(g.edge_count() == 0);
  CHECK(g.neighbors(0).empty());
  CHECK(g.neighbors(1).empty());
}

TEST_CASE("euclidean realized degree matches the geometric expectation") {
  // Expected degree of a node in the unit square with connection range t:
  // (n-1) * (pi t^2 - 8 t^3 / 3 + t^4 / 2), the square line-picking CDF.
  const int n = 50;
  const double rho = 5.0, radius = 1000.0;
  const double t = radius / std::sqrt(n * radius * radius / rho);
  const double p = M_PI * t * t - 8.0 * t * t * t / 3.0 +
                   0.5 * t * t * t * t;
  const double expected = (n - 1) * p;
  double mean = 0.0;
  const int seeds = 20;
  for (int s = 0; s < seeds; ++s) {
    mean += SpaceGraph::generate_euclidean(n, rho, radius, 100 + s).mean_degree();
  }
  mean /= seeds;
  CHECK(mean == doctest::Approx(expected).epsilon(0.15));
}

TEST_CASE("generation is deterministic per seed") {
  const auto a = SpaceGraph::generate_euclidean(40, 4.0, 1000.0, 5);
  const auto b = SpaceGraph::generate_euclidean(40, 4.0, 1000.0, 5);
  const auto c = SpaceGraph::generate_euclidean(40, 4.0, 1000.0, 6);
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("generator parameter validation") {
  CHECK_THROWS_AS(SpaceGraph::generate_euclidean(1, 5.0, 1000.0, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(SpaceGraph::generate_euclidean(10, -1.0, 1000.0, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(SpaceGraph::generate_euclidean(10, 5.0, 0.0, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(SpaceGraph::generate_hyperbolic(10, 3.0, -0.6, {}, 0),
                  std::invalid_argument);
}

TEST_CASE("hyperbolic radial inverse CDF boundary values") {
  const double alpha = 0.6, R = 8.0;
  CHECK(hyperbolic_radial_icdf(0.0, alpha, R) == 0.0);
  CHECK(hyperbolic_radial_icdf(1.0, alpha, R) == doctest::Approx(R).epsilon(1e-12));
  // Interior quantiles are monotone.
  double prev = 0.0;
  for (double q = 0.1; q < 1.0; q += 0.1) {
    const double r = hyperbolic_radial_icdf(q, alpha, R);
    CHECK(r > prev);
    prev = r;
  }
}

TEST_CASE("hyperbolic distance identities") {
  CHECK(hyperbolic_distance({1.0, 0.3}, {1.0, 0.3}) == 0.0);
  // Coincident polar points at the same angle.
  CHECK(hyperbolic_distance({1.0, 0.0}, {1.0, 0.0}) == 0.0);
  // Same ray: distance reduces to |r1 - r2|.
  CHECK(hyperbolic_distance({2.0, 1.0}, {0.5, 1.0}) ==
        doctest::Approx(1.5).epsilon(1e-9));
  // Angle wrap: theta = 0.1 and 2*pi - 0.1 are 0.2 apart.
  const double d1 = hyperbolic_distance({1.0, 0.1}, {1.0, 2.0 * M_PI - 0.1});
  const double d2 = hyperbolic_distance({1.0, 0.1}, {1.0, 0.3});
  CHECK(d1 == doctest::Approx(d2).epsilon(1e-9));
}

TEST_CASE("hyperbolic degree calibration hits the target") {
  double mean = 0.0;
  const int seeds = 10;
  for (int s = 0; s < seeds; ++s) {
    const auto g = SpaceGraph::generate_hyperbolic(64, 3.0, 0.6, {}, 300 + s);
    mean += g.mean_degree();
    CHECK(g.radius() > 0.0);
    CHECK(g.radius() <= 2.0 * g.disk_radius());
    for (NodeId v = 0; v < g.size(); ++v) {
      CHECK(g.coord(v).a <= g.disk_radius());
      CHECK(g.coord(v).b >= 0.0);
      CHECK(g.coord(v).b < 2.0 * M_PI);
    }
  }
  mean /= seeds;
  CHECK(mean == doctest::Approx(3.0).epsilon(0.15));
}

TEST_CASE("calibration failure names the achievable range") {
  // Mean degree can never reach n.
  CHECK_THROWS_WITH_AS(SpaceGraph::generate_hyperbolic(8, 100.0, 0.6, {}, 1),
                       doctest::Contains("achievable range"),
                       CalibrationError);
}

TEST_CASE("metric distance basics") {
  const auto g = SpaceGraph::from_points(
      Space::Euclidean, 10.0, {{0.0, 0.0}, {3.0, 4.0}, {1.0, 1.0}});
  CHECK(g.metric_distance(0, 0) == 0.0);
  CHECK(g.metric_distance(0, 1) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(g.metric_distance(1, 0) == g.metric_distance(0, 1));
  CHECK_THROWS_AS(g.metric_distance(0, 99), std::out_of_range);
}

TEST_CASE("adjacency and distance symmetry, exhaustive on n=20") {
  for (const bool hyperbolic : {false, true}) {
    const auto g =
        hyperbolic ? SpaceGraph::generate_hyperbolic(20, 3.0, 0.6, {}, 11)
                   : SpaceGraph::generate_euclidean(20, 4.0, 1000.0, 11);
    for (NodeId v = 0; v < g.size(); ++v) {
      for (NodeId u = 0; u < g.size(); ++u) {
        CHECK(g.metric_distance(v, u) ==
              doctest::Approx(g.metric_distance(u, v)).epsilon(1e-15));
        const auto& nv = g.neighbors(v);
        const auto& nu = g.neighbors(u);
        const bool vu = std::find(nv.begin(), nv.end(), u) != nv.end();
        const bool uv = std::find(nu.begin(), nu.end(), v) != nu.end();
        CHECK(vu == uv);
        if (v == u) CHECK_FALSE(vu);  // no self loops
        if (v != u) CHECK(vu == (g.metric_distance(v, u) <= g.radius()));
      }
    }
  }
}

TEST_CASE("triangle inequality on sampled triples") {
  Rng rng(99);
  for (const bool hyperbolic : {false, true}) {
    const auto g =
        hyperbolic ? SpaceGraph::generate_hyperbolic(40, 3.0, 0.6, {}, 21)
                   : SpaceGraph::generate_euclidean(40, 4.0, 1000.0, 21);
    for (int i = 0; i < 2000; ++i) {
      const NodeId a = static_cast<NodeId>(rng.below(g.size()));
      const NodeId b = static_cast<NodeId>(rng.below(g.size()));
      const NodeId c = static_cast<NodeId>(rng.below(g.size()));
      const double ab = g.metric_distance(a, b);
      const double bc = g.metric_distance(b, c);
      const double ac = g.metric_distance(a, c);
      CHECK(ac <= (ab + bc) * (1.0 + 1e-9) + 1e-12);
    }
  }
}

TEST_CASE("graph file round trip is bit exact") {
  for (const bool hyperbolic : {false, true}) {
    const auto g =
        hyperbolic ? SpaceGraph::generate_hyperbolic(30, 3.0, 0.6, {}, 77)
                   : SpaceGraph::generate_euclidean(30, 5.0, 1000.0, 77);
    std::stringstream buf;
    g.save(buf);
    const auto loaded = SpaceGraph::load(buf);
    CHECK(loaded == g);
    // Saving again produces identical bytes.
    std::stringstream buf2;
    loaded.save(buf2);
    std::stringstream buf3;
    g.save(buf3);
    CHECK(buf2.str() == buf3.str());
  }
}
