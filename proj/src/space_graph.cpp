#include "gtr/space_graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "gtr/rng.hpp"

namespace gtr {
namespace {

constexpr double kPi = 3.14159265358979323846;

void format_double(std::ostream& out, double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  out << buf;
}

double euclidean_distance(const Coord& p, const Coord& q) {
  return std::hypot(p.a - q.a, p.b - q.b);
}

}  // namespace

double hyperbolic_radial_icdf(double q, double alpha, double disk_radius) {
  // CDF(r) = (cosh(alpha r) - 1) / (cosh(alpha R) - 1)
  const double span = std::cosh(alpha * disk_radius) - 1.0;
  return std::acosh(1.0 + q * span) / alpha;
}

double hyperbolic_distance(const Coord& p, const Coord& q) {
  double dtheta = std::fabs(p.b - q.b);
  dtheta = std::fmin(dtheta, 2.0 * kPi - dtheta);
  // Stable rewrite of cosh(r1)cosh(r2) - sinh(r1)sinh(r2)cos(dtheta):
  // coincident points give acosh(1) = 0 exactly instead of sqrt-of-epsilon
  // noise from the cancellation in the textbook form.
  const double half = std::sin(0.5 * dtheta);
  const double arg = std::cosh(p.a - q.a) +
                     std::sinh(p.a) * std::sinh(q.a) * 2.0 * half * half;
  return std::acosh(std::fmax(arg, 1.0));
}

double SpaceGraph::metric_distance(NodeId v, NodeId u) const {
  check(v);
  check(u);
  if (space_ == Space::Euclidean) return euclidean_distance(nodes_[v], nodes_[u]);
  return hyperbolic_distance(nodes_[v], nodes_[u]);
}

void SpaceGraph::build_adjacency() {
  const int n = size();
  adj_.assign(n, {});
  for (NodeId v = 0; v < n; ++v) {
    for (NodeId u = v + 1; u < n; ++u) {
      if (metric_distance(v, u) <= radius_) {
        adj_[v].push_back(u);
        adj_[u].push_back(v);
      }
    }
  }
}

double SpaceGraph::mean_degree() const {
  if (nodes_.empty()) return 0.0;
  std::size_t total = 0;
  for (const auto& nbrs : adj_) total += nbrs.size();
  return static_cast<double>(total) / static_cast<double>(size());
}

std::size_t SpaceGraph::edge_count() const {
  std::size_t total = 0;
  for (const auto& nbrs : adj_) total += nbrs.size();
  return total / 2;
}

SpaceGraph SpaceGraph::generate_euclidean(int n, double rho, double radius,
                                          std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("node count must be >= 2");
  if (rho <= 0.0) throw std::invalid_argument("density must be positive");
  if (radius <= 0.0) throw std::invalid_argument("radius must be positive");

  SpaceGraph g;
  g.space_ = Space::Euclidean;
  g.radius_ = radius;
  g.density_ = rho;
  g.seed_ = seed;
  g.side_ = std::sqrt(static_cast<double>(n) * radius * radius / rho);

  Rng rng(seed);
  g.nodes_.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double x = rng.uniform(0.0, g.side_);
    const double y = rng.uniform(0.0, g.side_);
    g.nodes_.push_back({x, y});
  }
  g.build_adjacency();
  return g;
}

SpaceGraph SpaceGraph::generate_hyperbolic(int n, double delta, double alpha,
                                           std::optional<double> disk_radius,
                                           std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("node count must be >= 2");
  if (delta <= 0.0) throw std::invalid_argument("target degree must be positive");
  if (alpha <= 0.0) throw std::invalid_argument("curvature alpha must be positive");

  SpaceGraph g;
  g.space_ = Space::Hyperbolic;
  g.alpha_ = alpha;
  g.density_ = delta;
  g.seed_ = seed;
  g.disk_radius_ = disk_radius.value_or(2.0 * std::log(static_cast<double>(n)));
  if (g.disk_radius_ <= 0.0) throw std::invalid_argument("disk radius must be positive");

  Rng rng(seed);
  g.nodes_.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double r = hyperbolic_radial_icdf(rng.uniform(), alpha, g.disk_radius_);
    const double theta = rng.uniform(0.0, 2.0 * kPi);
    g.nodes_.push_back({r, theta});
  }

  // Calibrate the connection radius over the fixed node sample. Mean degree
  // is monotone in the radius, so bisection converges to the jump nearest
  // delta; distances are precomputed and sorted so each probe is a count.
  std::vector<double> dists;
  dists.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (NodeId v = 0; v < n; ++v) {
    for (NodeId u = v + 1; u < n; ++u) {
      dists.push_back(hyperbolic_distance(g.nodes_[v], g.nodes_[u]));
    }
  }
  std::sort(dists.begin(), dists.end());
  const auto mean_degree_at = [&](double r) {
    const auto it = std::upper_bound(dists.begin(), dists.end(), r);
    return 2.0 * static_cast<double>(it - dists.begin()) / n;
  };

  const double r_max = 2.0 * g.disk_radius_;
  const double reachable = mean_degree_at(r_max);
  if (reachable < delta) {
    std::ostringstream msg;
    msg << "cannot calibrate mean degree " << delta
        << ": achievable range is [0, " << reachable
        << "] for connection radius in [0, " << r_max << "]";
    throw CalibrationError(msg.str());
  }
  double lo = 0.0, hi = r_max;
  for (int iter = 0; iter < 64; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (mean_degree_at(mid) < delta ? lo : hi) = mid;
  }
  // Pick whichever bracket end realizes the degree closest to delta.
  g.radius_ = std::fabs(mean_degree_at(lo) - delta) <
                      std::fabs(mean_degree_at(hi) - delta)
                  ? lo
                  : hi;
  g.build_adjacency();
  return g;
}

SpaceGraph SpaceGraph::from_points(Space space, double radius,
                                   std::vector<Coord> points, double alpha) {
  if (points.size() < 2) throw std::invalid_argument("node count must be >= 2");
  if (radius <= 0.0) throw std::invalid_argument("radius must be positive");
  SpaceGraph g;
  g.space_ = space;
  g.radius_ = radius;
  g.alpha_ = alpha;
  g.disk_radius_ = space == Space::Hyperbolic ? radius : 0.0;
  g.nodes_ = std::move(points);
  g.build_adjacency();
  return g;
}

void SpaceGraph::save(std::ostream& out) const {
  out << "gtr-graph v1\n";
  out << "space " << (space_ == Space::Euclidean ? "euclidean" : "hyperbolic")
      << "\n";
  out << "R ";
  format_double(out, radius_);
  out << "\n";
  if (space_ == Space::Hyperbolic) {
    out << "alpha ";
    format_double(out, alpha_);
    out << "\ndiskR ";
    format_double(out, disk_radius_);
    out << "\n";
  }
  out << (space_ == Space::Euclidean ? "rho " : "delta ");
  format_double(out, density_);
  out << "\n";
  out << "seed " << seed_ << "\n";
  out << "n " << size() << "\n";
  for (NodeId v = 0; v < size(); ++v) {
    out << v << ' ';
    format_double(out, nodes_[v].a);
    out << ' ';
    format_double(out, nodes_[v].b);
    out << "\n";
  }
}

void SpaceGraph::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  save(out);
}

SpaceGraph SpaceGraph::load(std::istream& in) {
  std::string magic, version;
  in >> magic >> version;
  if (magic != "gtr-graph" || version != "v1") {
    throw std::runtime_error("not a gtr-graph v1 file");
  }
  SpaceGraph g;
  std::string key;
  int n = -1;
  while (in >> key) {
    if (key == "space") {
      std::string v;
      in >> v;
      if (v == "euclidean") {
        g.space_ = Space::Euclidean;
      } else if (v == "hyperbolic") {
        g.space_ = Space::Hyperbolic;
      } else {
        throw std::runtime_error("unknown space: " + v);
      }
    } else if (key == "R") {
      in >> g.radius_;
    } else if (key == "alpha") {
      in >> g.alpha_;
    } else if (key == "diskR") {
      in >> g.disk_radius_;
    } else if (key == "rho" || key == "delta") {
      in >> g.density_;
    } else if (key == "seed") {
      in >> g.seed_;
    } else if (key == "n") {
      in >> n;
      break;
    } else {
      throw std::runtime_error("unknown graph header key: " + key);
    }
  }
  if (n < 2) throw std::runtime_error("graph file missing node count");
  if (g.space_ == Space::Euclidean && g.density_ > 0.0 && g.radius_ > 0.0) {
    g.side_ = std::sqrt(static_cast<double>(n) * g.radius_ * g.radius_ /
                        g.density_);
  }
  g.nodes_.resize(n);
  for (int i = 0; i < n; ++i) {
    NodeId id;
    in >> id;
    if (!in || id != i) throw std::runtime_error("graph file node ids must be 0..n-1 in order");
    in >> g.nodes_[i].a >> g.nodes_[i].b;
  }
  if (!in) throw std::runtime_error("truncated graph file");
  g.build_adjacency();
  return g;
}

SpaceGraph SpaceGraph::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file: " + path);
  return load(in);
}

}  // namespace gtr
