#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gtr {

using NodeId = std::int32_t;

enum class Space { Euclidean, Hyperbolic };

// (x, y) for Euclidean nodes; (r, theta) polar for hyperbolic nodes.
struct Coord {
  double a = 0.0;
  double b = 0.0;
  friend bool operator==(const Coord&, const Coord&) = default;
};

struct CalibrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Inverse CDF of the hyperbolic radial density p(r) = alpha*sinh(alpha r) /
// (cosh(alpha R) - 1); q=0 -> 0, q=1 -> R.
double hyperbolic_radial_icdf(double q, double alpha, double disk_radius);
// Distance in the standard curvature -1 metric, via the hyperbolic law of
// cosines with the angular difference wrapped to [0, pi].
double hyperbolic_distance(const Coord& p, const Coord& q);

// Uniform random geometric graph over a 2-D metric space. Immutable after
// construction; adjacency holds (v,u) iff metric distance <= radius,
// undirected, no self-loops, neighbor lists sorted by id.
class SpaceGraph {
 public:
  // n i.i.d. uniform points on a square of side sqrt(n R^2 / rho).
  static SpaceGraph generate_euclidean(int n, double rho, double radius,
                                       std::uint64_t seed);
  // Radial coordinates by inverse-CDF sampling, angles uniform. When
  // disk_radius is absent it defaults to 2 ln(n). The connection radius is
  // then calibrated by binary search in [0, 2*disk_radius] so the realized
  // mean degree approximates delta.
  static SpaceGraph generate_hyperbolic(int n, double delta, double alpha,
                                        std::optional<double> disk_radius,
                                        std::uint64_t seed);
  // Explicit node placement (synthetic instances and tests).
  static SpaceGraph from_points(Space space, double radius,
                                std::vector<Coord> points, double alpha = 0.0);

  int size() const { return static_cast<int>(nodes_.size()); }
  Space space() const { return space_; }
  // Connection radius: adjacency threshold and feature normalization unit.
  double radius() const { return radius_; }
  double alpha() const { return alpha_; }
  double disk_radius() const { return disk_radius_; }
  double density_param() const { return density_; }
  std::uint64_t seed() const { return seed_; }
  double side() const { return side_; }

  const Coord& coord(NodeId v) const { return nodes_[check(v)]; }
  const std::vector<NodeId>& neighbors(NodeId v) const { return adj_[check(v)]; }
  int degree(NodeId v) const { return static_cast<int>(adj_[check(v)].size()); }
  double mean_degree() const;
  std::size_t edge_count() const;

  double metric_distance(NodeId v, NodeId u) const;

  // Structured-text round trip: header stores parameters and coordinates
  // only; adjacency is recomputed on load. load(save(g)) == g bit-exactly.
  void save(std::ostream& out) const;
  void save_file(const std::string& path) const;
  static SpaceGraph load(std::istream& in);
  static SpaceGraph load_file(const std::string& path);

  friend bool operator==(const SpaceGraph&, const SpaceGraph&) = default;

 private:
  SpaceGraph() = default;
  void build_adjacency();
  NodeId check(NodeId v) const {
    if (v < 0 || v >= size()) throw std::out_of_range("node id out of range");
    return v;
  }

  Space space_ = Space::Euclidean;
  double radius_ = 0.0;
  double alpha_ = 0.0;
  double disk_radius_ = 0.0;
  double density_ = 0.0;  // rho (Euclidean) or target delta (hyperbolic)
  std::uint64_t seed_ = 0;
  double side_ = 0.0;
  std::vector<Coord> nodes_;
  std::vector<std::vector<NodeId>> adj_;
};

}  // namespace gtr
