#pragma once

#include <functional>
#include <iosfwd>

#include "gtr/policy.hpp"

namespace gtr {

// Scoring function over the 4-feature slice (d(v,D), ns(O,D,v), d(u,D),
// ns(O,D,u)), all in radius-normalized units.
using Scorer4 = std::function<double(double dv, double nsv, double du,
                                     double nsu)>;

Scorer4 scorer_from_network(const QNetwork& net);
Scorer4 scorer_from_params(const TwoLinearParams& params);

struct InterpretGrid {
  double nsv_fixed = 1.2;
  double dv_lo = 0.5, dv_hi = 4.5;
  int dv_steps = 9;
  double nsu_lo = 1.0, nsu_hi = 2.2;
  int nsu_steps = 13;
  double du_lo = 0.05, du_hi = 5.0;
  int du_steps = 100;
};

struct TwoPlaneFit {
  TwoLinearParams params;
  double max_residual = 0.0;  // outside the transition band
  bool single_plane = false;  // no detectable boundary
  std::size_t boundary_points = 0;
};

// Recovers a guarded two-action approximation of the scorer: per (dv, nsu)
// scanline along d(u,D), the transition is located at the largest second
// difference and refined by intersecting line fits of the two sides; the
// guard plane is least-squares fit through the located transitions and each
// side is fit by least squares. An affine scorer yields single_plane.
TwoPlaneFit fit_two_plane(const Scorer4& scorer, const InterpretGrid& grid);
TwoPlaneFit fit_two_plane(const QNetwork& net, const InterpretGrid& grid);

// CSV grid of scores at a fixed (d(v,D), ns(O,D,v)) slice: first column is
// d(u,D), remaining columns sweep ns(O,D,u).
void surface_export(std::ostream& out, const Scorer4& scorer, double dv_fixed,
                    double nsv_fixed, double nsu_lo, double nsu_hi,
                    int nsu_steps, double du_lo, double du_hi, int du_steps);

// Hand-builds a network whose response equals the guarded command exactly
// outside a transition band of width max|branch gap| / band_sharpness around
// the guard plane (a continuous network cannot reproduce the jump itself).
QNetwork make_guarded_command_net(const TwoLinearParams& params,
                                  double norm_radius,
                                  double band_sharpness = 50.0,
                                  double bias_shift = 4.0);

}  // namespace gtr
