#include "gtr/interpret.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <vector>

namespace gtr {
namespace {

// Least squares via normal equations, k <= 4 unknowns.
template <int K>
std::array<double, K> solve_lsq(const std::vector<std::array<double, K>>& rows,
                                const std::vector<double>& rhs) {
  double ata[K][K] = {};
  double atb[K] = {};
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (int i = 0; i < K; ++i) {
      atb[i] += rows[r][i] * rhs[r];
      for (int j = 0; j < K; ++j) ata[i][j] += rows[r][i] * rows[r][j];
    }
  }
  // Gaussian elimination with partial pivoting.
  for (int col = 0; col < K; ++col) {
    int pivot = col;
    for (int r = col + 1; r < K; ++r) {
      if (std::fabs(ata[r][col]) > std::fabs(ata[pivot][col])) pivot = r;
    }
    std::swap(ata[col], ata[pivot]);
    std::swap(atb[col], atb[pivot]);
    const double p = ata[col][col];
    for (int r = col + 1; r < K; ++r) {
      const double f = ata[r][col] / p;
      for (int c = col; c < K; ++c) ata[r][c] -= f * ata[col][c];
      atb[r] -= f * atb[col];
    }
  }
  std::array<double, K> x{};
  for (int r = K - 1; r >= 0; --r) {
    double acc = atb[r];
    for (int c = r + 1; c < K; ++c) acc -= ata[r][c] * x[c];
    x[r] = acc / ata[r][r];
  }
  return x;
}

struct Line {
  double slope = 0.0, intercept = 0.0;
};

Line fit_line(const std::vector<double>& xs, const std::vector<double>& ys,
              std::size_t lo, std::size_t hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(hi - lo);
  for (std::size_t i = lo; i < hi; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  Line l;
  const double denom = n * sxx - sx * sx;
  l.slope = (n * sxy - sx * sy) / denom;
  l.intercept = (sy - l.slope * sx) / n;
  return l;
}

std::vector<double> linspace(double lo, double hi, int steps) {
  std::vector<double> v(steps);
  for (int i = 0; i < steps; ++i) {
    v[i] = steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1);
  }
  return v;
}

}  // namespace

Scorer4 scorer_from_network(const QNetwork& net) {
  if (net.omega != 4) {
    throw std::invalid_argument(
        "two-plane interpretation needs the 4-feature network");
  }
  return [&net](double dv, double nsv, double du, double nsu) {
    FeatureVec f;
    f.width = 4;
    f.x = {dv, nsv, du, nsu};
    return net.forward(f);
  };
}

Scorer4 scorer_from_params(const TwoLinearParams& params) {
  return [params](double dv, double, double du, double nsu) {
    return params.score(dv, nsu, du);
  };
}

TwoPlaneFit fit_two_plane(const QNetwork& net, const InterpretGrid& grid) {
  return fit_two_plane(scorer_from_network(net), grid);
}

TwoPlaneFit fit_two_plane(const Scorer4& scorer, const InterpretGrid& grid) {
  const auto dvs = linspace(grid.dv_lo, grid.dv_hi, grid.dv_steps);
  const auto nsus = linspace(grid.nsu_lo, grid.nsu_hi, grid.nsu_steps);
  const auto dus = linspace(grid.du_lo, grid.du_hi, grid.du_steps);
  const double du_step = dus.size() > 1 ? dus[1] - dus[0] : 1.0;

  // Cache all samples: values[(i_dv * nsu_steps + i_nsu) * du_steps + i_du].
  std::vector<double> values;
  values.reserve(dvs.size() * nsus.size() * dus.size());
  double scale = 0.0;
  for (double dv : dvs) {
    for (double nsu : nsus) {
      for (double du : dus) {
        const double f = scorer(dv, grid.nsv_fixed, du, nsu);
        values.push_back(f);
        scale = std::max(scale, std::fabs(f));
      }
    }
  }
  const double kink_threshold = 1e-6 * std::max(1.0, scale);

  // Locate the transition on each scanline along d(u,D).
  struct Kink {
    double dv, nsu, du;
  };
  std::vector<Kink> kinks;
  const std::size_t nd = dus.size();
  for (std::size_t i = 0; i < dvs.size(); ++i) {
    for (std::size_t j = 0; j < nsus.size(); ++j) {
      const double* f = values.data() + (i * nsus.size() + j) * nd;
      std::size_t kbest = 0;
      double sbest = 0.0;
      for (std::size_t k = 1; k + 1 < nd; ++k) {
        const double s = std::fabs(f[k - 1] - 2.0 * f[k] + f[k + 1]);
        if (s > sbest) {
          sbest = s;
          kbest = k;
        }
      }
      if (sbest < kink_threshold) continue;
      if (kbest < 3 || kbest + 4 > nd) continue;
      std::vector<double> xs(dus.begin(), dus.end());
      std::vector<double> ys(f, f + nd);
      const Line left = fit_line(xs, ys, 0, kbest - 1);
      const Line right = fit_line(xs, ys, kbest + 2, nd);
      // The transition is where the samples cross the midline between the
      // side fits. (Intersecting the side fits instead would locate where
      // the two planes happen to be equal, which is unrelated to the
      // boundary when the surface steps between them.)
      double du_kink = dus[kbest];
      bool located = false;
      const auto mid = [&](std::size_t k) {
        return ys[k] - 0.5 * ((left.slope + right.slope) * xs[k] +
                              left.intercept + right.intercept);
      };
      for (std::size_t k = kbest - 2; k <= kbest + 2; ++k) {
        const double a = mid(k), b = mid(k + 1);
        if (a == 0.0) {
          du_kink = xs[k];
          located = true;
          break;
        }
        if ((a < 0.0) != (b < 0.0)) {
          du_kink = xs[k] + (xs[k + 1] - xs[k]) * a / (a - b);
          located = true;
          break;
        }
      }
      if (!located && std::fabs(left.slope - right.slope) > 1e-12) {
        // Continuous crease: the side fits meet at the kink itself.
        du_kink =
            (right.intercept - left.intercept) / (left.slope - right.slope);
      }
      if (du_kink < dus.front() || du_kink > dus.back()) continue;
      kinks.push_back({dvs[i], nsus[j], du_kink});
    }
  }

  TwoPlaneFit fit;
  fit.boundary_points = kinks.size();
  if (kinks.size() < 3) {
    // No coherent boundary: one plane over the whole grid.
    fit.single_plane = true;
    std::vector<std::array<double, 4>> rows;
    std::vector<double> rhs;
    std::size_t idx = 0;
    for (double dv : dvs) {
      for (double nsu : nsus) {
        for (double du : dus) {
          rows.push_back({dv, nsu, du, 1.0});
          rhs.push_back(values[idx++]);
        }
      }
    }
    const auto c = solve_lsq<4>(rows, rhs);
    fit.params.a1 = c[0];
    fit.params.a2 = c[1];
    fit.params.a3 = c[2];
    fit.params.a0 = c[3];
    fit.params.g1 = fit.params.g2 = 0.0;
    fit.params.g0 = kInf;  // guard always true: single action
    double res = 0.0;
    idx = 0;
    for (double dv : dvs) {
      for (double nsu : nsus) {
        for (double du : dus) {
          const double model = c[0] * dv + c[1] * nsu + c[2] * du + c[3];
          res = std::max(res, std::fabs(values[idx++] - model));
        }
      }
    }
    fit.max_residual = res;
    return fit;
  }

  // Guard plane through the located transitions.
  {
    std::vector<std::array<double, 3>> rows;
    std::vector<double> rhs;
    for (const auto& k : kinks) {
      rows.push_back({k.dv, k.nsu, 1.0});
      rhs.push_back(k.du);
    }
    const auto gcoef = solve_lsq<3>(rows, rhs);
    fit.params.g1 = gcoef[0];
    fit.params.g2 = gcoef[1];
    fit.params.g0 = gcoef[2];
  }

  // Side fits, keeping clear of the transition band.
  const double margin = 2.0 * du_step;
  std::vector<std::array<double, 4>> rows1;
  std::vector<double> rhs1;
  std::vector<std::array<double, 3>> rows2;
  std::vector<double> rhs2;
  std::size_t idx = 0;
  for (double dv : dvs) {
    for (double nsu : nsus) {
      const double boundary =
          fit.params.g1 * dv + fit.params.g2 * nsu + fit.params.g0;
      for (double du : dus) {
        const double f = values[idx++];
        if (std::fabs(du - boundary) <= margin) continue;
        if (du < boundary) {
          rows1.push_back({dv, nsu, du, 1.0});
          rhs1.push_back(f);
        } else {
          rows2.push_back({dv, du, 1.0});
          rhs2.push_back(f);
        }
      }
    }
  }
  if (rows1.size() >= 4) {
    const auto c = solve_lsq<4>(rows1, rhs1);
    fit.params.a1 = c[0];
    fit.params.a2 = c[1];
    fit.params.a3 = c[2];
    fit.params.a0 = c[3];
  }
  if (rows2.size() >= 3) {
    const auto c = solve_lsq<3>(rows2, rhs2);
    fit.params.b1 = c[0];
    fit.params.b2 = c[1];
    fit.params.b0 = c[2];
  }

  double res = 0.0;
  for (std::size_t r = 0; r < rows1.size(); ++r) {
    const auto& a = rows1[r];
    const double model = fit.params.a1 * a[0] + fit.params.a2 * a[1] +
                         fit.params.a3 * a[2] + fit.params.a0;
    res = std::max(res, std::fabs(rhs1[r] - model));
  }
  for (std::size_t r = 0; r < rows2.size(); ++r) {
    const auto& a = rows2[r];
    const double model =
        fit.params.b1 * a[0] + fit.params.b2 * a[1] + fit.params.b0;
    res = std::max(res, std::fabs(rhs2[r] - model));
  }
  fit.max_residual = res;
  return fit;
}

void surface_export(std::ostream& out, const Scorer4& scorer, double dv_fixed,
                    double nsv_fixed, double nsu_lo, double nsu_hi,
                    int nsu_steps, double du_lo, double du_hi, int du_steps) {
  const auto nsus = linspace(nsu_lo, nsu_hi, nsu_steps);
  const auto dus = linspace(du_lo, du_hi, du_steps);
  out << "du_over_nsu";
  for (double nsu : nsus) out << ',' << nsu;
  out << "\n";
  for (double du : dus) {
    out << du;
    for (double nsu : nsus) out << ',' << scorer(dv_fixed, nsv_fixed, du, nsu);
    out << "\n";
  }
}

QNetwork make_guarded_command_net(const TwoLinearParams& params,
                                  double norm_radius, double band_sharpness,
                                  double bias_shift) {
  QNetwork net = QNetwork::zeros(FeatureSchema::DistAndStretch, norm_radius);
  const double lam = band_sharpness;
  const double shift = bias_shift;

  // Feature order: (dv, nsv, du, nsu).
  const std::array<double, 4> w_t = {params.g1, 0.0, -1.0, params.g2};
  const double b_t = params.g0;
  const std::array<double, 4> w_p1 = {params.a1, 0.0, params.a3, params.a2};
  const double b_p1 = params.a0;
  const std::array<double, 4> w_p2 = {params.b1, 0.0, params.b2, 0.0};
  const double b_p2 = params.b0;
  std::array<double, 4> w_q;
  for (int k = 0; k < 4; ++k) w_q[k] = w_p1[k] - w_p2[k];
  const double b_q = b_p1 - b_p2;

  const auto set_row1 = [&](int row, const std::array<double, 4>& w, double b) {
    for (int k = 0; k < 4; ++k) net.w1[static_cast<std::size_t>(row) * 4 + k] = w[k];
    net.b1[row] = b;
  };
  // u1 = relu(lam*t - q), u2 = relu(lam*t + q), u3/u4 carry lam*t through,
  // u5 keeps the second action positive so the last ReLU passes it.
  std::array<double, 4> w;
  for (int k = 0; k < 4; ++k) w[k] = lam * w_t[k] - w_q[k];
  set_row1(0, w, lam * b_t - b_q);
  for (int k = 0; k < 4; ++k) w[k] = lam * w_t[k] + w_q[k];
  set_row1(1, w, lam * b_t + b_q);
  for (int k = 0; k < 4; ++k) w[k] = lam * w_t[k];
  set_row1(2, w, lam * b_t);
  for (int k = 0; k < 4; ++k) w[k] = -lam * w_t[k];
  set_row1(3, w, -lam * b_t);
  set_row1(4, w_p2, b_p2 + shift);

  // v1 = relu(min(q, lam*t)), v2 = relu(min(-q, lam*t)), v3 = p2 + shift.
  const int h1 = net.h1;
  net.w2[0 * h1 + 2] = 1.0;
  net.w2[0 * h1 + 3] = -1.0;
  net.w2[0 * h1 + 0] = -1.0;
  net.w2[1 * h1 + 2] = 1.0;
  net.w2[1 * h1 + 3] = -1.0;
  net.w2[1 * h1 + 1] = -1.0;
  net.w2[2 * h1 + 4] = 1.0;

  net.w3 = {1.0, -1.0, 1.0, 0.0};
  net.b3 = {-shift};
  net.provenance.push_back("synthesized from guarded two-action parameters");
  return net;
}

}  // namespace gtr
