#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gtr/ranking.hpp"

namespace gtr {

struct TrainingDivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Feedforward scorer omega -> 50*omega -> omega -> 1, rectified-linear hidden
// layers, linear output. Weights are row-major (rows = layer output width).
// Inputs are radius-normalized features; outputs are action values in the
// same normalized unit. Immutable once trained; forward passes are safe to
// issue concurrently.
struct QNetwork {
  FeatureSchema schema = FeatureSchema::DistAndStretch;
  int omega = 4;
  int h1 = 200;
  int h2 = 4;
  double norm_radius = 1.0;
  std::uint64_t init_seed = 0;
  std::vector<double> w1, b1, w2, b2, w3, b3;
  std::vector<std::string> provenance;

  // Fan-in scaled uniform init U(-1/sqrt(fan_in), 1/sqrt(fan_in)), biases 0.
  static QNetwork init(FeatureSchema schema, double norm_radius,
                       std::uint64_t seed);
  static QNetwork zeros(FeatureSchema schema, double norm_radius);

  double forward(const FeatureVec& f) const;
  // X is batch x omega row-major.
  void forward_batch(std::span<const double> X, std::size_t batch,
                     double* out) const;

  std::size_t parameter_count() const;

  void save(std::ostream& out) const;
  void save_file(const std::string& path) const;
  static QNetwork load(std::istream& in);
  static QNetwork load_file(const std::string& path);
};

struct TrainConfig {
  int iterations = 5000;  // IterNum_S
  double lr = 1e-3;
};

struct TrainResult {
  std::vector<double> loss_trace;  // MSE before each update
};

// Full-batch Adam on the mean squared error against the sample targets.
// Deterministic for a fixed (net state, samples, config). Throws
// TrainingDivergenceError naming the step on non-finite loss.
TrainResult train_supervised(QNetwork& net, const SampleSet& samples,
                             const TrainConfig& cfg);

// Reusable full-batch fitter; the RL loop resets it per episode.
class Trainer {
 public:
  Trainer(QNetwork& net, double lr);
  void reset();
  void set_lr(double lr) { lr_ = lr; }
  // One Adam update over the batch; returns the MSE before the update.
  double step(std::span<const double> X, std::span<const double> y);
  QNetwork& net() { return *net_; }

 private:
  QNetwork* net_;
  double lr_;
  int t_ = 0;
  std::vector<double> m_, v_;  // flat across all parameter groups
  std::vector<double> a1_, a2_, pred_, d1_, d2_, dpred_;
  std::vector<double> gw1_, gb1_, gw2_, gb2_, gw3_, gb3_;
};

// Max relative discrepancy between the analytic gradient of (forward(x)-y)^2
// and central finite differences with h = 1e-5, over all parameters.
double gradient_check(const QNetwork& net, const FeatureVec& x, double y);

}  // namespace gtr
