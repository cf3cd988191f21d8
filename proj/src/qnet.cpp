#include "gtr/qnet.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "gtr/kern.hpp"
#include "gtr/rng.hpp"

namespace gtr {
namespace {

void write_double(std::ostream& out, double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  out << buf;
}

void write_array(std::ostream& out, const char* tag,
                 const std::vector<double>& a, int rows, int cols) {
  out << tag << ' ' << rows << ' ' << cols << "\n";
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      if (j) out << ' ';
      write_double(out, a[static_cast<std::size_t>(i) * cols + j]);
    }
    out << "\n";
  }
}

std::vector<double> read_array(std::istream& in, const char* tag, int rows,
                               int cols) {
  std::string key;
  int r, c;
  in >> key >> r >> c;
  if (key != tag || r != rows || c != cols) {
    throw std::runtime_error("model file: malformed array block " +
                             std::string(tag));
  }
  std::vector<double> a(static_cast<std::size_t>(rows) * cols);
  for (auto& x : a) in >> x;
  return a;
}

}  // namespace

QNetwork QNetwork::zeros(FeatureSchema schema, double norm_radius) {
  QNetwork net;
  net.schema = schema;
  net.omega = feature_width(schema);
  net.h1 = 50 * net.omega;
  net.h2 = net.omega;
  net.norm_radius = norm_radius;
  net.w1.assign(static_cast<std::size_t>(net.h1) * net.omega, 0.0);
  net.b1.assign(net.h1, 0.0);
  net.w2.assign(static_cast<std::size_t>(net.h2) * net.h1, 0.0);
  net.b2.assign(net.h2, 0.0);
  net.w3.assign(net.h2, 0.0);
  net.b3.assign(1, 0.0);
  return net;
}

QNetwork QNetwork::init(FeatureSchema schema, double norm_radius,
                        std::uint64_t seed) {
  QNetwork net = zeros(schema, norm_radius);
  net.init_seed = seed;
  Rng rng(seed);
  const auto fill = [&](std::vector<double>& w, int fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (auto& x : w) x = rng.uniform(-bound, bound);
  };
  fill(net.w1, net.omega);
  fill(net.w2, net.h1);
  fill(net.w3, net.h2);
  return net;
}

std::size_t QNetwork::parameter_count() const {
  return w1.size() + b1.size() + w2.size() + b2.size() + w3.size() + b3.size();
}

void QNetwork::forward_batch(std::span<const double> X, std::size_t batch,
                             double* out) const {
  thread_local std::vector<double> a1, a2;
  a1.resize(batch * h1);
  a2.resize(batch * h2);
  kern::gemm_nt(batch, h1, omega, X.data(), w1.data(), a1.data(), false);
  kern::add_row_vector(batch, h1, a1.data(), b1.data());
  kern::relu_inplace(a1.data(), a1.size());
  kern::gemm_nt(batch, h2, h1, a1.data(), w2.data(), a2.data(), false);
  kern::add_row_vector(batch, h2, a2.data(), b2.data());
  kern::relu_inplace(a2.data(), a2.size());
  for (std::size_t i = 0; i < batch; ++i) {
    out[i] = kern::dot(h2, a2.data() + i * h2, w3.data()) + b3[0];
  }
}

double QNetwork::forward(const FeatureVec& f) const {
  if (f.width != omega) {
    throw std::invalid_argument("feature width does not match network schema");
  }
  double out;
  forward_batch(std::span<const double>(f.x.data(), omega), 1, &out);
  return out;
}

Trainer::Trainer(QNetwork& net, double lr) : net_(&net), lr_(lr) {
  m_.assign(net.parameter_count(), 0.0);
  v_.assign(net.parameter_count(), 0.0);
}

void Trainer::reset() {
  std::fill(m_.begin(), m_.end(), 0.0);
  std::fill(v_.begin(), v_.end(), 0.0);
  t_ = 0;
}

double Trainer::step(std::span<const double> X, std::span<const double> y) {
  QNetwork& net = *net_;
  const std::size_t B = y.size();
  const int omega = net.omega, h1 = net.h1, h2 = net.h2;

  a1_.resize(B * h1);
  a2_.resize(B * h2);
  pred_.resize(B);
  dpred_.resize(B);
  d1_.resize(B * h1);
  d2_.resize(B * h2);

  kern::gemm_nt(B, h1, omega, X.data(), net.w1.data(), a1_.data(), false);
  kern::add_row_vector(B, h1, a1_.data(), net.b1.data());
  kern::relu_inplace(a1_.data(), a1_.size());
  kern::gemm_nt(B, h2, h1, a1_.data(), net.w2.data(), a2_.data(), false);
  kern::add_row_vector(B, h2, a2_.data(), net.b2.data());
  kern::relu_inplace(a2_.data(), a2_.size());
  for (std::size_t i = 0; i < B; ++i) {
    pred_[i] = kern::dot(h2, a2_.data() + i * h2, net.w3.data()) + net.b3[0];
  }

  double loss = 0.0;
  const double inv_b = 1.0 / static_cast<double>(B);
  for (std::size_t i = 0; i < B; ++i) {
    const double r = pred_[i] - y[i];
    loss += r * r;
    dpred_[i] = 2.0 * r * inv_b;
  }
  loss *= inv_b;

  gw3_.assign(h2, 0.0);
  gb3_.assign(1, 0.0);
  kern::gemm_tn(1, h2, B, dpred_.data(), a2_.data(), gw3_.data(), false);
  for (std::size_t i = 0; i < B; ++i) gb3_[0] += dpred_[i];

  // d2 = dpred (B x 1) * w3 (1 x h2), masked by the second hidden layer.
  kern::gemm_nn(B, h2, 1, dpred_.data(), net.w3.data(), d2_.data(), false);
  kern::relu_backward(B * h2, a2_.data(), d2_.data());

  gw2_.assign(net.w2.size(), 0.0);
  gb2_.assign(h2, 0.0);
  kern::gemm_tn(h2, h1, B, d2_.data(), a1_.data(), gw2_.data(), false);
  kern::col_sums(B, h2, d2_.data(), gb2_.data());

  kern::gemm_nn(B, h1, h2, d2_.data(), net.w2.data(), d1_.data(), false);
  kern::relu_backward(B * h1, a1_.data(), d1_.data());

  gw1_.assign(net.w1.size(), 0.0);
  gb1_.assign(h1, 0.0);
  kern::gemm_tn(h1, omega, B, d1_.data(), X.data(), gw1_.data(), false);
  kern::col_sums(B, h1, d1_.data(), gb1_.data());

  ++t_;
  const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  const double b1t = std::pow(beta1, t_), b2t = std::pow(beta2, t_);
  std::size_t off = 0;
  const auto update = [&](std::vector<double>& p, const std::vector<double>& g) {
    kern::adam_step(p.size(), p.data(), g.data(), m_.data() + off,
                    v_.data() + off, beta1, beta2, eps, lr_, b1t, b2t);
    off += p.size();
  };
  update(net.w1, gw1_);
  update(net.b1, gb1_);
  update(net.w2, gw2_);
  update(net.b2, gb2_);
  update(net.w3, gw3_);
  update(net.b3, gb3_);
  return loss;
}

TrainResult train_supervised(QNetwork& net, const SampleSet& samples,
                             const TrainConfig& cfg) {
  if (samples.X.empty()) throw std::invalid_argument("empty sample set");
  if (samples.schema != net.schema) {
    throw std::invalid_argument("sample schema does not match network schema");
  }
  const std::size_t B = samples.X.size();
  std::vector<double> X(B * net.omega);
  for (std::size_t i = 0; i < B; ++i) {
    for (int k = 0; k < net.omega; ++k) X[i * net.omega + k] = samples.X[i].x[k];
  }
  // A fresh network starts its output bias at the target mean; predictions
  // then begin centered instead of being dragged across the whole target
  // range, which can kill every rectifier unit on the way.
  if (net.b3[0] == 0.0) {
    double mean = 0.0;
    for (double y : samples.Y) mean += y;
    net.b3[0] = mean / static_cast<double>(samples.Y.size());
  }
  Trainer trainer(net, cfg.lr);
  TrainResult result;
  result.loss_trace.reserve(cfg.iterations);
  for (int it = 0; it < cfg.iterations; ++it) {
    const double loss = trainer.step(X, samples.Y);
    if (!std::isfinite(loss)) {
      throw TrainingDivergenceError("training diverged at step " +
                                    std::to_string(it));
    }
    result.loss_trace.push_back(loss);
  }
  return result;
}

double gradient_check(const QNetwork& net, const FeatureVec& x, double y) {
  // Analytic gradient of (forward(x) - y)^2 for a single sample.
  QNetwork work = net;
  const int omega = net.omega, h1 = net.h1, h2 = net.h2;
  std::vector<double> a1(h1), a2(h2);
  std::vector<double> X(x.x.begin(), x.x.begin() + omega);

  kern::gemm_nt(1, h1, omega, X.data(), net.w1.data(), a1.data(), false);
  kern::add_row_vector(1, h1, a1.data(), net.b1.data());
  kern::relu_inplace(a1.data(), h1);
  kern::gemm_nt(1, h2, h1, a1.data(), net.w2.data(), a2.data(), false);
  kern::add_row_vector(1, h2, a2.data(), net.b2.data());
  kern::relu_inplace(a2.data(), h2);
  const double pred = kern::dot(h2, a2.data(), net.w3.data()) + net.b3[0];
  const double dpred = 2.0 * (pred - y);

  std::vector<double> gw3(h2), gb3(1, dpred), d2(h2), gw2(net.w2.size()),
      gb2(h2), d1(h1), gw1(net.w1.size()), gb1(h1);
  for (int j = 0; j < h2; ++j) gw3[j] = dpred * a2[j];
  for (int j = 0; j < h2; ++j) d2[j] = dpred * net.w3[j];
  kern::relu_backward(h2, a2.data(), d2.data());
  for (int i = 0; i < h2; ++i) {
    for (int j = 0; j < h1; ++j) gw2[static_cast<std::size_t>(i) * h1 + j] = d2[i] * a1[j];
  }
  gb2 = d2;
  kern::gemm_nn(1, h1, h2, d2.data(), net.w2.data(), d1.data(), false);
  kern::relu_backward(h1, a1.data(), d1.data());
  for (int i = 0; i < h1; ++i) {
    for (int j = 0; j < omega; ++j) gw1[static_cast<std::size_t>(i) * omega + j] = d1[i] * X[j];
  }
  gb1 = d1;

  std::vector<const std::vector<double>*> analytic = {&gw1, &gb1, &gw2,
                                                      &gb2, &gw3, &gb3};
  std::vector<std::vector<double>*> params = {&work.w1, &work.b1, &work.w2,
                                              &work.b2, &work.w3, &work.b3};
  const double h = 1e-5;
  double max_rel = 0.0;
  for (std::size_t grp = 0; grp < params.size(); ++grp) {
    auto& p = *params[grp];
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double keep = p[i];
      p[i] = keep + h;
      const double fp = work.forward(x) - y;
      p[i] = keep - h;
      const double fm = work.forward(x) - y;
      p[i] = keep;
      const double numeric = (fp * fp - fm * fm) / (2.0 * h);
      const double ga = (*analytic[grp])[i];
      const double rel = std::fabs(ga - numeric) /
                         std::max({1.0, std::fabs(ga), std::fabs(numeric)});
      max_rel = std::max(max_rel, rel);
    }
  }
  return max_rel;
}

void QNetwork::save(std::ostream& out) const {
  out << "gtr-model v1\n";
  out << "schema " << schema_name(schema) << "\n";
  out << "omega " << omega << "\n";
  out << "hidden " << h1 << ' ' << h2 << "\n";
  out << "activation relu\n";
  out << "R ";
  write_double(out, norm_radius);
  out << "\n";
  out << "init_seed " << init_seed << "\n";
  out << "provenance " << provenance.size() << "\n";
  for (const auto& line : provenance) out << line << "\n";
  write_array(out, "W1", w1, h1, omega);
  write_array(out, "b1", b1, 1, h1);
  write_array(out, "W2", w2, h2, h1);
  write_array(out, "b2", b2, 1, h2);
  write_array(out, "W3", w3, 1, h2);
  write_array(out, "b3", b3, 1, 1);
}

void QNetwork::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  save(out);
}

QNetwork QNetwork::load(std::istream& in) {
  std::string magic, version;
  in >> magic >> version;
  if (magic != "gtr-model" || version != "v1") {
    throw std::runtime_error("not a gtr-model v1 file");
  }
  std::string key, schema, activation;
  QNetwork net;
  in >> key >> schema;
  net.schema = schema_from_name(schema);
  in >> key >> net.omega;
  in >> key >> net.h1 >> net.h2;
  in >> key >> activation;
  if (activation != "relu") throw std::runtime_error("unsupported activation");
  in >> key >> net.norm_radius;
  in >> key >> net.init_seed;
  std::size_t prov_lines = 0;
  in >> key >> prov_lines;
  std::string line;
  std::getline(in, line);  // consume end of the count line
  for (std::size_t i = 0; i < prov_lines; ++i) {
    std::getline(in, line);
    net.provenance.push_back(line);
  }
  net.w1 = read_array(in, "W1", net.h1, net.omega);
  net.b1 = read_array(in, "b1", 1, net.h1);
  net.w2 = read_array(in, "W2", net.h2, net.h1);
  net.b2 = read_array(in, "b2", 1, net.h2);
  net.w3 = read_array(in, "W3", 1, net.h2);
  net.b3 = read_array(in, "b3", 1, 1);
  if (!in) throw std::runtime_error("truncated model file");
  return net;
}

QNetwork QNetwork::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  return load(in);
}

}  // namespace gtr
