#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "gtr/space_graph.hpp"

namespace gtr {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Experiment parameters, keyed by the simulation-table symbol names. Every
// field's default is the reference value; overrides are recorded into report
// headers by the CLI.
struct ExperimentConfig {
  std::uint64_t master_seed = 1;
  Space space = Space::Euclidean;
  int n_train = 50;                                // N_train
  double rho_train = 5.0;                          // rho_train
  std::vector<int> n_test = {27, 64, 125, 216};    // N_test
  std::vector<double> rho_test = {2, 3, 4, 5};     // rho_test
  std::vector<double> delta_test = {1, 2, 3, 4};   // delta_test
  double alpha = 0.6;                              // hyperbolic curvature
  double radius = 1000.0;                          // R
  double epsilon = 0.05;
  int phi = 3;
  double gamma = 1.0;
  int iter_supervised = 5000;  // IterNum_S
  int iter_rl = 1000;          // IterNum_RL
  int episodes = 20;           // EpiNum
  int graphs_per_cell = 20;    // desk-scale default; reference runs use 80
  double penalty_c = 1.0;      // C
  double lr = 1e-3;
  int seed_candidates = 20;
  int pair_candidates = 32;
  std::string outdir = "out";

  void set(const std::string& key, const std::string& value);
  std::string serialize() const;
};

ExperimentConfig load_config_file(const std::string& path);

// Writes through a temp file and renames, so partial writes never land.
void write_text_atomic(const std::string& path, const std::string& content);

std::string read_text(const std::string& path);

}  // namespace gtr
