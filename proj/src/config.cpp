#include "gtr/config.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace gtr {
namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) parts.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) parts.push_back(cur);
  return parts;
}

int to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const int x = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("bad integer for " + key + ": " + v);
  }
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("bad number for " + key + ": " + v);
  }
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

}  // namespace

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (key == "master_seed") {
    master_seed = static_cast<std::uint64_t>(std::stoull(value));
  } else if (key == "space") {
    if (value == "euclidean") {
      space = Space::Euclidean;
    } else if (value == "hyperbolic") {
      space = Space::Hyperbolic;
    } else {
      throw ConfigError("unknown space: " + value);
    }
  } else if (key == "N_train") {
    n_train = to_int(key, value);
  } else if (key == "rho_train") {
    rho_train = to_double(key, value);
  } else if (key == "N_test") {
    n_test.clear();
    for (const auto& p : split_list(value)) n_test.push_back(to_int(key, p));
  } else if (key == "rho_test") {
    rho_test.clear();
    for (const auto& p : split_list(value)) rho_test.push_back(to_double(key, p));
  } else if (key == "delta_test") {
    delta_test.clear();
    for (const auto& p : split_list(value)) delta_test.push_back(to_double(key, p));
  } else if (key == "alpha") {
    alpha = to_double(key, value);
  } else if (key == "R") {
    radius = to_double(key, value);
  } else if (key == "epsilon") {
    epsilon = to_double(key, value);
  } else if (key == "phi") {
    phi = to_int(key, value);
  } else if (key == "gamma") {
    gamma = to_double(key, value);
  } else if (key == "IterNum_S") {
    iter_supervised = to_int(key, value);
  } else if (key == "IterNum_RL") {
    iter_rl = to_int(key, value);
  } else if (key == "EpiNum") {
    episodes = to_int(key, value);
  } else if (key == "graphs_per_cell") {
    graphs_per_cell = to_int(key, value);
  } else if (key == "C") {
    penalty_c = to_double(key, value);
  } else if (key == "lr") {
    lr = to_double(key, value);
  } else if (key == "seed_candidates") {
    seed_candidates = to_int(key, value);
  } else if (key == "pair_candidates") {
    pair_candidates = to_int(key, value);
  } else if (key == "outdir") {
    outdir = value;
  } else {
    throw ConfigError("unknown config key: " + key);
  }
}

std::string ExperimentConfig::serialize() const {
  std::ostringstream out;
  out << "master_seed = " << master_seed << "\n";
  out << "space = " << (space == Space::Euclidean ? "euclidean" : "hyperbolic")
      << "\n";
  out << "N_train = " << n_train << "\n";
  out << "rho_train = " << rho_train << "\n";
  auto list = [&out](const char* key, const auto& values) {
    out << key << " = ";
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) out << ',';
      out << values[i];
    }
    out << "\n";
  };
  list("N_test", n_test);
  list("rho_test", rho_test);
  list("delta_test", delta_test);
  out << "alpha = " << alpha << "\n";
  out << "R = " << radius << "\n";
  out << "epsilon = " << epsilon << "\n";
  out << "phi = " << phi << "\n";
  out << "gamma = " << gamma << "\n";
  out << "IterNum_S = " << iter_supervised << "\n";
  out << "IterNum_RL = " << iter_rl << "\n";
  out << "EpiNum = " << episodes << "\n";
  out << "graphs_per_cell = " << graphs_per_cell << "\n";
  out << "C = " << penalty_c << "\n";
  out << "lr = " << lr << "\n";
  out << "seed_candidates = " << seed_candidates << "\n";
  out << "pair_candidates = " << pair_candidates << "\n";
  out << "outdir = " << outdir << "\n";
  return out.str();
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    }
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot open for write: " + tmp.string());
    out << content;
  }
  fs::rename(tmp, target);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace gtr
