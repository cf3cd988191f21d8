// Command-line harness: graph generation, ranking-similarity analysis,
// training (supervised and RL), zero-shot evaluation, and symbolic policy
// export. All outputs are deterministic functions of the config; anything
// time-dependent belongs in a sidecar log, so reruns are byte-identical.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

#include "gtr/config.hpp"
#include "gtr/eval.hpp"
#include "gtr/interpret.hpp"
#include "gtr/pipeline.hpp"
#include "gtr/rng.hpp"

namespace fs = std::filesystem;
using namespace gtr;

namespace {

struct CellSpec {
  int n;
  double density;
};

std::vector<CellSpec> parse_cells(const std::string& arg,
                                  const ExperimentConfig& cfg) {
  std::vector<CellSpec> cells;
  if (arg == "all") {
    const auto& densities =
        cfg.space == Space::Euclidean ? cfg.rho_test : cfg.delta_test;
    for (int n : cfg.n_test) {
      for (double d : densities) cells.push_back({n, d});
    }
    return cells;
  }
  std::stringstream ss(arg);
  std::string part;
  while (std::getline(ss, part, ',')) {
    const auto x = part.find('x');
    if (x == std::string::npos) {
      throw ConfigError("cell must look like <n>x<density>: " + part);
    }
    cells.push_back({std::stoi(part.substr(0, x)),
                     std::stod(part.substr(x + 1))});
  }
  return cells;
}

std::string cell_graph_name(const ExperimentConfig& cfg, const CellSpec& cell,
                            int index) {
  std::ostringstream name;
  name << (cfg.space == Space::Euclidean ? "euclidean" : "hyperbolic") << "_n"
       << cell.n << (cfg.space == Space::Euclidean ? "_rho" : "_delta")
       << cell.density << "_" << index << ".graph";
  return name.str();
}

void write_config_header(const ExperimentConfig& cfg) {
  write_text_atomic(cfg.outdir + "/config_used.txt", cfg.serialize());
}

int cmd_gen_graph(const ExperimentConfig& cfg, const std::string& cells_arg) {
  write_config_header(cfg);
  const fs::path dir = fs::path(cfg.outdir) / "graphs";
  fs::create_directories(dir);
  if (cells_arg.empty()) {
    // The training seed graph: similarity-ranked over the candidate pool.
    const auto candidates = seed_graph_candidates(cfg);
    SimGraphOptions opt;
    opt.epsilon = cfg.epsilon;
    opt.penalty_c = cfg.penalty_c;
    const auto ranked =
        select_seed_graph(candidates, RankingMetric::m2(), opt);
    std::ostringstream buf;
    ranked.front().graph.save(buf);
    write_text_atomic((dir / "seed_graph.graph").string(), buf.str());
    std::cout << "seed graph: seed=" << ranked.front().candidate.seed
              << " sim_g=" << ranked.front().sim_g << " -> "
              << (dir / "seed_graph.graph").string() << "\n";
    return 0;
  }
  const auto cells = parse_cells(cells_arg, cfg);
  for (const auto& cell : cells) {
    for (int i = 0; i < cfg.graphs_per_cell; ++i) {
      const auto g = make_cell_graph(cfg, cfg.space, cell.n, cell.density, i);
      std::ostringstream buf;
      g.save(buf);
      write_text_atomic((dir / cell_graph_name(cfg, cell, i)).string(),
                        buf.str());
    }
    std::cout << "cell n=" << cell.n << " density=" << cell.density << ": "
              << cfg.graphs_per_cell << " graphs\n";
  }
  return 0;
}

int cmd_analyze_sim(const ExperimentConfig& cfg, const std::string& metric_arg) {
  if (cfg.seed_candidates <= 0) {
    throw ConfigError("seed_candidates must be positive for analyze-sim");
  }
  write_config_header(cfg);
  const fs::path dir = fs::path(cfg.outdir) / "sim";
  fs::create_directories(dir);
  std::vector<RankingMetric> metrics;
  if (metric_arg == "m1" || metric_arg == "both") metrics.push_back(RankingMetric::m1());
  if (metric_arg == "m2" || metric_arg == "both") metrics.push_back(RankingMetric::m2());
  if (metrics.empty()) throw ConfigError("unknown metric: " + metric_arg);

  std::ostringstream simg;
  simg << "metric,space,n,density,graph_seed,sim_g,points\n";
  const auto candidates = seed_graph_candidates(cfg);
  for (const auto& metric : metrics) {
    std::ostringstream points;
    points << "metric,graph_seed,sim_v\n";
    for (const auto& cand : candidates) {
      const auto g = SpaceGraph::generate_euclidean(cand.n, cand.density,
                                                    cand.radius, cand.seed);
      SimGraphOptions opt;
      opt.epsilon = cfg.epsilon;
      opt.penalty_c = cfg.penalty_c;
      opt.sample_seed = cand.seed;
      const auto res = sim_graph(g, metric, opt, true);
      simg << metric.name() << ",euclidean," << cand.n << "," << cand.density
           << "," << cand.seed << "," << res.sim_g << "," << res.points
           << "\n";
      auto sorted = res.point_values;
      std::sort(sorted.begin(), sorted.end());
      for (double v : sorted) {
        points << metric.name() << ',' << cand.seed << ',' << v << "\n";
      }
      std::cout << metric.name() << " seed=" << cand.seed
                << " sim_g=" << res.sim_g << "\n";
    }
    write_text_atomic(
        (dir / (std::string("points_") + metric.name() + ".csv")).string(),
        points.str());
  }
  write_text_atomic((dir / "simg.csv").string(), simg.str());
  return 0;
}

std::string model_basename(const std::string& mode, FeatureSchema schema,
                           int phi_override) {
  std::string name = schema == FeatureSchema::DistOnly
                         ? "dist-only-" + mode
                         : "greedy-tensile-" + mode;
  if (phi_override == 0) name += "-phiall";
  return name;
}

int cmd_train(const ExperimentConfig& cfg, const std::string& mode,
              const std::string& features, int phi_override) {
  write_config_header(cfg);
  const FeatureSchema schema = schema_from_name(features);
  const fs::path dir = fs::path(cfg.outdir) / "models";
  fs::create_directories(dir);
  const std::string base = model_basename(mode == "rl" ? "rl" : "s", schema,
                                          phi_override);

  TrainedModel model;
  if (mode == "rl") {
    model = train_rl_pipeline(cfg, schema);
    std::ostringstream eps;
    write_episode_csv(eps, model.episodes);
    write_text_atomic((dir / (base + "_episodes.csv")).string(), eps.str());
  } else if (mode == "supervised") {
    model = train_supervised_pipeline(cfg, schema, phi_override);
    std::ostringstream log;
    log << "iteration,mse\n";
    for (std::size_t i = 0; i < model.loss_trace.size(); ++i) {
      if (i % 10 == 0 || i + 1 == model.loss_trace.size()) {
        log << i << ',' << model.loss_trace[i] << "\n";
      }
    }
    write_text_atomic((dir / (base + "_train_log.csv")).string(), log.str());
  } else {
    throw ConfigError("unknown training mode: " + mode);
  }

  std::ostringstream buf;
  model.net.save(buf);
  write_text_atomic((dir / (base + ".model")).string(), buf.str());
  std::cout << "model: " << (dir / (base + ".model")).string()
            << " (seed graph " << model.seed_graph_seed
            << ", sim_g=" << model.seed_sim_g
            << ", samples=" << model.sample_count << ")\n";
  return 0;
}

struct PolicyBundle {
  std::vector<Policy> policies;
  std::vector<QNetwork> nets;  // storage behind neural policies
};

PolicyBundle parse_policies(const std::string& arg) {
  PolicyBundle bundle;
  std::vector<std::string> specs;
  std::stringstream ss(arg);
  std::string part;
  while (std::getline(ss, part, ',')) specs.push_back(part);
  bundle.nets.reserve(specs.size());
  for (const auto& spec : specs) {
    if (spec == "gf") {
      bundle.policies.push_back(Policy::greedy_forwarding());
    } else if (spec == "sr-ns") {
      bundle.policies.push_back(Policy::sr_node_stretch());
    } else if (spec == "two-linear") {
      bundle.policies.push_back(Policy::two_linear({}));
    } else if (spec == "oracle") {
      bundle.policies.push_back(Policy::oracle_shortest());
    } else if (spec.rfind("neural:", 0) == 0) {
      bundle.nets.push_back(QNetwork::load_file(spec.substr(7)));
      const auto stem = fs::path(spec.substr(7)).stem().string();
      bundle.policies.push_back(Policy::neural(&bundle.nets.back(), stem));
    } else {
      throw ConfigError("unknown policy spec: " + spec);
    }
  }
  return bundle;
}

int cmd_eval(const ExperimentConfig& cfg, const std::string& policies_arg,
             const std::string& cells_arg, const std::string& fallback_arg,
             std::size_t pair_cap, bool detail) {
  write_config_header(cfg);
  const auto bundle = parse_policies(policies_arg);
  const auto cells = parse_cells(cells_arg.empty() ? "all" : cells_arg, cfg);
  const Fallback fallback =
      fallback_arg == "dfs" ? Fallback::DfsInEllipse : Fallback::None;
  const fs::path dir = fs::path(cfg.outdir) / "eval";
  fs::create_directories(dir);

  std::ostringstream report;
  write_eval_csv_header(report);
  std::map<std::string, std::map<std::pair<int, double>, std::pair<double, int>>>
      table;
  for (const auto& cell : cells) {
    for (int i = 0; i < cfg.graphs_per_cell; ++i) {
      const auto g = make_cell_graph(cfg, cfg.space, cell.n, cell.density, i);
      for (const auto& policy : bundle.policies) {
        const auto filter = pair_cap
                                ? PairFilter::sampled(
                                      pair_cap, derive_seed(cfg.master_seed,
                                                            "eval-pairs", i))
                                : PairFilter::all();
        const auto rep =
            apnsp_accuracy(policy, g, cfg.epsilon, filter, fallback, detail);
        write_eval_csv_row(report, g, rep);
        auto& slot = table[policy.name()][{cell.n, cell.density}];
        slot.first += rep.accuracy;
        slot.second += 1;
        if (detail) {
          std::ostringstream pairs;
          write_pair_csv(pairs, rep);
          std::ostringstream name;
          name << "pairs_" << policy.name() << "_n" << cell.n << "_d"
               << cell.density << "_" << i << ".csv";
          write_text_atomic((dir / name.str()).string(), pairs.str());
        }
      }
      std::cout << "cell n=" << cell.n << " density=" << cell.density
                << " graph " << (i + 1) << "/" << cfg.graphs_per_cell << "\n";
    }
  }
  write_text_atomic((dir / "report.csv").string(), report.str());

  std::ostringstream acc;
  acc << "policy,n,density,mean_accuracy,graphs\n";
  for (const auto& [policy, cells_map] : table) {
    for (const auto& [cell, sum_count] : cells_map) {
      acc << policy << ',' << cell.first << ',' << cell.second << ','
          << sum_count.first / sum_count.second << ',' << sum_count.second
          << "\n";
    }
  }
  write_text_atomic((dir / "accuracy_table.csv").string(), acc.str());
  std::cout << "wrote " << (dir / "report.csv").string() << "\n";
  return 0;
}

int cmd_export_policy(const ExperimentConfig& cfg, const std::string& model_path) {
  write_config_header(cfg);
  const auto net = QNetwork::load_file(model_path);
  const auto fit = fit_two_plane(net, InterpretGrid{});
  const fs::path dir = fs::path(cfg.outdir) / "policy";
  fs::create_directories(dir);

  std::ostringstream txt;
  txt << "guard: d(u,D) < " << fit.params.g1 << "*d(v,D) + " << fit.params.g2
      << "*ns(O,D,u) + " << fit.params.g0 << "\n";
  txt << "action1: " << fit.params.a1 << "*d(v,D) + " << fit.params.a2
      << "*ns(O,D,u) + " << fit.params.a3 << "*d(u,D) + " << fit.params.a0
      << "\n";
  txt << "action2: " << fit.params.b1 << "*d(v,D) + " << fit.params.b2
      << "*d(u,D) + " << fit.params.b0 << "\n";
  txt << "max_residual: " << fit.max_residual << "\n";
  txt << "single_plane: " << (fit.single_plane ? 1 : 0) << "\n";
  txt << "boundary_points: " << fit.boundary_points << "\n";
  write_text_atomic((dir / "two_linear.txt").string(), txt.str());

  std::ostringstream surf;
  surface_export(surf, scorer_from_network(net), 4.0, 1.2, 1.0, 2.2, 25, 0.05,
                 5.0, 100);
  write_text_atomic((dir / "surface.csv").string(), surf.str());
  std::cout << txt.str();
  return 0;
}

int cmd_surface(const ExperimentConfig& cfg, const std::string& model_path,
                double dv, double nsv) {
  write_config_header(cfg);
  const auto net = QNetwork::load_file(model_path);
  const fs::path dir = fs::path(cfg.outdir) / "policy";
  fs::create_directories(dir);
  std::ostringstream surf;
  surface_export(surf, scorer_from_network(net), dv, nsv, 1.0, 2.2, 25, 0.05,
                 5.0, 100);
  write_text_atomic((dir / "surface.csv").string(), surf.str());
  std::cout << "wrote " << (dir / "surface.csv").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Greedy-Tensile routing testbed"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "key = value config file");
  std::map<std::string, std::string> overrides;
  // Flags mirror the config keys one-to-one.
  for (const char* key :
       {"master_seed", "space", "N_train", "rho_train", "N_test", "rho_test",
        "delta_test", "alpha", "R", "epsilon", "phi", "gamma", "IterNum_S",
        "IterNum_RL", "EpiNum", "graphs_per_cell", "C", "lr",
        "seed_candidates", "pair_candidates", "outdir"}) {
    app.add_option_function<std::string>(
        std::string("--") + key,
        [&overrides, key](const std::string& v) { overrides[key] = v; });
  }

  std::string cells_arg, metric_arg = "both", mode = "supervised",
              features = "dist_ns", phi_arg, policies_arg = "gf,sr-ns",
              fallback_arg = "none", model_path;
  std::size_t pair_cap = 0;
  bool detail = false;
  double dv_fixed = 4.0, nsv_fixed = 1.2;

  auto* gen = app.add_subcommand("gen-graph", "write seeded graph files");
  gen->add_option("--cells", cells_arg, "<n>x<density>[,...] or 'all'");

  auto* sim = app.add_subcommand("analyze-sim", "ranking similarity report");
  sim->add_option("--metric", metric_arg, "m1 | m2 | both");

  auto* train = app.add_subcommand("train", "train a scoring network");
  train->add_option("--mode", mode, "supervised | rl");
  train->add_option("--features", features, "dist | dist_ns");
  train->add_option("--phi", phi_arg, "node count or 'all'");

  auto* train_rl_cmd = app.add_subcommand("train-rl", "alias: train --mode rl");
  train_rl_cmd->add_option("--features", features, "dist | dist_ns");

  auto* eval = app.add_subcommand("eval", "zero-shot evaluation over cells");
  eval->add_option("--policies", policies_arg,
                   "gf | sr-ns | two-linear | oracle | neural:<model>");
  eval->add_option("--cells", cells_arg, "<n>x<density>[,...] or 'all'");
  eval->add_option("--fallback", fallback_arg, "none | dfs");
  eval->add_option("--pairs", pair_cap, "sample this many pairs per graph");
  eval->add_flag("--detail", detail, "write per-pair outcome files");

  auto* exp = app.add_subcommand("export-policy",
                                 "two-linear-action approximation of a model");
  exp->add_option("--model", model_path)->required();

  auto* surf = app.add_subcommand("surface", "score surface slice CSV");
  surf->add_option("--model", model_path)->required();
  surf->add_option("--dvD", dv_fixed, "fixed d(v,D) in radius units");
  surf->add_option("--nsv", nsv_fixed, "fixed ns(O,D,v)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    ExperimentConfig cfg;
    if (!config_path.empty()) cfg = load_config_file(config_path);
    for (const auto& [key, value] : overrides) cfg.set(key, value);

    if (gen->parsed()) return cmd_gen_graph(cfg, cells_arg);
    if (sim->parsed()) return cmd_analyze_sim(cfg, metric_arg);
    if (train->parsed() || train_rl_cmd->parsed()) {
      if (train_rl_cmd->parsed()) mode = "rl";
      int phi_override = -1;
      if (!phi_arg.empty()) {
        phi_override = phi_arg == "all" ? 0 : std::stoi(phi_arg);
      }
      return cmd_train(cfg, mode, features, phi_override);
    }
    if (eval->parsed()) {
      return cmd_eval(cfg, policies_arg, cells_arg, fallback_arg, pair_cap,
                      detail);
    }
    if (exp->parsed()) return cmd_export_policy(cfg, model_path);
    if (surf->parsed()) return cmd_surface(cfg, model_path, dv_fixed, nsv_fixed);
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
