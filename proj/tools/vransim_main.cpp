// vransim - trace-driven vRAN reconfiguration simulator and learner CLI.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vransim/agent.hpp"
#include "vransim/baselines.hpp"
#include "vransim/config.hpp"
#include "vransim/experiment.hpp"
#include "vransim/io_util.hpp"
#include "vransim/kernels.hpp"
#include "vransim/rng.hpp"
#include "vransim/topology.hpp"
#include "vransim/traffic.hpp"

namespace fs = std::filesystem;
using namespace vransim;

namespace {

std::vector<std::pair<std::string, std::string>> parse_overrides(
    const std::vector<std::string>& raw) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const std::string& s : raw) {
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("--set expects key=value, got '" + s + "'");
    out.push_back({strip(s.substr(0, eq)), strip(s.substr(eq + 1))});
  }
  return out;
}

int cmd_generate_topology(const WaxmanParams& params, const std::string& out_path) {
  const Topology topo = generate_waxman(params);
  topo.save_file(out_path);
  std::cout << "wrote " << out_path << " (" << topo.nodes().size() << " nodes, "
            << topo.links().size() << " links)\n";
  return 0;
}

int cmd_export_trace(int days, int n_bs, double peak, std::uint64_t seed, bool noise,
                     const std::string& out_path) {
  const TrafficTrace trace = generate_diurnal(days, n_bs, peak, seed, noise);
  trace.save_csv(out_path);
  std::cout << "wrote " << out_path << " (" << trace.n_slots() << " slots x " << trace.n_bs()
            << " BSs)\n";
  return 0;
}

int cmd_train(const std::string& config_path,
              const std::vector<std::pair<std::string, std::string>>& overrides,
              std::optional<std::uint64_t> seed, std::optional<int> episodes,
              const std::string& out_checkpoint, const std::string& metrics_csv,
              const std::optional<std::string>& init_from) {
  ExperimentConfig cfg = ExperimentConfig::load_file(config_path, overrides);
  if (seed) cfg.agent_seed = *seed;
  if (episodes) cfg.train_episodes = *episodes;
  cfg.validate();
  cfg.apply_kernel_backend();

  const Topology topo = cfg.build_topology();
  const TrafficTrace trace = cfg.build_trace();
  Environment env(topo, cfg.build_catalog(), cfg.build_flavors(), cfg.util, cfg.cost, trace, 0,
                  cfg.train_slots);
  LarvAgent agent(env.encoded_dim(), env.action_space_spec(), cfg.agent,
                  seed_stream(cfg.agent_seed, 0x4c415256u));
  const TrainingResult result =
      run_training(env, agent, cfg.train_episodes, cfg.agent_seed,
                   init_from ? std::optional<std::string>(*init_from) : std::nullopt);
  write_training_csv(metrics_csv, result.episodes);
  agent.save(out_checkpoint);
  std::cout << "trained " << cfg.train_episodes << " episodes; checkpoint " << out_checkpoint
            << ", metrics " << metrics_csv << "\n";
  return 0;
}

int cmd_evaluate(const std::string& config_path,
                 const std::vector<std::pair<std::string, std::string>>& overrides,
                 const std::optional<std::string>& checkpoint, const std::string& out_dir) {
  const ExperimentConfig cfg = ExperimentConfig::load_file(config_path, overrides);
  ExperimentOptions opts;
  if (checkpoint) opts.load_checkpoint = *checkpoint;
  const ExperimentSummary s = run_experiment(cfg, out_dir, opts);
  std::cout << "larv_eval_cost " << fmt_g17(s.larv_eval_cost) << "\n"
            << "bsp_eval_cost " << fmt_g17(s.bsp_eval_cost) << "\n"
            << "larv_over_bsp " << fmt_g17(s.larv_over_bsp) << "\n"
            << "artifacts in " << out_dir << "\n";
  return 0;
}

int cmd_baseline(const std::string& kind, const std::string& config_path,
                 const std::vector<std::pair<std::string, std::string>>& overrides,
                 const std::optional<std::string>& trace_file, const std::string& metrics_csv) {
  ExperimentConfig cfg = ExperimentConfig::load_file(config_path, overrides);
  if (trace_file) {
    cfg.traffic_source = "file";
    cfg.traffic_file = *trace_file;
  }
  cfg.validate();
  cfg.apply_kernel_backend();

  const Topology topo = cfg.build_topology();
  const TrafficTrace trace = cfg.build_trace();
  const SplitCatalog catalog = cfg.build_catalog();
  const FlavorSet flavors = cfg.build_flavors();
  const int eval_offset = std::min(cfg.resolved_eval_offset(), trace.n_slots() - cfg.eval_horizon);
  if (eval_offset < 0)
    throw std::runtime_error("baseline: trace too short for eval.horizon_slots");
  Environment eval_env(topo, catalog, flavors, cfg.util, cfg.cost, trace, eval_offset,
                       cfg.eval_horizon);

  if (kind == "bsp") {
    const BspResult bsp = bsp_search(eval_env);
    const EvalResult r =
        evaluate_policy(eval_env, static_policy(bsp.action), cfg.eval_horizon, cfg.eval_seed);
    write_eval_csv(metrics_csv, r);
    std::cout << "bsp_static_cost " << fmt_g17(bsp.static_cost) << "\n"
              << "bsp_eval_cost " << fmt_g17(r.totals.total_j) << "\n"
              << "bsp_used_exact " << (bsp.used_exact ? 1 : 0) << "\n";
  } else if (kind == "random") {
    const EvalResult r = evaluate_policy(eval_env, random_policy(eval_env, cfg.eval_seed),
                                         cfg.eval_horizon, cfg.eval_seed);
    write_eval_csv(metrics_csv, r);
    std::cout << "random_eval_cost " << fmt_g17(r.totals.total_j) << "\n";
  } else if (kind == "mdq") {
    Environment train_env(topo, catalog, flavors, cfg.util, cfg.cost, trace, 0, cfg.train_slots);
    MdqAgent agent(train_env.encoded_dim(), train_env.action_space_spec(), cfg.agent,
                   seed_stream(cfg.agent_seed, 0x4d4451u));
    const TrainingResult result =
        run_mdq_training(train_env, agent, cfg.train_episodes, cfg.agent_seed);
    write_training_csv(metrics_csv, result.episodes);
    const EvalResult r = evaluate_policy(eval_env, greedy_mdq_policy(agent, eval_env),
                                         cfg.eval_horizon, cfg.eval_seed);
    std::cout << "mdq_eval_cost " << fmt_g17(r.totals.total_j) << "\n";
  } else {
    throw std::runtime_error("baseline: unknown kind '" + kind + "'");
  }
  std::cout << "metrics " << metrics_csv << "\n";
  return 0;
}

int cmd_sweep(const std::string& config_path,
              const std::vector<std::pair<std::string, std::string>>& overrides,
              const std::string& param, const std::vector<std::string>& values,
              const std::string& out_dir) {
  for (const std::string& v : values) {
    auto point_overrides = overrides;
    point_overrides.push_back({param, v});
    const ExperimentConfig cfg = ExperimentConfig::load_file(config_path, point_overrides);
    std::string label = param + "=" + v;
    for (char& c : label)
      if (c == '.' || c == '/') c = '_';
    const std::string dir = (fs::path(out_dir) / label).string();
    const ExperimentSummary s = run_experiment(cfg, dir);
    std::cout << label << ": larv_eval_cost " << fmt_g17(s.larv_eval_cost) << ", larv_over_bsp "
              << fmt_g17(s.larv_over_bsp) << ", reconfig_events " << s.larv_reconfig_events
              << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vRAN reconfiguration simulator and branching-D3QN learner"};
  app.require_subcommand(1);

  std::vector<std::string> set_args;
  app.add_option("--set", set_args, "Override a config key (key=value); repeatable")
      ->take_all();

  // generate-topology
  auto* gen = app.add_subcommand("generate-topology", "Generate a Waxman transport graph");
  WaxmanParams wax;
  std::string topo_out;
  gen->add_option("--nodes", wax.n_nodes, "Total node count");
  gen->add_option("--alpha", wax.alpha, "Waxman link probability");
  gen->add_option("--beta", wax.beta, "Waxman edge length control");
  gen->add_option("--es", wax.n_es, "Edge server count");
  gen->add_option("--fs", wax.n_fs, "Far-edge server count");
  gen->add_option("--ru", wax.n_ru, "Radio unit count");
  gen->add_option("--seed", wax.seed, "Generator seed");
  gen->add_option("--area-km", wax.area_km, "Square area side (km)");
  gen->add_option("--fs-capacity", wax.fs_capacity_rc, "FS compute capacity (RC)");
  gen->add_option("--es-capacity", wax.es_capacity_rc, "ES compute capacity (RC)");
  gen->add_option("--out", topo_out, "Output topology file")->required();

  // export-trace
  auto* exp = app.add_subcommand("export-trace", "Generate a diurnal traffic trace CSV");
  int tr_days = 3, tr_bs = 8;
  double tr_peak = 4.0;
  std::uint64_t tr_seed = 2;
  bool tr_no_noise = false;
  std::string trace_out;
  exp->add_option("--days", tr_days, "Days of traffic");
  exp->add_option("--bs", tr_bs, "Number of BSs");
  exp->add_option("--peak", tr_peak, "Peak demand (Gbps)");
  exp->add_option("--seed", tr_seed, "Generator seed");
  exp->add_flag("--no-noise", tr_no_noise, "Disable multiplicative noise");
  exp->add_option("--out", trace_out, "Output CSV")->required();

  // train
  auto* tr = app.add_subcommand("train", "Train the branching-D3QN agent");
  std::string train_config, out_checkpoint, train_metrics;
  std::uint64_t train_seed = 0;
  int train_episodes = 0;
  std::string init_from;
  tr->add_option("--config", train_config, "Experiment config file")->required();
  tr->add_option("--seed", train_seed, "Agent seed override");
  tr->add_option("--episodes", train_episodes, "Episode count override");
  tr->add_option("--out-checkpoint", out_checkpoint, "Checkpoint output path")->required();
  tr->add_option("--metrics-csv", train_metrics, "Per-episode metrics CSV")->required();
  tr->add_option("--init-from", init_from, "Warm-start checkpoint (transfer learning)");

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "Run the full evaluation pipeline");
  std::string eval_config, eval_out_dir, eval_checkpoint;
  ev->add_option("--config", eval_config, "Experiment config file")->required();
  ev->add_option("--checkpoint", eval_checkpoint, "Evaluate this checkpoint instead of training");
  ev->add_option("--out-dir", eval_out_dir, "Artifacts directory")->required();

  // baseline
  auto* bl = app.add_subcommand("baseline", "Run a baseline policy");
  std::string bl_kind, bl_config, bl_trace, bl_metrics;
  bl->add_option("--kind", bl_kind, "bsp | random | mdq")->required();
  bl->add_option("--config", bl_config, "Experiment config file")->required();
  bl->add_option("--trace", bl_trace, "Traffic trace CSV override");
  bl->add_option("--metrics-csv", bl_metrics, "Output CSV")->required();

  // sweep
  auto* sw = app.add_subcommand("sweep", "Run experiments over a parameter sweep");
  std::string sw_config, sw_param, sw_out;
  std::vector<std::string> sw_values;
  sw->add_option("--config", sw_config, "Experiment config file")->required();
  sw->add_option("--param", sw_param, "Config key to sweep")->required();
  sw->add_option("--values", sw_values, "Comma-separated values")->required()->delimiter(',');
  sw->add_option("--out-dir", sw_out, "Artifacts root directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const auto overrides = parse_overrides(set_args);
    if (gen->parsed()) return cmd_generate_topology(wax, topo_out);
    if (exp->parsed()) return cmd_export_trace(tr_days, tr_bs, tr_peak, tr_seed, !tr_no_noise, trace_out);
    if (tr->parsed())
      return cmd_train(train_config, overrides,
                       tr->count("--seed") ? std::optional<std::uint64_t>(train_seed) : std::nullopt,
                       tr->count("--episodes") ? std::optional<int>(train_episodes) : std::nullopt,
                       out_checkpoint, train_metrics,
                       init_from.empty() ? std::nullopt : std::optional<std::string>(init_from));
    if (ev->parsed())
      return cmd_evaluate(eval_config, overrides,
                          eval_checkpoint.empty() ? std::nullopt
                                                  : std::optional<std::string>(eval_checkpoint),
                          eval_out_dir);
    if (bl->parsed())
      return cmd_baseline(bl_kind, bl_config, overrides,
                          bl_trace.empty() ? std::nullopt : std::optional<std::string>(bl_trace),
                          bl_metrics);
    if (sw->parsed()) return cmd_sweep(sw_config, overrides, sw_param, sw_values, sw_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
