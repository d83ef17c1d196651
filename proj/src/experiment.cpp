#include "vransim/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "vransim/io_util.hpp"
#include "vransim/kernels.hpp"

namespace vransim {

namespace fs = std::filesystem;

EvalResult evaluate_policy(Environment& env, const Policy& policy, int horizon,
                           std::uint64_t episode_seed) {
  if (horizon > env.horizon())
    throw std::runtime_error("evaluate_policy: horizon " + std::to_string(horizon) +
                             " exceeds the trace window of " + std::to_string(env.horizon()));
  EvalResult result;
  result.rows.reserve(horizon);
  State s = env.reset(episode_seed);
  Action prev;
  for (int n = 0; n < horizon; ++n) {
    const Action a = policy(s);
    const StepResult step = env.step(a);
    EvalSlotRow row;
    row.slot = n + 1;
    row.breakdown = step.breakdown;
    row.action = a;
    row.reconfigured = n > 0 && !(a == prev);
    if (row.reconfigured) ++result.reconfig_events;
    result.rows.push_back(row);

    result.totals.computing += step.breakdown.computing;
    result.totals.overprovisioning += step.breakdown.overprovisioning;
    result.totals.declined += step.breakdown.declined;
    result.totals.instantiation += step.breakdown.instantiation;
    result.totals.reconfiguration += step.breakdown.reconfiguration;
    result.totals.routing += step.breakdown.routing;
    result.totals.total_j += step.breakdown.total_j;
    result.totals.reward += step.breakdown.reward;

    prev = a;
    s = step.next_state;
    if (step.done) break;
  }
  return result;
}

void write_eval_csv(const std::string& path, const EvalResult& result) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("eval csv: cannot write " + path);
  out << "slot,computing,overprovisioning,declined,instantiation,reconfiguration,routing,"
         "total,reward,reconfigured\n";
  for (const EvalSlotRow& r : result.rows) {
    out << r.slot << ',' << fmt_g17(r.breakdown.computing) << ','
        << fmt_g17(r.breakdown.overprovisioning) << ',' << fmt_g17(r.breakdown.declined) << ','
        << fmt_g17(r.breakdown.instantiation) << ',' << fmt_g17(r.breakdown.reconfiguration)
        << ',' << fmt_g17(r.breakdown.routing) << ',' << fmt_g17(r.breakdown.total_j) << ','
        << fmt_g17(r.breakdown.reward) << ',' << (r.reconfigured ? 1 : 0) << "\n";
  }
  if (!out.good()) throw std::runtime_error("eval csv: write failed for " + path);
}

void write_action_timeline_csv(const std::string& path, const Environment& env,
                               const EvalResult& result) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("timeline csv: cannot write " + path);
  out << "slot,bs,split,x_rc,y_rc,z_idx,zeta_idx\n";
  for (const EvalSlotRow& r : result.rows) {
    for (int k = 0; k < env.n_bs(); ++k) {
      const BsAction& a = r.action.bs[k];
      out << r.slot << ',' << k << ',' << split_name(static_cast<SplitId>(a.split_idx)) << ','
          << env.flavors().rc(a.x_idx) << ',' << env.flavors().rc(a.y_idx) << ',' << a.z_idx
          << ',' << a.zeta_idx << "\n";
    }
  }
  if (!out.good()) throw std::runtime_error("timeline csv: write failed for " + path);
}

void verify_eval_csv(const std::string& path, const EvalResult& result) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("verify: cannot reopen " + path);
  std::string line;
  std::getline(in, line);  // header
  double total = 0.0;
  int reconf = 0;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (strip(line).empty()) continue;
    const auto f = split(strip(line), ',');
    if (f.size() != 10) throw std::runtime_error("verify: bad row in " + path);
    total += parse_double(f[7], "verify total");
    reconf += static_cast<int>(parse_long(f[9], "verify reconfigured"));
    ++rows;
  }
  if (rows != result.rows.size())
    throw std::runtime_error("verify: row count mismatch in " + path);
  if (total != result.totals.total_j)
    throw std::runtime_error("verify: per-slot totals do not reproduce the summary in " + path);
  if (reconf != result.reconfig_events)
    throw std::runtime_error("verify: reconfiguration count mismatch in " + path);
}

namespace {

double mean_cost_last(const std::vector<EpisodeMetrics>& rows, int count) {
  if (rows.empty()) return 0.0;
  const int n = std::min<int>(count, static_cast<int>(rows.size()));
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += rows[rows.size() - 1 - i].cost_total;
  return sum / n;
}

}  // namespace

ExperimentSummary run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                                 const ExperimentOptions& opts) {
  cfg.apply_kernel_backend();
  fs::create_directories(out_dir);
  const auto path = [&](const std::string& name) { return (fs::path(out_dir) / name).string(); };

  {
    std::ofstream echo(path("config_resolved.txt"));
    if (!echo) throw std::runtime_error("run_experiment: cannot write config echo");
    cfg.save(echo);
  }

  const Topology topo = cfg.build_topology();
  topo.save_file(path("topology.txt"));
  const TrafficTrace trace = cfg.build_trace();
  trace.save_csv(path("trace.csv"));
  const SplitCatalog catalog = cfg.build_catalog();
  const FlavorSet flavors = cfg.build_flavors();

  const int eval_offset = cfg.resolved_eval_offset();
  if (eval_offset + cfg.eval_horizon > trace.n_slots())
    throw std::runtime_error("run_experiment: trace too short for the evaluation window");

  Environment train_env(topo, catalog, flavors, cfg.util, cfg.cost, trace, 0, cfg.train_slots);
  Environment eval_env(topo, catalog, flavors, cfg.util, cfg.cost, trace, eval_offset,
                       cfg.eval_horizon);

  ExperimentSummary summary;
  LarvAgent agent(train_env.encoded_dim(), train_env.action_space_spec(), cfg.agent,
                  seed_stream(cfg.agent_seed, 0x4c415256u));
  if (opts.load_checkpoint) {
    agent.load(*opts.load_checkpoint);
    summary.checkpoint_path = *opts.load_checkpoint;
  } else {
    const TrainingResult training =
        run_training(train_env, agent, cfg.train_episodes, cfg.agent_seed, opts.init_checkpoint);
    write_training_csv(path("training_metrics.csv"), training.episodes);
    summary.train_final_cost_mean20 = mean_cost_last(training.episodes, 20);
    summary.checkpoint_path = path("checkpoint.bin");
    agent.save(summary.checkpoint_path);
  }

  const EvalResult larv_eval =
      evaluate_policy(eval_env, greedy_policy(agent, eval_env), cfg.eval_horizon, cfg.eval_seed);
  write_eval_csv(path("eval_larv_per_slot.csv"), larv_eval);
  write_action_timeline_csv(path("action_timeline.csv"), eval_env, larv_eval);
  verify_eval_csv(path("eval_larv_per_slot.csv"), larv_eval);

  const BspResult bsp = bsp_search(eval_env);
  const EvalResult bsp_eval =
      evaluate_policy(eval_env, static_policy(bsp.action), cfg.eval_horizon, cfg.eval_seed);
  write_eval_csv(path("eval_bsp_per_slot.csv"), bsp_eval);
  verify_eval_csv(path("eval_bsp_per_slot.csv"), bsp_eval);

  EvalResult random_eval;
  if (opts.run_random_baseline) {
    random_eval = evaluate_policy(eval_env, random_policy(eval_env, cfg.eval_seed),
                                  cfg.eval_horizon, cfg.eval_seed);
    write_eval_csv(path("eval_random_per_slot.csv"), random_eval);
    verify_eval_csv(path("eval_random_per_slot.csv"), random_eval);
  }

  summary.larv_eval_cost = larv_eval.totals.total_j;
  summary.bsp_eval_cost = bsp_eval.totals.total_j;
  summary.random_eval_cost = random_eval.totals.total_j;
  summary.larv_over_bsp =
      summary.bsp_eval_cost > 0.0 ? summary.larv_eval_cost / summary.bsp_eval_cost : 0.0;
  summary.larv_reconfig_events = larv_eval.reconfig_events;

  {
    std::ofstream out(path("summary.txt"));
    if (!out) throw std::runtime_error("run_experiment: cannot write summary");
    out << "kernel_backend " << kernels::backend_name(kernels::active_backend()) << "\n";
    out << "checkpoint " << summary.checkpoint_path << "\n";
    out << "train_final_cost_mean20 " << fmt_g17(summary.train_final_cost_mean20) << "\n";
    out << "larv_eval_cost " << fmt_g17(summary.larv_eval_cost) << "\n";
    out << "bsp_eval_cost " << fmt_g17(summary.bsp_eval_cost) << "\n";
    out << "bsp_static_cost " << fmt_g17(bsp.static_cost) << "\n";
    out << "bsp_used_exact " << (bsp.used_exact ? 1 : 0) << "\n";
    if (opts.run_random_baseline)
      out << "random_eval_cost " << fmt_g17(summary.random_eval_cost) << "\n";
    out << "larv_over_bsp " << fmt_g17(summary.larv_over_bsp) << "\n";
    out << "larv_reconfig_events " << summary.larv_reconfig_events << "\n";
    out << "bsp_reconfig_events " << bsp_eval.reconfig_events << "\n";
    if (!out.good()) throw std::runtime_error("run_experiment: summary write failed");
  }
  return summary;
}

}  // namespace vransim
