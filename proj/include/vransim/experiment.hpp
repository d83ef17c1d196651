#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vransim/baselines.hpp"
#include "vransim/config.hpp"
#include "vransim/environment.hpp"

namespace vransim {

struct EvalSlotRow {
  int slot = 0;
  CostBreakdown breakdown;
  Action action;
  bool reconfigured = false;  // action differs from the previous slot's
};

struct EvalResult {
  std::vector<EvalSlotRow> rows;
  CostBreakdown totals;
  int reconfig_events = 0;  // count over slots >= 2
};

// Greedy rollout of a policy over the first `horizon` slots of the
// environment's window. Undiscounted totals.
EvalResult evaluate_policy(Environment& env, const Policy& policy, int horizon,
                           std::uint64_t episode_seed);

void write_eval_csv(const std::string& path, const EvalResult& result);
// Per-BS action timeline (split, flavors in RC, placement indices).
void write_action_timeline_csv(const std::string& path, const Environment& env,
                               const EvalResult& result);

// Re-reads an eval CSV and checks its totals; throws on mismatch. Part of
// the artifact validation run before an experiment reports success.
void verify_eval_csv(const std::string& path, const EvalResult& result);

struct ExperimentOptions {
  std::optional<std::string> load_checkpoint;  // skip training, evaluate this
  std::optional<std::string> init_checkpoint;  // warm-start training
  bool run_random_baseline = true;
};

struct ExperimentSummary {
  double larv_eval_cost = 0.0;
  double bsp_eval_cost = 0.0;
  double random_eval_cost = 0.0;
  double larv_over_bsp = 0.0;  // normalized cost
  int larv_reconfig_events = 0;
  double train_final_cost_mean20 = 0.0;
  std::string checkpoint_path;
};

// Full pipeline: build topology/trace, train (or load) the agent, run the
// greedy evaluation plus the BSP and random baselines on the identical
// trace, and write all artifacts under out_dir. Every artifact is
// re-validated before returning.
ExperimentSummary run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                                 const ExperimentOptions& opts = {});

}  // namespace vransim
