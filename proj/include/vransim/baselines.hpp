#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "vransim/agent.hpp"
#include "vransim/environment.hpp"

namespace vransim {

using Policy = std::function<Action(const State&)>;

Policy static_policy(Action fixed);
// Uniform over every sub-action at every slot, seeded.
Policy random_policy(const Environment& env, std::uint64_t seed);
Policy greedy_policy(const LarvAgent& agent, const Environment& env);

struct BspOptions {
  enum class Mode { automatic, exact, greedy };
  Mode mode = Mode::automatic;
  // Joint spaces up to this size use the exact exhaustive search.
  double exact_limit = 1e6;
};

struct BspResult {
  Action action;
  double static_cost = 0.0;  // joint cost at each BS's peak demand, noise off
  bool used_exact = false;
  bool repair_triggered = false;
  std::vector<double> peak_demands;
};

// Best static provisioning: per-BS peak demands, noise-free utilization.
// Exact exhaustive search over the joint space when it is small enough;
// otherwise a per-BS decomposition whose capacity conflicts are repaired
// greedily in descending per-BS cost order.
BspResult bsp_search(const Environment& env, const BspOptions& opts = {});

// Joint static cost of an action at the given demands (noise-free, no
// change costs); the quantity bsp_search minimizes.
double static_joint_cost(const Environment& env, const std::vector<double>& demands,
                         const Action& action);

// Multi-agent non-branching D3QN: one independent single-branch dueling
// double-DQN per sub-action, all fed the common state and reward.
class MdqAgent {
 public:
  MdqAgent(int state_dim, const BranchSpec& spec, const AgentConfig& cfg, std::uint64_t seed);

  std::vector<int> select_action(std::span<const double> state, double eps, Rng& rng) const;

  std::vector<LarvAgent>& agents() { return agents_; }
  const std::vector<LarvAgent>& agents() const { return agents_; }
  const BranchSpec& branches() const { return spec_; }

 private:
  BranchSpec spec_;
  std::vector<LarvAgent> agents_;
};

Policy greedy_mdq_policy(const MdqAgent& agent, const Environment& env);

// Same loop as LARV training, but every sub-action is owned by its own
// agent with its own trunk, buffer and target net.
TrainingResult run_mdq_training(Environment& env, MdqAgent& agent, int episodes,
                                std::uint64_t seed);

}  // namespace vransim
