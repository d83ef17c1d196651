#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vransim/environment.hpp"
#include "vransim/nn.hpp"

namespace vransim {

struct AgentConfig {
  double gamma = 0.99;  // evaluation always reports undiscounted cost
  double eps_max = 1.0;
  double eps_min = 0.015;
  // Episode fraction at which the multiplicative epsilon decay touches
  // 1.05 * eps_min.
  double eps_knee_frac = 0.8;
  int batch_size = 128;
  int target_sync_slots = 500;
  double lr = 1e-4;
  double reward_scale = 100.0;  // rewards divided by this before the learner
  std::vector<int> trunk_widths = {512, 256};
  std::size_t buffer_capacity = 1'000'000;

  void validate() const;
};

// Epsilon for a 1-based episode index under the exponential schedule.
double epsilon_for_episode(const AgentConfig& cfg, int episode, int total_episodes);

// Dueling Q-network over a shared trunk with one advantage head per
// sub-action branch: Q_c[j] = V + A_c[j] - mean_j'(A_c[j']).
class BranchingQNet {
 public:
  BranchingQNet(int state_dim, const std::vector<int>& trunk_widths, BranchSpec branches,
                std::uint64_t init_seed);

  struct Forward {
    nn::MlpCache trunk;
    double v = 0.0;
    std::vector<std::vector<double>> adv;  // raw advantages per branch
    std::vector<std::vector<double>> q;    // aggregated Q per branch
  };

  void forward(std::span<const double> state, Forward& f) const;
  std::vector<std::vector<double>> q_values(std::span<const double> state) const;

  struct Grads {
    std::vector<nn::LayerGrad> trunk;
    nn::LayerGrad value;
    std::vector<nn::LayerGrad> heads;
  };
  Grads make_grads() const;
  static void zero(Grads& g);

  // Backprop of dL/dQ (one vector per branch, zeros where inactive)
  // through the aggregation, heads, value head and trunk.
  void backward(std::span<const double> state, const Forward& f,
                const std::vector<std::vector<double>>& dq, Grads& grads) const;

  std::vector<nn::ParamRef> params();
  std::vector<const std::vector<double>*> grad_list(const Grads& g) const;
  void copy_params_from(const BranchingQNet& other);

  const BranchSpec& branches() const { return branches_; }
  int state_dim() const { return state_dim_; }
  int total_outputs() const { return branches_.total_outputs(); }
  std::string arch_signature() const;

  nn::Mlp trunk;
  nn::Layer value_head;
  std::vector<nn::Layer> advantage_heads;

 private:
  int state_dim_;
  BranchSpec branches_;
};

class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void add(Transition t);
  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& at(std::size_t i) const { return data_[i]; }

  // Uniform with replacement; requires size() >= batch.
  std::vector<const Transition*> sample(int batch, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<Transition> data_;
};

// Online/target branching D3QN pair plus optimizer state.
class LarvAgent {
 public:
  LarvAgent(int state_dim, BranchSpec branches, const AgentConfig& cfg, std::uint64_t seed);

  // Per-branch index list; uniform per branch with probability eps, else
  // per-branch argmax (ties toward the smallest index).
  std::vector<int> select_action(std::span<const double> state, double eps, Rng& rng) const;

  std::vector<std::vector<double>> q_values(std::span<const double> state) const {
    return online_.q_values(state);
  }

  // Branched TD targets: argmax per branch on the online net, evaluation on
  // the target net, averaged over branches; u = r for terminal transitions.
  std::vector<double> td_targets(const std::vector<const Transition*>& batch) const;

  // One optimizer step on a uniform minibatch; returns the loss.
  double train_step(const ReplayBuffer& buffer, Rng& rng);

  void sync_target();

  const BranchingQNet& online() const { return online_; }
  BranchingQNet& online() { return online_; }
  const BranchingQNet& target() const { return target_; }
  const AgentConfig& config() const { return cfg_; }

  void save(const std::string& path);
  void load(const std::string& path);

 private:
  AgentConfig cfg_;
  BranchingQNet online_;
  BranchingQNet target_;
  nn::Adam adam_;
  BranchingQNet::Grads grads_;
};

struct EpisodeMetrics {
  int episode = 0;
  double episodic_return = 0.0;
  double cost_total = 0.0;
  double cost_computing = 0.0;
  double cost_declined = 0.0;
  double cost_overprov = 0.0;
  double cost_instantiation = 0.0;
  double cost_reconf = 0.0;
  double cost_routing = 0.0;
  double epsilon = 0.0;
  double mean_loss = 0.0;
  int reconfig_events = 0;
};

struct TrainingResult {
  std::vector<EpisodeMetrics> episodes;
};

void write_training_csv(const std::string& path, const std::vector<EpisodeMetrics>& rows);

// Full training loop: episodic reset, epsilon-greedy rollout, per-slot
// optimizer steps, target sync every cfg.target_sync_slots environment
// slots. A warm start from init_checkpoint lowers eps_max to 0.1.
TrainingResult run_training(Environment& env, LarvAgent& agent, int episodes, std::uint64_t seed,
                            const std::optional<std::string>& init_checkpoint = std::nullopt);

}  // namespace vransim
