#pragma once

#include <cstdint>
#include <vector>

#include "vransim/cost_model.hpp"
#include "vransim/ran_model.hpp"
#include "vransim/topology.hpp"
#include "vransim/traffic.hpp"
#include "vransim/utilization.hpp"

namespace vransim {

inline constexpr int kBranchesPerBs = 5;  // split, vDU flavor, vCU flavor, vDU loc, vCU loc

// One BS's joint reconfiguration decision. Flavors and locations are stored
// as catalog indices; the vDU entries are carried but inert under S4.
struct BsAction {
  int split_idx = 0;  // into SplitId
  int x_idx = 0;      // vDU flavor
  int y_idx = 0;      // vCU flavor
  int z_idx = 0;      // vDU location (FS list index)
  int zeta_idx = 0;   // vCU location (ES list index)

  bool operator==(const BsAction&) const = default;
};

struct Action {
  std::vector<BsAction> bs;

  bool operator==(const Action&) const = default;
};

// Observation at one slot: this slot's demands plus the configuration the
// system is currently running (the previous action).
struct State {
  int slot = 0;  // index within the environment's trace window
  std::vector<double> demands_gbps;
  Action prev_action;
};

// Replay-buffer record, already in learner coordinates.
struct Transition {
  std::vector<double> state;
  std::vector<int> action;  // one index per branch
  double reward = 0.0;      // scaled
  std::vector<double> next_state;
  bool done = false;
};

struct StepResult {
  State next_state;
  double reward = 0.0;  // unscaled, = -total_j
  CostBreakdown breakdown;
  bool done = false;
};

struct BranchSpec {
  std::vector<int> sizes;  // output width per branch
  std::vector<int> group;  // owning BS per branch (for the 1/K * 1/C_k weights)

  int n_branches() const { return static_cast<int>(sizes.size()); }
  int n_groups() const;
  int total_outputs() const;
  // log10 of the joint action count (product of branch sizes).
  double joint_log10() const;
  std::vector<double> weights() const;  // per-branch 1/(K*C_k)
};

// The trace-driven vRAN MDP. Holds immutable topology/catalog data plus a
// cursor (slot, current state). step() is a pure function of
// (state, action, slot, seeds), so two instances fed identical inputs
// produce identical trajectories.
class Environment {
 public:
  Environment(const Topology& topo, SplitCatalog catalog, FlavorSet flavors,
              UtilizationModelSpec util_spec, CostParams cost_params, const TrafficTrace& trace,
              int window_offset, int window_slots);

  int n_bs() const { return static_cast<int>(topo_->ru_ids().size()); }
  int n_fs() const { return static_cast<int>(topo_->fs_ids().size()); }
  int n_es() const { return static_cast<int>(topo_->es_ids().size()); }
  int horizon() const { return window_slots_; }

  const SplitCatalog& catalog() const { return catalog_; }
  const FlavorSet& flavors() const { return flavors_; }
  const CostParams& cost_params() const { return cost_params_; }
  const Topology& topology() const { return *topo_; }
  const ServerCaps& server_caps() const { return caps_; }
  const UtilizationModel& utilization_model() const { return util_; }

  State reset(std::uint64_t episode_seed);
  StepResult step(const Action& action);
  const State& state() const { return state_; }

  // Learner-facing action structure: per BS [ |I|, |X|, |X|, L, M ].
  BranchSpec action_space_spec() const;
  std::vector<double> encode_state(const State& s) const;
  int encoded_dim() const;

  Action action_from_indices(const std::vector<int>& branch_indices) const;
  std::vector<int> indices_from_action(const Action& a) const;
  void validate_action(const Action& a) const;

  // Cost-model inputs for (state, action) at a given slot; exposed so
  // evaluation tooling and oracles share the exact step computation.
  std::vector<BsCostInput> cost_inputs(const State& s, const Action& a,
                                       std::uint64_t episode_seed) const;

  // Static-provisioning view: noise-free utilization at the given demands,
  // prev == current so change costs vanish. Used by the BSP baseline.
  std::vector<BsCostInput> static_cost_inputs(const std::vector<double>& demands,
                                              const Action& a) const;
  std::vector<LinkLoad> link_loads(const Action& a, const State& s) const;

  double demand(int slot, int bs) const { return trace_->demand(window_offset_ + slot, bs); }

 private:
  struct Segment {
    double delay_ms = 0.0;
    double length_km = 0.0;
    std::vector<int> links;
  };

  const Topology* topo_;
  SplitCatalog catalog_;
  FlavorSet flavors_;
  UtilizationModel util_;
  CostParams cost_params_;
  const TrafficTrace* trace_;
  int window_offset_;
  int window_slots_;
  ServerCaps caps_;

  // Shortest-path segments, cached: p0m by ES index; pml by (ES, FS);
  // pmk by (ES, RU); plk by (FS, RU).
  std::vector<Segment> p0m_;
  std::vector<std::vector<Segment>> pml_;
  std::vector<std::vector<Segment>> pmk_;
  std::vector<std::vector<Segment>> plk_;

  State state_;
  std::uint64_t episode_seed_ = 0;
};

}  // namespace vransim
