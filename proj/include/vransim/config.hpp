#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "vransim/agent.hpp"
#include "vransim/cost_model.hpp"
#include "vransim/ran_model.hpp"
#include "vransim/topology.hpp"
#include "vransim/traffic.hpp"
#include "vransim/utilization.hpp"

namespace vransim {

// Experiment configuration, parsed from a `key value` text file with
// dotted keys and units spelled out in the key names. Unknown keys are
// errors. All randomness flows from the named seeds below.
struct ExperimentConfig {
  // topology
  std::string topology_source = "generate";  // generate | file
  std::string topology_file;
  WaxmanParams waxman;

  // traffic
  std::string traffic_source = "generate";  // generate | file
  std::string traffic_file;
  int traffic_days = 3;
  double traffic_peak_gbps = 4.0;
  bool traffic_noise = true;
  std::uint64_t traffic_seed = 2;

  // catalogs
  std::vector<int> flavor_list = FlavorSet::default_flavors();
  FunctionShares shares;
  struct SplitOverride {
    int split_idx;
    std::string field;
    double value;
  };
  std::vector<SplitOverride> split_overrides;

  UtilizationModelSpec util;
  CostParams cost;
  AgentConfig agent;
  std::uint64_t agent_seed = 4;

  int train_episodes = 300;
  int train_slots = 144;
  int eval_horizon = 288;
  int eval_offset = -1;  // -1: immediately after the training window
  std::uint64_t eval_seed = 5;

  std::string kernel = "auto";  // auto | scalar | avx2

  static ExperimentConfig load_file(const std::string& path,
                                    const std::vector<std::pair<std::string, std::string>>&
                                        overrides = {});
  static ExperimentConfig parse(std::istream& in, const std::string& origin,
                                const std::vector<std::pair<std::string, std::string>>&
                                    overrides = {});

  void set(const std::string& key, const std::string& value);
  void validate() const;

  SplitCatalog build_catalog() const;
  Topology build_topology() const;
  TrafficTrace build_trace() const;
  FlavorSet build_flavors() const;
  void apply_kernel_backend() const;

  int resolved_eval_offset() const { return eval_offset < 0 ? train_slots : eval_offset; }

  // Deterministic echo of every key, suitable for re-parsing.
  void save(std::ostream& out) const;
};

}  // namespace vransim
