#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vransim/ran_model.hpp"

namespace vransim {

// Actual compute drawn by one BS, split across its RU / vDU / vCU tiers
// (reference cores).
struct UtilizationSample {
  double ru_rc = 0.0;
  double vdu_rc = 0.0;
  double vcu_rc = 0.0;

  double total() const { return ru_rc + vdu_rc + vcu_rc; }
};

enum class UtilizationKind { AFFINE_NOISY, TRACE_TABLE };

struct UtilizationModelSpec {
  UtilizationKind kind = UtilizationKind::AFFINE_NOISY;
  double base_rc = 2.0;
  double slope_rc_per_gbps = 2.0;
  double noise_cv = 0.1;
  std::uint64_t seed = 0;
  std::string trace_path;  // TRACE_TABLE only
};

// Maps (demand, split) to observed utilization. The total compute is
// split-independent by construction; the split decides how it spreads over
// RU/vDU/vCU via the catalog's compute shares. Stateless given
// (seed, slot_key): callable concurrently.
class UtilizationModel {
 public:
  UtilizationModel(const UtilizationModelSpec& spec, const SplitCatalog& catalog);

  // slot_key identifies the noise draw (mix of episode/slot/BS); the same
  // (seed, slot_key) always yields the same sample.
  UtilizationSample sample(double demand_gbps, SplitId split, std::uint64_t slot_key) const;

  // Noise-free expectation, used by the static-provisioning baseline.
  UtilizationSample mean(double demand_gbps, SplitId split) const;

  const UtilizationModelSpec& spec() const { return spec_; }

 private:
  double total_rc(double demand_gbps) const;  // noise-free total

  UtilizationModelSpec spec_;
  const SplitCatalog* catalog_;
  // TRACE_TABLE: (demand, total_rc) pairs, demand strictly increasing.
  std::vector<std::pair<double, double>> table_;
};

// Trace CSV with header `demand_gbps,total_rc`; duplicate demands averaged.
std::vector<std::pair<double, double>> load_utilization_table(const std::string& path);

}  // namespace vransim
