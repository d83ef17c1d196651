#pragma once

#include <span>
#include <vector>

#include "vransim/ran_model.hpp"
#include "vransim/utilization.hpp"

namespace vransim {

// Monetary fees ($ per unit). kappa_d is charged per RC of capacity or
// allocation shortfall and per ms of delay excess alike (one penalty rate
// for every declined-demand family).
struct CostParams {
  double kappa_ru = 1.0;    // $/RC, RU processing
  double kappa_fs = 0.5;    // $/RC, FS (vDU) processing
  double kappa_es = 0.25;   // $/RC, ES (vCU) processing
  double kappa_o = 1.0;     // $/RC, overprovisioning
  double kappa_d = 5.0;     // $/unit, declined demand
  double kappa_i = 0.1;     // $/RC, instantiation
  double kappa_r = 0.1;     // $/RC, reconfiguration
  double kappa_h = 1.0;     // $/Gbps/km, bandwidth reservation
  // Off by default: adds kappa_d per Gbps of per-link capacity overflow.
  bool link_overflow_penalty = false;

  void validate() const;
};

struct CostBreakdown {
  double computing = 0.0;
  double overprovisioning = 0.0;
  double declined = 0.0;
  double instantiation = 0.0;
  double reconfiguration = 0.0;
  double routing = 0.0;
  double total_j = 0.0;
  double reward = 0.0;  // -total_j
};

// Everything the cost terms need to know about one BS for one slot.
struct BsCostInput {
  SplitId split = SplitId::S1;
  double demand_gbps = 0.0;
  UtilizationSample util;

  double x_rc = 0.0;  // allocated vDU flavor (RC)
  double y_rc = 0.0;  // allocated vCU flavor (RC)
  int z_idx = 0;      // vDU location (FS index)
  int zeta_idx = 0;   // vCU location (ES index)

  double prev_x_rc = 0.0;
  double prev_y_rc = 0.0;
  int prev_z_idx = 0;
  int prev_zeta_idx = 0;

  // Route segment delays/lengths. The FS segments (pml, plk) are present
  // for S1-S3; the direct ES->RU segment (pmk) for S4. The backhaul
  // segment p0m is always present.
  double d_p0m_ms = 0.0;
  double len_p0m_km = 0.0;
  bool has_fs_segments = true;
  double d_pml_ms = 0.0;
  double len_pml_km = 0.0;
  double d_plk_ms = 0.0;
  double len_plk_km = 0.0;
  double d_pmk_ms = 0.0;
  double len_pmk_km = 0.0;
};

struct ServerCaps {
  std::vector<double> fs_capacity_rc;  // indexed by FS index
  std::vector<double> es_capacity_rc;  // indexed by ES index
};

// Per-link aggregate load vs capacity, only used when link_overflow_penalty
// is enabled.
struct LinkLoad {
  double load_gbps = 0.0;
  double capacity_gbps = 0.0;
};

double computing_cost(const CostParams& p, std::span<const BsCostInput> bs);
double overprovisioning_cost(const CostParams& p, std::span<const BsCostInput> bs);
double declined_cost(const CostParams& p, std::span<const BsCostInput> bs,
                     const ServerCaps& caps, const SplitCatalog& catalog);
// Returns (instantiation, reconfiguration).
std::pair<double, double> change_costs(const CostParams& p, std::span<const BsCostInput> bs);
double routing_cost(const CostParams& p, std::span<const BsCostInput> bs,
                    const SplitCatalog& catalog);
double link_overflow_cost(const CostParams& p, std::span<const LinkLoad> links);

CostBreakdown evaluate_cost(const CostParams& p, std::span<const BsCostInput> bs,
                            const ServerCaps& caps, const SplitCatalog& catalog,
                            std::span<const LinkLoad> links = {});

}  // namespace vransim
