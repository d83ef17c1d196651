#include "vransim/cost_model.hpp"

#include <algorithm>
#include <stdexcept>

namespace vransim {

void CostParams::validate() const {
  const double fees[] = {kappa_ru, kappa_fs, kappa_es, kappa_o,
                         kappa_d,  kappa_i,  kappa_r,  kappa_h};
  for (double f : fees)
    if (!(f >= 0.0)) throw std::runtime_error("cost params: fees must be >= 0");
}

double computing_cost(const CostParams& p, std::span<const BsCostInput> bs) {
  double cost = 0.0;
  for (const BsCostInput& b : bs)
    cost += p.kappa_ru * b.util.ru_rc + p.kappa_fs * b.util.vdu_rc + p.kappa_es * b.util.vcu_rc;
  return cost;
}

double overprovisioning_cost(const CostParams& p, std::span<const BsCostInput> bs) {
  double cost = 0.0;
  for (const BsCostInput& b : bs)
    cost += p.kappa_o * (std::max(0.0, b.x_rc - b.util.vdu_rc) +
                         std::max(0.0, b.y_rc - b.util.vcu_rc));
  return cost;
}

double declined_cost(const CostParams& p, std::span<const BsCostInput> bs,
                     const ServerCaps& caps, const SplitCatalog& catalog) {
  double cost = 0.0;

  // Aggregate vDU allocations against each FS capacity.
  std::vector<double> fs_alloc(caps.fs_capacity_rc.size(), 0.0);
  std::vector<double> es_alloc(caps.es_capacity_rc.size(), 0.0);
  for (const BsCostInput& b : bs) {
    fs_alloc.at(b.z_idx) += b.x_rc;
    es_alloc.at(b.zeta_idx) += b.y_rc;
  }
  for (std::size_t l = 0; l < fs_alloc.size(); ++l)
    cost += p.kappa_d * std::max(0.0, fs_alloc[l] - caps.fs_capacity_rc[l]);
  for (std::size_t m = 0; m < es_alloc.size(); ++m)
    cost += p.kappa_d * std::max(0.0, es_alloc[m] - caps.es_capacity_rc[m]);

  for (const BsCostInput& b : bs) {
    // Delay requirement violations over the segments this split routes.
    const SplitSpec& sp = catalog.spec(b.split);
    double excess = 0.0;
    if (b.has_fs_segments) {
      excess = std::max(excess, b.d_pml_ms - sp.hls_delay_req_ms);
      excess = std::max(excess, b.d_plk_ms - sp.lls_delay_req_ms);
    } else {
      excess = std::max(excess, b.d_pmk_ms - sp.lls_delay_req_ms);
    }
    cost += p.kappa_d * excess;

    // Underprovisioned vDU/vCU.
    cost += p.kappa_d *
            std::max({0.0, b.util.vdu_rc - b.x_rc, b.util.vcu_rc - b.y_rc});
  }
  return cost;
}

std::pair<double, double> change_costs(const CostParams& p, std::span<const BsCostInput> bs) {
  double inst = 0.0;
  double reconf = 0.0;
  for (const BsCostInput& b : bs) {
    const double dx = b.x_rc - b.prev_x_rc;
    const double dy = b.y_rc - b.prev_y_rc;
    inst += p.kappa_i * (std::max(0.0, dx) + std::max(0.0, dy));
    double r = std::abs(dx) + std::abs(dy);
    if (b.z_idx != b.prev_z_idx) r += b.x_rc;
    if (b.zeta_idx != b.prev_zeta_idx) r += b.y_rc;
    reconf += p.kappa_r * r;
  }
  return {inst, reconf};
}

double routing_cost(const CostParams& p, std::span<const BsCostInput> bs,
                    const SplitCatalog& catalog) {
  double cost = 0.0;
  for (const BsCostInput& b : bs) {
    const XhaulLoads loads = catalog.xhaul_loads(b.split, b.demand_gbps);
    double c = loads.bh_gbps * b.len_p0m_km;
    if (b.has_fs_segments) {
      c += loads.mh_gbps * b.len_pml_km;
      c += loads.fh_gbps * b.len_plk_km;
    } else {
      c += loads.mh_gbps * b.len_pmk_km;
    }
    cost += p.kappa_h * c;
  }
  return cost;
}

double link_overflow_cost(const CostParams& p, std::span<const LinkLoad> links) {
  if (!p.link_overflow_penalty) return 0.0;
  double cost = 0.0;
  for (const LinkLoad& l : links)
    cost += p.kappa_d * std::max(0.0, l.load_gbps - l.capacity_gbps);
  return cost;
}

CostBreakdown evaluate_cost(const CostParams& p, std::span<const BsCostInput> bs,
                            const ServerCaps& caps, const SplitCatalog& catalog,
                            std::span<const LinkLoad> links) {
  CostBreakdown out;
  out.computing = computing_cost(p, bs);
  out.overprovisioning = overprovisioning_cost(p, bs);
  out.declined = declined_cost(p, bs, caps, catalog) + link_overflow_cost(p, links);
  const auto [inst, reconf] = change_costs(p, bs);
  out.instantiation = inst;
  out.reconfiguration = reconf;
  out.routing = routing_cost(p, bs, catalog);
  out.total_j = out.computing + out.overprovisioning + out.declined + out.instantiation +
                out.reconfiguration + out.routing;
  out.reward = -out.total_j;
  return out;
}

}  // namespace vransim
