#include "vransim/utilization.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

#include "vransim/io_util.hpp"
#include "vransim/rng.hpp"

namespace vransim {

UtilizationModel::UtilizationModel(const UtilizationModelSpec& spec, const SplitCatalog& catalog)
    : spec_(spec), catalog_(&catalog) {
  if (spec_.base_rc < 0.0 || spec_.slope_rc_per_gbps < 0.0)
    throw std::runtime_error("utilization model: base_rc and slope must be >= 0");
  if (!(spec_.noise_cv >= 0.0 && spec_.noise_cv < 1.0))
    throw std::runtime_error("utilization model: noise_cv must be in [0, 1)");
  if (spec_.kind == UtilizationKind::TRACE_TABLE) {
    table_ = load_utilization_table(spec_.trace_path);
  }
}

double UtilizationModel::total_rc(double demand_gbps) const {
  if (!(demand_gbps >= 0.0 && demand_gbps <= kMaxDemandGbps))
    throw std::runtime_error("utilization: demand outside [0, 4] Gbps");
  if (spec_.kind == UtilizationKind::AFFINE_NOISY)
    return spec_.base_rc + spec_.slope_rc_per_gbps * demand_gbps;
  // TRACE_TABLE: linear interpolation, clamped to the table's demand range.
  if (demand_gbps <= table_.front().first) return table_.front().second;
  if (demand_gbps >= table_.back().first) return table_.back().second;
  const auto it = std::lower_bound(table_.begin(), table_.end(), demand_gbps,
                                   [](const auto& p, double d) { return p.first < d; });
  const auto [d1, u1] = *it;
  const auto [d0, u0] = *(it - 1);
  const double t = (demand_gbps - d0) / (d1 - d0);
  return u0 + t * (u1 - u0);
}

UtilizationSample UtilizationModel::mean(double demand_gbps, SplitId split) const {
  const double total = total_rc(demand_gbps);
  const ComputeShares sh = catalog_->compute_shares(split);
  return {total * sh.ru, total * sh.vdu, total * sh.vcu};
}

UtilizationSample UtilizationModel::sample(double demand_gbps, SplitId split,
                                           std::uint64_t slot_key) const {
  double total = total_rc(demand_gbps);
  if (spec_.kind == UtilizationKind::AFFINE_NOISY && spec_.noise_cv > 0.0) {
    Rng rng(seed_stream(spec_.seed, slot_key));
    // Multiplicative noise truncated at -100% so utilization stays >= 0.
    total = std::max(0.0, total * (1.0 + rng.normal(0.0, spec_.noise_cv)));
  }
  const ComputeShares sh = catalog_->compute_shares(split);
  return {total * sh.ru, total * sh.vdu, total * sh.vcu};
}

std::vector<std::pair<double, double>> load_utilization_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("utilization table: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || strip(line) != "demand_gbps,total_rc")
    throw std::runtime_error("utilization table: expected header 'demand_gbps,total_rc'");
  std::map<double, std::pair<double, int>> acc;  // demand -> (sum, count)
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    line = strip(line);
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 2)
      throw std::runtime_error("utilization table row " + std::to_string(row) + ": bad field count");
    const double d = parse_double(fields[0], "utilization table demand");
    const double u = parse_double(fields[1], "utilization table total_rc");
    if (d < 0.0 || u < 0.0)
      throw std::runtime_error("utilization table row " + std::to_string(row) + ": negative value");
    auto& slot = acc[d];
    slot.first += u;
    slot.second += 1;
  }
  if (acc.empty()) throw std::runtime_error("utilization table: no samples in " + path);
  std::vector<std::pair<double, double>> table;
  table.reserve(acc.size());
  for (const auto& [d, su] : acc) table.push_back({d, su.first / su.second});
  return table;
}

}  // namespace vransim
