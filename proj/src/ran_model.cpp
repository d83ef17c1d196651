#include "vransim/ran_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace vransim {

std::string_view split_name(SplitId s) {
  switch (s) {
    case SplitId::S1: return "S1";
    case SplitId::S2: return "S2";
    case SplitId::S3: return "S3";
    case SplitId::S4: return "S4";
  }
  return "?";
}

SplitCatalog SplitCatalog::standard(const FunctionShares& fn) {
  if (std::abs(fn.sum() - 1.0) > 1e-9)
    throw std::runtime_error("function shares must sum to 1");
  SplitCatalog cat;
  cat.fn_ = fn;

  // The HLS choice fixes which functions sit above the vCU/vDU boundary;
  // the LLS is the high/low PHY split for S1-S3, so the RU always runs the
  // low PHY. S4 integrates everything above RF at the ES.
  const double vcu_o2 = fn.rrc + fn.pd;
  const double vcu_o4 = vcu_o2 + fn.hr + fn.lr;
  const double vcu_o6 = vcu_o4 + fn.hm + fn.lm;
  const double ru_o7 = fn.lp;

  auto& s1 = cat.specs_[0];
  s1.id = SplitId::S1;
  s1.hls_delay_req_ms = 10.0;
  s1.lls_delay_req_ms = 0.25;
  s1.uses_fs = true;
  s1.mh_slope = 1.0;
  s1.mh_offset_gbps = 0.0;
  s1.fh_load_gbps = 10.1;
  s1.shares = {ru_o7, 1.0 - vcu_o2 - ru_o7, vcu_o2};

  auto& s2 = cat.specs_[1];
  s2.id = SplitId::S2;
  s2.hls_delay_req_ms = 1.0;
  s2.lls_delay_req_ms = 0.25;
  s2.uses_fs = true;
  s2.mh_slope = 1.0;
  s2.mh_offset_gbps = 0.0;
  s2.fh_load_gbps = 10.1;
  s2.shares = {ru_o7, 1.0 - vcu_o4 - ru_o7, vcu_o4};

  auto& s3 = cat.specs_[2];
  s3.id = SplitId::S3;
  s3.hls_delay_req_ms = 0.25;
  s3.lls_delay_req_ms = 0.25;
  s3.uses_fs = true;
  s3.mh_slope = 1.02;
  s3.mh_offset_gbps = 0.5;
  s3.fh_load_gbps = 10.1;
  s3.shares = {ru_o7, 1.0 - vcu_o6 - ru_o7, vcu_o6};

  // S4: one integrated unit at the ES; its 157.3 Gbps stream is booked on
  // the ES->RU segment under the midhaul slot, with the fronthaul zeroed.
  auto& s4 = cat.specs_[3];
  s4.id = SplitId::S4;
  s4.hls_delay_req_ms = 0.25;
  s4.lls_delay_req_ms = 0.25;
  s4.uses_fs = false;
  s4.mh_slope = 0.0;
  s4.mh_offset_gbps = 157.3;
  s4.fh_load_gbps = 0.0;
  s4.shares = {0.0, 0.0, 1.0};

  return cat;
}

XhaulLoads SplitCatalog::xhaul_loads(SplitId s, double demand_gbps) const {
  if (!(demand_gbps >= 0.0 && demand_gbps <= kMaxDemandGbps))
    throw std::runtime_error("xhaul_loads: demand " + std::to_string(demand_gbps) +
                             " outside [0, " + std::to_string(kMaxDemandGbps) + "] Gbps");
  const SplitSpec& sp = spec(s);
  XhaulLoads loads;
  loads.bh_gbps = demand_gbps;
  loads.mh_gbps = sp.mh_slope * demand_gbps + sp.mh_offset_gbps;
  loads.fh_gbps = sp.fh_load_gbps;
  return loads;
}

FlavorSet::FlavorSet(std::vector<int> rc_values) : values_(std::move(rc_values)) {
  if (values_.empty()) throw std::runtime_error("flavor set must be non-empty");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] < 0) throw std::runtime_error("flavors must be non-negative");
    if (i > 0 && values_[i] <= values_[i - 1])
      throw std::runtime_error("flavors must be strictly increasing");
  }
}

std::vector<int> FlavorSet::default_flavors() {
  std::vector<int> v(16);
  for (int i = 0; i < 16; ++i) v[i] = i;
  return v;
}

int FlavorSet::rc(int index) const {
  if (index < 0 || index >= size())
    throw std::runtime_error("flavor index " + std::to_string(index) + " out of range");
  return values_[index];
}

int FlavorSet::index_of(int rc_value) const {
  for (int i = 0; i < size(); ++i)
    if (values_[i] == rc_value) return i;
  return -1;
}

int FlavorSet::ceil_index(double rc_demand) const {
  for (int i = 0; i < size(); ++i)
    if (static_cast<double>(values_[i]) >= rc_demand) return i;
  return size() - 1;
}

}  // namespace vransim
