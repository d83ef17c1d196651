#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

namespace vransim {

// Peak per-BS traffic demand supported by the split options (Gbps).
inline constexpr double kMaxDemandGbps = 4.0;

enum class SplitId : int { S1 = 0, S2 = 1, S3 = 2, S4 = 3 };
inline constexpr int kNumSplits = 4;

std::string_view split_name(SplitId s);

// Per-BS compute of the BBU stack from top (central) to bottom (radio):
// RRC, PDCP, high/low RLC, high/low MAC, high/low PHY, as fractions of the
// total. Must sum to 1.
struct FunctionShares {
  double rrc = 0.10;
  double pd = 0.10;
  double hr = 0.005;
  double lr = 0.005;
  double hm = 0.07;
  double lm = 0.07;
  double hp = 0.17;
  double lp = 0.48;

  double sum() const { return rrc + pd + hr + lr + hm + lm + hp + lp; }
};

struct ComputeShares {
  double ru = 0.0;
  double vdu = 0.0;
  double vcu = 0.0;
};

struct XhaulLoads {
  double bh_gbps = 0.0;  // EPC -> vCU
  double mh_gbps = 0.0;  // vCU -> vDU (or the integrated-unit stream on ES->RU under S4)
  double fh_gbps = 0.0;  // vDU -> RU
};

struct SplitSpec {
  SplitId id = SplitId::S1;
  double hls_delay_req_ms = 0.0;
  double lls_delay_req_ms = 0.0;
  bool uses_fs = true;  // false for the integrated vDU/vCU option
  // Midhaul load = mh_slope * demand + mh_offset; fronthaul load is constant.
  double mh_slope = 1.0;
  double mh_offset_gbps = 0.0;
  double fh_load_gbps = 0.0;
  ComputeShares shares;
};

// The deployable split options and their transport/compute behavior.
class SplitCatalog {
 public:
  static SplitCatalog standard(const FunctionShares& fn = FunctionShares{});

  const SplitSpec& spec(SplitId s) const { return specs_[static_cast<int>(s)]; }
  const FunctionShares& function_shares() const { return fn_; }

  // Config-file overrides for individual split parameters.
  void override_spec(const SplitSpec& s) { specs_[static_cast<int>(s.id)] = s; }

  XhaulLoads xhaul_loads(SplitId s, double demand_gbps) const;
  ComputeShares compute_shares(SplitId s) const { return spec(s).shares; }

 private:
  std::array<SplitSpec, kNumSplits> specs_{};
  FunctionShares fn_{};
};

// Discrete reserved-compute sizes for vDU/vCU instances, in reference cores.
class FlavorSet {
 public:
  FlavorSet() : FlavorSet(default_flavors()) {}
  explicit FlavorSet(std::vector<int> rc_values);

  int size() const { return static_cast<int>(values_.size()); }
  int rc(int index) const;
  int max_rc() const { return values_.back(); }
  int index_of(int rc_value) const;  // -1 when absent
  // Smallest flavor with rc >= demand; the largest flavor if none covers it.
  int ceil_index(double rc_demand) const;
  const std::vector<int>& values() const { return values_; }

  static std::vector<int> default_flavors();

 private:
  std::vector<int> values_;
};

}  // namespace vransim
