#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace vransim {

inline constexpr int kSlotsPerDay = 144;  // 10-minute slots

// Per-BS, per-slot downlink demand in Gbps. Immutable after construction;
// all entries lie in [0, 4].
class TrafficTrace {
 public:
  TrafficTrace(int n_slots, int n_bs, std::vector<double> demands);

  int n_slots() const { return n_slots_; }
  int n_bs() const { return n_bs_; }
  double demand(int slot, int bs) const { return demands_[static_cast<std::size_t>(slot) * n_bs_ + bs]; }
  int clamped_cells() const { return clamped_cells_; }

  void save_csv(const std::string& path) const;

 private:
  int n_slots_;
  int n_bs_;
  std::vector<double> demands_;  // slot-major
  int clamped_cells_ = 0;

  friend TrafficTrace load_trace(const std::string& path);
};

// Day-periodic synthetic demand: a smooth bump with its trough near 04:00
// and peak near 20:00, a per-BS phase offset of up to +/-2 h, and 5%
// multiplicative noise. The trough sits at 8% of peak, i.e. a ~92% swing.
TrafficTrace generate_diurnal(int n_days, int n_bs, double peak_gbps, std::uint64_t seed,
                              bool noise = true);

// CSV with header `slot,bs_id,demand_gbps`, dense in slot x bs. Demands
// above 4 Gbps are clamped (counted); negative demands are an error.
TrafficTrace load_trace(const std::string& path);

}  // namespace vransim
