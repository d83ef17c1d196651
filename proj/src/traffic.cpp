#include "vransim/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "vransim/io_util.hpp"
#include "vransim/ran_model.hpp"
#include "vransim/rng.hpp"

namespace vransim {

TrafficTrace::TrafficTrace(int n_slots, int n_bs, std::vector<double> demands)
    : n_slots_(n_slots), n_bs_(n_bs), demands_(std::move(demands)) {
  if (n_slots_ <= 0 || n_bs_ <= 0)
    throw std::runtime_error("traffic trace: dimensions must be positive");
  if (demands_.size() != static_cast<std::size_t>(n_slots_) * n_bs_)
    throw std::runtime_error("traffic trace: demand matrix size mismatch");
  for (double d : demands_)
    if (!(d >= 0.0 && d <= kMaxDemandGbps))
      throw std::runtime_error("traffic trace: demand outside [0, 4] Gbps");
}

namespace {

constexpr double kPi = 3.14159265358979323846;

// Smooth day-periodic shape in [0, 1]: minimum 0 at 04:00, maximum 1 at
// 20:00, zero slope at both extremes (two half-cosine arcs of 16 h and 8 h).
double diurnal_shape(double hour_of_day) {
  double h = std::fmod(hour_of_day, 24.0);
  if (h < 0.0) h += 24.0;
  if (h < 4.0) h += 24.0;  // work on [4, 28)
  if (h <= 20.0) return 0.5 * (1.0 - std::cos(kPi * (h - 4.0) / 16.0));
  return 0.5 * (1.0 + std::cos(kPi * (h - 20.0) / 8.0));
}

}  // namespace

TrafficTrace generate_diurnal(int n_days, int n_bs, double peak_gbps, std::uint64_t seed,
                              bool noise) {
  if (n_days <= 0 || n_bs <= 0) throw std::runtime_error("generate_diurnal: bad dimensions");
  if (!(peak_gbps >= 0.0 && peak_gbps <= kMaxDemandGbps))
    throw std::runtime_error("generate_diurnal: peak must be in [0, 4] Gbps");

  Rng rng(seed);
  std::vector<double> phase_h(n_bs);
  for (int k = 0; k < n_bs; ++k) phase_h[k] = rng.uniform(-2.0, 2.0);

  const int n_slots = n_days * kSlotsPerDay;
  std::vector<double> demands(static_cast<std::size_t>(n_slots) * n_bs);
  for (int s = 0; s < n_slots; ++s) {
    const double hour = static_cast<double>(s) * (10.0 / 60.0);
    for (int k = 0; k < n_bs; ++k) {
      double lambda = peak_gbps * (0.08 + 0.92 * diurnal_shape(hour + phase_h[k]));
      if (noise) lambda *= 1.0 + rng.normal(0.0, 0.05);
      demands[static_cast<std::size_t>(s) * n_bs + k] =
          std::clamp(lambda, 0.0, kMaxDemandGbps);
    }
  }
  return TrafficTrace(n_slots, n_bs, std::move(demands));
}

void TrafficTrace::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("traffic trace: cannot write " + path);
  out << "slot,bs_id,demand_gbps\n";
  for (int s = 0; s < n_slots_; ++s)
    for (int k = 0; k < n_bs_; ++k)
      out << s << ',' << k << ',' << fmt_g17(demand(s, k)) << "\n";
  if (!out.good()) throw std::runtime_error("traffic trace: write failed for " + path);
}

TrafficTrace load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("traffic trace: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || strip(line) != "slot,bs_id,demand_gbps")
    throw std::runtime_error("traffic trace: expected header 'slot,bs_id,demand_gbps'");

  struct Cell {
    int slot, bs;
    double demand;
  };
  std::vector<Cell> cells;
  int max_slot = -1, max_bs = -1;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    line = strip(line);
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 3)
      throw std::runtime_error("traffic trace row " + std::to_string(row) + ": bad field count");
    Cell c;
    c.slot = static_cast<int>(parse_long(fields[0], "trace slot"));
    c.bs = static_cast<int>(parse_long(fields[1], "trace bs_id"));
    c.demand = parse_double(fields[2], "trace demand_gbps");
    if (c.slot < 0 || c.bs < 0)
      throw std::runtime_error("traffic trace row " + std::to_string(row) + ": negative index");
    if (c.demand < 0.0)
      throw std::runtime_error("traffic trace row " + std::to_string(row) +
                               ": negative demand " + fields[2]);
    max_slot = std::max(max_slot, c.slot);
    max_bs = std::max(max_bs, c.bs);
    cells.push_back(c);
  }
  if (cells.empty()) throw std::runtime_error("traffic trace: no data rows in " + path);

  const int n_slots = max_slot + 1;
  const int n_bs = max_bs + 1;
  std::vector<double> demands(static_cast<std::size_t>(n_slots) * n_bs,
                              std::numeric_limits<double>::quiet_NaN());
  int clamped = 0;
  for (const Cell& c : cells) {
    double d = c.demand;
    if (d > kMaxDemandGbps) {
      d = kMaxDemandGbps;
      ++clamped;
    }
    auto& cell = demands[static_cast<std::size_t>(c.slot) * n_bs + c.bs];
    if (!std::isnan(cell))
      throw std::runtime_error("traffic trace: duplicate cell slot " + std::to_string(c.slot) +
                               " bs " + std::to_string(c.bs));
    cell = d;
  }
  for (int s = 0; s < n_slots; ++s)
    for (int k = 0; k < n_bs; ++k)
      if (std::isnan(demands[static_cast<std::size_t>(s) * n_bs + k]))
        throw std::runtime_error("traffic trace: missing cell slot " + std::to_string(s) +
                                 " bs " + std::to_string(k));

  TrafficTrace trace(n_slots, n_bs, std::move(demands));
  trace.clamped_cells_ = clamped;
  return trace;
}

}  // namespace vransim
