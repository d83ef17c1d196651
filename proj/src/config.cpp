#include "vransim/config.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "vransim/io_util.hpp"
#include "vransim/kernels.hpp"

namespace vransim {

namespace {

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw std::runtime_error("config key '" + key + "': expected on/off, got '" + v + "'");
}

std::vector<int> parse_int_list(const std::string& v, const std::string& key) {
  std::vector<int> out;
  for (const std::string& part : split(v, ','))
    out.push_back(static_cast<int>(parse_long(strip(part), "config key '" + key + "'")));
  return out;
}

int split_index(const std::string& name, const std::string& key) {
  if (name == "s1") return 0;
  if (name == "s2") return 1;
  if (name == "s3") return 2;
  if (name == "s4") return 3;
  throw std::runtime_error("config key '" + key + "': unknown split '" + name + "'");
}

}  // namespace

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  auto num = [&] { return parse_double(value, "config key '" + key + "'"); };
  auto integer = [&] { return static_cast<int>(parse_long(value, "config key '" + key + "'")); };
  auto seed = [&] {
    return static_cast<std::uint64_t>(parse_long(value, "config key '" + key + "'"));
  };

  if (key == "topology.source") {
    if (value != "generate" && value != "file")
      throw std::runtime_error("config key 'topology.source': expected generate|file");
    topology_source = value;
  } else if (key == "topology.file") {
    topology_file = value;
  } else if (key == "topology.nodes") {
    waxman.n_nodes = integer();
  } else if (key == "topology.alpha") {
    waxman.alpha = num();
  } else if (key == "topology.beta") {
    waxman.beta = num();
  } else if (key == "topology.es") {
    waxman.n_es = integer();
  } else if (key == "topology.fs") {
    waxman.n_fs = integer();
  } else if (key == "topology.ru") {
    waxman.n_ru = integer();
  } else if (key == "topology.area_km") {
    waxman.area_km = num();
  } else if (key == "topology.seed") {
    waxman.seed = seed();
  } else if (key == "servers.fs_capacity_rc") {
    waxman.fs_capacity_rc = num();
  } else if (key == "servers.es_capacity_rc") {
    waxman.es_capacity_rc = num();
  } else if (key == "traffic.source") {
    if (value != "generate" && value != "file")
      throw std::runtime_error("config key 'traffic.source': expected generate|file");
    traffic_source = value;
  } else if (key == "traffic.file") {
    traffic_file = value;
  } else if (key == "traffic.days") {
    traffic_days = integer();
  } else if (key == "traffic.peak_gbps") {
    traffic_peak_gbps = num();
  } else if (key == "traffic.noise") {
    traffic_noise = parse_bool(value, key);
  } else if (key == "traffic.seed") {
    traffic_seed = seed();
  } else if (key == "flavors.list") {
    flavor_list = parse_int_list(value, key);
  } else if (key == "shares.rrc") {
    shares.rrc = num();
  } else if (key == "shares.pd") {
    shares.pd = num();
  } else if (key == "shares.hr") {
    shares.hr = num();
  } else if (key == "shares.lr") {
    shares.lr = num();
  } else if (key == "shares.hm") {
    shares.hm = num();
  } else if (key == "shares.lm") {
    shares.lm = num();
  } else if (key == "shares.hp") {
    shares.hp = num();
  } else if (key == "shares.lp") {
    shares.lp = num();
  } else if (key.rfind("split.", 0) == 0) {
    const auto parts = split(key, '.');
    if (parts.size() != 3)
      throw std::runtime_error("unknown config key '" + key + "'");
    static const char* kFields[] = {"hls_delay_ms", "lls_delay_ms", "mh_slope",
                                    "mh_offset_gbps", "fh_load_gbps"};
    bool ok = false;
    for (const char* f : kFields) ok = ok || parts[2] == f;
    if (!ok) throw std::runtime_error("unknown config key '" + key + "'");
    split_overrides.push_back({split_index(parts[1], key), parts[2], num()});
  } else if (key == "util.kind") {
    if (value == "affine_noisy")
      util.kind = UtilizationKind::AFFINE_NOISY;
    else if (value == "trace_table")
      util.kind = UtilizationKind::TRACE_TABLE;
    else
      throw std::runtime_error("config key 'util.kind': expected affine_noisy|trace_table");
  } else if (key == "util.base_rc") {
    util.base_rc = num();
  } else if (key == "util.slope_rc_per_gbps") {
    util.slope_rc_per_gbps = num();
  } else if (key == "util.noise_cv") {
    util.noise_cv = num();
  } else if (key == "util.seed") {
    util.seed = seed();
  } else if (key == "util.trace_file") {
    util.trace_path = value;
  } else if (key == "cost.kappa_ru_per_rc") {
    cost.kappa_ru = num();
  } else if (key == "cost.kappa_fs_per_rc") {
    cost.kappa_fs = num();
  } else if (key == "cost.kappa_es_per_rc") {
    cost.kappa_es = num();
  } else if (key == "cost.kappa_o_per_rc") {
    cost.kappa_o = num();
  } else if (key == "cost.kappa_d_per_unit") {
    cost.kappa_d = num();
  } else if (key == "cost.kappa_i_per_rc") {
    cost.kappa_i = num();
  } else if (key == "cost.kappa_r_per_rc") {
    cost.kappa_r = num();
  } else if (key == "cost.kappa_h_per_gbps_km") {
    cost.kappa_h = num();
  } else if (key == "cost.link_overflow_penalty") {
    cost.link_overflow_penalty = parse_bool(value, key);
  } else if (key == "agent.gamma") {
    agent.gamma = num();
  } else if (key == "agent.eps_max") {
    agent.eps_max = num();
  } else if (key == "agent.eps_min") {
    agent.eps_min = num();
  } else if (key == "agent.eps_knee_frac") {
    agent.eps_knee_frac = num();
  } else if (key == "agent.batch_size") {
    agent.batch_size = integer();
  } else if (key == "agent.target_sync_slots") {
    agent.target_sync_slots = integer();
  } else if (key == "agent.lr") {
    agent.lr = num();
  } else if (key == "agent.reward_scale") {
    agent.reward_scale = num();
  } else if (key == "agent.buffer_capacity") {
    agent.buffer_capacity = static_cast<std::size_t>(parse_long(value, key));
  } else if (key == "agent.trunk_widths") {
    agent.trunk_widths = parse_int_list(value, key);
  } else if (key == "agent.seed") {
    agent_seed = seed();
  } else if (key == "train.episodes") {
    train_episodes = integer();
  } else if (key == "train.slots_per_episode") {
    train_slots = integer();
  } else if (key == "eval.horizon_slots") {
    eval_horizon = integer();
  } else if (key == "eval.offset_slots") {
    eval_offset = integer();
  } else if (key == "eval.seed") {
    eval_seed = seed();
  } else if (key == "runtime.kernel") {
    if (value != "auto" && value != "scalar" && value != "avx2")
      throw std::runtime_error("config key 'runtime.kernel': expected auto|scalar|avx2");
    kernel = value;
  } else {
    throw std::runtime_error("unknown config key '" + key + "'");
  }
}

ExperimentConfig ExperimentConfig::parse(
    std::istream& in, const std::string& origin,
    const std::vector<std::pair<std::string, std::string>>& overrides) {
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip(line);
    if (line.empty() || line[0] == '#') continue;
    const std::size_t sp = line.find_first_of(" \t");
    if (sp == std::string::npos)
      throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                               ": expected 'key value', got '" + line + "'");
    const std::string key = strip(line.substr(0, sp));
    const std::string value = strip(line.substr(sp + 1));
    if (value.empty())
      throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": empty value for '" +
                               key + "'");
    try {
      cfg.set(key, value);
    } catch (const std::exception& e) {
      throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  for (const auto& [key, value] : overrides) cfg.set(key, value);
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::load_file(
    const std::string& path, const std::vector<std::pair<std::string, std::string>>& overrides) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  return parse(in, path, overrides);
}

void ExperimentConfig::validate() const {
  if (topology_source == "file" && topology_file.empty())
    throw std::runtime_error("config: topology.source=file requires topology.file");
  if (traffic_source == "file" && traffic_file.empty())
    throw std::runtime_error("config: traffic.source=file requires traffic.file");
  if (traffic_days <= 0) throw std::runtime_error("config: traffic.days must be positive");
  if (!(traffic_peak_gbps >= 0.0 && traffic_peak_gbps <= kMaxDemandGbps))
    throw std::runtime_error("config: traffic.peak_gbps must be in [0, 4]");
  if (util.kind == UtilizationKind::TRACE_TABLE && util.trace_path.empty())
    throw std::runtime_error("config: util.kind=trace_table requires util.trace_file");
  cost.validate();
  agent.validate();
  FlavorSet check(flavor_list);  // throws on bad flavor lists
  if (std::abs(shares.sum() - 1.0) > 1e-9)
    throw std::runtime_error("config: shares.* must sum to 1");
  if (train_episodes <= 0) throw std::runtime_error("config: train.episodes must be positive");
  if (train_slots <= 0) throw std::runtime_error("config: train.slots_per_episode must be positive");
  if (eval_horizon <= 0) throw std::runtime_error("config: eval.horizon_slots must be positive");
}

SplitCatalog ExperimentConfig::build_catalog() const {
  SplitCatalog cat = SplitCatalog::standard(shares);
  for (const SplitOverride& ov : split_overrides) {
    SplitSpec spec = cat.spec(static_cast<SplitId>(ov.split_idx));
    if (ov.field == "hls_delay_ms")
      spec.hls_delay_req_ms = ov.value;
    else if (ov.field == "lls_delay_ms")
      spec.lls_delay_req_ms = ov.value;
    else if (ov.field == "mh_slope")
      spec.mh_slope = ov.value;
    else if (ov.field == "mh_offset_gbps")
      spec.mh_offset_gbps = ov.value;
    else if (ov.field == "fh_load_gbps")
      spec.fh_load_gbps = ov.value;
    cat.override_spec(spec);
  }
  return cat;
}

Topology ExperimentConfig::build_topology() const {
  if (topology_source == "file") return Topology::load_file(topology_file);
  return generate_waxman(waxman);
}

TrafficTrace ExperimentConfig::build_trace() const {
  int n_bs = waxman.n_ru;
  if (traffic_source == "file") return load_trace(traffic_file);
  if (topology_source == "file")
    n_bs = static_cast<int>(Topology::load_file(topology_file).ru_ids().size());
  return generate_diurnal(traffic_days, n_bs, traffic_peak_gbps, traffic_seed, traffic_noise);
}

FlavorSet ExperimentConfig::build_flavors() const { return FlavorSet(flavor_list); }

void ExperimentConfig::apply_kernel_backend() const {
  namespace k = kernels;
  if (kernel == "scalar") {
    k::set_backend(k::Backend::scalar);
  } else if (kernel == "avx2") {
    if (!k::set_backend(k::Backend::avx2))
      throw std::runtime_error("config: runtime.kernel=avx2 but the CPU lacks AVX2/FMA");
  } else {
    k::set_backend(k::detect_backend());
  }
}

void ExperimentConfig::save(std::ostream& out) const {
  out << "topology.source " << topology_source << "\n";
  if (!topology_file.empty()) out << "topology.file " << topology_file << "\n";
  out << "topology.nodes " << waxman.n_nodes << "\n";
  out << "topology.alpha " << fmt_g17(waxman.alpha) << "\n";
  out << "topology.beta " << fmt_g17(waxman.beta) << "\n";
  out << "topology.es " << waxman.n_es << "\n";
  out << "topology.fs " << waxman.n_fs << "\n";
  out << "topology.ru " << waxman.n_ru << "\n";
  out << "topology.area_km " << fmt_g17(waxman.area_km) << "\n";
  out << "topology.seed " << waxman.seed << "\n";
  out << "servers.fs_capacity_rc " << fmt_g17(waxman.fs_capacity_rc) << "\n";
  out << "servers.es_capacity_rc " << fmt_g17(waxman.es_capacity_rc) << "\n";
  out << "traffic.source " << traffic_source << "\n";
  if (!traffic_file.empty()) out << "traffic.file " << traffic_file << "\n";
  out << "traffic.days " << traffic_days << "\n";
  out << "traffic.peak_gbps " << fmt_g17(traffic_peak_gbps) << "\n";
  out << "traffic.noise " << (traffic_noise ? "on" : "off") << "\n";
  out << "traffic.seed " << traffic_seed << "\n";
  out << "flavors.list ";
  for (std::size_t i = 0; i < flavor_list.size(); ++i)
    out << (i ? "," : "") << flavor_list[i];
  out << "\n";
  out << "shares.rrc " << fmt_g17(shares.rrc) << "\n";
  out << "shares.pd " << fmt_g17(shares.pd) << "\n";
  out << "shares.hr " << fmt_g17(shares.hr) << "\n";
  out << "shares.lr " << fmt_g17(shares.lr) << "\n";
  out << "shares.hm " << fmt_g17(shares.hm) << "\n";
  out << "shares.lm " << fmt_g17(shares.lm) << "\n";
  out << "shares.hp " << fmt_g17(shares.hp) << "\n";
  out << "shares.lp " << fmt_g17(shares.lp) << "\n";
  static const char* kSplitNames[] = {"s1", "s2", "s3", "s4"};
  for (const SplitOverride& ov : split_overrides)
    out << "split." << kSplitNames[ov.split_idx] << '.' << ov.field << ' ' << fmt_g17(ov.value)
        << "\n";
  out << "util.kind "
      << (util.kind == UtilizationKind::AFFINE_NOISY ? "affine_noisy" : "trace_table") << "\n";
  out << "util.base_rc " << fmt_g17(util.base_rc) << "\n";
  out << "util.slope_rc_per_gbps " << fmt_g17(util.slope_rc_per_gbps) << "\n";
  out << "util.noise_cv " << fmt_g17(util.noise_cv) << "\n";
  out << "util.seed " << util.seed << "\n";
  if (!util.trace_path.empty()) out << "util.trace_file " << util.trace_path << "\n";
  out << "cost.kappa_ru_per_rc " << fmt_g17(cost.kappa_ru) << "\n";
  out << "cost.kappa_fs_per_rc " << fmt_g17(cost.kappa_fs) << "\n";
  out << "cost.kappa_es_per_rc " << fmt_g17(cost.kappa_es) << "\n";
  out << "cost.kappa_o_per_rc " << fmt_g17(cost.kappa_o) << "\n";
  out << "cost.kappa_d_per_unit " << fmt_g17(cost.kappa_d) << "\n";
  out << "cost.kappa_i_per_rc " << fmt_g17(cost.kappa_i) << "\n";
  out << "cost.kappa_r_per_rc " << fmt_g17(cost.kappa_r) << "\n";
  out << "cost.kappa_h_per_gbps_km " << fmt_g17(cost.kappa_h) << "\n";
  out << "cost.link_overflow_penalty " << (cost.link_overflow_penalty ? "on" : "off") << "\n";
  out << "agent.gamma " << fmt_g17(agent.gamma) << "\n";
  out << "agent.eps_max " << fmt_g17(agent.eps_max) << "\n";
  out << "agent.eps_min " << fmt_g17(agent.eps_min) << "\n";
  out << "agent.eps_knee_frac " << fmt_g17(agent.eps_knee_frac) << "\n";
  out << "agent.batch_size " << agent.batch_size << "\n";
  out << "agent.target_sync_slots " << agent.target_sync_slots << "\n";
  out << "agent.lr " << fmt_g17(agent.lr) << "\n";
  out << "agent.reward_scale " << fmt_g17(agent.reward_scale) << "\n";
  out << "agent.buffer_capacity " << agent.buffer_capacity << "\n";
  out << "agent.trunk_widths ";
  for (std::size_t i = 0; i < agent.trunk_widths.size(); ++i)
    out << (i ? "," : "") << agent.trunk_widths[i];
  out << "\n";
  out << "agent.seed " << agent_seed << "\n";
  out << "train.episodes " << train_episodes << "\n";
  out << "train.slots_per_episode " << train_slots << "\n";
  out << "eval.horizon_slots " << eval_horizon << "\n";
  out << "eval.offset_slots " << eval_offset << "\n";
  out << "eval.seed " << eval_seed << "\n";
  out << "runtime.kernel " << kernel << "\n";
}

}  // namespace vransim
