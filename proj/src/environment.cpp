#include "vransim/environment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vransim/rng.hpp"

namespace vransim {

int BranchSpec::n_groups() const {
  int mx = -1;
  for (int g : group) mx = std::max(mx, g);
  return mx + 1;
}

int BranchSpec::total_outputs() const {
  int total = 0;
  for (int s : sizes) total += s;
  return total;
}

double BranchSpec::joint_log10() const {
  double l = 0.0;
  for (int s : sizes) l += std::log10(static_cast<double>(s));
  return l;
}

std::vector<double> BranchSpec::weights() const {
  const int k = n_groups();
  std::vector<int> per_group(k, 0);
  for (int g : group) ++per_group[g];
  std::vector<double> w(sizes.size());
  for (std::size_t c = 0; c < sizes.size(); ++c)
    w[c] = 1.0 / (static_cast<double>(k) * per_group[group[c]]);
  return w;
}

Environment::Environment(const Topology& topo, SplitCatalog catalog, FlavorSet flavors,
                         UtilizationModelSpec util_spec, CostParams cost_params,
                         const TrafficTrace& trace, int window_offset, int window_slots)
    : topo_(&topo),
      catalog_(std::move(catalog)),
      flavors_(std::move(flavors)),
      util_(util_spec, catalog_),
      cost_params_(cost_params),
      trace_(&trace),
      window_offset_(window_offset),
      window_slots_(window_slots) {
  cost_params_.validate();
  if (topo_->ru_ids().empty() || topo_->es_ids().empty() || topo_->fs_ids().empty())
    throw std::runtime_error("environment: topology needs at least one RU, FS and ES");
  if (trace_->n_bs() != n_bs())
    throw std::runtime_error("environment: trace has " + std::to_string(trace_->n_bs()) +
                             " BSs, topology has " + std::to_string(n_bs()) + " RUs");
  if (window_offset_ < 0 || window_slots_ <= 0 ||
      window_offset_ + window_slots_ > trace_->n_slots())
    throw std::runtime_error("environment: trace window out of range");

  auto capacity = [&](int id) {
    const auto& c = topo_->node(id).compute_capacity_rc;
    if (!c) throw std::runtime_error("environment: node " + std::to_string(id) +
                                     " is a server but has no compute capacity");
    return *c;
  };
  for (int fs : topo_->fs_ids()) caps_.fs_capacity_rc.push_back(capacity(fs));
  for (int es : topo_->es_ids()) caps_.es_capacity_rc.push_back(capacity(es));

  auto seg = [&](int src, int dst) {
    const PathResult p = topo_->shortest_path(src, dst);
    return Segment{p.total_delay_ms, p.total_length_km, p.links};
  };
  const auto& es = topo_->es_ids();
  const auto& fs = topo_->fs_ids();
  const auto& ru = topo_->ru_ids();
  p0m_.resize(es.size());
  pml_.assign(es.size(), std::vector<Segment>(fs.size()));
  pmk_.assign(es.size(), std::vector<Segment>(ru.size()));
  plk_.assign(fs.size(), std::vector<Segment>(ru.size()));
  for (std::size_t m = 0; m < es.size(); ++m) {
    p0m_[m] = seg(topo_->epc_id(), es[m]);
    for (std::size_t l = 0; l < fs.size(); ++l) pml_[m][l] = seg(es[m], fs[l]);
    for (std::size_t k = 0; k < ru.size(); ++k) pmk_[m][k] = seg(es[m], ru[k]);
  }
  for (std::size_t l = 0; l < fs.size(); ++l)
    for (std::size_t k = 0; k < ru.size(); ++k) plk_[l][k] = seg(fs[l], ru[k]);
}

BranchSpec Environment::action_space_spec() const {
  BranchSpec spec;
  for (int k = 0; k < n_bs(); ++k) {
    spec.sizes.insert(spec.sizes.end(),
                      {kNumSplits, flavors_.size(), flavors_.size(), n_fs(), n_es()});
    for (int c = 0; c < kBranchesPerBs; ++c) spec.group.push_back(k);
  }
  return spec;
}

int Environment::encoded_dim() const {
  return n_bs() * (1 + kNumSplits + 2 + n_fs() + n_es());
}

std::vector<double> Environment::encode_state(const State& s) const {
  std::vector<double> v;
  v.reserve(encoded_dim());
  const double max_rc = static_cast<double>(flavors_.max_rc());
  for (int k = 0; k < n_bs(); ++k) {
    const BsAction& a = s.prev_action.bs[k];
    v.push_back(s.demands_gbps[k] / kMaxDemandGbps);
    for (int i = 0; i < kNumSplits; ++i) v.push_back(i == a.split_idx ? 1.0 : 0.0);
    v.push_back(max_rc > 0 ? flavors_.rc(a.x_idx) / max_rc : 0.0);
    v.push_back(max_rc > 0 ? flavors_.rc(a.y_idx) / max_rc : 0.0);
    for (int l = 0; l < n_fs(); ++l) v.push_back(l == a.z_idx ? 1.0 : 0.0);
    for (int m = 0; m < n_es(); ++m) v.push_back(m == a.zeta_idx ? 1.0 : 0.0);
  }
  return v;
}

Action Environment::action_from_indices(const std::vector<int>& branch_indices) const {
  if (branch_indices.size() != static_cast<std::size_t>(n_bs()) * kBranchesPerBs)
    throw std::runtime_error("action_from_indices: wrong branch count");
  Action a;
  a.bs.resize(n_bs());
  for (int k = 0; k < n_bs(); ++k) {
    const int* idx = branch_indices.data() + static_cast<std::size_t>(k) * kBranchesPerBs;
    a.bs[k] = {idx[0], idx[1], idx[2], idx[3], idx[4]};
  }
  validate_action(a);
  return a;
}

std::vector<int> Environment::indices_from_action(const Action& a) const {
  std::vector<int> idx;
  idx.reserve(static_cast<std::size_t>(n_bs()) * kBranchesPerBs);
  for (const BsAction& b : a.bs) {
    idx.push_back(b.split_idx);
    idx.push_back(b.x_idx);
    idx.push_back(b.y_idx);
    idx.push_back(b.z_idx);
    idx.push_back(b.zeta_idx);
  }
  return idx;
}

void Environment::validate_action(const Action& a) const {
  if (a.bs.size() != static_cast<std::size_t>(n_bs()))
    throw std::runtime_error("action: wrong BS count");
  for (const BsAction& b : a.bs) {
    if (b.split_idx < 0 || b.split_idx >= kNumSplits || b.x_idx < 0 ||
        b.x_idx >= flavors_.size() || b.y_idx < 0 || b.y_idx >= flavors_.size() ||
        b.z_idx < 0 || b.z_idx >= n_fs() || b.zeta_idx < 0 || b.zeta_idx >= n_es())
      throw std::runtime_error("action: sub-action index out of range");
  }
}

State Environment::reset(std::uint64_t episode_seed) {
  episode_seed_ = episode_seed;
  Rng rng(seed_stream(episode_seed, 0x52455345u));  // location stream
  State s;
  s.slot = 0;
  s.demands_gbps.resize(n_bs());
  for (int k = 0; k < n_bs(); ++k) s.demands_gbps[k] = demand(0, k);
  s.prev_action.bs.resize(n_bs());
  for (int k = 0; k < n_bs(); ++k) {
    BsAction& b = s.prev_action.bs[k];
    b.split_idx = static_cast<int>(SplitId::S1);
    b.x_idx = flavors_.size() - 1;  // max(X)
    b.y_idx = flavors_.size() - 1;
    b.z_idx = rng.uniform_int(n_fs());
    b.zeta_idx = rng.uniform_int(n_es());
  }
  state_ = s;
  return s;
}

std::vector<BsCostInput> Environment::cost_inputs(const State& s, const Action& a,
                                                  std::uint64_t episode_seed) const {
  validate_action(a);
  std::vector<BsCostInput> inputs(n_bs());
  for (int k = 0; k < n_bs(); ++k) {
    const BsAction& act = a.bs[k];
    const BsAction& prev = s.prev_action.bs[k];
    BsCostInput& in = inputs[k];
    in.split = static_cast<SplitId>(act.split_idx);
    in.demand_gbps = s.demands_gbps[k];
    in.util = util_.sample(in.demand_gbps, in.split,
                           seed_stream(episode_seed, static_cast<std::uint64_t>(s.slot),
                                       static_cast<std::uint64_t>(k)));
    in.x_rc = flavors_.rc(act.x_idx);
    in.y_rc = flavors_.rc(act.y_idx);
    in.z_idx = act.z_idx;
    in.zeta_idx = act.zeta_idx;
    in.prev_x_rc = flavors_.rc(prev.x_idx);
    in.prev_y_rc = flavors_.rc(prev.y_idx);
    in.prev_z_idx = prev.z_idx;
    in.prev_zeta_idx = prev.zeta_idx;

    const Segment& bh = p0m_[act.zeta_idx];
    in.d_p0m_ms = bh.delay_ms;
    in.len_p0m_km = bh.length_km;
    in.has_fs_segments = catalog_.spec(in.split).uses_fs;
    if (in.has_fs_segments) {
      const Segment& mh = pml_[act.zeta_idx][act.z_idx];
      const Segment& fh = plk_[act.z_idx][k];
      in.d_pml_ms = mh.delay_ms;
      in.len_pml_km = mh.length_km;
      in.d_plk_ms = fh.delay_ms;
      in.len_plk_km = fh.length_km;
    } else {
      const Segment& mh = pmk_[act.zeta_idx][k];
      in.d_pmk_ms = mh.delay_ms;
      in.len_pmk_km = mh.length_km;
    }
  }
  return inputs;
}

std::vector<BsCostInput> Environment::static_cost_inputs(const std::vector<double>& demands,
                                                         const Action& a) const {
  if (demands.size() != static_cast<std::size_t>(n_bs()))
    throw std::runtime_error("static_cost_inputs: demand vector size mismatch");
  State s;
  s.slot = 0;
  s.demands_gbps = demands;
  s.prev_action = a;
  std::vector<BsCostInput> inputs = cost_inputs(s, a, 0);
  for (int k = 0; k < n_bs(); ++k)
    inputs[k].util = util_.mean(demands[k], inputs[k].split);
  return inputs;
}

std::vector<LinkLoad> Environment::link_loads(const Action& a, const State& s) const {
  std::vector<LinkLoad> loads(topo_->links().size());
  for (std::size_t li = 0; li < loads.size(); ++li)
    loads[li].capacity_gbps = topo_->links()[li].capacity_gbps;
  for (int k = 0; k < n_bs(); ++k) {
    const BsAction& act = a.bs[k];
    const SplitId split = static_cast<SplitId>(act.split_idx);
    const XhaulLoads x = catalog_.xhaul_loads(split, s.demands_gbps[k]);
    for (int li : p0m_[act.zeta_idx].links) loads[li].load_gbps += x.bh_gbps;
    if (catalog_.spec(split).uses_fs) {
      for (int li : pml_[act.zeta_idx][act.z_idx].links) loads[li].load_gbps += x.mh_gbps;
      for (int li : plk_[act.z_idx][k].links) loads[li].load_gbps += x.fh_gbps;
    } else {
      for (int li : pmk_[act.zeta_idx][k].links) loads[li].load_gbps += x.mh_gbps;
    }
  }
  return loads;
}

StepResult Environment::step(const Action& action) {
  if (state_.demands_gbps.empty())
    throw std::runtime_error("environment: step before reset");
  const std::vector<BsCostInput> inputs = cost_inputs(state_, action, episode_seed_);
  std::vector<LinkLoad> links;
  if (cost_params_.link_overflow_penalty) links = link_loads(action, state_);

  StepResult out;
  out.breakdown = evaluate_cost(cost_params_, inputs, caps_, catalog_, links);
  out.reward = out.breakdown.reward;
  out.done = state_.slot + 1 >= window_slots_;

  out.next_state.slot = state_.slot + 1;
  out.next_state.prev_action = action;
  out.next_state.demands_gbps.resize(n_bs());
  for (int k = 0; k < n_bs(); ++k)
    out.next_state.demands_gbps[k] = out.done ? 0.0 : demand(state_.slot + 1, k);

  state_ = out.next_state;
  return out;
}

}  // namespace vransim
