#include "vransim/agent.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "vransim/io_util.hpp"
#include "vransim/kernels.hpp"

namespace vransim {

using kernels::ops;

void AgentConfig::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::runtime_error("agent: gamma must be in (0, 1]");
  if (!(eps_min >= 0.0 && eps_min <= eps_max && eps_max <= 1.0))
    throw std::runtime_error("agent: need 0 <= eps_min <= eps_max <= 1");
  if (batch_size <= 0) throw std::runtime_error("agent: batch size must be positive");
  if (target_sync_slots <= 0) throw std::runtime_error("agent: target sync period must be positive");
  if (lr <= 0.0) throw std::runtime_error("agent: learning rate must be positive");
  if (reward_scale <= 0.0) throw std::runtime_error("agent: reward scale must be positive");
  if (buffer_capacity == 0) throw std::runtime_error("agent: buffer capacity must be positive");
}

double epsilon_for_episode(const AgentConfig& cfg, int episode, int total_episodes) {
  if (episode < 1) episode = 1;
  const double knee = std::max(1.0, cfg.eps_knee_frac * total_episodes);
  const double floor = 1.05 * cfg.eps_min;
  if (cfg.eps_max <= floor || knee <= 1.0) return std::max(cfg.eps_min, std::min(cfg.eps_max, cfg.eps_min));
  const double decay = std::pow(floor / cfg.eps_max, 1.0 / (knee - 1.0));
  return std::max(cfg.eps_min, cfg.eps_max * std::pow(decay, static_cast<double>(episode - 1)));
}

BranchingQNet::BranchingQNet(int state_dim, const std::vector<int>& trunk_widths,
                             BranchSpec branches, std::uint64_t init_seed)
    : state_dim_(state_dim), branches_(std::move(branches)) {
  if (state_dim <= 0) throw std::runtime_error("qnet: state dim must be positive");
  if (branches_.sizes.empty()) throw std::runtime_error("qnet: need at least one branch");
  if (branches_.sizes.size() != branches_.group.size())
    throw std::runtime_error("qnet: branch group list size mismatch");
  for (int s : branches_.sizes)
    if (s <= 0) throw std::runtime_error("qnet: branch sizes must be positive");

  Rng rng(init_seed);
  std::vector<int> dims;
  dims.push_back(state_dim);
  for (int w : trunk_widths) dims.push_back(w);
  if (dims.size() < 2) throw std::runtime_error("qnet: trunk needs at least one hidden layer");
  trunk = nn::Mlp(dims, nn::Act::relu, nn::Act::relu, rng);

  const int feat = trunk.out_dim();
  value_head = nn::Layer(feat, 1, nn::Act::identity);
  value_head.init(rng);
  advantage_heads.reserve(branches_.sizes.size());
  for (int s : branches_.sizes) {
    advantage_heads.emplace_back(feat, s, nn::Act::identity);
    advantage_heads.back().init(rng);
  }
}

void BranchingQNet::forward(std::span<const double> state, Forward& f) const {
  const std::vector<double>& feat = nn::mlp_forward(trunk, state, f.trunk);
  double v_pre = 0.0;
  value_head.forward(feat.data(), &v_pre, &v_pre);
  f.v = v_pre;
  f.adv.resize(advantage_heads.size());
  f.q.resize(advantage_heads.size());
  for (std::size_t c = 0; c < advantage_heads.size(); ++c) {
    const nn::Layer& head = advantage_heads[c];
    f.adv[c].resize(head.out_dim);
    f.q[c].resize(head.out_dim);
    head.forward(feat.data(), f.adv[c].data(), f.adv[c].data());
    const double mean = ops().sum(f.adv[c].data(), f.adv[c].size()) / head.out_dim;
    for (int j = 0; j < head.out_dim; ++j) f.q[c][j] = f.v + f.adv[c][j] - mean;
  }
}

std::vector<std::vector<double>> BranchingQNet::q_values(std::span<const double> state) const {
  Forward f;
  forward(state, f);
  return std::move(f.q);
}

BranchingQNet::Grads BranchingQNet::make_grads() const {
  Grads g;
  g.trunk = nn::make_grads(trunk);
  g.value.w.assign(value_head.w.size(), 0.0);
  g.value.b.assign(value_head.b.size(), 0.0);
  g.heads.resize(advantage_heads.size());
  for (std::size_t c = 0; c < advantage_heads.size(); ++c) {
    g.heads[c].w.assign(advantage_heads[c].w.size(), 0.0);
    g.heads[c].b.assign(advantage_heads[c].b.size(), 0.0);
  }
  return g;
}

void BranchingQNet::zero(Grads& g) {
  nn::zero_grads(g.trunk);
  std::fill(g.value.w.begin(), g.value.w.end(), 0.0);
  std::fill(g.value.b.begin(), g.value.b.end(), 0.0);
  for (nn::LayerGrad& h : g.heads) {
    std::fill(h.w.begin(), h.w.end(), 0.0);
    std::fill(h.b.begin(), h.b.end(), 0.0);
  }
}

void BranchingQNet::backward(std::span<const double> state, const Forward& f,
                             const std::vector<std::vector<double>>& dq, Grads& grads) const {
  const std::vector<double>& feat = f.trunk.output();
  std::vector<double> dfeat(feat.size(), 0.0);
  std::vector<double> scratch;
  double dv = 0.0;

  // Through the aggregation: dA_c = dq_c - mean(dq_c), dV += sum(dq_c).
  std::vector<double> dadv;
  for (std::size_t c = 0; c < advantage_heads.size(); ++c) {
    const nn::Layer& head = advantage_heads[c];
    const std::vector<double>& g = dq[c];
    const double gsum = ops().sum(g.data(), g.size());
    dv += gsum;
    const double gmean = gsum / head.out_dim;
    dadv.resize(head.out_dim);
    for (int j = 0; j < head.out_dim; ++j) dadv[j] = g[j] - gmean;
    scratch.resize(head.out_dim);
    head.backward(feat.data(), f.adv[c].data(), dadv.data(), grads.heads[c].w.data(),
                  grads.heads[c].b.data(), dfeat.data(), scratch.data());
  }
  scratch.resize(1);
  const double v_pre = f.v;
  value_head.backward(feat.data(), &v_pre, &dv, grads.value.w.data(), grads.value.b.data(),
                      dfeat.data(), scratch.data());

  nn::mlp_backward(trunk, state, f.trunk, dfeat, grads.trunk, nullptr, scratch);
}

std::vector<nn::ParamRef> BranchingQNet::params() {
  std::vector<nn::ParamRef> refs = nn::mlp_params(trunk, "trunk");
  refs.push_back({"value.w", &value_head.w});
  refs.push_back({"value.b", &value_head.b});
  for (std::size_t c = 0; c < advantage_heads.size(); ++c) {
    refs.push_back({"head." + std::to_string(c) + ".w", &advantage_heads[c].w});
    refs.push_back({"head." + std::to_string(c) + ".b", &advantage_heads[c].b});
  }
  return refs;
}

std::vector<const std::vector<double>*> BranchingQNet::grad_list(const Grads& g) const {
  std::vector<const std::vector<double>*> out;
  for (const nn::LayerGrad& lg : g.trunk) {
    out.push_back(&lg.w);
    out.push_back(&lg.b);
  }
  out.push_back(&g.value.w);
  out.push_back(&g.value.b);
  for (const nn::LayerGrad& lg : g.heads) {
    out.push_back(&lg.w);
    out.push_back(&lg.b);
  }
  return out;
}

void BranchingQNet::copy_params_from(const BranchingQNet& other) {
  if (arch_signature() != other.arch_signature())
    throw std::runtime_error("qnet: cannot copy parameters across architectures");
  for (std::size_t i = 0; i < trunk.layers.size(); ++i) {
    trunk.layers[i].w = other.trunk.layers[i].w;
    trunk.layers[i].b = other.trunk.layers[i].b;
  }
  value_head.w = other.value_head.w;
  value_head.b = other.value_head.b;
  for (std::size_t c = 0; c < advantage_heads.size(); ++c) {
    advantage_heads[c].w = other.advantage_heads[c].w;
    advantage_heads[c].b = other.advantage_heads[c].b;
  }
}

std::string BranchingQNet::arch_signature() const {
  std::ostringstream sig;
  sig << "bdq:in=" << state_dim_ << ";trunk=";
  for (std::size_t i = 0; i < trunk.layers.size(); ++i) {
    if (i) sig << ',';
    sig << trunk.layers[i].out_dim;
  }
  sig << ";branches=";
  for (std::size_t c = 0; c < branches_.sizes.size(); ++c) {
    if (c) sig << ',';
    sig << branches_.sizes[c] << '@' << branches_.group[c];
  }
  return sig.str();
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw std::runtime_error("replay buffer: capacity must be positive");
}

void ReplayBuffer::add(Transition t) {
  if (data_.size() < capacity_) {
    data_.push_back(std::move(t));
  } else {
    data_[next_] = std::move(t);
  }
  next_ = (next_ + 1) % capacity_;
}

std::vector<const Transition*> ReplayBuffer::sample(int batch, Rng& rng) const {
  if (static_cast<std::size_t>(batch) > data_.size())
    throw std::runtime_error("replay buffer: not enough transitions to sample");
  std::vector<const Transition*> out(batch);
  for (int i = 0; i < batch; ++i) out[i] = &data_[rng.uniform_int(static_cast<int>(data_.size()))];
  return out;
}

LarvAgent::LarvAgent(int state_dim, BranchSpec branches, const AgentConfig& cfg, std::uint64_t seed)
    : cfg_(cfg),
      online_(state_dim, cfg.trunk_widths, branches, seed_stream(seed, 0x494e4954u)),
      target_(state_dim, cfg.trunk_widths, branches, seed_stream(seed, 0x494e4954u)),
      adam_({cfg.lr, 0.9, 0.999, 1e-8}, online_.params()),
      grads_(online_.make_grads()) {
  cfg_.validate();
  target_.copy_params_from(online_);
}

std::vector<int> LarvAgent::select_action(std::span<const double> state, double eps,
                                          Rng& rng) const {
  const BranchSpec& spec = online_.branches();
  std::vector<int> action(spec.sizes.size());
  if (eps > 0.0 && rng.uniform() < eps) {
    for (std::size_t c = 0; c < spec.sizes.size(); ++c) action[c] = rng.uniform_int(spec.sizes[c]);
    return action;
  }
  const auto q = online_.q_values(state);
  for (std::size_t c = 0; c < q.size(); ++c) {
    int best = 0;
    for (int j = 1; j < static_cast<int>(q[c].size()); ++j)
      if (q[c][j] > q[c][best]) best = j;  // ties toward the smallest index
    action[c] = best;
  }
  return action;
}

std::vector<double> LarvAgent::td_targets(const std::vector<const Transition*>& batch) const {
  const std::vector<double> weights = online_.branches().weights();
  std::vector<double> u(batch.size());
  BranchingQNet::Forward online_f, target_f;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Transition& t = *batch[i];
    if (t.done) {
      u[i] = t.reward;
      continue;
    }
    online_.forward(t.next_state, online_f);
    target_.forward(t.next_state, target_f);
    double boot = 0.0;
    for (std::size_t c = 0; c < online_f.q.size(); ++c) {
      int best = 0;
      const std::vector<double>& qa = online_f.q[c];
      for (int j = 1; j < static_cast<int>(qa.size()); ++j)
        if (qa[j] > qa[best]) best = j;
      boot += weights[c] * target_f.q[c][best];
    }
    u[i] = t.reward + cfg_.gamma * boot;
  }
  return u;
}

double LarvAgent::train_step(const ReplayBuffer& buffer, Rng& rng) {
  const auto batch = buffer.sample(cfg_.batch_size, rng);
  const std::vector<double> u = td_targets(batch);
  const std::vector<double> weights = online_.branches().weights();
  const double inv_batch = 1.0 / static_cast<double>(batch.size());

  BranchingQNet::zero(grads_);
  BranchingQNet::Forward f;
  std::vector<std::vector<double>> dq(online_.branches().sizes.size());
  for (std::size_t c = 0; c < dq.size(); ++c) dq[c].resize(online_.branches().sizes[c]);

  double loss = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Transition& t = *batch[i];
    online_.forward(t.state, f);
    for (auto& v : dq) std::fill(v.begin(), v.end(), 0.0);
    for (std::size_t c = 0; c < dq.size(); ++c) {
      const int a = t.action[c];
      const double residual = u[i] - f.q[c][a];
      loss += weights[c] * residual * residual * inv_batch;
      dq[c][a] = -2.0 * weights[c] * residual * inv_batch;
    }
    online_.backward(t.state, f, dq, grads_);
  }
  adam_.step(online_.params(), online_.grad_list(grads_));
  return loss;
}

void LarvAgent::sync_target() { target_.copy_params_from(online_); }

void LarvAgent::save(const std::string& path) {
  nn::save_checkpoint(path, online_.arch_signature(), online_.params());
}

void LarvAgent::load(const std::string& path) {
  nn::load_checkpoint(path, online_.arch_signature(), online_.params());
  sync_target();
}

void write_training_csv(const std::string& path, const std::vector<EpisodeMetrics>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("training metrics: cannot write " + path);
  out << "episode,return,cost_total,cost_declined,cost_overprov,cost_reconf,cost_routing,"
         "epsilon,mean_loss\n";
  for (const EpisodeMetrics& r : rows) {
    out << r.episode << ',' << fmt_g17(r.episodic_return) << ',' << fmt_g17(r.cost_total) << ','
        << fmt_g17(r.cost_declined) << ',' << fmt_g17(r.cost_overprov) << ','
        << fmt_g17(r.cost_reconf) << ',' << fmt_g17(r.cost_routing) << ',' << fmt_g17(r.epsilon)
        << ',' << fmt_g17(r.mean_loss) << "\n";
  }
  if (!out.good()) throw std::runtime_error("training metrics: write failed for " + path);
}

TrainingResult run_training(Environment& env, LarvAgent& agent, int episodes, std::uint64_t seed,
                            const std::optional<std::string>& init_checkpoint) {
  AgentConfig cfg = agent.config();
  if (init_checkpoint) {
    agent.load(*init_checkpoint);
    cfg.eps_max = std::max(0.1, cfg.eps_min);  // warm start explores less
  }
  const BranchSpec spec = env.action_space_spec();
  if (spec.sizes != agent.online().branches().sizes)
    throw std::runtime_error("run_training: agent and environment branch specs differ");

  ReplayBuffer buffer(cfg.buffer_capacity);
  Rng explore_rng(seed_stream(seed, 0x41435431u));
  Rng sample_rng(seed_stream(seed, 0x53414d50u));

  TrainingResult result;
  result.episodes.reserve(episodes);
  std::int64_t global_slots = 0;

  for (int e = 1; e <= episodes; ++e) {
    const double eps = epsilon_for_episode(cfg, e, episodes);
    State s = env.reset(seed_stream(seed, 0x45505300u, static_cast<std::uint64_t>(e)));
    std::vector<double> enc = env.encode_state(s);

    EpisodeMetrics em;
    em.episode = e;
    em.epsilon = eps;
    double loss_sum = 0.0;
    int loss_count = 0;
    Action prev_enacted;
    bool have_prev = false;

    bool done = false;
    while (!done) {
      const std::vector<int> branch_action = agent.select_action(enc, eps, explore_rng);
      const Action action = env.action_from_indices(branch_action);
      const StepResult step = env.step(action);
      done = step.done;

      std::vector<double> next_enc = env.encode_state(step.next_state);
      Transition t;
      t.state = enc;
      t.action = branch_action;
      t.reward = step.reward / cfg.reward_scale;
      t.next_state = next_enc;
      t.done = done;
      buffer.add(std::move(t));

      if (buffer.size() >= static_cast<std::size_t>(cfg.batch_size)) {
        loss_sum += agent.train_step(buffer, sample_rng);
        ++loss_count;
      }
      ++global_slots;
      if (global_slots % cfg.target_sync_slots == 0) agent.sync_target();

      em.episodic_return += step.reward;
      em.cost_total += step.breakdown.total_j;
      em.cost_computing += step.breakdown.computing;
      em.cost_declined += step.breakdown.declined;
      em.cost_overprov += step.breakdown.overprovisioning;
      em.cost_instantiation += step.breakdown.instantiation;
      em.cost_reconf += step.breakdown.reconfiguration;
      em.cost_routing += step.breakdown.routing;
      if (have_prev && !(action == prev_enacted)) ++em.reconfig_events;
      prev_enacted = action;
      have_prev = true;

      enc = std::move(next_enc);
    }
    em.mean_loss = loss_count > 0 ? loss_sum / loss_count : 0.0;
    result.episodes.push_back(em);
  }
  return result;
}

}  // namespace vransim
