#include "vransim/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace vransim {

Policy static_policy(Action fixed) {
  return [fixed = std::move(fixed)](const State&) { return fixed; };
}

Policy random_policy(const Environment& env, std::uint64_t seed) {
  const BranchSpec spec = env.action_space_spec();
  auto rng = std::make_shared<Rng>(seed);
  const Environment* e = &env;
  return [spec, rng, e](const State&) {
    std::vector<int> idx(spec.sizes.size());
    for (std::size_t c = 0; c < spec.sizes.size(); ++c) idx[c] = rng->uniform_int(spec.sizes[c]);
    return e->action_from_indices(idx);
  };
}

Policy greedy_policy(const LarvAgent& agent, const Environment& env) {
  const LarvAgent* a = &agent;
  const Environment* e = &env;
  return [a, e](const State& s) {
    Rng unused(0);
    return e->action_from_indices(a->select_action(e->encode_state(s), 0.0, unused));
  };
}

double static_joint_cost(const Environment& env, const std::vector<double>& demands,
                         const Action& action) {
  const auto inputs = env.static_cost_inputs(demands, action);
  return evaluate_cost(env.cost_params(), inputs, env.server_caps(), env.catalog()).total_j;
}

namespace {

struct Candidate {
  BsAction act;
  double slice_cost = 0.0;
  double x_rc = 0.0;
  double y_rc = 0.0;
};

// Per-BS static cost slice: everything except the shared FS/ES capacity
// terms (those are joint and handled by the repair / exact stage).
std::vector<Candidate> enumerate_candidates(const Environment& env, int k, double peak_demand) {
  const SplitCatalog& cat = env.catalog();
  const FlavorSet& fl = env.flavors();
  ServerCaps no_caps;
  no_caps.fs_capacity_rc.assign(env.n_fs(), std::numeric_limits<double>::infinity());
  no_caps.es_capacity_rc.assign(env.n_es(), std::numeric_limits<double>::infinity());

  std::vector<Candidate> out;
  out.reserve(static_cast<std::size_t>(kNumSplits) * fl.size() * fl.size() * env.n_fs() *
              env.n_es());
  Action joint;
  joint.bs.resize(env.n_bs());
  std::vector<double> demands(env.n_bs(), 0.0);
  for (int i = 0; i < kNumSplits; ++i)
    for (int x = 0; x < fl.size(); ++x)
      for (int y = 0; y < fl.size(); ++y)
        for (int z = 0; z < env.n_fs(); ++z)
          for (int m = 0; m < env.n_es(); ++m) {
            Candidate c;
            c.act = {i, x, y, z, m};
            demands[k] = peak_demand;
            joint.bs[k] = c.act;
            // Build the single-BS input via the environment so routes and
            // utilization match the evaluation path exactly.
            auto inputs = env.static_cost_inputs(demands, joint);
            const std::span<const BsCostInput> one(&inputs[k], 1);
            c.slice_cost = computing_cost(env.cost_params(), one) +
                           overprovisioning_cost(env.cost_params(), one) +
                           declined_cost(env.cost_params(), one, no_caps, cat) +
                           routing_cost(env.cost_params(), one, cat);
            c.x_rc = inputs[k].x_rc;
            c.y_rc = inputs[k].y_rc;
            out.push_back(c);
          }
  return out;
}

BspResult exact_search(const Environment& env, const std::vector<double>& peaks,
                       const std::vector<std::vector<Candidate>>& cands) {
  const int K = env.n_bs();
  const auto& caps = env.server_caps();
  const double kappa_d = env.cost_params().kappa_d;

  std::vector<int> pick(K, 0), best_pick(K, 0);
  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<double> fs_alloc(env.n_fs(), 0.0), es_alloc(env.n_es(), 0.0);

  // Depth-first over BS0 (outermost) .. BS{K-1}; first strict improvement
  // wins, so ties resolve to the lexicographically first tuple.
  std::function<void(int, double)> rec = [&](int k, double acc) {
    if (k == K) {
      double cap_pen = 0.0;
      for (int l = 0; l < env.n_fs(); ++l)
        cap_pen += kappa_d * std::max(0.0, fs_alloc[l] - caps.fs_capacity_rc[l]);
      for (int m = 0; m < env.n_es(); ++m)
        cap_pen += kappa_d * std::max(0.0, es_alloc[m] - caps.es_capacity_rc[m]);
      const double total = acc + cap_pen;
      if (total < best_cost) {
        best_cost = total;
        best_pick = pick;
      }
      return;
    }
    for (std::size_t i = 0; i < cands[k].size(); ++i) {
      const Candidate& c = cands[k][i];
      if (acc + c.slice_cost >= best_cost) continue;  // penalties are non-negative
      pick[k] = static_cast<int>(i);
      fs_alloc[c.act.z_idx] += c.x_rc;
      es_alloc[c.act.zeta_idx] += c.y_rc;
      rec(k + 1, acc + c.slice_cost);
      fs_alloc[c.act.z_idx] -= c.x_rc;
      es_alloc[c.act.zeta_idx] -= c.y_rc;
    }
  };
  rec(0, 0.0);

  BspResult res;
  res.used_exact = true;
  res.peak_demands = peaks;
  res.action.bs.resize(K);
  for (int k = 0; k < K; ++k) res.action.bs[k] = cands[k][best_pick[k]].act;
  res.static_cost = static_joint_cost(env, peaks, res.action);
  return res;
}

BspResult greedy_search(const Environment& env, const std::vector<double>& peaks,
                        const std::vector<std::vector<Candidate>>& cands) {
  const int K = env.n_bs();
  std::vector<std::vector<std::size_t>> order(K);  // candidate ranks per BS
  for (int k = 0; k < K; ++k) {
    order[k].resize(cands[k].size());
    for (std::size_t i = 0; i < order[k].size(); ++i) order[k][i] = i;
    std::stable_sort(order[k].begin(), order[k].end(), [&](std::size_t a, std::size_t b) {
      return cands[k][a].slice_cost < cands[k][b].slice_cost;
    });
  }

  // Assign the most expensive BSs first so they get first pick of capacity.
  std::vector<int> bs_order(K);
  for (int k = 0; k < K; ++k) bs_order[k] = k;
  std::stable_sort(bs_order.begin(), bs_order.end(), [&](int a, int b) {
    return cands[a][order[a][0]].slice_cost > cands[b][order[b][0]].slice_cost;
  });

  std::vector<double> rem_fs = env.server_caps().fs_capacity_rc;
  std::vector<double> rem_es = env.server_caps().es_capacity_rc;
  BspResult res;
  res.peak_demands = peaks;
  res.action.bs.resize(K);
  for (int k : bs_order) {
    bool placed = false;
    for (std::size_t rank = 0; rank < order[k].size(); ++rank) {
      const Candidate& c = cands[k][order[k][rank]];
      if (c.x_rc <= rem_fs[c.act.z_idx] && c.y_rc <= rem_es[c.act.zeta_idx]) {
        rem_fs[c.act.z_idx] -= c.x_rc;
        rem_es[c.act.zeta_idx] -= c.y_rc;
        res.action.bs[k] = c.act;
        if (rank != 0) res.repair_triggered = true;
        placed = true;
        break;
      }
    }
    if (!placed) {
      std::ostringstream msg;
      msg << "bsp_search: no feasible placement for BS " << k << "; remaining capacity fs=[";
      for (int l = 0; l < env.n_fs(); ++l) msg << (l ? "," : "") << rem_fs[l];
      msg << "] es=[";
      for (int m = 0; m < env.n_es(); ++m) msg << (m ? "," : "") << rem_es[m];
      msg << "]";
      throw std::runtime_error(msg.str());
    }
  }
  res.static_cost = static_joint_cost(env, peaks, res.action);
  return res;
}

}  // namespace

BspResult bsp_search(const Environment& env, const BspOptions& opts) {
  const int K = env.n_bs();
  std::vector<double> peaks(K, 0.0);
  for (int s = 0; s < env.horizon(); ++s)
    for (int k = 0; k < K; ++k) peaks[k] = std::max(peaks[k], env.demand(s, k));

  std::vector<std::vector<Candidate>> cands(K);
  for (int k = 0; k < K; ++k) cands[k] = enumerate_candidates(env, k, peaks[k]);

  double joint_log10 = 0.0;
  for (int k = 0; k < K; ++k) joint_log10 += std::log10(static_cast<double>(cands[k].size()));
  const bool exact = opts.mode == BspOptions::Mode::exact ||
                     (opts.mode == BspOptions::Mode::automatic &&
                      joint_log10 <= std::log10(opts.exact_limit));
  return exact ? exact_search(env, peaks, cands) : greedy_search(env, peaks, cands);
}

MdqAgent::MdqAgent(int state_dim, const BranchSpec& spec, const AgentConfig& cfg,
                   std::uint64_t seed)
    : spec_(spec) {
  agents_.reserve(spec.sizes.size());
  for (std::size_t c = 0; c < spec.sizes.size(); ++c) {
    BranchSpec single;
    single.sizes = {spec.sizes[c]};
    single.group = {0};
    agents_.emplace_back(state_dim, single, cfg, seed_stream(seed, 0x4d4451u, c));
  }
}

std::vector<int> MdqAgent::select_action(std::span<const double> state, double eps,
                                         Rng& rng) const {
  std::vector<int> idx(agents_.size());
  for (std::size_t c = 0; c < agents_.size(); ++c)
    idx[c] = agents_[c].select_action(state, eps, rng)[0];
  return idx;
}

Policy greedy_mdq_policy(const MdqAgent& agent, const Environment& env) {
  const MdqAgent* a = &agent;
  const Environment* e = &env;
  return [a, e](const State& s) {
    Rng unused(0);
    return e->action_from_indices(a->select_action(e->encode_state(s), 0.0, unused));
  };
}

TrainingResult run_mdq_training(Environment& env, MdqAgent& agent, int episodes,
                                std::uint64_t seed) {
  const AgentConfig& cfg = agent.agents().front().config();
  const BranchSpec spec = env.action_space_spec();
  if (spec.sizes != agent.branches().sizes)
    throw std::runtime_error("run_mdq_training: agent and environment branch specs differ");

  const std::size_t n_agents = agent.agents().size();
  std::vector<ReplayBuffer> buffers(n_agents, ReplayBuffer(cfg.buffer_capacity));
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

      for (std::size_t c = 0; c < n_agents; ++c) {
        Transition t;
        t.state = enc;
        t.action = {branch_action[c]};
        t.reward = step.reward / cfg.reward_scale;
        t.next_state = next_enc;
        t.done = done;
        buffers[c].add(std::move(t));
        if (buffers[c].size() >= static_cast<std::size_t>(cfg.batch_size)) {
          loss_sum += agent.agents()[c].train_step(buffers[c], sample_rng);
          ++loss_count;
        }
      }
      ++global_slots;
      if (global_slots % cfg.target_sync_slots == 0)
        for (LarvAgent& a : agent.agents()) a.sync_target();

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
