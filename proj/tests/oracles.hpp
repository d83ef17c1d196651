// Test-side reference implementations, kept independent of the library
// code paths they check: a straight-line transcription of the cost terms, a
// plain dueling/double-DQN reference, and finite-difference gradients.
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "vransim/agent.hpp"
#include "vransim/rng.hpp"

namespace oracle {

struct Fees {
  double kru = 1.0, kfs = 0.5, kes = 0.25, ko = 1.0, kd = 5.0, ki = 0.1, kr = 0.1, kh = 1.0;
};

struct Bs {
  int split = 0;  // 0=S1, 1=S2, 2=S3, 3=S4
  double lambda = 0.0;
  double w_hat = 0.0, x_hat = 0.0, y_hat = 0.0;
  double x = 0.0, y = 0.0;
  int z = 0, zeta = 0;
  double px = 0.0, py = 0.0;
  int pz = 0, pzeta = 0;
  double d_p0m = 0.0, l_p0m = 0.0;
  double d_pml = 0.0, l_pml = 0.0;
  double d_plk = 0.0, l_plk = 0.0;
  double d_pmk = 0.0, l_pmk = 0.0;
};

struct Terms {
  double computing = 0, overprov = 0, declined = 0, inst = 0, reconf = 0, routing = 0;
  double total() const { return computing + overprov + declined + inst + reconf + routing; }
};

// One equation at a time, written down from scratch.
inline Terms total_cost(const Fees& f, const std::vector<Bs>& bs, const std::vector<double>& H_fs,
                        const std::vector<double>& H_es) {
  Terms t;

  for (const Bs& b : bs) t.computing += f.kru * b.w_hat + f.kfs * b.x_hat + f.kes * b.y_hat;

  for (const Bs& b : bs)
    t.overprov += f.ko * (std::max(0.0, b.x - b.x_hat) + std::max(0.0, b.y - b.y_hat));

  for (std::size_t l = 0; l < H_fs.size(); ++l) {
    double alloc = 0.0;
    for (const Bs& b : bs)
      if (b.z == static_cast<int>(l)) alloc += b.x;
    t.declined += f.kd * std::max(0.0, alloc - H_fs[l]);
  }
  for (std::size_t m = 0; m < H_es.size(); ++m) {
    double alloc = 0.0;
    for (const Bs& b : bs)
      if (b.zeta == static_cast<int>(m)) alloc += b.y;
    t.declined += f.kd * std::max(0.0, alloc - H_es[m]);
  }
  for (const Bs& b : bs) {
    const double dH = b.split == 0 ? 10.0 : b.split == 1 ? 1.0 : 0.25;
    const double dL = 0.25;
    double excess;
    if (b.split == 3)
      excess = std::max(0.0, b.d_pmk - 0.25);
    else
      excess = std::max({0.0, b.d_pml - dH, b.d_plk - dL});
    t.declined += f.kd * excess;
    t.declined += f.kd * std::max({0.0, b.x_hat - b.x, b.y_hat - b.y});
  }

  for (const Bs& b : bs)
    t.inst += f.ki * (std::max(0.0, b.x - b.px) + std::max(0.0, b.y - b.py));

  for (const Bs& b : bs) {
    double r = std::abs(b.x - b.px) + std::abs(b.y - b.py);
    if (b.z != b.pz) r += b.x;
    if (b.zeta != b.pzeta) r += b.y;
    t.reconf += f.kr * r;
  }

  for (const Bs& b : bs) {
    const double r_bh = b.lambda;
    double r_mh, r_fh;
    switch (b.split) {
      case 0:
      case 1:
        r_mh = b.lambda;
        r_fh = 10.1;
        break;
      case 2:
        r_mh = 1.02 * b.lambda + 0.5;
        r_fh = 10.1;
        break;
      default:
        r_mh = 157.3;
        r_fh = 0.0;
    }
    double c = r_bh * b.l_p0m;
    if (b.split == 3)
      c += r_mh * b.l_pmk;
    else
      c += r_mh * b.l_pml + r_fh * b.l_plk;
    t.routing += f.kh * c;
  }
  return t;
}

// ---------------------------------------------------------------------------
// Reference dueling / double-DQN over the raw parameters of a single-branch
// BranchingQNet, computed with hand-rolled loops.

inline std::vector<double> ref_dense(const vransim::nn::Layer& layer,
                                     const std::vector<double>& x, bool relu) {
  std::vector<double> y(layer.out_dim, 0.0);
  for (int r = 0; r < layer.out_dim; ++r) {
    double acc = layer.b[r];
    for (int c = 0; c < layer.in_dim; ++c)
      acc += layer.w[static_cast<std::size_t>(r) * layer.in_dim + c] * x[c];
    y[r] = relu && acc < 0.0 ? 0.0 : acc;
  }
  return y;
}

// Dueling aggregation: Q(a) = V + A(a) - mean_a' A(a').
inline std::vector<double> ref_dueling_q(const vransim::BranchingQNet& net,
                                         const std::vector<double>& state, int branch = 0) {
  std::vector<double> h = state;
  for (const auto& layer : net.trunk.layers) h = ref_dense(layer, h, true);
  const double v = ref_dense(net.value_head, h, false)[0];
  const std::vector<double> a = ref_dense(net.advantage_heads[branch], h, false);
  double mean = 0.0;
  for (double ai : a) mean += ai;
  mean /= static_cast<double>(a.size());
  std::vector<double> q(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) q[j] = v + a[j] - mean;
  return q;
}

// Double-DQN target: u = r + gamma * Qt(s', argmax_a Qo(s', a)).
inline double ref_ddqn_target(const vransim::BranchingQNet& online,
                              const vransim::BranchingQNet& target,
                              const std::vector<double>& next_state, double reward, double gamma,
                              bool done) {
  if (done) return reward;
  const std::vector<double> qo = ref_dueling_q(online, next_state);
  int best = 0;
  for (std::size_t j = 1; j < qo.size(); ++j)
    if (qo[j] > qo[best]) best = static_cast<int>(j);
  const std::vector<double> qt = ref_dueling_q(target, next_state);
  return reward + gamma * qt[best];
}

// Plain DQN target: u = r + gamma * max_a Qt(s', a).
inline double ref_dqn_target(const vransim::BranchingQNet& target,
                             const std::vector<double>& next_state, double reward, double gamma,
                             bool done) {
  if (done) return reward;
  const std::vector<double> qt = ref_dueling_q(target, next_state);
  double best = qt[0];
  for (double q : qt) best = std::max(best, q);
  return reward + gamma * best;
}

// ---------------------------------------------------------------------------
// Flattened-parameter helpers for finite-difference checks.

inline std::vector<double> flatten_params(vransim::BranchingQNet& net) {
  std::vector<double> flat;
  for (const auto& ref : net.params())
    flat.insert(flat.end(), ref.data->begin(), ref.data->end());
  return flat;
}

inline void unflatten_params(vransim::BranchingQNet& net, const std::vector<double>& flat) {
  std::size_t off = 0;
  for (const auto& ref : net.params()) {
    std::copy(flat.begin() + off, flat.begin() + off + ref.data->size(), ref.data->begin());
    off += ref.data->size();
  }
  if (off != flat.size()) throw std::runtime_error("unflatten: size mismatch");
}

inline std::vector<double> flatten_grads(const vransim::BranchingQNet& net,
                                         const vransim::BranchingQNet::Grads& g) {
  std::vector<double> flat;
  auto push = [&](const std::vector<double>& v) { flat.insert(flat.end(), v.begin(), v.end()); };
  for (const auto& lg : g.trunk) {
    push(lg.w);
    push(lg.b);
  }
  push(g.value.w);
  push(g.value.b);
  for (const auto& lg : g.heads) {
    push(lg.w);
    push(lg.b);
  }
  (void)net;
  return flat;
}

// The branched regression loss with frozen targets u, exactly the quantity
// train_step differentiates.
struct LossBatch {
  std::vector<std::vector<double>> states;
  std::vector<std::vector<int>> actions;  // per-branch chosen index
  std::vector<double> targets;
};

inline double branched_loss(const vransim::BranchingQNet& net, const LossBatch& batch) {
  const std::vector<double> w = net.branches().weights();
  double loss = 0.0;
  for (std::size_t i = 0; i < batch.states.size(); ++i) {
    const auto q = net.q_values(batch.states[i]);
    for (std::size_t c = 0; c < q.size(); ++c) {
      const double res = batch.targets[i] - q[c][batch.actions[i][c]];
      loss += w[c] * res * res;
    }
  }
  return loss / static_cast<double>(batch.states.size());
}

inline std::vector<double> analytic_loss_grad(vransim::BranchingQNet& net,
                                              const LossBatch& batch) {
  const std::vector<double> w = net.branches().weights();
  auto grads = net.make_grads();
  vransim::BranchingQNet::zero(grads);
  vransim::BranchingQNet::Forward f;
  const double inv_b = 1.0 / static_cast<double>(batch.states.size());
  std::vector<std::vector<double>> dq(net.branches().sizes.size());
  for (std::size_t c = 0; c < dq.size(); ++c) dq[c].resize(net.branches().sizes[c]);
  for (std::size_t i = 0; i < batch.states.size(); ++i) {
    net.forward(batch.states[i], f);
    for (auto& v : dq) std::fill(v.begin(), v.end(), 0.0);
    for (std::size_t c = 0; c < dq.size(); ++c) {
      const int a = batch.actions[i][c];
      dq[c][a] = -2.0 * w[c] * (batch.targets[i] - f.q[c][a]) * inv_b;
    }
    net.backward(batch.states[i], f, dq, grads);
  }
  return flatten_grads(net, grads);
}

inline std::vector<double> fd_loss_grad(vransim::BranchingQNet& net, const LossBatch& batch,
                                        double h = 1e-5) {
  std::vector<double> theta = flatten_params(net);
  std::vector<double> grad(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double orig = theta[i];
    theta[i] = orig + h;
    unflatten_params(net, theta);
    const double lp = branched_loss(net, batch);
    theta[i] = orig - h;
    unflatten_params(net, theta);
    const double lm = branched_loss(net, batch);
    theta[i] = orig;
    grad[i] = (lp - lm) / (2.0 * h);
  }
  unflatten_params(net, theta);
  return grad;
}

inline double max_rel_error(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double scale = std::max({std::abs(a[i]), std::abs(b[i]), 1e-6});
    worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
  }
  return worst;
}

}  // namespace oracle
