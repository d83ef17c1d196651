#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vransim/rng.hpp"

namespace vransim::nn {

enum class Act { identity, relu };

// One dense layer, weights row-major [out][in]. Double precision
// throughout; the hot loops go through the dispatched kernels.
struct Layer {
  int in_dim = 0;
  int out_dim = 0;
  Act act = Act::identity;
  std::vector<double> w;
  std::vector<double> b;

  Layer() = default;
  Layer(int in, int out, Act a);

  // He-uniform for ReLU layers, U(+-1/sqrt(fan_in)) for linear ones;
  // biases start at zero.
  void init(Rng& rng);

  // pre = W x + b, out = act(pre). pre and out are out_dim long and may
  // alias when act == identity.
  void forward(const double* x, double* pre, double* out) const;

  // Accumulates dW/db into gw/gb; accumulates the input gradient into dx
  // when dx != nullptr. dpre is out_dim scratch.
  void backward(const double* x, const double* pre, const double* dout, double* gw, double* gb,
                double* dx, double* dpre) const;
};

struct LayerGrad {
  std::vector<double> w;
  std::vector<double> b;
};

// A plain stack of layers.
struct Mlp {
  std::vector<Layer> layers;

  Mlp() = default;
  // dims = {in, hidden..., out}
  Mlp(const std::vector<int>& dims, Act hidden, Act output, Rng& rng);

  int in_dim() const { return layers.front().in_dim; }
  int out_dim() const { return layers.back().out_dim; }
};

struct MlpCache {
  std::vector<std::vector<double>> pre;
  std::vector<std::vector<double>> out;

  void resize_for(const Mlp& net);
  const std::vector<double>& output() const { return out.back(); }
};

const std::vector<double>& mlp_forward(const Mlp& net, std::span<const double> x, MlpCache& cache);

// dout is the gradient at the network output; grads are accumulated, dx
// (input gradient) overwritten when non-null. scratch must have room for
// the widest layer.
void mlp_backward(const Mlp& net, std::span<const double> x, const MlpCache& cache,
                  std::span<const double> dout, std::vector<LayerGrad>& grads, double* dx,
                  std::vector<double>& scratch);

std::vector<LayerGrad> make_grads(const Mlp& net);
void zero_grads(std::vector<LayerGrad>& grads);

// A named view of one parameter tensor, used by the optimizer and the
// checkpoint format.
struct ParamRef {
  std::string name;
  std::vector<double>* data;
};

std::vector<ParamRef> mlp_params(Mlp& net, const std::string& prefix);

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected Adam over a fixed list of parameter tensors.
class Adam {
 public:
  Adam(AdamConfig cfg, const std::vector<ParamRef>& params);

  // grads[i] must match params[i] in size; one optimizer step for all.
  void step(const std::vector<ParamRef>& params, const std::vector<const std::vector<double>*>& grads);
  std::int64_t t() const { return t_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  AdamConfig cfg_;
  std::vector<std::vector<double>> m_, v_;
  std::int64_t t_ = 0;
};

// Versioned binary checkpoint: architecture signature + raw little-endian
// payload. Loading into a net with a different signature is an error.
void save_checkpoint(const std::string& path, const std::string& arch,
                     const std::vector<ParamRef>& params);
void load_checkpoint(const std::string& path, const std::string& arch,
                     const std::vector<ParamRef>& params);
std::string checkpoint_arch(const std::string& path);  // peek signature

}  // namespace vransim::nn
