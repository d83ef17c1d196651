#include "vransim/nn.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "vransim/kernels.hpp"

namespace vransim::nn {

using kernels::ops;

Layer::Layer(int in, int out, Act a) : in_dim(in), out_dim(out), act(a) {
  if (in <= 0 || out <= 0) throw std::runtime_error("layer: dimensions must be positive");
  w.assign(static_cast<std::size_t>(in) * out, 0.0);
  b.assign(out, 0.0);
}

void Layer::init(Rng& rng) {
  const double bound = act == Act::relu ? std::sqrt(6.0 / in_dim) : 1.0 / std::sqrt(in_dim);
  for (double& x : w) x = rng.uniform(-bound, bound);
  for (double& x : b) x = 0.0;
}

void Layer::forward(const double* x, double* pre, double* out) const {
  const auto& k = ops();
  for (int r = 0; r < out_dim; ++r)
    pre[r] = k.dot(w.data() + static_cast<std::size_t>(r) * in_dim, x, in_dim) + b[r];
  if (act == Act::relu)
    k.relu(pre, out, out_dim);
  else if (out != pre)
    std::memcpy(out, pre, sizeof(double) * out_dim);
}

void Layer::backward(const double* x, const double* pre, const double* dout, double* gw,
                     double* gb, double* dx, double* dpre) const {
  const auto& k = ops();
  if (act == Act::relu) {
    k.relu_backward(pre, dout, dpre, out_dim);
  } else {
    std::memcpy(dpre, dout, sizeof(double) * out_dim);
  }
  for (int r = 0; r < out_dim; ++r) {
    const double g = dpre[r];
    if (g != 0.0) k.axpy(g, x, gw + static_cast<std::size_t>(r) * in_dim, in_dim);
    gb[r] += g;
  }
  if (dx != nullptr) {
    for (int r = 0; r < out_dim; ++r) {
      const double g = dpre[r];
      if (g != 0.0) k.axpy(g, w.data() + static_cast<std::size_t>(r) * in_dim, dx, in_dim);
    }
  }
}

Mlp::Mlp(const std::vector<int>& dims, Act hidden, Act output, Rng& rng) {
  if (dims.size() < 2) throw std::runtime_error("mlp: need at least input and output dims");
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    const Act a = i + 2 == dims.size() ? output : hidden;
    layers.emplace_back(dims[i], dims[i + 1], a);
    layers.back().init(rng);
  }
}

void MlpCache::resize_for(const Mlp& net) {
  pre.resize(net.layers.size());
  out.resize(net.layers.size());
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    pre[i].resize(net.layers[i].out_dim);
    out[i].resize(net.layers[i].out_dim);
  }
}

const std::vector<double>& mlp_forward(const Mlp& net, std::span<const double> x,
                                       MlpCache& cache) {
  if (static_cast<int>(x.size()) != net.in_dim())
    throw std::runtime_error("mlp_forward: input size mismatch");
  cache.resize_for(net);
  const double* in = x.data();
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    net.layers[i].forward(in, cache.pre[i].data(), cache.out[i].data());
    in = cache.out[i].data();
  }
  return cache.out.back();
}

void mlp_backward(const Mlp& net, std::span<const double> x, const MlpCache& cache,
                  std::span<const double> dout, std::vector<LayerGrad>& grads, double* dx,
                  std::vector<double>& scratch) {
  const std::size_t n = net.layers.size();
  if (cache.out.size() != n) throw std::runtime_error("mlp_backward: missing forward cache");
  std::size_t widest = 0;
  for (const Layer& l : net.layers) widest = std::max(widest, static_cast<std::size_t>(l.out_dim));
  scratch.resize(2 * widest + (n > 1 ? net.layers[n - 1].in_dim : 0));

  std::vector<double> dcur(dout.begin(), dout.end());
  for (std::size_t i = n; i-- > 0;) {
    const double* in = i == 0 ? x.data() : cache.out[i - 1].data();
    double* dpre = scratch.data();
    std::vector<double> din;
    double* dxp = nullptr;
    if (i > 0) {
      din.assign(net.layers[i].in_dim, 0.0);
      dxp = din.data();
    } else {
      dxp = dx;  // may be null
    }
    net.layers[i].backward(in, cache.pre[i].data(), dcur.data(), grads[i].w.data(),
                           grads[i].b.data(), dxp, dpre);
    if (i > 0) dcur = std::move(din);
  }
}

std::vector<LayerGrad> make_grads(const Mlp& net) {
  std::vector<LayerGrad> g(net.layers.size());
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    g[i].w.assign(net.layers[i].w.size(), 0.0);
    g[i].b.assign(net.layers[i].b.size(), 0.0);
  }
  return g;
}

void zero_grads(std::vector<LayerGrad>& grads) {
  for (LayerGrad& g : grads) {
    std::fill(g.w.begin(), g.w.end(), 0.0);
    std::fill(g.b.begin(), g.b.end(), 0.0);
  }
}

std::vector<ParamRef> mlp_params(Mlp& net, const std::string& prefix) {
  std::vector<ParamRef> refs;
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    refs.push_back({prefix + "." + std::to_string(i) + ".w", &net.layers[i].w});
    refs.push_back({prefix + "." + std::to_string(i) + ".b", &net.layers[i].b});
  }
  return refs;
}

Adam::Adam(AdamConfig cfg, const std::vector<ParamRef>& params) : cfg_(cfg) {
  m_.reserve(params.size());
  v_.reserve(params.size());
  for (const ParamRef& p : params) {
    m_.emplace_back(p.data->size(), 0.0);
    v_.emplace_back(p.data->size(), 0.0);
  }
}

void Adam::step(const std::vector<ParamRef>& params,
                const std::vector<const std::vector<double>*>& grads) {
  if (params.size() != m_.size() || grads.size() != m_.size())
    throw std::runtime_error("adam: parameter list shape changed");
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  const auto& k = ops();
  for (std::size_t i = 0; i < params.size(); ++i) {
    std::vector<double>& p = *params[i].data;
    const std::vector<double>& g = *grads[i];
    if (p.size() != m_[i].size() || g.size() != m_[i].size())
      throw std::runtime_error("adam: gradient shape mismatch for " + params[i].name);
    k.adam_step(p.data(), m_[i].data(), v_[i].data(), g.data(), p.size(), cfg_.lr, cfg_.beta1,
                cfg_.beta2, cfg_.eps, bc1, bc2);
  }
}

namespace {

constexpr char kMagic[8] = {'V', 'R', 'S', 'I', 'M', 'N', 'N', '1'};

void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
std::uint32_t read_u32(std::istream& in, const char* what) {
  std::uint32_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(v)))
    throw std::runtime_error(std::string("checkpoint: truncated at ") + what);
  return v;
}
std::uint64_t read_u64(std::istream& in, const char* what) {
  std::uint64_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(v)))
    throw std::runtime_error(std::string("checkpoint: truncated at ") + what);
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const std::string& arch,
                     const std::vector<ParamRef>& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("checkpoint: cannot write " + path);
  out.write(kMagic, sizeof(kMagic));
  write_u32(out, static_cast<std::uint32_t>(arch.size()));
  out.write(arch.data(), static_cast<std::streamsize>(arch.size()));
  write_u32(out, static_cast<std::uint32_t>(params.size()));
  for (const ParamRef& p : params) {
    write_u32(out, static_cast<std::uint32_t>(p.name.size()));
    out.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
    write_u64(out, p.data->size());
  }
  for (const ParamRef& p : params)
    out.write(reinterpret_cast<const char*>(p.data->data()),
              static_cast<std::streamsize>(p.data->size() * sizeof(double)));
  if (!out.good()) throw std::runtime_error("checkpoint: write failed for " + path);
}

void load_checkpoint(const std::string& path, const std::string& arch,
                     const std::vector<ParamRef>& params) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("checkpoint: bad magic in " + path);
  const std::uint32_t arch_len = read_u32(in, "arch length");
  std::string file_arch(arch_len, '\0');
  if (!in.read(file_arch.data(), arch_len))
    throw std::runtime_error("checkpoint: truncated arch string");
  if (file_arch != arch)
    throw std::runtime_error("checkpoint: architecture mismatch: file has '" + file_arch +
                             "', net expects '" + arch + "'");
  const std::uint32_t n_blocks = read_u32(in, "block count");
  if (n_blocks != params.size())
    throw std::runtime_error("checkpoint: block count mismatch in " + path);
  for (const ParamRef& p : params) {
    const std::uint32_t name_len = read_u32(in, "block name length");
    std::string name(name_len, '\0');
    if (!in.read(name.data(), name_len)) throw std::runtime_error("checkpoint: truncated name");
    const std::uint64_t count = read_u64(in, "block size");
    if (name != p.name || count != p.data->size())
      throw std::runtime_error("checkpoint: block '" + name + "' does not match net block '" +
                               p.name + "'");
  }
  for (const ParamRef& p : params) {
    if (!in.read(reinterpret_cast<char*>(p.data->data()),
                 static_cast<std::streamsize>(p.data->size() * sizeof(double))))
      throw std::runtime_error("checkpoint: truncated payload in " + path);
  }
}

std::string checkpoint_arch(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("checkpoint: bad magic in " + path);
  const std::uint32_t arch_len = read_u32(in, "arch length");
  std::string arch(arch_len, '\0');
  if (!in.read(arch.data(), arch_len)) throw std::runtime_error("checkpoint: truncated arch");
  return arch;
}

}  // namespace vransim::nn
