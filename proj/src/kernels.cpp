#include "vransim/kernels.hpp"

#include <cmath>

namespace vransim::kernels {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void relu_scalar(const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_backward_scalar(const double* pre, const double* dout, double* din, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) din[i] = pre[i] > 0.0 ? dout[i] : 0.0;
}

void adam_step_scalar(double* param, double* m, double* v, const double* grad, std::size_t n,
                      double lr, double beta1, double beta2, double eps, double bc1, double bc2) {
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
    const double mhat = m[i] / bc1;
    const double vhat = v[i] / bc2;
    param[i] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

const Ops g_scalar = {dot_scalar,  sum_scalar,           axpy_scalar,
                      relu_scalar, relu_backward_scalar, adam_step_scalar};

const Ops* g_active = nullptr;
Backend g_backend = Backend::scalar;

}  // namespace

const Ops& scalar_ops() { return g_scalar; }

#if defined(__x86_64__) || defined(_M_X64)
const Ops& avx2_ops();  // defined in kernels_avx2.cpp

bool avx2_supported() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#else
bool avx2_supported() { return false; }
#endif

Backend detect_backend() {
  return avx2_supported() ? Backend::avx2 : Backend::scalar;
}

bool set_backend(Backend b) {
#if defined(__x86_64__) || defined(_M_X64)
  if (b == Backend::avx2) {
    if (!avx2_supported()) return false;
    g_active = &avx2_ops();
    g_backend = b;
    return true;
  }
#else
  if (b == Backend::avx2) return false;
#endif
  g_active = &g_scalar;
  g_backend = Backend::scalar;
  return true;
}

const Ops& ops() {
  if (g_active == nullptr) set_backend(detect_backend());
  return *g_active;
}

Backend active_backend() {
  if (g_active == nullptr) set_backend(detect_backend());
  return g_backend;
}

std::string_view backend_name(Backend b) {
  return b == Backend::avx2 ? "avx2" : "scalar";
}

}  // namespace vransim::kernels
