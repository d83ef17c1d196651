#pragma once

#include <cstddef>
#include <string_view>

namespace vransim::kernels {

// Dense double-precision primitives behind the neural-network engine.
// A scalar reference implementation is always available; an AVX2/FMA
// variant is selected at runtime when the CPU supports it. The two are
// equivalence-tested against each other (vector accumulation reorders
// sums, so agreement is to tight tolerance, not bit-exact).
struct Ops {
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum)(const double* x, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  void (*relu)(const double* x, double* y, std::size_t n);
  // din[i] = pre[i] > 0 ? dout[i] : 0
  void (*relu_backward)(const double* pre, const double* dout, double* din, std::size_t n);
  // Bias-corrected Adam update; bc1 = 1 - beta1^t, bc2 = 1 - beta2^t.
  void (*adam_step)(double* param, double* m, double* v, const double* grad, std::size_t n,
                    double lr, double beta1, double beta2, double eps, double bc1, double bc2);
};

enum class Backend { scalar, avx2 };

const Ops& scalar_ops();

// Active table. Defaults to the best backend the CPU supports.
const Ops& ops();
Backend active_backend();
std::string_view backend_name(Backend b);

// Force a backend; returns false (and leaves the active table unchanged)
// if the CPU does not support it. Not thread-safe: call before workers start.
bool set_backend(Backend b);
Backend detect_backend();

bool avx2_supported();

}  // namespace vransim::kernels
