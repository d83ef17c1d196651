#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "vransim/kernels.hpp"
#include "vransim/rng.hpp"

using namespace vransim;
namespace k = vransim::kernels;

namespace {

std::vector<double> random_vec(std::size_t n, Rng& rng, double lo = -1.0, double hi = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

bool close(double a, double b, double tol = 1e-12) {
  return std::abs(a - b) <= tol * (1.0 + std::max(std::abs(a), std::abs(b)));
}

}  // namespace

TEST_CASE("scalar dot and sum basics") {
  const auto& ops = k::scalar_ops();
  const double a[] = {1.0, 2.0, 3.0};
  const double b[] = {4.0, -5.0, 6.0};
  CHECK(ops.dot(a, b, 3) == doctest::Approx(12.0));
  CHECK(ops.sum(a, 3) == doctest::Approx(6.0));
  CHECK(ops.dot(a, b, 0) == 0.0);
}

TEST_CASE("scalar relu and backward") {
  const auto& ops = k::scalar_ops();
  const double pre[] = {-1.0, 0.0, 2.5};
  double out[3];
  ops.relu(pre, out, 3);
  CHECK(out[0] == 0.0);
  CHECK(out[1] == 0.0);
  CHECK(out[2] == 2.5);
  const double dout[] = {10.0, 10.0, 10.0};
  double din[3];
  ops.relu_backward(pre, dout, din, 3);
  CHECK(din[0] == 0.0);
  CHECK(din[1] == 0.0);  // derivative at 0 defined as 0
  CHECK(din[2] == 10.0);
}

TEST_CASE("avx2 kernels match scalar reference") {
  if (!k::avx2_supported()) {
    MESSAGE("AVX2 not available; dispatch stays scalar");
    return;
  }
  REQUIRE(k::set_backend(k::Backend::avx2));
  const auto& simd = k::ops();
  const auto& ref = k::scalar_ops();
  Rng rng(42);

  // Sizes straddling the vector width and tail handling.
  for (std::size_t n : {std::size_t{1}, std::size_t{3}, std::size_t{4}, std::size_t{7},
                        std::size_t{8}, std::size_t{17}, std::size_t{64}, std::size_t{255},
                        std::size_t{1024}, std::size_t{4096}}) {
    const auto a = random_vec(n, rng);
    const auto b = random_vec(n, rng);
    CHECK(close(simd.dot(a.data(), b.data(), n), ref.dot(a.data(), b.data(), n)));
    CHECK(close(simd.sum(a.data(), n), ref.sum(a.data(), n)));

    auto y1 = random_vec(n, rng);
    auto y2 = y1;
    simd.axpy(0.37, a.data(), y1.data(), n);
    ref.axpy(0.37, a.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(close(y1[i], y2[i]));

    std::vector<double> r1(n), r2(n);
    simd.relu(a.data(), r1.data(), n);
    ref.relu(a.data(), r2.data(), n);
    CHECK(r1 == r2);  // max is exact

    std::vector<double> d1(n), d2(n);
    simd.relu_backward(a.data(), b.data(), d1.data(), n);
    ref.relu_backward(a.data(), b.data(), d2.data(), n);
    CHECK(d1 == d2);
  }
  k::set_backend(k::detect_backend());
}

TEST_CASE("adam kernel equivalence and fixed-gradient limit") {
  Rng rng(7);
  const std::size_t n = 133;
  auto p1 = random_vec(n, rng);
  auto p2 = p1;
  auto m1 = std::vector<double>(n, 0.0), v1 = m1, m2 = m1, v2 = m1;
  const auto g = random_vec(n, rng);

  const double lr = 1e-3, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  for (int t = 1; t <= 25; ++t) {
    const double bc1 = 1.0 - std::pow(b1, t);
    const double bc2 = 1.0 - std::pow(b2, t);
    k::scalar_ops().adam_step(p1.data(), m1.data(), v1.data(), g.data(), n, lr, b1, b2, eps, bc1,
                              bc2);
    if (k::avx2_supported()) {
      k::set_backend(k::Backend::avx2);
      k::ops().adam_step(p2.data(), m2.data(), v2.data(), g.data(), n, lr, b1, b2, eps, bc1, bc2);
      k::set_backend(k::detect_backend());
    } else {
      k::scalar_ops().adam_step(p2.data(), m2.data(), v2.data(), g.data(), n, lr, b1, b2, eps,
                                bc1, bc2);
    }
  }
  for (std::size_t i = 0; i < n; ++i) CHECK(close(p1[i], p2[i], 1e-12));

  // With a constant gradient the bias-corrected update magnitude tends to
  // lr * g/(|g| + eps) ~= lr.
  std::vector<double> p(1, 0.0), m(1, 0.0), v(1, 0.0);
  const double gc[] = {0.5};
  double prev = p[0];
  double step_size = 0.0;
  for (int t = 1; t <= 5000; ++t) {
    const double bc1 = 1.0 - std::pow(0.9, t);
    const double bc2 = 1.0 - std::pow(0.999, t);
    k::scalar_ops().adam_step(p.data(), m.data(), v.data(), gc, 1, lr, 0.9, 0.999, eps, bc1, bc2);
    step_size = std::abs(p[0] - prev);
    prev = p[0];
  }
  CHECK(step_size == doctest::Approx(lr).epsilon(1e-3));
}

TEST_CASE("backend dispatch reports and forces") {
  const k::Backend detected = k::detect_backend();
  CHECK(k::set_backend(k::Backend::scalar));
  CHECK(k::active_backend() == k::Backend::scalar);
  if (detected == k::Backend::avx2) {
    CHECK(k::set_backend(k::Backend::avx2));
    CHECK(k::active_backend() == k::Backend::avx2);
    CHECK(k::backend_name(k::active_backend()) == "avx2");
  } else {
    CHECK_FALSE(k::set_backend(k::Backend::avx2));
    CHECK(k::active_backend() == k::Backend::scalar);
  }
  k::set_backend(detected);
}
