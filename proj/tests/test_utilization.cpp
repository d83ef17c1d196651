#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "vransim/utilization.hpp"

using namespace vransim;

namespace {

UtilizationModelSpec affine(double base, double slope, double cv, std::uint64_t seed = 11) {
  UtilizationModelSpec s;
  s.kind = UtilizationKind::AFFINE_NOISY;
  s.base_rc = base;
  s.slope_rc_per_gbps = slope;
  s.noise_cv = cv;
  s.seed = seed;
  return s;
}

}  // namespace

TEST_CASE("noise-free affine split by compute shares") {
  const SplitCatalog cat = SplitCatalog::standard();
  const UtilizationModel model(affine(2.0, 2.0, 0.0), cat);

  const UtilizationSample s1 = model.sample(1.0, SplitId::S1, 123);
  CHECK(s1.ru_rc == doctest::Approx(1.92).epsilon(1e-12));
  CHECK(s1.vdu_rc == doctest::Approx(1.28).epsilon(1e-12));
  CHECK(s1.vcu_rc == doctest::Approx(0.80).epsilon(1e-12));

  const UtilizationSample s4 = model.sample(0.0, SplitId::S4, 5);
  CHECK(s4.ru_rc == 0.0);
  CHECK(s4.vdu_rc == 0.0);
  CHECK(s4.vcu_rc == doctest::Approx(2.0));
}

TEST_CASE("determinism given (seed, slot key)") {
  const SplitCatalog cat = SplitCatalog::standard();
  const UtilizationModel model(affine(2.0, 2.0, 0.25), cat);
  const UtilizationSample a = model.sample(2.5, SplitId::S2, 777);
  const UtilizationSample b = model.sample(2.5, SplitId::S2, 777);
  CHECK(a.ru_rc == b.ru_rc);
  CHECK(a.vdu_rc == b.vdu_rc);
  CHECK(a.vcu_rc == b.vcu_rc);
  const UtilizationSample c = model.sample(2.5, SplitId::S2, 778);
  CHECK(a.total() != c.total());
}

TEST_CASE("total is split-independent for the same draw") {
  const SplitCatalog cat = SplitCatalog::standard();
  const UtilizationModel model(affine(2.0, 2.0, 0.3), cat);
  for (std::uint64_t key = 0; key < 50; ++key) {
    const double t1 = model.sample(3.0, SplitId::S1, key).total();
    const double t2 = model.sample(3.0, SplitId::S2, key).total();
    const double t3 = model.sample(3.0, SplitId::S3, key).total();
    const double t4 = model.sample(3.0, SplitId::S4, key).total();
    CHECK(t1 == doctest::Approx(t2).epsilon(1e-12));
    CHECK(t1 == doctest::Approx(t3).epsilon(1e-12));
    CHECK(t1 == doctest::Approx(t4).epsilon(1e-12));
  }
}

TEST_CASE("noise-free utilization is affine and monotone") {
  const SplitCatalog cat = SplitCatalog::standard();
  const UtilizationModel model(affine(2.0, 2.0, 0.0), cat);
  double prev = -1.0;
  for (double lam = 0.0; lam <= 4.0; lam += 0.5) {
    const double total = model.sample(lam, SplitId::S3, 0).total();
    CHECK(total == doctest::Approx(2.0 + 2.0 * lam).epsilon(1e-12));
    CHECK(total > prev);
    prev = total;
  }
}

TEST_CASE("noise stays non-negative even with huge draws") {
  const SplitCatalog cat = SplitCatalog::standard();
  const UtilizationModel model(affine(1.0, 1.0, 0.9), cat);
  for (std::uint64_t key = 0; key < 3000; ++key) {
    const UtilizationSample s = model.sample(4.0, SplitId::S1, key);
    CHECK(s.ru_rc >= 0.0);
    CHECK(s.vdu_rc >= 0.0);
    CHECK(s.vcu_rc >= 0.0);
  }
}

TEST_CASE("monotone in expectation under noise") {
  const SplitCatalog cat = SplitCatalog::standard();
  const UtilizationModel model(affine(2.0, 2.0, 0.2), cat);
  double mean_low = 0.0, mean_high = 0.0;
  const int n = 4000;
  for (int i = 0; i < n; ++i) {
    mean_low += model.sample(1.0, SplitId::S1, i).total();
    mean_high += model.sample(3.0, SplitId::S1, 100000 + i).total();
  }
  CHECK(mean_high / n > mean_low / n);
}

TEST_CASE("demand bounds enforced") {
  const SplitCatalog cat = SplitCatalog::standard();
  const UtilizationModel model(affine(2.0, 2.0, 0.0), cat);
  CHECK_THROWS(model.sample(-0.5, SplitId::S1, 0));
  CHECK_THROWS(model.sample(4.5, SplitId::S1, 0));
}

TEST_CASE("trace table interpolation") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "vransim_util_test";
  fs::create_directories(dir);
  const std::string path = (dir / "table.csv").string();
  {
    std::ofstream out(path);
    out << "demand_gbps,total_rc\n";
    out << "0,2\n";
    out << "2,6\n";
    out << "2,8\n";  // duplicate demand: averaged to 7
    out << "4,10\n";
  }
  UtilizationModelSpec spec;
  spec.kind = UtilizationKind::TRACE_TABLE;
  spec.trace_path = path;
  const SplitCatalog cat = SplitCatalog::standard();
  const UtilizationModel model(spec, cat);

  CHECK(model.sample(0.0, SplitId::S4, 0).vcu_rc == doctest::Approx(2.0));
  CHECK(model.sample(2.0, SplitId::S4, 0).vcu_rc == doctest::Approx(7.0));
  CHECK(model.sample(1.0, SplitId::S4, 0).vcu_rc == doctest::Approx(4.5));  // midpoint
  CHECK(model.sample(3.0, SplitId::S4, 0).vcu_rc == doctest::Approx(8.5));

  SUBCASE("missing file") {
    UtilizationModelSpec bad = spec;
    bad.trace_path = (dir / "nope.csv").string();
    CHECK_THROWS(UtilizationModel(bad, cat));
  }
  SUBCASE("bad header") {
    const std::string bad_path = (dir / "bad.csv").string();
    std::ofstream out(bad_path);
    out << "demand,total\n0,1\n";
    out.close();
    UtilizationModelSpec bad = spec;
    bad.trace_path = bad_path;
    CHECK_THROWS(UtilizationModel(bad, cat));
  }
}

TEST_CASE("spec validation") {
  const SplitCatalog cat = SplitCatalog::standard();
  CHECK_THROWS(UtilizationModel(affine(-1.0, 2.0, 0.0), cat));
  CHECK_THROWS(UtilizationModel(affine(2.0, -2.0, 0.0), cat));
  CHECK_THROWS(UtilizationModel(affine(2.0, 2.0, 1.0), cat));
}
