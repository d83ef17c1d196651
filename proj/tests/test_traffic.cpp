#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "vransim/traffic.hpp"

using namespace vransim;
namespace fs = std::filesystem;

namespace {

const fs::path kDir = fs::temp_directory_path() / "vransim_traffic_test";

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double num = 0, va = 0, vb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (a[i] - ma) * (b[i] - mb);
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
  }
  return num / std::sqrt(va * vb);
}

}  // namespace

TEST_CASE("diurnal trace swings ~92% with noise off") {
  const TrafficTrace t = generate_diurnal(1, 1, 4.0, 42, /*noise=*/false);
  REQUIRE(t.n_slots() == 144);
  double lo = 1e9, hi = -1e9;
  for (int s = 0; s < t.n_slots(); ++s) {
    lo = std::min(lo, t.demand(s, 0));
    hi = std::max(hi, t.demand(s, 0));
  }
  CHECK(hi <= 4.0);
  CHECK(lo / hi == doctest::Approx(0.08).epsilon(0.125));  // 0.08 +- 0.01
}

TEST_CASE("zero peak gives an all-zero trace") {
  const TrafficTrace t = generate_diurnal(2, 3, 0.0, 1, true);
  for (int s = 0; s < t.n_slots(); ++s)
    for (int k = 0; k < t.n_bs(); ++k) CHECK(t.demand(s, k) == 0.0);
}

TEST_CASE("generator is deterministic per seed") {
  const TrafficTrace a = generate_diurnal(2, 4, 3.5, 9, true);
  const TrafficTrace b = generate_diurnal(2, 4, 3.5, 9, true);
  const TrafficTrace c = generate_diurnal(2, 4, 3.5, 10, true);
  bool all_equal = true, any_diff = false;
  for (int s = 0; s < a.n_slots(); ++s)
    for (int k = 0; k < a.n_bs(); ++k) {
      all_equal = all_equal && a.demand(s, k) == b.demand(s, k);
      any_diff = any_diff || a.demand(s, k) != c.demand(s, k);
    }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("day shapes repeat with noise off") {
  const TrafficTrace t = generate_diurnal(2, 2, 4.0, 5, /*noise=*/false);
  for (int k = 0; k < 2; ++k) {
    std::vector<double> day1, day2;
    for (int s = 0; s < 144; ++s) {
      day1.push_back(t.demand(s, k));
      day2.push_back(t.demand(s + 144, k));
    }
    CHECK(correlation(day1, day2) >= doctest::Approx(0.9));
  }
}

TEST_CASE("phase offsets differentiate BSs") {
  const TrafficTrace t = generate_diurnal(1, 4, 4.0, 21, /*noise=*/false);
  bool any_diff = false;
  for (int s = 0; s < t.n_slots(); ++s)
    if (t.demand(s, 0) != t.demand(s, 1)) any_diff = true;
  CHECK(any_diff);
}

TEST_CASE("save/load round-trips bit-exactly") {
  fs::create_directories(kDir);
  const std::string path = (kDir / "trace.csv").string();
  const TrafficTrace a = generate_diurnal(1, 8, 4.0, 3, true);
  a.save_csv(path);
  const TrafficTrace b = load_trace(path);
  REQUIRE(b.n_slots() == a.n_slots());
  REQUIRE(b.n_bs() == a.n_bs());
  for (int s = 0; s < a.n_slots(); ++s)
    for (int k = 0; k < a.n_bs(); ++k) CHECK(a.demand(s, k) == b.demand(s, k));

  // Save again: byte-identical files.
  const std::string path2 = (kDir / "trace2.csv").string();
  b.save_csv(path2);
  std::ifstream f1(path), f2(path2);
  std::string s1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
  std::string s2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
  CHECK(s1 == s2);
}

TEST_CASE("loader rejects holes and negatives, clamps excess") {
  fs::create_directories(kDir);

  SUBCASE("missing cell names the hole") {
    const std::string path = (kDir / "hole.csv").string();
    std::ofstream out(path);
    out << "slot,bs_id,demand_gbps\n";
    out << "0,0,1.0\n0,1,1.0\n1,0,1.0\n";  // (1,1) missing
    out.close();
    CHECK_THROWS_WITH_AS(load_trace(path), doctest::Contains("missing cell"), std::runtime_error);
  }
  SUBCASE("negative demand is an error") {
    const std::string path = (kDir / "neg.csv").string();
    std::ofstream out(path);
    out << "slot,bs_id,demand_gbps\n0,0,-0.2\n";
    out.close();
    CHECK_THROWS(load_trace(path));
  }
  SUBCASE("non-numeric demand is an error") {
    const std::string path = (kDir / "nan.csv").string();
    std::ofstream out(path);
    out << "slot,bs_id,demand_gbps\n0,0,abc\n";
    out.close();
    CHECK_THROWS(load_trace(path));
  }
  SUBCASE("excess demand clamps to 4 and counts") {
    const std::string path = (kDir / "clamp.csv").string();
    std::ofstream out(path);
    out << "slot,bs_id,demand_gbps\n0,0,5.1\n0,1,1.0\n";
    out.close();
    const TrafficTrace t = load_trace(path);
    CHECK(t.demand(0, 0) == 4.0);
    CHECK(t.clamped_cells() == 1);
  }
  SUBCASE("duplicate cell is an error") {
    const std::string path = (kDir / "dup.csv").string();
    std::ofstream out(path);
    out << "slot,bs_id,demand_gbps\n0,0,1.0\n0,0,2.0\n";
    out.close();
    CHECK_THROWS(load_trace(path));
  }
}
