#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "vransim/rng.hpp"
#include "vransim/topology.hpp"

using namespace vransim;

namespace {

// Oracle: enumerate every simple path by DFS, minimum total weight with
// ties toward the lexicographically smallest node sequence. Only usable on
// small instances.
struct BruteForce {
  const Topology& topo;
  std::vector<std::vector<std::pair<int, double>>> adj;  // (neighbor, weight)

  explicit BruteForce(const Topology& t) : topo(t) {
    adj.resize(t.nodes().size());
    for (const Link& l : t.links()) {
      adj[l.u].push_back({l.v, l.weight});
      adj[l.v].push_back({l.u, l.weight});
    }
  }

  void dfs(int u, int dst, std::vector<char>& used, std::vector<int>& path, double w,
           double& best_w, std::vector<int>& best_path) const {
    if (u == dst) {
      if (w < best_w || (w == best_w && path < best_path)) {
        best_w = w;
        best_path = path;
      }
      return;
    }
    for (const auto& [v, lw] : adj[u]) {
      if (used[v]) continue;
      used[v] = 1;
      path.push_back(v);
      dfs(v, dst, used, path, w + lw, best_w, best_path);
      path.pop_back();
      used[v] = 0;
    }
  }

  std::pair<double, std::vector<int>> solve(int src, int dst) const {
    std::vector<char> used(topo.nodes().size(), 0);
    std::vector<int> path{src};
    used[src] = 1;
    double best_w = std::numeric_limits<double>::infinity();
    std::vector<int> best_path;
    dfs(src, dst, used, path, 0.0, best_w, best_path);
    return {best_w, best_path};
  }
};

Node make_node(int id, NodeRole role, double x, double y) {
  Node n;
  n.id = id;
  n.role = role;
  n.x_km = x;
  n.y_km = y;
  if (role == NodeRole::ES) n.compute_capacity_rc = 100.0;
  if (role == NodeRole::FS) n.compute_capacity_rc = 20.0;
  return n;
}

Link make_link(int u, int v, double weight, double latency = 0.01, double length = 1.0) {
  Link l;
  l.u = u;
  l.v = v;
  l.weight = weight;
  l.latency_ms = latency;
  l.capacity_gbps = 100.0;
  l.length_km = length;
  return l;
}

// Random connected graph with dyadic weights so that path-weight sums are
// exact and ties are reproducible.
Topology random_graph(int n, double edge_prob, Rng& rng) {
  std::vector<Node> nodes;
  nodes.push_back(make_node(0, NodeRole::EPC, 0, 0));
  nodes.push_back(make_node(1, NodeRole::ES, 1, 0));
  nodes.push_back(make_node(2, NodeRole::FS, 2, 0));
  nodes.push_back(make_node(3, NodeRole::RU, 3, 0));
  for (int i = 4; i < n; ++i) nodes.push_back(make_node(i, NodeRole::ROUTER, i, 1));
  std::vector<Link> links;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) {
      const bool chain = v == u + 1;  // keep it connected
      if (chain || rng.uniform() < edge_prob) {
        const double w = rng.uniform_int(64) / 64.0;
        links.push_back(make_link(u, v, w, rng.uniform_int(16) / 160.0, 1.0));
      }
    }
  return Topology(std::move(nodes), std::move(links), 10.0);
}

}  // namespace

TEST_CASE("shortest path on a 3-node chain") {
  std::vector<Node> nodes = {make_node(0, NodeRole::EPC, 0, 0), make_node(1, NodeRole::ROUTER, 1, 0),
                             make_node(2, NodeRole::RU, 2, 0)};
  std::vector<Link> links = {make_link(0, 1, 0.05, 0.02), make_link(1, 2, 0.03, 0.07)};
  // ES/FS not needed for the path query itself, but the Topology type
  // tolerates their absence.
  Topology topo(std::move(nodes), std::move(links), 10.0);

  const PathResult p = topo.shortest_path(0, 2);
  CHECK(p.nodes == std::vector<int>{0, 1, 2});
  CHECK(p.links.size() == 2);
  CHECK(p.total_delay_ms == doctest::Approx(0.09));
  CHECK(p.total_weight == doctest::Approx(0.08));
}

TEST_CASE("shortest path src == dst is empty") {
  std::vector<Node> nodes = {make_node(0, NodeRole::EPC, 0, 0), make_node(1, NodeRole::RU, 1, 0)};
  std::vector<Link> links = {make_link(0, 1, 0.05)};
  Topology topo(std::move(nodes), std::move(links), 10.0);
  const PathResult p = topo.shortest_path(1, 1);
  CHECK(p.links.empty());
  CHECK(p.total_weight == 0.0);
  CHECK(p.total_delay_ms == 0.0);
  CHECK(p.total_length_km == 0.0);
}

TEST_CASE("unreachable destination raises") {
  std::vector<Node> nodes = {make_node(0, NodeRole::EPC, 0, 0), make_node(1, NodeRole::RU, 1, 0),
                             make_node(2, NodeRole::ROUTER, 2, 0)};
  std::vector<Link> links = {make_link(0, 1, 0.05)};
  Topology topo(std::move(nodes), std::move(links), 10.0);
  CHECK(topo.connected_from_epc());  // all RUs reachable; the router is not
  CHECK_THROWS(topo.shortest_path(0, 2));
}

TEST_CASE("dijkstra equals brute force on random small graphs") {
  Rng rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 5 + rng.uniform_int(7);  // up to 11 nodes
    Topology topo = random_graph(n, 0.4, rng);
    BruteForce oracle(topo);
    for (int dst = 1; dst < n; ++dst) {
      const auto [w, path] = oracle.solve(0, dst);
      const PathResult p = topo.shortest_path(0, dst);
      CHECK(p.total_weight == doctest::Approx(w).epsilon(1e-12));
      CHECK(p.nodes == path);  // lexicographic tie-break matches
    }
  }
}

TEST_CASE("waxman generation honors role counts and connectivity") {
  WaxmanParams params;
  params.n_nodes = 21;
  params.n_es = 4;
  params.n_fs = 8;
  params.n_ru = 8;
  params.seed = 1;
  const Topology topo = generate_waxman(params);
  CHECK(topo.nodes().size() == 21);
  CHECK(topo.es_ids().size() == 4);
  CHECK(topo.fs_ids().size() == 8);
  CHECK(topo.ru_ids().size() == 8);
  CHECK(topo.connected_from_epc());
  for (int es : topo.es_ids()) CHECK(*topo.node(es).compute_capacity_rc == 100.0);
  for (int fs : topo.fs_ids()) CHECK(*topo.node(fs).compute_capacity_rc == 20.0);
  for (const Link& l : topo.links()) {
    CHECK(l.latency_ms >= 0.0);
    CHECK(l.latency_ms <= 0.1);
    CHECK(l.capacity_gbps >= 30.0);
    CHECK(l.capacity_gbps <= 160.0);
    CHECK(l.weight >= 0.0);
    CHECK(l.weight <= 0.1);
  }
}

TEST_CASE("waxman alpha=1 beta=1 on tiny instance stays connected") {
  WaxmanParams params;
  params.n_nodes = 3;
  params.alpha = 1.0;
  params.beta = 1.0;
  params.n_es = 1;
  params.n_fs = 0;
  params.n_ru = 1;
  params.seed = 5;
  const Topology topo = generate_waxman(params);
  CHECK(topo.connected_from_epc());
  CHECK(topo.es_ids().size() == 1);
  CHECK(topo.ru_ids().size() == 1);
}

TEST_CASE("waxman generation is bit-reproducible") {
  WaxmanParams params;
  params.seed = 1234;
  const Topology a = generate_waxman(params);
  const Topology b = generate_waxman(params);
  std::ostringstream sa, sb;
  a.save(sa);
  b.save(sb);
  CHECK(sa.str() == sb.str());
}

TEST_CASE("waxman rejects oversized role counts") {
  WaxmanParams params;
  params.n_nodes = 5;
  params.n_es = 4;
  params.n_fs = 8;
  params.n_ru = 8;
  CHECK_THROWS(generate_waxman(params));
}

TEST_CASE("topology save/load round-trips bit-exactly") {
  WaxmanParams params;
  params.seed = 77;
  const Topology a = generate_waxman(params);
  std::ostringstream sa;
  a.save(sa);
  std::istringstream in(sa.str());
  const Topology b = Topology::load(in);
  std::ostringstream sb;
  b.save(sb);
  CHECK(sa.str() == sb.str());
}

TEST_CASE("route_for composes the right segments") {
  // EPC(0) - ES(1) - FS(2) - RU(3), plus a direct ES-RU link.
  std::vector<Node> nodes = {make_node(0, NodeRole::EPC, 0, 0), make_node(1, NodeRole::ES, 1, 0),
                             make_node(2, NodeRole::FS, 2, 0), make_node(3, NodeRole::RU, 3, 0)};
  std::vector<Link> links = {make_link(0, 1, 0.01, 0.01, 1.0), make_link(1, 2, 0.01, 0.02, 1.0),
                             make_link(2, 3, 0.01, 0.03, 1.0), make_link(1, 3, 0.05, 0.04, 2.5)};
  Topology topo(std::move(nodes), std::move(links), 10.0);

  SUBCASE("FS-using split has p0m, pml, plk") {
    const RoutePlan plan = route_for(topo, 3, true, 2, 1);
    REQUIRE(plan.p0m.has_value());
    REQUIRE(plan.pml.has_value());
    REQUIRE(plan.plk.has_value());
    CHECK_FALSE(plan.pmk.has_value());
    CHECK(plan.pml->delay_ms() == doctest::Approx(0.02));
    CHECK(plan.plk->delay_ms() == doctest::Approx(0.03));
    CHECK(plan.pml->path.links.size() == 1);  // one-edge segment
  }
  SUBCASE("integrated split has p0m and pmk only") {
    const RoutePlan plan = route_for(topo, 3, false, std::nullopt, 1);
    REQUIRE(plan.p0m.has_value());
    REQUIRE(plan.pmk.has_value());
    CHECK_FALSE(plan.pml.has_value());
    CHECK_FALSE(plan.plk.has_value());
    // weight 0.05 direct vs 0.02 via the FS: the two-hop path wins
    CHECK(plan.pmk->path.nodes == std::vector<int>{1, 2, 3});
  }
  SUBCASE("fs argument must match split kind") {
    CHECK_THROWS(route_for(topo, 3, true, std::nullopt, 1));
    CHECK_THROWS(route_for(topo, 3, false, 2, 1));
  }
}

TEST_CASE("segment delays are additive over link latencies") {
  Rng rng(3);
  Topology topo = random_graph(9, 0.5, rng);
  const PathResult p = topo.shortest_path(0, 3);
  double delay = 0.0, length = 0.0;
  for (int li : p.links) {
    delay += topo.links()[li].latency_ms;
    length += topo.links()[li].length_km;
  }
  CHECK(p.total_delay_ms == delay);
  CHECK(p.total_length_km == length);
}
