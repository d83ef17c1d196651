#include "vransim/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "vransim/io_util.hpp"
#include "vransim/rng.hpp"

namespace vransim {

std::string_view role_name(NodeRole r) {
  switch (r) {
    case NodeRole::EPC: return "EPC";
    case NodeRole::ES: return "ES";
    case NodeRole::FS: return "FS";
    case NodeRole::RU: return "RU";
    case NodeRole::ROUTER: return "ROUTER";
  }
  return "ROUTER";
}

std::optional<NodeRole> role_from_name(std::string_view s) {
  if (s == "EPC") return NodeRole::EPC;
  if (s == "ES") return NodeRole::ES;
  if (s == "FS") return NodeRole::FS;
  if (s == "RU") return NodeRole::RU;
  if (s == "ROUTER") return NodeRole::ROUTER;
  return std::nullopt;
}

Topology::Topology(std::vector<Node> nodes, std::vector<Link> links, double area_km)
    : nodes_(std::move(nodes)), links_(std::move(links)), area_km_(area_km) {
  const int n = static_cast<int>(nodes_.size());
  for (int i = 0; i < n; ++i) {
    if (nodes_[i].id != i)
      throw std::runtime_error("topology: node ids must be dense 0..n-1");
    const Node& nd = nodes_[i];
    switch (nd.role) {
      case NodeRole::EPC:
        if (epc_id_ != -1) throw std::runtime_error("topology: more than one EPC");
        epc_id_ = i;
        break;
      case NodeRole::ES: es_ids_.push_back(i); break;
      case NodeRole::FS: fs_ids_.push_back(i); break;
      case NodeRole::RU: ru_ids_.push_back(i); break;
      case NodeRole::ROUTER: break;
    }
    if (nd.compute_capacity_rc && *nd.compute_capacity_rc < 0.0)
      throw std::runtime_error("topology: negative compute capacity at node " + std::to_string(i));
  }
  if (epc_id_ == -1) throw std::runtime_error("topology: missing EPC node");

  adj_.assign(nodes_.size(), {});
  for (std::size_t li = 0; li < links_.size(); ++li) {
    const Link& l = links_[li];
    if (l.u < 0 || l.u >= n || l.v < 0 || l.v >= n || l.u == l.v)
      throw std::runtime_error("topology: bad link endpoints");
    if (l.latency_ms < 0 || l.capacity_gbps <= 0 || l.weight < 0 || l.length_km < 0)
      throw std::runtime_error("topology: bad link attributes on (" + std::to_string(l.u) +
                               "," + std::to_string(l.v) + ")");
    adj_[l.u].push_back({l.v, static_cast<int>(li)});
    adj_[l.v].push_back({l.u, static_cast<int>(li)});
  }
  // Deterministic neighbor order regardless of link insertion order.
  for (auto& a : adj_) std::sort(a.begin(), a.end());
}

const Node& Topology::node(int id) const {
  if (id < 0 || id >= static_cast<int>(nodes_.size()))
    throw std::runtime_error("topology: no such node " + std::to_string(id));
  return nodes_[id];
}

bool Topology::connected_from_epc() const {
  std::vector<char> seen(nodes_.size(), 0);
  std::vector<int> stack{epc_id_};
  seen[epc_id_] = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (const auto& [v, li] : adj_[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        stack.push_back(v);
      }
    }
  }
  for (int ru : ru_ids_)
    if (!seen[ru]) return false;
  return true;
}

PathResult Topology::shortest_path(int src, int dst) const {
  node(src);
  node(dst);
  PathResult res;
  res.nodes = {src};
  if (src == dst) return res;

  const int n = static_cast<int>(nodes_.size());
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, kInf);
  // Labels are (weight, node sequence), compared lexicographically; the
  // label grows under path extension, so settling the minimum label first
  // yields the lexicographically smallest tied path. Graphs here are small
  // enough to carry the sequences around.
  std::vector<std::vector<int>> seq(n);
  std::vector<std::vector<int>> lseq(n);  // link indices along seq
  std::vector<char> done(n, 0);

  dist[src] = 0.0;
  seq[src] = {src};

  struct QE {
    double d;
    std::vector<int> seq;
    int node;
    bool operator>(const QE& o) const {
      if (d != o.d) return d > o.d;
      return seq > o.seq;
    }
  };
  std::priority_queue<QE, std::vector<QE>, std::greater<QE>> pq;
  pq.push({0.0, seq[src], src});
  while (!pq.empty()) {
    QE top = pq.top();
    pq.pop();
    const int u = top.node;
    if (done[u] || top.d > dist[u] || top.seq != seq[u]) continue;
    done[u] = 1;
    for (const auto& [v, li] : adj_[u]) {
      if (done[v]) continue;
      const double nd = dist[u] + links_[li].weight;
      bool better = nd < dist[v];
      if (!better && nd == dist[v]) {
        std::vector<int> cand = seq[u];
        cand.push_back(v);
        better = cand < seq[v];
      }
      if (better) {
        dist[v] = nd;
        seq[v] = seq[u];
        seq[v].push_back(v);
        lseq[v] = lseq[u];
        lseq[v].push_back(li);
        pq.push({nd, seq[v], v});
      }
    }
  }
  if (dist[dst] == kInf)
    throw std::runtime_error("topology: no path from " + std::to_string(src) + " to " +
                             std::to_string(dst));
  res.nodes = seq[dst];
  res.links = lseq[dst];
  res.total_weight = dist[dst];
  for (int li : res.links) {
    res.total_delay_ms += links_[li].latency_ms;
    res.total_length_km += links_[li].length_km;
  }
  return res;
}

RoutePlan route_for(const Topology& topo, int bs, bool uses_fs, std::optional<int> fs, int es) {
  if (uses_fs != fs.has_value())
    throw std::runtime_error("route_for: FS id must be given exactly for FS-using splits");
  RoutePlan plan;
  plan.bs_id = bs;
  plan.p0m = RouteSegment{topo.shortest_path(topo.epc_id(), es)};
  if (uses_fs) {
    plan.pml = RouteSegment{topo.shortest_path(es, *fs)};
    plan.plk = RouteSegment{topo.shortest_path(*fs, bs)};
  } else {
    plan.pmk = RouteSegment{topo.shortest_path(es, bs)};
  }
  return plan;
}

namespace {

double euclid(const Node& a, const Node& b) {
  return std::hypot(a.x_km - b.x_km, a.y_km - b.y_km);
}

struct Dsu {
  std::vector<int> parent;
  explicit Dsu(int n) : parent(n) {
    for (int i = 0; i < n; ++i) parent[i] = i;
  }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[b] = a;
    return true;
  }
};

Link draw_link(int u, int v, double length, Rng& rng) {
  Link l;
  l.u = u;
  l.v = v;
  l.latency_ms = rng.uniform(0.0, 0.1);
  l.capacity_gbps = rng.uniform(30.0, 160.0);
  l.weight = rng.uniform(0.0, 0.1);
  l.length_km = length;
  return l;
}

}  // namespace

Topology generate_waxman(const WaxmanParams& p) {
  if (p.n_nodes < 1 + p.n_es + p.n_fs + p.n_ru)
    throw std::runtime_error("generate_waxman: role counts exceed node count");
  if (!(p.alpha > 0.0 && p.alpha <= 1.0) || !(p.beta > 0.0 && p.beta <= 1.0))
    throw std::runtime_error("generate_waxman: alpha and beta must be in (0, 1]");

  Rng rng(p.seed);
  const int n = p.n_nodes;
  std::vector<Node> nodes(n);
  for (int i = 0; i < n; ++i) {
    nodes[i].id = i;
    nodes[i].role = NodeRole::ROUTER;
    nodes[i].x_km = rng.uniform(0.0, p.area_km);
    nodes[i].y_km = rng.uniform(0.0, p.area_km);
  }

  double d_max = 0.0;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) d_max = std::max(d_max, euclid(nodes[u], nodes[v]));
  if (d_max == 0.0) d_max = 1.0;  // all nodes coincide; probability becomes alpha

  std::vector<Link> links;
  Dsu dsu(n);
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      const double d = euclid(nodes[u], nodes[v]);
      const double prob = p.alpha * std::exp(-d / (p.beta * d_max));
      if (rng.uniform() < prob) {
        links.push_back(draw_link(u, v, d, rng));
        dsu.unite(u, v);
      }
    }
  }

  // Connectivity repair: join the closest node pair across components until
  // one component remains. At most n-1 rounds by construction.
  for (int round = 0; round < n; ++round) {
    int best_u = -1, best_v = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) {
        if (dsu.find(u) == dsu.find(v)) continue;
        const double d = euclid(nodes[u], nodes[v]);
        if (d < best_d) {
          best_d = d;
          best_u = u;
          best_v = v;
        }
      }
    }
    if (best_u == -1) break;  // connected
    links.push_back(draw_link(best_u, best_v, best_d, rng));
    dsu.unite(best_u, best_v);
  }
  {
    const int root = dsu.find(0);
    for (int i = 1; i < n; ++i)
      if (dsu.find(i) != root)
        throw std::runtime_error("generate_waxman: connectivity repair failed");
  }

  // Role assignment: highest final degree first (EPC, then ES, FS, RU);
  // ties toward the lower node id.
  std::vector<int> degree(n, 0);
  for (const Link& l : links) {
    ++degree[l.u];
    ++degree[l.v];
  }
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return degree[a] != degree[b] ? degree[a] > degree[b] : a < b; });
  int pos = 0;
  nodes[order[pos++]].role = NodeRole::EPC;
  for (int i = 0; i < p.n_es; ++i) {
    nodes[order[pos]].role = NodeRole::ES;
    nodes[order[pos++]].compute_capacity_rc = p.es_capacity_rc;
  }
  for (int i = 0; i < p.n_fs; ++i) {
    nodes[order[pos]].role = NodeRole::FS;
    nodes[order[pos++]].compute_capacity_rc = p.fs_capacity_rc;
  }
  for (int i = 0; i < p.n_ru; ++i) nodes[order[pos++]].role = NodeRole::RU;

  return Topology(std::move(nodes), std::move(links), p.area_km);
}

void Topology::save(std::ostream& out) const {
  out << "vransim-topology 1\n";
  out << "area_km " << fmt_g17(area_km_) << "\n";
  out << "nodes " << nodes_.size() << "\n";
  for (const Node& nd : nodes_) {
    out << "node " << nd.id << ' ' << role_name(nd.role) << ' ' << fmt_g17(nd.x_km) << ' '
        << fmt_g17(nd.y_km) << ' '
        << (nd.compute_capacity_rc ? fmt_g17(*nd.compute_capacity_rc) : std::string("-")) << "\n";
  }
  out << "links " << links_.size() << "\n";
  for (const Link& l : links_) {
    out << "link " << l.u << ' ' << l.v << ' ' << fmt_g17(l.latency_ms) << ' '
        << fmt_g17(l.capacity_gbps) << ' ' << fmt_g17(l.weight) << ' ' << fmt_g17(l.length_km)
        << "\n";
  }
}

void Topology::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("topology: cannot write " + path);
  save(out);
  if (!out.good()) throw std::runtime_error("topology: write failed for " + path);
}

Topology Topology::load(std::istream& in) {
  std::string line;
  auto next_line = [&](const char* what) {
    if (!std::getline(in, line)) throw std::runtime_error(std::string("topology file: missing ") + what);
    line = strip(line);
  };
  next_line("header");
  if (line != "vransim-topology 1")
    throw std::runtime_error("topology file: unsupported header '" + line + "'");
  next_line("area_km");
  auto fields = split(line, ' ');
  if (fields.size() != 2 || fields[0] != "area_km")
    throw std::runtime_error("topology file: expected area_km record");
  const double area = parse_double(fields[1], "area_km");
  next_line("node count");
  fields = split(line, ' ');
  if (fields.size() != 2 || fields[0] != "nodes")
    throw std::runtime_error("topology file: expected nodes record");
  const long n_nodes = parse_long(fields[1], "nodes");

  std::vector<Node> nodes;
  nodes.reserve(n_nodes);
  for (long i = 0; i < n_nodes; ++i) {
    next_line("node record");
    fields = split(line, ' ');
    if (fields.size() != 6 || fields[0] != "node")
      throw std::runtime_error("topology file: bad node record '" + line + "'");
    Node nd;
    nd.id = static_cast<int>(parse_long(fields[1], "node id"));
    const auto role = role_from_name(fields[2]);
    if (!role) throw std::runtime_error("topology file: unknown role '" + fields[2] + "'");
    nd.role = *role;
    nd.x_km = parse_double(fields[3], "node x_km");
    nd.y_km = parse_double(fields[4], "node y_km");
    if (fields[5] != "-") nd.compute_capacity_rc = parse_double(fields[5], "node capacity_rc");
    nodes.push_back(nd);
  }

  next_line("link count");
  fields = split(line, ' ');
  if (fields.size() != 2 || fields[0] != "links")
    throw std::runtime_error("topology file: expected links record");
  const long n_links = parse_long(fields[1], "links");
  std::vector<Link> links;
  links.reserve(n_links);
  for (long i = 0; i < n_links; ++i) {
    next_line("link record");
    fields = split(line, ' ');
    if (fields.size() != 7 || fields[0] != "link")
      throw std::runtime_error("topology file: bad link record '" + line + "'");
    Link l;
    l.u = static_cast<int>(parse_long(fields[1], "link u"));
    l.v = static_cast<int>(parse_long(fields[2], "link v"));
    l.latency_ms = parse_double(fields[3], "link latency_ms");
    l.capacity_gbps = parse_double(fields[4], "link capacity_gbps");
    l.weight = parse_double(fields[5], "link weight");
    l.length_km = parse_double(fields[6], "link length_km");
    links.push_back(l);
  }
  return Topology(std::move(nodes), std::move(links), area);
}

Topology Topology::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("topology: cannot open " + path);
  return load(in);
}

}  // namespace vransim
