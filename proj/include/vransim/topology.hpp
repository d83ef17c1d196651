#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace vransim {

enum class NodeRole { EPC, ES, FS, RU, ROUTER };

std::string_view role_name(NodeRole r);
std::optional<NodeRole> role_from_name(std::string_view s);

struct Node {
  int id = -1;
  NodeRole role = NodeRole::ROUTER;
  double x_km = 0.0;
  double y_km = 0.0;
  // Server capacity in reference cores; present for ES and FS nodes only.
  std::optional<double> compute_capacity_rc;
};

struct Link {
  int u = -1;
  int v = -1;
  double latency_ms = 0.0;
  double capacity_gbps = 0.0;
  double weight = 0.0;
  double length_km = 0.0;
};

struct PathResult {
  std::vector<int> links;  // link indices, in path order; empty for src == dst
  std::vector<int> nodes;  // node sequence, starts at src, ends at dst
  double total_weight = 0.0;
  double total_delay_ms = 0.0;
  double total_length_km = 0.0;
};

// Tiered vRAN transport graph. Immutable after construction; safe to share
// read-only across workers.
class Topology {
 public:
  Topology(std::vector<Node> nodes, std::vector<Link> links, double area_km);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Link>& links() const { return links_; }
  double area_km() const { return area_km_; }

  int epc_id() const { return epc_id_; }
  const std::vector<int>& es_ids() const { return es_ids_; }
  const std::vector<int>& fs_ids() const { return fs_ids_; }
  const std::vector<int>& ru_ids() const { return ru_ids_; }

  const Node& node(int id) const;
  bool connected_from_epc() const;

  // Minimum total-weight path; ties broken toward the lexicographically
  // smallest node-id sequence. Throws if dst is unreachable.
  PathResult shortest_path(int src, int dst) const;

  void save(std::ostream& out) const;
  void save_file(const std::string& path) const;
  static Topology load(std::istream& in);
  static Topology load_file(const std::string& path);

 private:
  std::vector<Node> nodes_;
  std::vector<Link> links_;
  double area_km_;
  int epc_id_ = -1;
  std::vector<int> es_ids_, fs_ids_, ru_ids_;
  std::vector<std::vector<std::pair<int, int>>> adj_;  // node -> (neighbor, link index)
};

struct RouteSegment {
  PathResult path;
  double delay_ms() const { return path.total_delay_ms; }
  double length_km() const { return path.total_length_km; }
};

// The per-BS routing induced by (split, vDU location, vCU location): the
// EPC->ES backhaul segment always, ES->FS and FS->RU when an FS is in use,
// ES->RU otherwise.
struct RoutePlan {
  int bs_id = -1;
  std::optional<RouteSegment> p0m;  // EPC -> ES
  std::optional<RouteSegment> pml;  // ES -> FS
  std::optional<RouteSegment> pmk;  // ES -> RU
  std::optional<RouteSegment> plk;  // FS -> RU
};

struct WaxmanParams {
  int n_nodes = 21;
  double alpha = 0.5;  // link probability scale
  double beta = 0.1;   // edge length control
  int n_es = 4;
  int n_fs = 8;
  int n_ru = 8;
  double area_km = 10.0;
  std::uint64_t seed = 1;
  double fs_capacity_rc = 20.0;
  double es_capacity_rc = 100.0;
};

Topology generate_waxman(const WaxmanParams& params);

// Composes the shortest-path segments for one BS. fs must be set exactly
// when the split uses an FS (S1-S3).
RoutePlan route_for(const Topology& topo, int bs, bool uses_fs, std::optional<int> fs, int es);

}  // namespace vransim
