#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rncsim/traffic.hpp"
#include "rncsim/types.hpp"

namespace rncsim {

/// Undirected link stored canonically with u < v; weight is a delay in slots.
struct Link {
  NodeId u = 0;
  NodeId v = 0;
  int weight = 1;

  friend bool operator==(const Link&, const Link&) = default;
};

struct Neighbor {
  NodeId node = 0;
  int weight = 1;
};

/// Weighted undirected graph over nodes 0..V-1. Adjacency lists are kept
/// sorted by neighbor id so every traversal is deterministic.
class Network {
 public:
  Network() = default;
  explicit Network(std::size_t num_nodes);

  /// Adds the undirected link {u, v}. Throws InvalidParameter on self-loops,
  /// out-of-range ids, weight < 1 or a duplicate link.
  void add_link(NodeId u, NodeId v, int weight);

  [[nodiscard]] std::size_t num_nodes() const { return adjacency_.size(); }
  [[nodiscard]] std::size_t num_links() const { return links_.size(); }
  [[nodiscard]] std::span<const Link> links() const { return links_; }
  [[nodiscard]] std::span<const Neighbor> neighbors(NodeId node) const {
    return adjacency_.at(node);
  }
  [[nodiscard]] std::optional<int> weight(NodeId u, NodeId v) const;
  [[nodiscard]] int max_weight() const;
  [[nodiscard]] bool connected() const;

  friend bool operator==(const Network& a, const Network& b) {
    return a.links_ == b.links_ && a.adjacency_.size() == b.adjacency_.size();
  }

 private:
  std::vector<Link> links_;
  std::vector<std::vector<Neighbor>> adjacency_;
};

struct RoleAssignment {
  std::vector<NodeId> sources;
  std::vector<NodeId> destinations;
};

struct RandomTopologySpec {
  std::size_t num_nodes = 30;
  double edge_probability = 0.15;
  double weight_mean = 2.0;
  double weight_stddev = 1.0;
};

/// Erdos-Renyi style graph with Gaussian integer weights (rounded, clamped
/// below at 1). Disconnected samples are discarded and redrawn from the same
/// RNG stream, up to `max_attempts` times.
Network generate_random_network(const RandomTopologySpec& spec,
                                std::uint64_t seed, int max_attempts = 1000);

/// Node ids of the three-pair example topology.
namespace special {
inline constexpr NodeId s1 = 0, s2 = 1, s3 = 2;
inline constexpr NodeId n1 = 3, n2 = 4, n3 = 5;
inline constexpr NodeId d1 = 6, d2 = 7, d3 = 8;
}  // namespace special

struct SpecialCase {
  Network network;
  std::vector<FlowSpec> flows;
};

/// Three transmission pairs (s_i, d_i) whose shortest paths all cross n2 with
/// delay 2; (s1, d1) and (s3, d3) also have weight-4 detours through n1 and
/// n3, (s2, d2) has none. One distinct message per pair, each at
/// `rate_per_source`.
SpecialCase special_case_network(double rate_per_source = 0.5,
                                 std::size_t k = 1);

/// Sources are the smallest ids, destinations the largest ones.
RoleAssignment assign_roles(const Network& network, std::size_t num_sources,
                            std::size_t num_destinations);

// Edge-list text format: "V E" on the first line, then one "u v w" per link.
void write_edge_list(std::ostream& out, const Network& network);
Network read_edge_list(std::istream& in);
void save_edge_list(const std::string& path, const Network& network);
Network load_edge_list(const std::string& path);

}  // namespace rncsim
