#include "rncsim/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <istream>
#include <ostream>
#include <queue>
#include <random>
#include <sstream>
#include <tuple>

#include "rncsim/errors.hpp"

namespace rncsim {

Network::Network(std::size_t num_nodes) : adjacency_(num_nodes) {}

void Network::add_link(NodeId u, NodeId v, int delay) {
  if (u >= num_nodes() || v >= num_nodes())
    throw InvalidParameter(fmt::format("link ({}, {}) references a node outside 0..{}",
                                       u, v, num_nodes() - 1));
  if (u == v) throw InvalidParameter(fmt::format("self-loop at node {}", u));
  if (delay < 1)
    throw InvalidParameter(fmt::format("link ({}, {}) has weight {} < 1", u, v, delay));
  if (weight(u, v)) throw InvalidParameter(fmt::format("duplicate link ({}, {})", u, v));

  const auto insert_sorted = [](std::vector<Neighbor>& list, Neighbor n) {
    const auto at = std::lower_bound(
        list.begin(), list.end(), n.node,
        [](const Neighbor& a, NodeId id) { return a.node < id; });
    list.insert(at, n);
  };
  insert_sorted(adjacency_[u], {v, delay});
  insert_sorted(adjacency_[v], {u, delay});

  const Link link{std::min(u, v), std::max(u, v), delay};
  const auto at = std::lower_bound(
      links_.begin(), links_.end(), link, [](const Link& a, const Link& b) {
        return std::tie(a.u, a.v) < std::tie(b.u, b.v);
      });
  links_.insert(at, link);
}

std::optional<int> Network::weight(NodeId u, NodeId v) const {
  if (u >= num_nodes() || v >= num_nodes()) return std::nullopt;
  const auto& list = adjacency_[u];
  const auto it = std::lower_bound(
      list.begin(), list.end(), v,
      [](const Neighbor& a, NodeId id) { return a.node < id; });
  if (it == list.end() || it->node != v) return std::nullopt;
  return it->weight;
}

int Network::max_weight() const {
  int best = 1;
  for (const auto& link : links_) best = std::max(best, link.weight);
  return best;
}

bool Network::connected() const {
  if (num_nodes() == 0) return true;
  std::vector<bool> reached(num_nodes(), false);
  std::queue<NodeId> frontier;
  frontier.push(0);
  reached[0] = true;
  std::size_t count = 1;
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop();
    for (const auto& n : adjacency_[u]) {
      if (reached[n.node]) continue;
      reached[n.node] = true;
      ++count;
      frontier.push(n.node);
    }
  }
  return count == num_nodes();
}

Network generate_random_network(const RandomTopologySpec& spec,
                                std::uint64_t seed, int max_attempts) {
  if (spec.num_nodes < 2)
    throw InvalidParameter(fmt::format("need at least 2 nodes, got {}", spec.num_nodes));
  if (!(spec.edge_probability > 0.0 && spec.edge_probability <= 1.0))
    throw InvalidParameter(fmt::format("edge probability {} outside (0, 1]",
                                       spec.edge_probability));
  if (!(spec.weight_mean >= 1.0) || !std::isfinite(spec.weight_mean))
    throw InvalidParameter(fmt::format("weight mean {} < 1", spec.weight_mean));
  if (!(spec.weight_stddev >= 0.0) || !std::isfinite(spec.weight_stddev))
    throw InvalidParameter(fmt::format("weight stddev {} < 0", spec.weight_stddev));
  if (max_attempts < 1) throw InvalidParameter("max_attempts must be >= 1");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::normal_distribution<double> gauss(
      spec.weight_mean, spec.weight_stddev > 0.0 ? spec.weight_stddev : 1.0);
  const auto draw_weight = [&] {
    const double sample = spec.weight_stddev > 0.0 ? gauss(rng) : spec.weight_mean;
    return static_cast<int>(std::max(1.0, std::round(sample)));
  };

  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    Network network(spec.num_nodes);
    for (NodeId u = 0; u < spec.num_nodes; ++u)
      for (NodeId v = u + 1; v < spec.num_nodes; ++v)
        if (coin(rng) < spec.edge_probability) network.add_link(u, v, draw_weight());
    if (network.connected()) return network;
  }
  throw ConnectivityFailure(fmt::format(
      "no connected graph with {} nodes at p = {} after {} attempts",
      spec.num_nodes, spec.edge_probability, max_attempts));
}

SpecialCase special_case_network(double rate_per_source, std::size_t k) {
  using namespace special;
  SpecialCase out{Network(9), {}};
  for (NodeId s : {s1, s2, s3}) out.network.add_link(s, n2, 1);
  for (NodeId d : {d1, d2, d3}) out.network.add_link(n2, d, 1);
  out.network.add_link(s1, n1, 2);
  out.network.add_link(n1, d1, 2);
  out.network.add_link(s3, n3, 2);
  out.network.add_link(n3, d3, 2);

  const NodeId srcs[] = {s1, s2, s3};
  const NodeId dsts[] = {d1, d2, d3};
  for (MessageId m = 0; m < 3; ++m)
    out.flows.push_back(FlowSpec{m, {srcs[m]}, {dsts[m]}, k, {rate_per_source}});
  return out;
}

RoleAssignment assign_roles(const Network& network, std::size_t num_sources,
                            std::size_t num_destinations) {
  const std::size_t n = network.num_nodes();
  if (num_sources == 0 || num_destinations == 0)
    throw InvalidParameter("need at least one source and one destination");
  if (num_sources + num_destinations > n)
    throw InvalidParameter(fmt::format(
        "{} sources and {} destinations overlap in a {}-node network",
        num_sources, num_destinations, n));
  RoleAssignment roles;
  for (NodeId i = 0; i < num_sources; ++i) roles.sources.push_back(i);
  for (std::size_t i = n - num_destinations; i < n; ++i)
    roles.destinations.push_back(static_cast<NodeId>(i));
  return roles;
}

void write_edge_list(std::ostream& out, const Network& network) {
  out << network.num_nodes() << ' ' << network.num_links() << '\n';
  for (const auto& link : network.links())
    out << link.u << ' ' << link.v << ' ' << link.weight << '\n';
}

Network read_edge_list(std::istream& in) {
  std::string line;
  const auto next_line = [&](const char* what) {
    while (std::getline(in, line))
      if (line.find_first_not_of(" \t\r") != std::string::npos) return;
    throw InvalidParameter(fmt::format("edge list ended before {}", what));
  };

  next_line("the header");
  std::istringstream header(line);
  long long v = 0, e = 0;
  if (!(header >> v >> e) || v < 0 || e < 0)
    throw InvalidParameter(fmt::format("bad edge list header '{}'", line));

  Network network(static_cast<std::size_t>(v));
  for (long long i = 0; i < e; ++i) {
    next_line("all links were read");
    std::istringstream row(line);
    long long a = 0, b = 0, w = 0;
    if (!(row >> a >> b >> w) || a < 0 || b < 0)
      throw InvalidParameter(fmt::format("bad edge list line '{}'", line));
    network.add_link(static_cast<NodeId>(a), static_cast<NodeId>(b),
                     static_cast<int>(w));
  }
  return network;
}

void save_edge_list(const std::string& path, const Network& network) {
  std::ofstream out(path);
  if (!out) throw IoError(fmt::format("cannot write {}", path));
  write_edge_list(out, network);
  if (!out) throw IoError(fmt::format("error writing {}", path));
}

Network load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open {}", path));
  return read_edge_list(in);
}

}  // namespace rncsim
