#include "rncsim/analysis.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <functional>
#include <queue>
#include <map>
#include <set>

#include "rncsim/errors.hpp"

namespace rncsim {
namespace {

bool is_removed(const std::vector<bool>& removed, NodeId node) {
  return !removed.empty() && removed[node];
}

const FlowSpec* flow_of_pair(std::span<const FlowSpec> flows, NodeId source,
                             NodeId destination) {
  for (const auto& flow : flows)
    if (flow.has_source(source) && flow.has_destination(destination)) return &flow;
  return nullptr;
}

}  // namespace

std::vector<Slot> shortest_distances(const Network& network, NodeId source,
                                     const std::vector<bool>& removed) {
  const std::size_t n = network.num_nodes();
  if (!removed.empty() && removed.size() != n)
    throw InvalidParameter("removal mask size differs from node count");
  std::vector<Slot> dist(n, -1);
  if (source >= n || is_removed(removed, source)) return dist;

  using Entry = std::pair<Slot, NodeId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> frontier;
  dist[source] = 0;
  frontier.emplace(0, source);
  while (!frontier.empty()) {
    const auto [d, u] = frontier.top();
    frontier.pop();
    if (d != dist[u]) continue;
    for (const auto& nb : network.neighbors(u)) {
      if (is_removed(removed, nb.node)) continue;
      const Slot candidate = d + nb.weight;
      if (dist[nb.node] < 0 || candidate < dist[nb.node]) {
        dist[nb.node] = candidate;
        frontier.emplace(candidate, nb.node);
      }
    }
  }
  return dist;
}

Route dijkstra_route(const Network& network, NodeId source, NodeId destination,
                     const std::vector<bool>& removed) {
  if (source >= network.num_nodes() || destination >= network.num_nodes())
    throw InvalidParameter(fmt::format("pair ({}, {}) out of range", source, destination));
  const auto from_source = shortest_distances(network, source, removed);
  if (from_source[destination] < 0)
    throw Unreachable(fmt::format("node {} cannot reach node {}", source, destination));
  const auto to_destination = shortest_distances(network, destination, removed);
  const Slot total = from_source[destination];

  // Walk the shortest-path DAG, always taking the smallest admissible id.
  Route route{source, destination, {source}, total};
  NodeId at = source;
  while (at != destination) {
    NodeId next = kNoNode;
    for (const auto& nb : network.neighbors(at)) {
      if (is_removed(removed, nb.node) || to_destination[nb.node] < 0) continue;
      if (from_source[at] + nb.weight + to_destination[nb.node] == total) {
        next = nb.node;
        break;
      }
    }
    route.hops.push_back(next);
    at = next;
  }
  return route;
}

std::vector<BottleneckReport> find_bottlenecks(const Network& network,
                                               std::span<const Route> routes,
                                               std::span<const FlowSpec> flows) {
  struct Visit {
    std::size_t route;
    MessageId message;
    NodeId predecessor;
  };
  std::vector<std::vector<Visit>> visits(network.num_nodes());
  std::vector<const FlowSpec*> owner(routes.size());
  for (std::size_t r = 0; r < routes.size(); ++r) {
    owner[r] = flow_of_pair(flows, routes[r].source, routes[r].destination);
    if (!owner[r])
      throw InvalidParameter(fmt::format("route ({}, {}) belongs to no flow",
                                         routes[r].source, routes[r].destination));
    const auto& hops = routes[r].hops;
    for (std::size_t k = 0; k < hops.size(); ++k)
      visits.at(hops[k]).push_back(
          {r, owner[r]->message_id, k == 0 ? kNoNode : hops[k - 1]});
  }

  std::vector<BottleneckReport> reports;
  for (NodeId node = 0; node < visits.size(); ++node) {
    const auto& here = visits[node];
    bool bottleneck = false;
    for (std::size_t i = 0; i < here.size() && !bottleneck; ++i)
      for (std::size_t j = i + 1; j < here.size() && !bottleneck; ++j)
        bottleneck = here[i].message != here[j].message &&
                     here[i].predecessor != here[j].predecessor;
    if (!bottleneck) continue;

    BottleneckReport report;
    report.node = node;
    // Sources of one message merge into a single stream at their summed rate.
    std::set<NodeId> counted;
    std::map<MessageId, double> per_message;
    for (const auto& v : here) {
      const auto& route = routes[v.route];
      report.crossing_flows.push_back({v.message, route.source, route.destination});
      if (counted.insert(route.source).second)
        per_message[v.message] += owner[v.route]->rate_of(route.source);
    }
    for (const auto& [message, rate] : per_message) {
      report.component_rates.push_back(rate);
      report.aggregate_rate += rate;
    }
    reports.push_back(std::move(report));
  }
  return reports;
}

double queuing_bound(std::span<const double> rates) {
  double lambda = 0.0;
  double squares = 0.0;
  for (double r : rates) {
    lambda += r;
    squares += r * r;
  }
  if (lambda >= 1.0) return kUnbounded;
  if (lambda <= 0.0) return 0.0;
  // E[A(A-1)] for a sum of independent Bernoulli(r_i) is (sum r)^2 - sum r^2.
  const double second_factorial = std::max(0.0, lambda * lambda - squares);
  return second_factorial / (2.0 * lambda * (1.0 - lambda));
}

double queuing_bound(const BottleneckReport& bottleneck) {
  return queuing_bound(bottleneck.component_rates);
}

std::optional<Route> detect_detour(const Network& network, NodeId source,
                                   NodeId destination,
                                   std::span<const BottleneckReport> bottlenecks) {
  std::vector<bool> removed(network.num_nodes(), false);
  for (const auto& b : bottlenecks) removed.at(b.node) = true;
  if (removed.at(source) || removed.at(destination)) return std::nullopt;
  try {
    return dijkstra_route(network, source, destination, removed);
  } catch (const Unreachable&) {
    return std::nullopt;
  }
}

double detour_queuing(const Route& route, double own_rate,
                      const CrossTraffic& cross) {
  double total = 0.0;
  for (std::size_t k = 1; k + 1 < route.hops.size(); ++k) {
    std::vector<double> rates{own_rate};
    if (const auto it = cross.find(route.hops[k]); it != cross.end())
      rates.insert(rates.end(), it->second.begin(), it->second.end());
    total += queuing_bound(rates);
  }
  return total;
}

std::vector<Route> flow_routes(const Network& network,
                               std::span<const FlowSpec> flows) {
  std::vector<Route> routes;
  for (const auto& flow : flows)
    for (NodeId s : flow.sources)
      for (NodeId d : flow.destinations)
        routes.push_back(dijkstra_route(network, s, d));
  return routes;
}

namespace {

DelayEstimate estimate_pair(const Network& network,
                            std::span<const FlowSpec> flows,
                            std::span<const BottleneckReport> bottlenecks,
                            Route route) {
  DelayEstimate estimate;
  estimate.source = route.source;
  estimate.destination = route.destination;
  estimate.propagation = route.propagation_delay;
  for (std::size_t k = 1; k + 1 < route.hops.size(); ++k)
    for (const auto& b : bottlenecks)
      if (b.node == route.hops[k]) estimate.queuing_bound += queuing_bound(b);
  estimate.route = std::move(route);

  const FlowSpec* flow = flow_of_pair(flows, estimate.source, estimate.destination);
  const double own_rate = flow ? flow->rate_of(estimate.source) : 0.0;

  estimate.combined = static_cast<double>(estimate.propagation) + estimate.queuing_bound;
  if (auto detour = detect_detour(network, estimate.source, estimate.destination,
                                  bottlenecks)) {
    DetourEstimate branch;
    branch.propagation = detour->propagation_delay;
    branch.queuing = detour_queuing(*detour, own_rate);
    branch.route = std::move(*detour);
    estimate.combined = std::min(
        estimate.combined, static_cast<double>(branch.propagation) + branch.queuing);
    estimate.detour = std::move(branch);
  }
  return estimate;
}

}  // namespace

std::vector<DelayEstimate> approximate_all(const Network& network,
                                           std::span<const FlowSpec> flows) {
  auto routes = flow_routes(network, flows);
  const auto bottlenecks = find_bottlenecks(network, routes, flows);
  std::vector<DelayEstimate> out;
  out.reserve(routes.size());
  for (auto& route : routes)
    out.push_back(estimate_pair(network, flows, bottlenecks, std::move(route)));
  return out;
}

DelayEstimate approximate_delay(const Network& network,
                                std::span<const FlowSpec> flows, NodeId source,
                                NodeId destination) {
  const auto routes = flow_routes(network, flows);
  const auto bottlenecks = find_bottlenecks(network, routes, flows);
  return estimate_pair(network, flows, bottlenecks,
                       dijkstra_route(network, source, destination));
}

std::vector<bool> same_message_exemption(std::span<const FlowSpec> flows,
                                         const SimulationRecord* record) {
  std::set<MessageId> active;
  if (record) {
    for (const auto& p : record->packets) active.insert(p.message);
  } else {
    for (const auto& flow : flows)
      if (message_rate(flow) > 0.0) active.insert(flow.message_id);
  }
  std::vector<bool> out;
  out.reserve(flows.size());
  for (const auto& flow : flows)
    out.push_back(active.empty() ||
                  (active.size() == 1 && *active.begin() == flow.message_id));
  return out;
}

}  // namespace rncsim
