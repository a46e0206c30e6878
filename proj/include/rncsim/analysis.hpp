#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "rncsim/engine.hpp"
#include "rncsim/topology.hpp"
#include "rncsim/traffic.hpp"
#include "rncsim/types.hpp"

namespace rncsim {

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

struct Route {
  NodeId source = kNoNode;
  NodeId destination = kNoNode;
  std::vector<NodeId> hops;
  Slot propagation_delay = 0;
};

/// Single-source shortest distances; -1 marks unreachable or removed nodes.
/// `removed` (optional, size V) masks nodes out of the graph.
std::vector<Slot> shortest_distances(const Network& network, NodeId source,
                                     const std::vector<bool>& removed = {});

/// Minimum-weight path; among equal-weight paths the lexicographically
/// smallest hop sequence. Throws Unreachable.
Route dijkstra_route(const Network& network, NodeId source,
                     NodeId destination, const std::vector<bool>& removed = {});

struct Crossing {
  MessageId message = 0;
  NodeId source = kNoNode;
  NodeId destination = kNoNode;
};

struct BottleneckReport {
  NodeId node = kNoNode;
  std::vector<Crossing> crossing_flows;
  /// One entry per message whose routes reach the node: the summed rate of
  /// that message's sources on those routes.
  std::vector<double> component_rates;
  double aggregate_rate = 0.0;
};

/// Nodes where routes of at least two distinct messages gather with
/// differing immediate predecessors. Routes of the same message never form a
/// bottleneck between themselves.
std::vector<BottleneckReport> find_bottlenecks(const Network& network,
                                               std::span<const Route> routes,
                                               std::span<const FlowSpec> flows);

/// Mean wait of a unit-service discrete-time queue fed by independent
/// Bernoulli streams: E[A(A-1)] / (2 lambda (1 - lambda)). Returns
/// kUnbounded when lambda >= 1.
double queuing_bound(std::span<const double> rates);
double queuing_bound(const BottleneckReport& bottleneck);

/// Detour search: drop every bottleneck node and rerun the shortest
/// path search. std::nullopt when the residual graph disconnects the pair.
std::optional<Route> detect_detour(const Network& network, NodeId source,
                                   NodeId destination,
                                   std::span<const BottleneckReport> bottlenecks);

/// Extra Bernoulli streams sharing a node with the priced flow.
using CrossTraffic = std::map<NodeId, std::vector<double>>;

/// Sum of per-hop queuing_bound over the intermediate hops of `route`, each
/// hop fed by the flow itself plus any cross traffic listed for it.
double detour_queuing(const Route& route, double own_rate,
                      const CrossTraffic& cross = {});

struct DetourEstimate {
  Route route;
  Slot propagation = 0;
  double queuing = 0.0;
};

struct DelayEstimate {
  NodeId source = kNoNode;
  NodeId destination = kNoNode;
  Route route;
  Slot propagation = 0;
  double queuing_bound = 0.0;
  std::optional<DetourEstimate> detour;
  double combined = 0.0;
};

/// Shortest-path routes of every (source, destination) pair of every flow,
/// in flow order, sources outer, destinations inner.
std::vector<Route> flow_routes(const Network& network,
                               std::span<const FlowSpec> flows);

DelayEstimate approximate_delay(const Network& network,
                                std::span<const FlowSpec> flows,
                                NodeId source, NodeId destination);

/// approximate_delay for every pair of every flow, sharing one bottleneck
/// analysis. Same order as flow_routes().
std::vector<DelayEstimate> approximate_all(const Network& network,
                                           std::span<const FlowSpec> flows);

/// True for a flow iff it is the only message carrying traffic (per the
/// record's packet log when given, otherwise per non-zero rates). Coding is
/// always on in this simulator.
std::vector<bool> same_message_exemption(std::span<const FlowSpec> flows,
                                         const SimulationRecord* record = nullptr);

}  // namespace rncsim
