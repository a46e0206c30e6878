#include "rncsim/engine.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <limits>

#include "rncsim/errors.hpp"

namespace rncsim {
namespace {

constexpr std::size_t kNoFlow = std::numeric_limits<std::size_t>::max();

}  // namespace

std::string to_string(ArrivalPolicy policy) {
  return policy == ArrivalPolicy::drop ? "drop" : "defer";
}

std::string to_string(RelayScope scope) {
  return scope == RelayScope::all ? "all" : "own-message";
}

ArrivalPolicy parse_arrival_policy(const std::string& text) {
  if (text == "drop") return ArrivalPolicy::drop;
  if (text == "defer") return ArrivalPolicy::defer;
  throw InvalidParameter(fmt::format("unknown arrival policy '{}' (drop|defer)", text));
}

RelayScope parse_relay_scope(const std::string& text) {
  if (text == "all") return RelayScope::all;
  if (text == "own-message" || text == "own_message") return RelayScope::own_message;
  throw InvalidParameter(fmt::format("unknown relay scope '{}' (own-message|all)", text));
}

Simulator::Simulator(const Network& network, EngineOptions options)
    : network_(&network), options_(options) {
  const std::size_t n = network.num_nodes();
  nodes_.resize(n);
  for (NodeId i = 0; i < n; ++i) nodes_[i].node = i;
  calendar_.resize(static_cast<std::size_t>(network.max_weight()) + 1);
  source_flow_.assign(n, kNoFlow);
  destination_flow_.assign(n, kNoFlow);
  record_.num_nodes = n;
}

Simulator::Simulator(const Network& network, std::vector<FlowSpec> flows,
                     const TrafficConfig& traffic, std::uint64_t seed,
                     EngineOptions options)
    : Simulator(network, options) {
  validate_flows(flows, network.num_nodes());
  flows_ = std::move(flows);
  arrivals_.emplace(flows_, traffic, seed);
  message_start_.assign(flows_.size(), kNever);
  for (std::size_t f = 0; f < flows_.size(); ++f) {
    const auto& flow = flows_[f];
    for (NodeId s : flow.sources) source_flow_[s] = f;
    for (NodeId d : flow.destinations) {
      destination_flow_[d] = f;
      nodes_[d].decoder.emplace(flow.message_id, flow.k, traffic.payload_bytes);
    }
  }
}

PacketId Simulator::inject(NodeId origin, CodedPacket packet) {
  if (origin >= nodes_.size())
    throw InvalidParameter(fmt::format("cannot inject at node {}", origin));
  const auto id = static_cast<PacketId>(packets_.size());
  packet.origin = origin;
  packet.created_slot = now_;
  packet.trace = {origin};
  record_.packets.push_back({packet.message_id, origin, now_});
  packets_.push_back(std::move(packet));
  injected_.emplace_back(origin, id);
  return id;
}

Admission& Simulator::admission(NodeId node, PacketId id) {
  auto& list = nodes_[node].admissions;
  if (id >= list.size()) list.resize(packets_.size());
  return list[id];
}

bool Simulator::accepts(NodeId node, MessageId message) const {
  std::size_t flow = kNoFlow;
  for (std::size_t f = 0; f < flows_.size(); ++f)
    if (flows_[f].message_id == message) flow = f;

  if (options_.relay_scope == RelayScope::all)
    return flow == kNoFlow || source_flow_[node] != flow;

  if (source_flow_[node] != kNoFlow) return false;
  if (destination_flow_[node] != kNoFlow) return destination_flow_[node] == flow;
  return true;
}

void Simulator::enqueue_origin(NodeId origin, PacketId id) {
  auto& a = admission(origin, id);
  if (a.slot != kNever) return;
  a = Admission{now_, kNoNode, 0};
  nodes_[origin].queue.push_back(id);
  ++nodes_[origin].generated;
}

void Simulator::admit(NodeId receiver, const InFlight& arrival) {
  auto& state = nodes_[receiver];
  if (state.seen(arrival.packet)) {
    ++state.discarded;
    return;
  }
  const auto hops = admission(arrival.sender, arrival.packet).hops + 1;
  admission(receiver, arrival.packet) = Admission{now_, arrival.sender, hops};
  state.queue.push_back(arrival.packet);
  ++state.admitted;

  const std::size_t flow = destination_flow_[receiver];
  const CodedPacket& packet = packets_[arrival.packet];
  if (flow == kNoFlow || flows_[flow].message_id != packet.message_id) return;

  record_.deliveries.push_back(Delivery{arrival.packet, packet.message_id,
                                        packet.origin, receiver,
                                        packet.created_slot, now_, kNever,
                                        trace(receiver, arrival.packet)});
  if (state.decoder && state.decoded_slot == kNever) {
    state.decoder->absorb(packet);
    if (state.decoder->decodable()) {
      state.decoded_slot = now_;
      record_.decodes.push_back(
          {packet.message_id, receiver, message_start_[flow], now_});
    }
  }
}

void Simulator::receive_drop(NodeId receiver, std::vector<InFlight>& arrivals) {
  if (arrivals.empty()) return;
  nodes_[receiver].dropped += static_cast<std::uint32_t>(arrivals.size() - 1);
  admit(receiver, arrivals.front());
}

void Simulator::receive_defer(NodeId receiver, std::vector<InFlight>& arrivals) {
  auto& state = nodes_[receiver];
  state.input.insert(state.input.end(), arrivals.begin(), arrivals.end());
  // Copies of packets the node already holds are recognised by header and
  // cleared without using the admission.
  while (!state.input.empty() && state.seen(state.input.front().packet)) {
    state.input.pop_front();
    ++state.discarded;
  }
  if (state.input.empty()) return;
  const InFlight next = state.input.front();
  state.input.pop_front();
  admit(receiver, next);
}

void Simulator::step() {
  const Slot t = now_;
  for (auto& node : nodes_) {
    node.generated = node.admitted = node.departed = 0;
    node.discarded = node.dropped = 0;
  }

  // Arrivals.
  for (const auto& [origin, id] : injected_) enqueue_origin(origin, id);
  injected_.clear();
  if (arrivals_) {
    for (auto& emission : arrivals_->sample_arrivals(t)) {
      const auto id = static_cast<PacketId>(packets_.size());
      record_.packets.push_back(
          {emission.packet.message_id, emission.source, t});
      for (std::size_t f = 0; f < flows_.size(); ++f)
        if (flows_[f].message_id == emission.packet.message_id &&
            message_start_[f] == kNever)
          message_start_[f] = t;
      packets_.push_back(std::move(emission.packet));
      enqueue_origin(emission.source, id);
    }
  }

  // Reception.
  auto& bucket = calendar_[static_cast<std::size_t>(t) % calendar_.size()];
  in_flight_ -= bucket.size();
  std::sort(bucket.begin(), bucket.end(), [](const InFlight& a, const InFlight& b) {
    return a.receiver != b.receiver ? a.receiver < b.receiver : a.sender < b.sender;
  });
  std::vector<InFlight> arrivals;
  auto cursor = bucket.begin();
  for (NodeId r = 0; r < nodes_.size(); ++r) {
    arrivals.clear();
    for (; cursor != bucket.end() && cursor->receiver == r; ++cursor)
      if (accepts(r, packets_[cursor->packet].message_id))
        arrivals.push_back(*cursor);
    if (options_.arrival_policy == ArrivalPolicy::drop)
      receive_drop(r, arrivals);
    else if (!arrivals.empty() || !nodes_[r].input.empty())
      receive_defer(r, arrivals);
  }
  bucket.clear();

  // Transmission.
  for (NodeId n = 0; n < nodes_.size(); ++n) {
    auto& state = nodes_[n];
    if (state.queue.empty()) continue;
    const PacketId id = state.queue.front();
    state.queue.pop_front();
    ++state.departed;
    const NodeId from = admission(n, id).from;
    for (const auto& neighbor : network_->neighbors(n)) {
      if (neighbor.node == from) continue;
      const InFlight flight{id, n, neighbor.node, t, t + neighbor.weight};
      calendar_[static_cast<std::size_t>(flight.arrival_slot) % calendar_.size()]
          .push_back(flight);
      ++in_flight_;
      if (on_transmit_) on_transmit_(flight);
    }
  }

  if (options_.record_queues)
    for (const auto& node : nodes_)
      record_.occupancy.push_back(static_cast<std::uint32_t>(node.occupancy()));
  record_.slots = t + 1;
  ++now_;
}

bool Simulator::idle() const {
  if (!injected_.empty() || in_flight_ != 0) return false;
  return std::all_of(nodes_.begin(), nodes_.end(), [](const NodeState& n) {
    return n.queue.empty() && n.input.empty();
  });
}

bool Simulator::all_decoded() const {
  bool any = false;
  for (const auto& node : nodes_) {
    if (!node.decoder) continue;
    any = true;
    if (node.decoded_slot == kNever) return false;
  }
  return any;
}

std::optional<Slot> Simulator::first_arrival(NodeId node, PacketId id) const {
  const auto& state = nodes_.at(node);
  if (!state.seen(id)) return std::nullopt;
  return state.admissions[id].slot;
}

std::vector<NodeId> Simulator::trace(NodeId node, PacketId id) const {
  std::vector<NodeId> hops;
  for (NodeId at = node; at != kNoNode;) {
    const auto& state = nodes_.at(at);
    if (!state.seen(id)) return {};
    hops.push_back(at);
    at = state.admissions[id].from;
  }
  std::reverse(hops.begin(), hops.end());
  return hops;
}

SimulationRecord Simulator::take_record() {
  for (auto& delivery : record_.deliveries)
    delivery.decoded = nodes_[delivery.destination].decoded_slot;
  SimulationRecord out = std::move(record_);
  record_ = SimulationRecord{};
  record_.num_nodes = nodes_.size();
  return out;
}

SimulationRecord run(const Network& network, const RoleAssignment& roles,
                     std::span<const FlowSpec> flows,
                     const TrafficConfig& traffic, Slot max_slots,
                     std::uint64_t seed, EngineOptions options) {
  if (max_slots < 1) throw InvalidParameter("max_slots must be >= 1");
  const auto in = [](const std::vector<NodeId>& set, NodeId id) {
    return std::find(set.begin(), set.end(), id) != set.end();
  };
  for (const auto& flow : flows) {
    for (NodeId s : flow.sources)
      if (!in(roles.sources, s))
        throw InvalidParameter(fmt::format("flow source {} is not a source node", s));
    for (NodeId d : flow.destinations)
      if (!in(roles.destinations, d))
        throw InvalidParameter(fmt::format("flow destination {} is not a destination node", d));
  }

  Simulator sim(network, std::vector<FlowSpec>(flows.begin(), flows.end()),
                traffic, seed, options);
  for (Slot t = 0; t < max_slots; ++t) {
    sim.step();
    if (options.stop_when_decoded && sim.all_decoded()) break;
  }
  return sim.take_record();
}

DelayMeasurement measure_average_delay(const SimulationRecord& record,
                                       std::span<const NodeId> sources,
                                       NodeId destination, Slot warmup) {
  DelayMeasurement out;
  double total = 0.0;
  for (const auto& d : record.deliveries) {
    if (d.destination != destination || d.created < warmup) continue;
    if (std::find(sources.begin(), sources.end(), d.origin) == sources.end())
      continue;
    total += static_cast<double>(d.arrived - d.created);
    ++out.deliveries;
  }
  if (out.deliveries == 0)
    throw NoDeliveries(fmt::format("no deliveries to node {}", destination));
  out.mean_delay = total / static_cast<double>(out.deliveries);
  for (const auto& event : record.decodes)
    if (event.destination == destination)
      out.decode_delay = static_cast<double>(event.decoded - event.message_start);
  return out;
}

double measure_queue_growth(const SimulationRecord& record, NodeId node) {
  if (record.slots < 1000)
    throw InsufficientHorizon(fmt::format("record spans {} slots, need 1000", record.slots));
  if (record.occupancy.size() < static_cast<std::size_t>(record.slots) * record.num_nodes)
    throw InsufficientHorizon("queue lengths were not recorded");
  if (node >= record.num_nodes)
    throw InvalidParameter(fmt::format("node {} out of range", node));
  const Slot tail = record.slots / 10;
  double sum = 0.0;
  for (Slot t = record.slots - tail; t < record.slots; ++t)
    sum += record.queue_length(t, node) / static_cast<double>(t + 1);
  return sum / static_cast<double>(tail);
}

}  // namespace rncsim
