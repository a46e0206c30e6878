#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rncsim/coding.hpp"
#include "rncsim/topology.hpp"
#include "rncsim/traffic.hpp"
#include "rncsim/types.hpp"

namespace rncsim {

using PacketId = std::uint32_t;

/// What a receiver does with same-slot arrivals beyond the one it can admit.
enum class ArrivalPolicy {
  drop,   // lowest sender id wins, the rest are lost
  defer,  // held in an input buffer, oldest first, sender id breaks ties
};

/// Which packets a node accepts and forwards.
enum class RelayScope {
  own_message,  // sources relay nothing, destinations relay only their message
  all,          // every node except a message's own sources relays it
};

std::string to_string(ArrivalPolicy policy);
std::string to_string(RelayScope scope);
ArrivalPolicy parse_arrival_policy(const std::string& text);
RelayScope parse_relay_scope(const std::string& text);

struct EngineOptions {
  ArrivalPolicy arrival_policy = ArrivalPolicy::defer;
  RelayScope relay_scope = RelayScope::own_message;
  /// End the run once every destination of every flow has decoded.
  bool stop_when_decoded = true;
  bool record_queues = true;
};

struct InFlight {
  PacketId packet = 0;
  NodeId sender = kNoNode;
  NodeId receiver = kNoNode;
  Slot send_slot = 0;
  Slot arrival_slot = 0;
};

/// How a node first obtained a packet. slot == kNever means "not seen".
struct Admission {
  Slot slot = kNever;
  NodeId from = kNoNode;
  std::uint32_t hops = 0;
};

struct NodeState {
  NodeId node = kNoNode;
  std::deque<PacketId> queue;
  std::deque<InFlight> input;  // deferred arrivals (defer policy only)
  std::vector<Admission> admissions;  // indexed by PacketId, grown lazily
  std::optional<DecoderState> decoder;
  Slot decoded_slot = kNever;

  // Counters of the slot most recently stepped.
  std::uint32_t generated = 0;
  std::uint32_t admitted = 0;
  std::uint32_t departed = 0;
  std::uint32_t discarded = 0;
  std::uint32_t dropped = 0;

  [[nodiscard]] bool seen(PacketId id) const {
    return id < admissions.size() && admissions[id].slot != kNever;
  }
  [[nodiscard]] std::size_t occupancy() const {
    return queue.size() + input.size();
  }
};

struct PacketSummary {
  MessageId message = 0;
  NodeId origin = kNoNode;
  Slot created = 0;
};

struct Delivery {
  PacketId packet = 0;
  MessageId message = 0;
  NodeId origin = kNoNode;
  NodeId destination = kNoNode;
  Slot created = 0;
  Slot arrived = 0;
  Slot decoded = kNever;
  std::vector<NodeId> trace;

  [[nodiscard]] std::size_t hops() const {
    return trace.empty() ? 0 : trace.size() - 1;
  }
};

struct DecodeEvent {
  MessageId message = 0;
  NodeId destination = kNoNode;
  Slot message_start = kNever;
  Slot decoded = kNever;
};

struct SimulationRecord {
  std::size_t num_nodes = 0;
  Slot slots = 0;
  std::vector<PacketSummary> packets;
  std::vector<Delivery> deliveries;
  std::vector<DecodeEvent> decodes;
  /// Node occupancy (FIFO plus deferred input) at the end of every slot,
  /// row-major by slot. Empty when queue recording is off.
  std::vector<std::uint32_t> occupancy;

  [[nodiscard]] std::uint32_t queue_length(Slot slot, NodeId node) const {
    return occupancy[static_cast<std::size_t>(slot) * num_nodes + node];
  }
};

/// Slot-by-slot executor of fastest-only broadcast. Each step runs arrivals,
/// reception (one admission per node per slot) and transmission (one FIFO
/// dequeue per node per slot, broadcast to every neighbor except the one the
/// packet came from).
class Simulator {
 public:
  Simulator(const Network& network, std::vector<FlowSpec> flows,
            const TrafficConfig& traffic, std::uint64_t seed,
            EngineOptions options = {});

  /// Network without traffic; packets enter only through inject().
  Simulator(const Network& network, EngineOptions options = {});

  /// Queues a packet at `origin` during the arrival phase of the next step.
  PacketId inject(NodeId origin, CodedPacket packet);

  void step();

  [[nodiscard]] Slot now() const { return now_; }
  [[nodiscard]] bool idle() const;
  [[nodiscard]] bool all_decoded() const;
  [[nodiscard]] const NodeState& node(NodeId id) const {
    return nodes_.at(id);
  }
  [[nodiscard]] std::size_t num_packets() const { return packets_.size(); }
  [[nodiscard]] const CodedPacket& packet(PacketId id) const {
    return packets_.at(id);
  }
  [[nodiscard]] std::optional<Slot> first_arrival(NodeId node,
                                                  PacketId id) const;
  /// Hop sequence by which `node` obtained the packet, origin first.
  [[nodiscard]] std::vector<NodeId> trace(NodeId node, PacketId id) const;

  /// Called for every InFlight created in the transmission phase.
  void set_transmit_observer(std::function<void(const InFlight&)> observer) {
    on_transmit_ = std::move(observer);
  }

  [[nodiscard]] const SimulationRecord& record() const { return record_; }
  SimulationRecord take_record();

 private:
  bool accepts(NodeId node, MessageId message) const;
  void enqueue_origin(NodeId origin, PacketId id);
  void admit(NodeId receiver, const InFlight& arrival);
  void receive_drop(NodeId receiver, std::vector<InFlight>& arrivals);
  void receive_defer(NodeId receiver, std::vector<InFlight>& arrivals);
  Admission& admission(NodeId node, PacketId id);

  const Network* network_;
  std::vector<FlowSpec> flows_;
  EngineOptions options_;
  std::optional<ArrivalProcess> arrivals_;

  std::vector<CodedPacket> packets_;
  std::vector<NodeState> nodes_;
  std::vector<std::vector<InFlight>> calendar_;
  std::size_t in_flight_ = 0;
  std::vector<std::pair<NodeId, PacketId>> injected_;

  // Per node: index of the flow it is a source / destination of, or npos.
  std::vector<std::size_t> source_flow_;
  std::vector<std::size_t> destination_flow_;
  std::vector<Slot> message_start_;

  Slot now_ = 0;
  SimulationRecord record_;
  std::function<void(const InFlight&)> on_transmit_;
};

/// Runs a full simulation: steps until every destination decoded (when
/// options.stop_when_decoded) or until `max_slots` slots have elapsed.
SimulationRecord run(const Network& network, const RoleAssignment& roles,
                     std::span<const FlowSpec> flows,
                     const TrafficConfig& traffic, Slot max_slots,
                     std::uint64_t seed, EngineOptions options = {});

struct DelayMeasurement {
  double mean_delay = 0.0;
  std::size_t deliveries = 0;
  std::optional<double> decode_delay;
};

/// Mean of (first arrival - creation) over packets originated by any of
/// `sources` and delivered to `destination`, counting packets created at or
/// after `warmup`. Throws NoDeliveries when nothing qualifies.
DelayMeasurement measure_average_delay(const SimulationRecord& record,
                                       std::span<const NodeId> sources,
                                       NodeId destination, Slot warmup = 0);

/// Mean of Q_n(t)/t over the final 10% of the horizon (t counts elapsed
/// slots). Throws InsufficientHorizon below 1000 recorded slots.
double measure_queue_growth(const SimulationRecord& record, NodeId node);

}  // namespace rncsim
