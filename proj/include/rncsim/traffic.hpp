#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "rncsim/coding.hpp"
#include "rncsim/types.hpp"

namespace rncsim {

/// One message m: its source set S_m, destination set D_m, division count K_m
/// and the Bernoulli rate of every source (rates[i] belongs to sources[i]).
struct FlowSpec {
  MessageId message_id = 0;
  std::vector<NodeId> sources;
  std::vector<NodeId> destinations;
  std::size_t k = 1;
  std::vector<double> rates;

  [[nodiscard]] double rate_of(NodeId source) const;
  [[nodiscard]] bool has_source(NodeId node) const;
  [[nodiscard]] bool has_destination(NodeId node) const;
};

/// Checks the FlowSpec invariants against a network of `num_nodes` nodes:
/// non-empty sets, ids in range, rates in [0, 1], K >= 1, pairwise disjoint
/// source sets and destination sets, unique message ids, and no node acting
/// as both a source and a destination. Throws InvalidParameter.
void validate_flows(std::span<const FlowSpec> flows, std::size_t num_nodes);

/// Sum of the per-source rates of a flow. May exceed 1.
[[nodiscard]] double message_rate(const FlowSpec& flow);

struct TrafficConfig {
  std::size_t payload_bytes = 16;
};

struct Emission {
  NodeId source = kNoNode;
  CodedPacket packet;
};

/// Per-source Bernoulli(lambda_s) packet generator. Every source owns an
/// independent RNG stream derived from the run seed and its node id, used both
/// for the arrival indicator and for the coefficient draw of the packet.
class ArrivalProcess {
 public:
  ArrivalProcess(std::span<const FlowSpec> flows, const TrafficConfig& config,
                 std::uint64_t seed);

  /// Emissions of slot `slot`, in flow order then source order.
  std::vector<Emission> sample_arrivals(Slot slot);

  [[nodiscard]] const SourceMessage& message(MessageId id) const;
  [[nodiscard]] std::span<const SourceMessage> messages() const {
    return messages_;
  }

 private:
  struct Source {
    NodeId node;
    std::size_t message_index;
    double rate;
    std::mt19937_64 rng;
  };

  std::vector<SourceMessage> messages_;
  std::vector<Source> sources_;
};

}  // namespace rncsim
