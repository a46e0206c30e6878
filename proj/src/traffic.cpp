#include "rncsim/traffic.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <numeric>
#include <set>

#include "rncsim/errors.hpp"

namespace rncsim {

double FlowSpec::rate_of(NodeId source) const {
  for (std::size_t i = 0; i < sources.size(); ++i)
    if (sources[i] == source) return rates.at(i);
  return 0.0;
}

bool FlowSpec::has_source(NodeId node) const {
  return std::find(sources.begin(), sources.end(), node) != sources.end();
}

bool FlowSpec::has_destination(NodeId node) const {
  return std::find(destinations.begin(), destinations.end(), node) !=
         destinations.end();
}

void validate_flows(std::span<const FlowSpec> flows, std::size_t num_nodes) {
  std::set<NodeId> all_sources;
  std::set<NodeId> all_destinations;
  std::set<MessageId> ids;
  for (const auto& flow : flows) {
    const auto where = fmt::format("flow {}", flow.message_id);
    if (!ids.insert(flow.message_id).second)
      throw InvalidParameter(where + ": duplicate message id");
    if (flow.sources.empty() || flow.destinations.empty())
      throw InvalidParameter(where + ": empty source or destination set");
    if (flow.k == 0) throw InvalidParameter(where + ": K must be >= 1");
    if (flow.rates.size() != flow.sources.size())
      throw InvalidParameter(where + ": one rate per source required");
    for (double rate : flow.rates)
      if (!(rate >= 0.0 && rate <= 1.0))
        throw InvalidParameter(fmt::format("{}: rate {} outside [0, 1]", where, rate));
    for (NodeId s : flow.sources) {
      if (s >= num_nodes) throw InvalidParameter(fmt::format("{}: source {} out of range", where, s));
      if (!all_sources.insert(s).second)
        throw InvalidParameter(fmt::format("{}: source {} shared between flows", where, s));
    }
    for (NodeId d : flow.destinations) {
      if (d >= num_nodes) throw InvalidParameter(fmt::format("{}: destination {} out of range", where, d));
      if (!all_destinations.insert(d).second)
        throw InvalidParameter(fmt::format("{}: destination {} shared between flows", where, d));
    }
  }
  for (NodeId s : all_sources)
    if (all_destinations.count(s))
      throw InvalidParameter(fmt::format("node {} is both a source and a destination", s));
}

double message_rate(const FlowSpec& flow) {
  return std::accumulate(flow.rates.begin(), flow.rates.end(), 0.0);
}

ArrivalProcess::ArrivalProcess(std::span<const FlowSpec> flows,
                               const TrafficConfig& config,
                               std::uint64_t seed) {
  const auto lo = static_cast<std::uint32_t>(seed);
  const auto hi = static_cast<std::uint32_t>(seed >> 32);
  for (std::size_t f = 0; f < flows.size(); ++f) {
    const auto& flow = flows[f];
    messages_.push_back(
        SourceMessage::random(flow.message_id, flow.k, config.payload_bytes, seed));
    for (std::size_t i = 0; i < flow.sources.size(); ++i) {
      std::seed_seq seq{lo, hi, flow.sources[i], 0xa11u};
      sources_.push_back(Source{flow.sources[i], f, flow.rates.at(i),
                                std::mt19937_64(seq)});
    }
  }
}

std::vector<Emission> ArrivalProcess::sample_arrivals(Slot slot) {
  std::vector<Emission> out;
  for (auto& source : sources_) {
    if (source.rate <= 0.0) continue;
    std::bernoulli_distribution fires(source.rate);
    if (!fires(source.rng)) continue;
    out.push_back(Emission{
        source.node,
        encode(messages_[source.message_index], source.rng, source.node, slot)});
  }
  return out;
}

const SourceMessage& ArrivalProcess::message(MessageId id) const {
  for (const auto& m : messages_)
    if (m.id == id) return m;
  throw InvalidParameter(fmt::format("unknown message {}", id));
}

}  // namespace rncsim
