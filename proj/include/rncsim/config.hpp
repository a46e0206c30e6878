#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rncsim/engine.hpp"
#include "rncsim/topology.hpp"

namespace rncsim {

enum class TopologyKind { random, file, special_case };
enum class FlowMode { distinct, single, explicit_list };

/// A flow written out in the config file. Node ids are absolute.
struct FlowTemplate {
  std::vector<NodeId> sources;
  std::vector<NodeId> destinations;
  std::size_t k = 0;  // 0: use ExperimentConfig::k
};

struct ExperimentConfig {
  TopologyKind topology = TopologyKind::random;
  RandomTopologySpec random;
  /// Seed of the random topology. Absent: each run seed draws its own graph.
  std::optional<std::uint64_t> topology_seed;
  std::string topology_file;

  std::size_t num_sources = 3;
  std::size_t num_destinations = 3;
  FlowMode flow_mode = FlowMode::distinct;
  std::vector<FlowTemplate> flows;
  std::size_t k = 4;
  /// Relative share of lambda_sum per source, in source order. Empty: equal.
  std::vector<double> rate_shares;

  std::vector<double> lambda_sums;
  std::vector<std::uint64_t> seeds{1};
  Slot horizon = 50000;
  double warmup_fraction = 0.1;

  EngineOptions engine;
  TrafficConfig traffic;
  Slot queue_sample_every = 100;
  bool write_runs = true;
  std::string output_dir = "out";
};

/// Parses `key = value` lines; '#' starts a comment. Unknown keys and
/// malformed values throw ConfigError naming the line.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

std::string to_string(TopologyKind kind);

}  // namespace rncsim
