#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rncsim/analysis.hpp"
#include "rncsim/config.hpp"
#include "rncsim/engine.hpp"
#include "rncsim/topology.hpp"

namespace rncsim {

struct Scenario {
  Network network;
  RoleAssignment roles;
  std::vector<FlowSpec> flows;
};

/// Topology, roles and flows of one grid cell, with lambda_sum spread over the
/// sources by the configured shares. Throws ConfigError when a per-source
/// rate leaves (0, 1].
Scenario build_scenario(const ExperimentConfig& config, double lambda_sum,
                        std::uint64_t seed);

struct PairResult {
  double lambda_sum = 0.0;
  std::uint64_t seed = 0;
  MessageId message = 0;
  NodeId source = kNoNode;
  NodeId destination = kNoNode;
  std::size_t deliveries = 0;
  double simulated_delay = 0.0;  // NaN when nothing was delivered
  std::optional<double> decode_delay;
  bool exempt = false;
  DelayEstimate estimate;
};

struct ProbeRow {
  double lambda_sum = 0.0;
  std::uint64_t seed = 0;
  NodeId node = kNoNode;
  double probe = 0.0;
};

struct RunRecord {
  double lambda_sum = 0.0;
  std::uint64_t seed = 0;
  SimulationRecord record;
};

struct SweepResult {
  std::vector<PairResult> rows;
  std::vector<ProbeRow> probes;
  std::vector<RunRecord> runs;  // kept only when config.write_runs
};

enum class Execution { serial, parallel };

/// Runs every (lambda_sum, seed) cell: simulation plus analytical estimate
/// for each pair. Cells are independent; the parallel path distributes them
/// over OpenMP threads and yields the same result as the serial path.
SweepResult run_experiment(const ExperimentConfig& config,
                           Execution execution = Execution::parallel);

/// Estimates only, one row per (lambda_sum, pair), using the first seed.
std::vector<std::pair<double, DelayEstimate>> run_analysis(
    const ExperimentConfig& config);

/// sweep.csv, estimates.csv, probes.csv, plot data and per-run CSVs.
void emit_report(const SweepResult& result, const ExperimentConfig& config,
                 const std::string& outdir);

/// Writes estimates.csv for run_analysis output.
void write_estimates_csv(const std::string& path,
                         const std::vector<std::pair<double, DelayEstimate>>& rows);

void write_deliveries_csv(const std::string& path,
                          const SimulationRecord& record);
void write_queues_csv(const std::string& path, const SimulationRecord& record,
                      Slot every);

/// The shipped configuration of the three-pair example sweep.
ExperimentConfig special_case_config();

/// Formats a real for CSV output: fixed 6 decimals, "inf", or "nan".
std::string format_real(double value);

}  // namespace rncsim
