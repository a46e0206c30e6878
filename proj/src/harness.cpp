#include "rncsim/harness.hpp"

#include <cmath>
#include <exception>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <map>
#include <numeric>

#include "rncsim/errors.hpp"

namespace rncsim {
namespace {

std::vector<FlowSpec> build_flows(const ExperimentConfig& config,
                                  RoleAssignment& roles) {
  std::vector<FlowSpec> flows;
  switch (config.flow_mode) {
    case FlowMode::distinct:
      if (roles.sources.size() != roles.destinations.size())
        throw ConfigError(fmt::format(
            "distinct flows pair sources with destinations; got {} and {}",
            roles.sources.size(), roles.destinations.size()));
      for (std::size_t i = 0; i < roles.sources.size(); ++i)
        flows.push_back(FlowSpec{static_cast<MessageId>(i), {roles.sources[i]},
                                 {roles.destinations[i]}, config.k, {}});
      break;
    case FlowMode::single:
      flows.push_back(FlowSpec{0, roles.sources, roles.destinations, config.k, {}});
      break;
    case FlowMode::explicit_list:
      roles = {};
      for (std::size_t i = 0; i < config.flows.size(); ++i) {
        const auto& t = config.flows[i];
        flows.push_back(FlowSpec{static_cast<MessageId>(i), t.sources, t.destinations,
                                 t.k ? t.k : config.k, {}});
        roles.sources.insert(roles.sources.end(), t.sources.begin(), t.sources.end());
        roles.destinations.insert(roles.destinations.end(), t.destinations.begin(),
                                  t.destinations.end());
      }
      break;
  }
  return flows;
}

struct Cell {
  double lambda_sum;
  std::uint64_t seed;
};

struct CellResult {
  std::vector<PairResult> rows;
  std::vector<ProbeRow> probes;
  SimulationRecord record;
};

CellResult run_cell(const ExperimentConfig& config, const Cell& cell) {
  const Scenario scenario = build_scenario(config, cell.lambda_sum, cell.seed);
  EngineOptions options = config.engine;
  options.stop_when_decoded = false;
  options.record_queues = true;

  CellResult out;
  out.record = run(scenario.network, scenario.roles, scenario.flows,
                   config.traffic, config.horizon, cell.seed, options);
  const auto warmup = static_cast<Slot>(
      std::floor(config.warmup_fraction * static_cast<double>(config.horizon)));
  const auto exempt = same_message_exemption(scenario.flows, &out.record);
  const auto estimates = approximate_all(scenario.network, scenario.flows);

  std::size_t e = 0;
  for (std::size_t f = 0; f < scenario.flows.size(); ++f) {
    const auto& flow = scenario.flows[f];
    for (NodeId s : flow.sources) {
      for (NodeId d : flow.destinations) {
        PairResult row;
        row.lambda_sum = cell.lambda_sum;
        row.seed = cell.seed;
        row.message = flow.message_id;
        row.source = s;
        row.destination = d;
        row.exempt = exempt[f];
        row.estimate = estimates.at(e++);
        if (row.exempt) {
          // A lone coded message is never held up by its own queues.
          row.estimate.queuing_bound = 0.0;
          row.estimate.combined = static_cast<double>(row.estimate.propagation);
        }
        const NodeId origin[] = {s};
        try {
          const auto m = measure_average_delay(out.record, origin, d, warmup);
          row.deliveries = m.deliveries;
          row.simulated_delay = m.mean_delay;
          row.decode_delay = m.decode_delay;
        } catch (const NoDeliveries&) {
          row.simulated_delay = std::nan("");
        }
        out.rows.push_back(std::move(row));
      }
    }
  }

  if (out.record.slots >= 1000)
    for (NodeId n = 0; n < scenario.network.num_nodes(); ++n)
      out.probes.push_back(
          {cell.lambda_sum, cell.seed, n, measure_queue_growth(out.record, n)});
  if (!config.write_runs) out.record = SimulationRecord{};
  return out;
}

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
  return out;
}

void check_written(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError(fmt::format("error writing {}", path.string()));
}

std::string optional_real(const std::optional<double>& v) {
  return v ? format_real(*v) : std::string{};
}

}  // namespace

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return fmt::format("{:.6f}", value);
}

Scenario build_scenario(const ExperimentConfig& config, double lambda_sum,
                        std::uint64_t seed) {
  Scenario scenario;
  switch (config.topology) {
    case TopologyKind::random:
      scenario.network = generate_random_network(
          config.random, config.topology_seed.value_or(seed));
      break;
    case TopologyKind::file:
      scenario.network = load_edge_list(config.topology_file);
      break;
    case TopologyKind::special_case:
      scenario.network = special_case_network().network;
      break;
  }
  if (config.flow_mode != FlowMode::explicit_list)
    scenario.roles = assign_roles(scenario.network, config.num_sources,
                                  config.num_destinations);
  scenario.flows = build_flows(config, scenario.roles);

  std::size_t total_sources = 0;
  for (const auto& flow : scenario.flows) total_sources += flow.sources.size();
  std::vector<double> shares = config.rate_shares;
  if (shares.empty()) shares.assign(total_sources, 1.0);
  if (shares.size() != total_sources)
    throw ConfigError(fmt::format("rate_shares lists {} values for {} sources",
                                  shares.size(), total_sources));
  const double share_sum = std::accumulate(shares.begin(), shares.end(), 0.0);
  if (!(share_sum > 0.0)) throw ConfigError("rate_shares must sum to a positive value");

  std::size_t i = 0;
  for (auto& flow : scenario.flows) {
    for (std::size_t s = 0; s < flow.sources.size(); ++s, ++i) {
      const double rate = lambda_sum * shares[i] / share_sum;
      if (!(rate > 0.0 && rate <= 1.0))
        throw ConfigError(fmt::format(
            "lambda_sum {} gives source {} rate {} outside (0, 1]", lambda_sum,
            flow.sources[s], rate));
      flow.rates.push_back(rate);
    }
  }
  validate_flows(scenario.flows, scenario.network.num_nodes());
  return scenario;
}

SweepResult run_experiment(const ExperimentConfig& config, Execution execution) {
  std::vector<Cell> cells;
  for (double lambda : config.lambda_sums)
    for (std::uint64_t seed : config.seeds) cells.push_back({lambda, seed});

  std::vector<CellResult> results(cells.size());
  std::vector<std::exception_ptr> errors(cells.size());
  const auto body = [&](std::size_t i) {
    try {
      results[i] = run_cell(config, cells[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };

  const auto n = static_cast<long>(cells.size());
  if (execution == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < n; ++i) body(static_cast<std::size_t>(i));
  } else {
    for (long i = 0; i < n; ++i) body(static_cast<std::size_t>(i));
  }

  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw Error(fmt::format("lambda_sum = {}, seed = {}: {}", cells[i].lambda_sum,
                              cells[i].seed, e.what()));
    }
  }

  SweepResult result;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    auto& cell = results[i];
    result.rows.insert(result.rows.end(), cell.rows.begin(), cell.rows.end());
    result.probes.insert(result.probes.end(), cell.probes.begin(), cell.probes.end());
    if (config.write_runs)
      result.runs.push_back({cells[i].lambda_sum, cells[i].seed, std::move(cell.record)});
  }
  return result;
}

std::vector<std::pair<double, DelayEstimate>> run_analysis(
    const ExperimentConfig& config) {
  std::vector<std::pair<double, DelayEstimate>> rows;
  for (double lambda : config.lambda_sums) {
    const Scenario scenario = build_scenario(config, lambda, config.seeds.front());
    const auto exempt = same_message_exemption(scenario.flows);
    auto estimates = approximate_all(scenario.network, scenario.flows);
    std::size_t e = 0;
    for (std::size_t f = 0; f < scenario.flows.size(); ++f) {
      const auto pairs =
          scenario.flows[f].sources.size() * scenario.flows[f].destinations.size();
      for (std::size_t p = 0; p < pairs; ++p, ++e) {
        if (exempt[f]) {
          estimates[e].queuing_bound = 0.0;
          estimates[e].combined = static_cast<double>(estimates[e].propagation);
        }
        rows.emplace_back(lambda, estimates[e]);
      }
    }
  }
  return rows;
}

void write_estimates_csv(const std::string& path,
                         const std::vector<std::pair<double, DelayEstimate>>& rows) {
  auto out = open_csv(path);
  out << "lambda_sum,source,destination,propagation,queuing_bound,"
         "detour_propagation,detour_queuing,combined\n";
  for (const auto& [lambda, e] : rows) {
    out << format_real(lambda) << ',' << e.source << ',' << e.destination << ','
        << e.propagation << ',' << format_real(e.queuing_bound) << ','
        << (e.detour ? std::to_string(e.detour->propagation) : std::string{}) << ','
        << (e.detour ? format_real(e.detour->queuing) : std::string{}) << ','
        << format_real(e.combined) << '\n';
  }
  check_written(out, path);
}

void write_deliveries_csv(const std::string& path, const SimulationRecord& record) {
  auto out = open_csv(path);
  out << "packet_id,message_id,origin,destination,created_slot,arrived_slot,"
         "decoded_slot,hops\n";
  for (const auto& d : record.deliveries) {
    out << d.packet << ',' << d.message << ',' << d.origin << ',' << d.destination
        << ',' << d.created << ',' << d.arrived << ','
        << (d.decoded == kNever ? std::string{} : std::to_string(d.decoded)) << ','
        << d.hops() << '\n';
  }
  check_written(out, path);
}

void write_queues_csv(const std::string& path, const SimulationRecord& record,
                      Slot every) {
  if (every < 1) throw InvalidParameter("queue sampling interval must be >= 1");
  auto out = open_csv(path);
  out << "slot,node,queue_len\n";
  if (!record.occupancy.empty())
    for (Slot t = 0; t < record.slots; t += every)
      for (NodeId n = 0; n < record.num_nodes; ++n)
        out << t << ',' << n << ',' << record.queue_length(t, n) << '\n';
  check_written(out, path);
}

void emit_report(const SweepResult& result, const ExperimentConfig& config,
                 const std::string& outdir) {
  namespace fs = std::filesystem;
  const fs::path root(outdir);
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw IoError(fmt::format("cannot create {}: {}", outdir, ec.message()));

  {
    const auto path = root / "sweep.csv";
    auto out = open_csv(path);
    out << "lambda_sum,seed,message,source,destination,deliveries,simulated_delay,"
           "decode_delay,propagation,queuing_bound,detour_propagation,"
           "detour_queuing,estimate,exempt\n";
    for (const auto& r : result.rows) {
      const auto& e = r.estimate;
      out << format_real(r.lambda_sum) << ',' << r.seed << ',' << r.message << ','
          << r.source << ',' << r.destination << ',' << r.deliveries << ','
          << format_real(r.simulated_delay) << ',' << optional_real(r.decode_delay)
          << ',' << e.propagation << ',' << format_real(e.queuing_bound) << ','
          << (e.detour ? std::to_string(e.detour->propagation) : std::string{}) << ','
          << (e.detour ? format_real(e.detour->queuing) : std::string{}) << ','
          << format_real(e.combined) << ',' << (r.exempt ? 1 : 0) << '\n';
    }
    check_written(out, path);
  }

  {
    std::vector<std::pair<double, DelayEstimate>> estimates;
    for (const auto& r : result.rows)
      if (r.seed == config.seeds.front()) estimates.emplace_back(r.lambda_sum, r.estimate);
    write_estimates_csv((root / "estimates.csv").string(), estimates);
  }

  {
    const auto path = root / "probes.csv";
    auto out = open_csv(path);
    out << "lambda_sum,seed,node,probe\n";
    for (const auto& p : result.probes)
      out << format_real(p.lambda_sum) << ',' << p.seed << ',' << p.node << ','
          << format_real(p.probe) << '\n';
    check_written(out, path);
  }

  // Plot data: one series for the simulation, one for the estimate, both
  // averaged over seeds (and over pairs for the network-wide file).
  struct Series {
    double simulated = 0.0;
    std::size_t simulated_n = 0;
    double estimate = 0.0;
    std::size_t estimate_n = 0;
  };
  std::map<std::pair<NodeId, NodeId>, std::map<double, Series>> per_pair;
  std::map<double, Series> overall;
  for (const auto& r : result.rows) {
    for (auto* s : {&per_pair[{r.source, r.destination}][r.lambda_sum],
                    &overall[r.lambda_sum]}) {
      if (!std::isnan(r.simulated_delay)) {
        s->simulated += r.simulated_delay;
        ++s->simulated_n;
      }
      s->estimate += r.estimate.combined;
      ++s->estimate_n;
    }
  }
  const auto write_plot = [&](const fs::path& path, const std::string& title,
                              const std::map<double, Series>& series) {
    auto out = open_csv(path);
    out << "# " << title << "\n# lambda_sum simulated_delay estimate\n";
    for (const auto& [lambda, s] : series)
      out << format_real(lambda) << ' '
          << format_real(s.simulated_n ? s.simulated / static_cast<double>(s.simulated_n)
                                       : std::nan(""))
          << ' ' << format_real(s.estimate / static_cast<double>(s.estimate_n)) << '\n';
    check_written(out, path);
  };
  write_plot(root / "plot_delay.dat", "mean packet delay over all pairs", overall);
  for (const auto& [pair, series] : per_pair)
    write_plot(root / fmt::format("plot_pair_{}_{}.dat", pair.first, pair.second),
               fmt::format("mean packet delay of pair ({}, {})", pair.first, pair.second),
               series);

  for (const auto& run : result.runs) {
    const fs::path dir =
        root / "runs" / fmt::format("lambda_{:.3f}_seed_{}", run.lambda_sum, run.seed);
    fs::create_directories(dir, ec);
    if (ec) throw IoError(fmt::format("cannot create {}: {}", dir.string(), ec.message()));
    write_deliveries_csv((dir / "deliveries.csv").string(), run.record);
    write_queues_csv((dir / "queues.csv").string(), run.record, config.queue_sample_every);
  }
}

ExperimentConfig special_case_config() {
  ExperimentConfig c;
  c.topology = TopologyKind::special_case;
  c.num_sources = 3;
  c.num_destinations = 3;
  c.flow_mode = FlowMode::distinct;
  c.k = 4;
  c.lambda_sums = {0.15, 0.3, 0.45, 0.6, 0.75, 0.9, 1.05, 1.2, 1.35, 1.5};
  c.seeds = {1};
  c.horizon = 50000;
  c.output_dir = "out/special_case";
  return c;
}

}  // namespace rncsim
