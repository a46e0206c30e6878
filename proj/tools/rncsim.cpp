// Command line front end: simulate, analyze, special-case.

#include <CLI11.hpp>
#include <fmt/format.h>
#include <filesystem>
#include <iostream>

#include "rncsim/errors.hpp"
#include "rncsim/harness.hpp"

using namespace rncsim;

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string arrival_policy;
  std::string relay_scope;
  std::string topology_file;
};

void apply(ExperimentConfig& config, const Overrides& o) {
  if (o.seed) config.seeds = {*o.seed};
  if (!o.out.empty()) config.output_dir = o.out;
  if (!o.arrival_policy.empty())
    config.engine.arrival_policy = parse_arrival_policy(o.arrival_policy);
  if (!o.relay_scope.empty()) config.engine.relay_scope = parse_relay_scope(o.relay_scope);
  if (!o.topology_file.empty()) {
    config.topology = TopologyKind::file;
    config.topology_file = o.topology_file;
  }
}

void summarize(const SweepResult& result, const std::string& outdir) {
  for (const auto& r : result.rows)
    fmt::print("lambda_sum={:<6} seed={:<3} ({:>3}, {:>3})  simulated={:>10}  estimate={:>10}\n",
               format_real(r.lambda_sum), r.seed, r.source, r.destination,
               format_real(r.simulated_delay), format_real(r.estimate.combined));
  fmt::print("wrote {}\n", outdir);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Slotted simulator of coded fastest-only broadcast with delay estimates"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides overrides;

  auto* simulate = app.add_subcommand("simulate", "run the sweep of a config and write CSVs");
  simulate->add_option("--config", config_path, "experiment config")->required();
  simulate->add_option("--seed", overrides.seed, "run only this seed");
  simulate->add_option("--out", overrides.out, "output directory");
  simulate->add_option("--arrival-policy", overrides.arrival_policy,
                       "same-slot arrivals beyond the first: drop|defer")
      ->check(CLI::IsMember({"drop", "defer"}));
  simulate->add_option("--relay-scope", overrides.relay_scope,
                       "which messages nodes relay: own-message|all")
      ->check(CLI::IsMember({"own-message", "all"}));
  simulate->add_option("--topology-file", overrides.topology_file, "edge list to use");

  auto* analyze = app.add_subcommand("analyze", "write analytical estimates only");
  analyze->add_option("--config", config_path, "experiment config")->required();
  analyze->add_option("--out", overrides.out, "output directory");
  analyze->add_option("--topology-file", overrides.topology_file, "edge list to use");

  auto* special = app.add_subcommand("special-case", "sweep the three-pair example topology");
  special->add_option("--out", overrides.out, "output directory");
  special->add_option("--seed", overrides.seed, "run only this seed");
  special->add_option("--arrival-policy", overrides.arrival_policy, "drop|defer")
      ->check(CLI::IsMember({"drop", "defer"}));
  special->add_option("--relay-scope", overrides.relay_scope, "own-message|all")
      ->check(CLI::IsMember({"own-message", "all"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate || *special) {
      ExperimentConfig config = *simulate ? load_config(config_path) : special_case_config();
      apply(config, overrides);
      const auto result = run_experiment(config);
      emit_report(result, config, config.output_dir);
      summarize(result, config.output_dir);
    } else if (*analyze) {
      ExperimentConfig config = load_config(config_path);
      apply(config, overrides);
      const auto rows = run_analysis(config);
      std::filesystem::create_directories(config.output_dir);
      const auto path = (std::filesystem::path(config.output_dir) / "estimates.csv").string();
      write_estimates_csv(path, rows);
      for (const auto& [lambda, e] : rows)
        fmt::print("lambda_sum={:<6} ({:>3}, {:>3})  propagation={}  queuing={}  combined={}\n",
                   format_real(lambda), e.source, e.destination, e.propagation,
                   format_real(e.queuing_bound), format_real(e.combined));
      fmt::print("wrote {}\n", path);
    }
  } catch (const Error& e) {
    std::cerr << "rncsim: " << e.what() << '\n';
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "rncsim: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
