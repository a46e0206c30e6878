#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "rncsim/errors.hpp"
#include "rncsim/harness.hpp"

using namespace rncsim;
namespace fs = std::filesystem;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ExperimentConfig small_config() {
  return parse(R"(
topology = random
nodes = 12
edge_probability = 0.3
topology_seed = 5
sources = 2
destinations = 2
k = 2
lambda_sum = 0.2, 0.4
seeds = 1 2
horizon = 1500
queue_sample_every = 50
)");
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("rncsim_test_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto c = parse(R"(
# comment line
topology = random      # trailing comment
nodes = 30
edge_probability = 0.15
weight_mean = 2
weight_stddev = 1
topology_seed = 7
sources = 3
destinations = 3
flows = distinct
k = 4
lambda_sum = 0.1, 0.2 0.3
seeds = 4, 5
horizon = 20000
arrival_policy = drop
relay_scope = all
payload_bytes = 8
write_runs = no
output = results
)");
  CHECK(c.random.num_nodes == 30);
  CHECK(c.topology_seed == 7u);
  CHECK(c.lambda_sums == std::vector<double>{0.1, 0.2, 0.3});
  CHECK(c.seeds == std::vector<std::uint64_t>{4, 5});
  CHECK(c.horizon == 20000);
  CHECK(c.engine.arrival_policy == ArrivalPolicy::drop);
  CHECK(c.engine.relay_scope == RelayScope::all);
  CHECK(c.traffic.payload_bytes == 8);
  CHECK_FALSE(c.write_runs);
  CHECK(c.output_dir == "results");
}

TEST_CASE("explicit flows") {
  const auto c = parse("lambda_sum = 0.5\nflow = 0,1 -> 8 k=3\nflow = 2 -> 6, 7\n");
  CHECK(c.flow_mode == FlowMode::explicit_list);
  REQUIRE(c.flows.size() == 2);
  CHECK(c.flows[0].sources == std::vector<NodeId>{0, 1});
  CHECK(c.flows[0].k == 3);
  CHECK(c.flows[1].destinations == std::vector<NodeId>{6, 7});
}

TEST_CASE("config errors name the problem") {
  CHECK_THROWS_AS(parse("lambda_sum = 0.1\nbogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("lambda_sum = 0.1\nnodes = many\n"), ConfigError);
  CHECK_THROWS_AS(parse("lambda_sum = 0.1\nk = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse("lambda_sum = 0.1\narrival_policy = maybe\n"), ConfigError);
  CHECK_THROWS_AS(parse("lambda_sum = 0.1\ntopology = file\n"), ConfigError);
  CHECK_THROWS_AS(parse("just words\n"), ConfigError);
  try {
    parse("lambda_sum = 0.1\n\nbogus = 1\n");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(load_config("/nonexistent.cfg"), IoError);
}

TEST_CASE("scenario rates follow the shares") {
  auto c = small_config();
  auto s = build_scenario(c, 0.4, 1);
  REQUIRE(s.flows.size() == 2);
  CHECK(s.flows[0].rates[0] == doctest::Approx(0.2));
  CHECK(s.roles.sources == std::vector<NodeId>{0, 1});
  CHECK(s.roles.destinations == std::vector<NodeId>{10, 11});
  c.rate_shares = {3, 1};
  s = build_scenario(c, 0.4, 1);
  CHECK(s.flows[0].rates[0] == doctest::Approx(0.3));
  CHECK(s.flows[1].rates[0] == doctest::Approx(0.1));
  CHECK_THROWS_AS(build_scenario(c, 2.0, 1), ConfigError);
  c.rate_shares = {1};
  CHECK_THROWS_AS(build_scenario(c, 0.4, 1), ConfigError);
}

TEST_CASE("single-message and explicit scenarios") {
  auto c = small_config();
  c.flow_mode = FlowMode::single;
  const auto single = build_scenario(c, 0.6, 1);
  REQUIRE(single.flows.size() == 1);
  CHECK(single.flows[0].sources.size() == 2);
  CHECK(single.flows[0].rates == std::vector<double>{0.3, 0.3});

  const auto e = parse("topology = special\nlambda_sum = 0.9\nflow = 0 -> 6\nflow = 1 -> 7\n");
  const auto s = build_scenario(e, 0.9, 1);
  CHECK(s.roles.sources == std::vector<NodeId>{0, 1});
  CHECK(s.flows[1].rates[0] == doctest::Approx(0.45));
}

TEST_CASE("random topology without a fixed seed follows the run seed") {
  auto c = small_config();
  c.topology_seed.reset();
  CHECK_FALSE(build_scenario(c, 0.2, 1).network == build_scenario(c, 0.2, 2).network);
  c.topology_seed = 3;
  CHECK(build_scenario(c, 0.2, 1).network == build_scenario(c, 0.2, 2).network);
}

TEST_CASE("every grid cell appears once per pair") {
  const auto c = small_config();
  const auto result = run_experiment(c, Execution::serial);
  CHECK(result.rows.size() == 2 * 2 * 2);
  std::set<std::tuple<double, std::uint64_t, NodeId>> cells;
  for (const auto& r : result.rows) cells.insert({r.lambda_sum, r.seed, r.source});
  CHECK(cells.size() == 8);
  CHECK(result.runs.size() == 4);
  CHECK(result.probes.size() == 4 * 12);
  for (const auto& r : result.rows) {
    CHECK(r.deliveries > 0);
    CHECK(r.simulated_delay >= static_cast<double>(r.estimate.propagation));
  }
}

TEST_CASE("parallel sweep equals the serial reference") {
  const auto c = small_config();
  const auto a = run_experiment(c, Execution::serial);
  const auto b = run_experiment(c, Execution::parallel);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].lambda_sum == b.rows[i].lambda_sum);
    CHECK(a.rows[i].seed == b.rows[i].seed);
    CHECK(a.rows[i].simulated_delay == b.rows[i].simulated_delay);
    CHECK(a.rows[i].estimate.combined == b.rows[i].estimate.combined);
  }
  for (std::size_t i = 0; i < a.runs.size(); ++i)
    CHECK(a.runs[i].record.occupancy == b.runs[i].record.occupancy);
}

TEST_CASE("reports are byte-identical across runs") {
  const auto c = small_config();
  const auto d1 = scratch("a"), d2 = scratch("b");
  emit_report(run_experiment(c), c, d1.string());
  emit_report(run_experiment(c, Execution::serial), c, d2.string());
  std::size_t files = 0;
  for (const auto& entry : fs::recursive_directory_iterator(d1)) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), d1);
    CHECK_MESSAGE(slurp(entry.path()) == slurp(d2 / rel), rel.string());
    ++files;
  }
  CHECK(files >= 5);
  CHECK(fs::exists(d1 / "runs" / "lambda_0.200_seed_1" / "deliveries.csv"));
  CHECK(fs::exists(d1 / "plot_pair_0_10.dat"));
  const auto sweep = slurp(d1 / "sweep.csv");
  CHECK(sweep.rfind("lambda_sum,seed,message,source,destination", 0) == 0);
  const auto queues = slurp(d1 / "runs" / "lambda_0.200_seed_1" / "queues.csv");
  CHECK(queues.rfind("slot,node,queue_len\n0,0,", 0) == 0);
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("sweep sizes") {
  auto c = parse("topology = special\nflow = 1 -> 7\nlambda_sum = 0.2 0.4\nhorizon = 500\n");
  const auto two = run_experiment(c);
  CHECK(two.rows.size() == 2);
  CHECK(two.probes.empty());  // below the probe horizon

  c.lambda_sums.clear();
  const auto none = run_experiment(c);
  CHECK(none.rows.empty());
  const auto dir = scratch("empty");
  emit_report(none, c, dir.string());
  CHECK(slurp(dir / "sweep.csv").find('\n') == slurp(dir / "sweep.csv").size() - 1);
  fs::remove_all(dir);
}

TEST_CASE("failing cells are identified") {
  auto c = small_config();
  c.lambda_sums = {0.2, 3.0};
  try {
    run_experiment(c);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("lambda_sum = 3, seed = 1") != std::string::npos);
  }
}

TEST_CASE("analysis output uses inf for unbounded entries") {
  auto c = special_case_config();
  c.lambda_sums = {1.5};
  const auto rows = run_analysis(c);
  REQUIRE(rows.size() == 3);
  const auto dir = scratch("est");
  fs::create_directories(dir);
  write_estimates_csv((dir / "estimates.csv").string(), rows);
  const auto text = slurp(dir / "estimates.csv");
  CHECK(text.find("1.500000,1,7,2,inf,,,inf") != std::string::npos);
  CHECK(text.find("1.500000,0,6,2,inf,4,0.000000,4.000000") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("formatting of reals") {
  CHECK(format_real(1.0 / 3.0) == "0.333333");
  CHECK(format_real(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_real(std::nan("")) == "nan");
}

TEST_CASE("shipped configs parse") {
  const char* root = std::getenv("RNCSIM_SOURCE_DIR");
  REQUIRE(root != nullptr);
  std::size_t seen = 0;
  for (const auto& entry : fs::directory_iterator(fs::path(root) / "configs")) {
    if (entry.path().extension() != ".cfg") continue;
    CAPTURE(entry.path().string());
    const auto c = load_config(entry.path().string());
    CHECK_NOTHROW(build_scenario(c, c.lambda_sums.front(), c.seeds.front()));
    ++seen;
  }
  CHECK(seen >= 4);
}
