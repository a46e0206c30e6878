// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
// Usage: acceptance <source dir> <rncsim cli>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "rncsim/analysis.hpp"
#include "rncsim/engine.hpp"
#include "rncsim/harness.hpp"

using namespace rncsim;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string source_dir;
std::string cli_path;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// 1. Single packet in an idle network: first arrival == shortest distance.
Outcome first_arrival_is_shortest_distance() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  std::size_t nodes_checked = 0, mismatches = 0;
  const auto m = SourceMessage::random(0, 1, 8, 1);
  const FieldElement unit[] = {FieldElement(1)};
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 10 + rng() % 41;
    const RandomTopologySpec spec{n, std::min(1.0, 4.0 / static_cast<double>(n)), 2.0, 1.0};
    const Network net = generate_random_network(spec, rng());
    const auto origin = static_cast<NodeId>(rng() % n);
    Simulator sim(net);
    const PacketId id = sim.inject(origin, encode_with(m, unit));
    while (!sim.idle()) sim.step();
    const auto expected = oracle::bellman_ford(net, origin);
    for (NodeId v = 0; v < n; ++v) {
      if (expected[v] < 0) continue;
      ++nodes_checked;
      const auto got = sim.first_arrival(v, id);
      if (!got || *got != expected[v]) ++mismatches;
    }
  }
  const double t = seconds_since(start);
  return {mismatches == 0 && t < 10.0,
          fmt::format("100 networks, {} reachable nodes, {} mismatches, {:.2f} s (limit 10 s)",
                      nodes_checked, mismatches, t)};
}

// 2. Encode/absorb/decode round-trip; duplicates never raise the rank.
Outcome coding_round_trip() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(99);
  std::size_t wrong = 0, duplicate_gain = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t k = 1 + rng() % 16, bytes = 1 + rng() % 256;
    const auto m = SourceMessage::random(static_cast<MessageId>(trial), k, bytes, rng());
    DecoderState dec(m.id, k, bytes);
    while (!dec.decodable()) {
      const auto p = encode(m, rng);
      dec.absorb(p);
      const auto before = dec.rank();
      dec.absorb(p);
      if (dec.rank() != before) ++duplicate_gain;
    }
    if (dec.decode() != m.packets) ++wrong;
  }
  const double t = seconds_since(start);
  return {wrong == 0 && duplicate_gain == 0 && t < 5.0,
          fmt::format("1000 messages, {} wrong decodes, {} rank gains from duplicates, "
                      "{:.2f} s (limit 5 s)",
                      wrong, duplicate_gain, t)};
}

// 3. One message from three sources at total rate 1.5: destinations still
//    decode quickly even though n2 overflows.
Outcome single_message_decodes() {
  const auto sc = special_case_network();
  using namespace special;
  const std::vector<NodeId> sources{s1, s2, s3}, destinations{d1, d2, d3};
  const std::vector<FlowSpec> flows{{0, sources, destinations, 3, {0.5, 0.5, 0.5}}};
  const auto estimates = approximate_all(sc.network, flows);
  const auto exempt = same_message_exemption(flows);

  std::map<NodeId, double> estimate;  // best pair estimate per destination
  for (const auto& e : estimates) {
    const double v = exempt[0] ? static_cast<double>(e.propagation) : e.combined;
    auto [it, fresh] = estimate.emplace(e.destination, v);
    if (!fresh) it->second = std::min(it->second, v);
  }

  double worst_ratio = 0.0;
  bool all_decoded = true;
  double n2_probe = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto rec = run(sc.network, {sources, destinations}, flows, {16}, 2000, seed,
                         EngineOptions{ArrivalPolicy::defer, RelayScope::own_message, false});
    for (NodeId d : destinations) {
      const auto ev = std::find_if(rec.decodes.begin(), rec.decodes.end(),
                                   [&](const DecodeEvent& e) { return e.destination == d; });
      if (ev == rec.decodes.end()) {
        all_decoded = false;
        continue;
      }
      worst_ratio = std::max(worst_ratio,
                             static_cast<double>(ev->decoded - ev->message_start) / estimate[d]);
    }
    n2_probe = std::max(n2_probe, measure_queue_growth(rec, n2));
  }
  return {exempt[0] && all_decoded && worst_ratio < 3.0,
          fmt::format("K=3, lambda_m=1.5, 20 seeds: worst decode delay / estimate = {:.2f} "
                      "(limit 3), all decoded: {}, largest n2 queue probe {:.3f}",
                      worst_ratio, all_decoded, n2_probe)};
}

// 4. Queue growth probe at a hub fed at 0.9 and at 1.5 packets per slot.
Outcome stability_probe() {
  const auto hub_probe = [](double per_source) {
    Network net(7);
    const NodeId hub = 3;
    for (NodeId s = 0; s < 3; ++s) net.add_link(s, hub, 1);
    for (NodeId d = 4; d < 7; ++d) net.add_link(hub, d, 1);
    std::vector<FlowSpec> flows;
    for (NodeId i = 0; i < 3; ++i) flows.push_back({i, {i}, {4 + i}, 1, {per_source}});
    const auto rec = run(net, {{0, 1, 2}, {4, 5, 6}}, flows, {8}, 50000, 7,
                         EngineOptions{ArrivalPolicy::defer, RelayScope::own_message, false});
    return measure_queue_growth(rec, hub);
  };
  const double low = hub_probe(0.3), high = hub_probe(0.5);
  return {low < 0.02 && high >= 0.4 && high <= 0.6,
          fmt::format("hub probe at 0.9: {:.5f} (limit 0.02), at 1.5: {:.4f} (range 0.4..0.6)",
                      low, high)};
}

// 5. Estimate is a lower bound on the 30-node sweep; delay rises with load.
Outcome lower_bound_property() {
  const auto start = std::chrono::steady_clock::now();
  const auto config = load_config(source_dir + "/configs/thirty_nodes.cfg");
  const auto result = run_experiment(config);
  std::size_t cells = 0, bounded = 0;
  std::map<std::pair<NodeId, NodeId>, std::map<double, std::pair<double, int>>> series;
  for (const auto& r : result.rows) {
    ++cells;
    if (r.estimate.combined <= r.simulated_delay + 0.5) ++bounded;
    auto& cell = series[{r.source, r.destination}][r.lambda_sum];
    cell.first += r.simulated_delay;
    ++cell.second;
  }
  int inversions = 0;
  for (const auto& [pair, by_lambda] : series) {
    double last = -1.0;
    for (const auto& [lambda, acc] : by_lambda) {
      const double mean = acc.first / acc.second;
      if (mean < last) ++inversions;
      last = mean;
    }
  }
  const double t = seconds_since(start);
  const double share = cells ? static_cast<double>(bounded) / static_cast<double>(cells) : 0.0;
  return {share >= 0.95 && inversions <= 1 && t < 120.0,
          fmt::format("{}/{} cells with estimate <= simulated + 0.5 ({:.1f}%, need 95%), "
                      "{} inversions (allowed 1), {:.1f} s (limit 120 s)",
                      bounded, cells, 100.0 * share, inversions, t)};
}

// 6. Special case: detoured pairs stay bounded past lambda_sum = 1, the
//    middle pair blows up.
Outcome two_phase_behaviour() {
  const auto config = special_case_config();
  const auto result = run_experiment(config);
  using namespace special;
  bool side_bounded = true;
  double side_worst = 0.0, s2_end = 0.0, detour_estimate = 0.0;
  double high_sum = 0.0;
  int high_n = 0;
  Slot detour_propagation = 0;
  for (const auto& r : result.rows) {
    if (r.source == s1 || r.source == s3) {
      const double limit = 2.0 * static_cast<double>(r.estimate.detour->propagation) + 2.0;
      side_worst = std::max(side_worst, r.simulated_delay);
      if (!(r.simulated_delay < limit)) side_bounded = false;
    }
    if (r.source == s1 && r.lambda_sum > 1.0) {
      high_sum += r.simulated_delay;
      ++high_n;
      detour_estimate = static_cast<double>(r.estimate.detour->propagation) + r.estimate.detour->queuing;
      detour_propagation = r.estimate.detour->propagation;
    }
    if (r.source == s2 && r.lambda_sum == config.lambda_sums.back()) s2_end = r.simulated_delay;
  }
  const double high_mean = high_sum / high_n;
  const bool s2_unbounded = s2_end > 10.0 * 2.0;
  const bool detour_close = std::abs(detour_estimate - high_mean) <= 2.0;
  return {side_bounded && s2_unbounded && detour_close,
          fmt::format("worst (s1,d1)/(s3,d3) delay {:.2f} (limit {}), (s2,d2) at 1.5: {:.1f} "
                      "(needs > 20), detour estimate {:.2f} vs high-load mean {:.2f} (within 2)",
                      side_worst, 2 * detour_propagation + 2, s2_end, detour_estimate, high_mean)};
}

// 7. Closed-form queuing bound against the isolated queue.
Outcome queuing_bound_oracle() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int exceeded = 0, off = 0;
  double worst_gap = -1e9, worst_rel = 0.0;
  for (int config = 0; config < 50; ++config) {
    const std::size_t flows = 2 + rng() % 4;
    const double total = 0.1 + 0.85 * u(rng);
    std::vector<double> w(flows), rates(flows);
    double wsum = 0.0;
    for (auto& x : w) wsum += (x = 0.05 + u(rng));
    for (std::size_t i = 0; i < flows; ++i) rates[i] = total * w[i] / wsum;

    const double bound = queuing_bound(rates);
    const double simulated = oracle::simulated_mean_wait(rates, 1000000, rng());
    const double chain = oracle::markov_mean_wait(rates);
    if (bound > simulated) ++exceeded;
    worst_gap = std::max(worst_gap, bound - simulated);
    const double rel = std::abs(bound - chain) / chain;
    worst_rel = std::max(worst_rel, rel);
    if (rel > 0.05) ++off;
  }
  return {exceeded == 0 && off == 0,
          fmt::format("50 configs: bound above simulated mean in {} (largest excess {:.4f}), "
                      "off the chain by more than 5% in {} (largest {:.2e})",
                      exceeded, worst_gap, off, worst_rel)};
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    files[fs::relative(entry.path(), root).string()] = s.str();
  }
  return files;
}

// 8. Two CLI invocations of the golden config write identical files.
Outcome determinism() {
  const auto base = fs::temp_directory_path() / "rncsim_acceptance_golden";
  fs::remove_all(base);
  std::vector<std::map<std::string, std::string>> trees;
  for (const char* name : {"first", "second"}) {
    const auto out = base / name;
    const auto cmd = fmt::format("\"{}\" simulate --config \"{}/configs/golden.cfg\" --out \"{}\" > /dev/null",
                                 cli_path, source_dir, out.string());
    if (std::system(cmd.c_str()) != 0) return {false, "golden run failed: " + cmd};
    trees.push_back(read_tree(out));
  }
  std::size_t differing = 0;
  for (const auto& [name, text] : trees[0]) {
    const auto it = trees[1].find(name);
    if (it == trees[1].end() || it->second != text) ++differing;
  }
  fs::remove_all(base);
  const bool same = differing == 0 && trees[0].size() == trees[1].size() && !trees[0].empty();
  return {same, fmt::format("{} files compared, {} differ", trees[0].size(), differing)};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    fmt::print(stderr, "usage: acceptance <source dir> <rncsim cli>\n");
    return 2;
  }
  source_dir = argv[1];
  cli_path = argv[2];

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 single packet first arrival equals shortest distance", first_arrival_is_shortest_distance},
      {"2 coding round-trip", coding_round_trip},
      {"3 single message decodes despite overload", single_message_decodes},
      {"4 stability probe", stability_probe},
      {"5 estimate bounds the 30-node sweep", lower_bound_property},
      {"6 special case two-phase behaviour", two_phase_behaviour},
      {"7 queuing bound oracle", queuing_bound_oracle},
      {"8 determinism of the golden config", determinism},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    fmt::print("{} criterion {}: {}\n", o.pass ? "PASS" : "FAIL", name, o.detail);
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed ? 1 : 0;
}
