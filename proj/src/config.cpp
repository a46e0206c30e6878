#include "rncsim/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <istream>
#include <sstream>

#include "rncsim/errors.hpp"

namespace rncsim {
namespace {

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r");
  return std::string(text.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& text) {
  std::string spaced = text;
  std::replace(spaced.begin(), spaced.end(), ',', ' ');
  std::istringstream in(spaced);
  std::vector<std::string> out;
  for (std::string token; in >> token;) out.push_back(token);
  return out;
}

class LineParser {
 public:
  LineParser(int line, std::string key) : line_(line), key_(std::move(key)) {}

  [[noreturn]] void fail(const std::string& why) const {
    throw ConfigError(fmt::format("line {}: {}: {}", line_, key_, why));
  }

  double real(const std::string& text) const {
    try {
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    fail(fmt::format("'{}' is not a number", text));
  }

  std::uint64_t integer(const std::string& text) const {
    std::uint64_t v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end)
      fail(fmt::format("'{}' is not a non-negative integer", text));
    return v;
  }

  bool boolean(const std::string& text) const {
    if (text == "true" || text == "yes" || text == "1") return true;
    if (text == "false" || text == "no" || text == "0") return false;
    fail(fmt::format("'{}' is not a boolean", text));
  }

  std::vector<double> reals(const std::string& text) const {
    std::vector<double> out;
    for (const auto& token : split_list(text)) out.push_back(real(token));
    return out;
  }

  std::vector<NodeId> nodes(const std::string& text) const {
    std::vector<NodeId> out;
    for (const auto& token : split_list(text))
      out.push_back(static_cast<NodeId>(integer(token)));
    if (out.empty()) fail("empty node list");
    return out;
  }

 private:
  int line_;
  std::string key_;
};

// "0,1 -> 28,29 k=4"
FlowTemplate parse_flow(const LineParser& p, const std::string& value) {
  const auto arrow = value.find("->");
  if (arrow == std::string::npos) p.fail("expected 'sources -> destinations [k=N]'");
  FlowTemplate flow;
  flow.sources = p.nodes(trim(value.substr(0, arrow)));
  std::string rest = trim(value.substr(arrow + 2));
  if (const auto kpos = rest.find("k="); kpos != std::string::npos) {
    flow.k = static_cast<std::size_t>(p.integer(trim(rest.substr(kpos + 2))));
    if (flow.k == 0) p.fail("k must be >= 1");
    rest = trim(rest.substr(0, kpos));
  }
  flow.destinations = p.nodes(rest);
  return flow;
}

}  // namespace

std::string to_string(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::random: return "random";
    case TopologyKind::file: return "file";
    case TopologyKind::special_case: return "special";
  }
  return "?";
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  bool flows_mode_set = false;
  std::string raw;
  for (int line = 1; std::getline(in, raw); ++line) {
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    const std::string text = trim(raw);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos)
      throw ConfigError(fmt::format("line {}: expected 'key = value'", line));
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    const LineParser p(line, key);
    if (value.empty()) p.fail("missing value");

    if (key == "topology") {
      if (value == "random") c.topology = TopologyKind::random;
      else if (value == "file") c.topology = TopologyKind::file;
      else if (value == "special" || value == "special_case") c.topology = TopologyKind::special_case;
      else p.fail(fmt::format("unknown topology '{}'", value));
    } else if (key == "nodes") {
      c.random.num_nodes = static_cast<std::size_t>(p.integer(value));
    } else if (key == "edge_probability") {
      c.random.edge_probability = p.real(value);
    } else if (key == "weight_mean") {
      c.random.weight_mean = p.real(value);
    } else if (key == "weight_stddev") {
      c.random.weight_stddev = p.real(value);
    } else if (key == "topology_seed") {
      c.topology_seed = p.integer(value);
    } else if (key == "topology_file") {
      c.topology_file = value;
      c.topology = TopologyKind::file;
    } else if (key == "sources") {
      c.num_sources = static_cast<std::size_t>(p.integer(value));
    } else if (key == "destinations") {
      c.num_destinations = static_cast<std::size_t>(p.integer(value));
    } else if (key == "flows") {
      if (value == "distinct") c.flow_mode = FlowMode::distinct;
      else if (value == "single") c.flow_mode = FlowMode::single;
      else if (value == "explicit") c.flow_mode = FlowMode::explicit_list;
      else p.fail(fmt::format("unknown flow mode '{}'", value));
      flows_mode_set = true;
    } else if (key == "flow") {
      c.flows.push_back(parse_flow(p, value));
      if (!flows_mode_set) c.flow_mode = FlowMode::explicit_list;
    } else if (key == "k") {
      c.k = static_cast<std::size_t>(p.integer(value));
      if (c.k == 0) p.fail("k must be >= 1");
    } else if (key == "rate_shares") {
      c.rate_shares = p.reals(value);
    } else if (key == "lambda_sum") {
      c.lambda_sums = p.reals(value);
    } else if (key == "seeds") {
      c.seeds.clear();
      for (const auto& token : split_list(value)) c.seeds.push_back(p.integer(token));
    } else if (key == "horizon") {
      c.horizon = static_cast<Slot>(p.integer(value));
    } else if (key == "warmup_fraction") {
      c.warmup_fraction = p.real(value);
    } else if (key == "arrival_policy") {
      try { c.engine.arrival_policy = parse_arrival_policy(value); }
      catch (const InvalidParameter& e) { p.fail(e.what()); }
    } else if (key == "relay_scope") {
      try { c.engine.relay_scope = parse_relay_scope(value); }
      catch (const InvalidParameter& e) { p.fail(e.what()); }
    } else if (key == "payload_bytes") {
      c.traffic.payload_bytes = static_cast<std::size_t>(p.integer(value));
    } else if (key == "queue_sample_every") {
      c.queue_sample_every = static_cast<Slot>(p.integer(value));
    } else if (key == "write_runs") {
      c.write_runs = p.boolean(value);
    } else if (key == "output") {
      c.output_dir = value;
    } else {
      p.fail("unknown key");
    }
  }

  if (c.horizon < 1) throw ConfigError("horizon must be >= 1");
  if (!(c.warmup_fraction >= 0.0 && c.warmup_fraction < 1.0))
    throw ConfigError("warmup_fraction must lie in [0, 1)");
  if (c.queue_sample_every < 1) throw ConfigError("queue_sample_every must be >= 1");
  if (c.seeds.empty()) throw ConfigError("at least one seed is required");
  if (c.topology == TopologyKind::file && c.topology_file.empty())
    throw ConfigError("topology = file needs topology_file");
  if (c.flow_mode == FlowMode::explicit_list && c.flows.empty())
    throw ConfigError("flows = explicit needs at least one 'flow =' line");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open config {}", path));
  ExperimentConfig config;
  try {
    config = parse_config(in);
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", path, e.what()));
  }
  // Topology files are resolved relative to the config that names them.
  if (!config.topology_file.empty()) {
    const std::filesystem::path file(config.topology_file);
    if (file.is_relative())
      config.topology_file =
          (std::filesystem::path(path).parent_path() / file).lexically_normal().string();
  }
  return config;
}

}  // namespace rncsim
