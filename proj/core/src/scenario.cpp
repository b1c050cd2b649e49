#include "trustq/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <system_error>

namespace trustq {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

/// One `key = value` occurrence with enough context to report errors.
struct Entry {
  std::string field;  // section.key
  std::string value;
  std::size_t line;

  [[noreturn]] void fail(const std::string& why) const { throw ConfigError(field, line, why); }

  double as_double() const {
    double v = 0.0;
    const char* first = value.data();
    const char* last = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) fail("expected a number, got '" + value + "'");
    return v;
  }

  std::uint64_t as_uint() const {
    std::uint64_t v = 0;
    const char* first = value.data();
    const char* last = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) {
      fail("expected a non-negative integer, got '" + value + "'");
    }
    return v;
  }

  std::uint32_t as_u32() const {
    const std::uint64_t v = as_uint();
    if (v > 0xFFFFFFFFull) fail("value out of range");
    return static_cast<std::uint32_t>(v);
  }

  bool as_bool() const {
    const std::string v = lower(value);
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    fail("expected a boolean, got '" + value + "'");
  }

  bool is_none() const {
    const std::string v = lower(value);
    return v == "none" || v == "auto" || v.empty();
  }

  std::vector<NodeId> as_ids() const {
    std::vector<NodeId> ids;
    for (const auto& item : split_list(value)) {
      Entry sub{field, item, line};
      ids.push_back(sub.as_u32());
    }
    return ids;
  }
};

void apply_scenario_key(ScenarioConfig& cfg, const std::string& key, const Entry& e) {
  if (key == "topology") {
    const std::string v = lower(e.value);
    if (v == "random") cfg.topology = TopologyKind::kRandom;
    else if (v == "grid") cfg.topology = TopologyKind::kGrid;
    else e.fail("expected random or grid");
  } else if (key == "n_nodes") {
    cfg.n_nodes = e.as_u32();
  } else if (key == "road_length") {
    cfg.road_length = e.as_double();
  } else if (key == "road_length_per_node") {
    cfg.road_length_per_node = e.as_double();
  } else if (key == "tx_range") {
    cfg.tx_range = e.as_double();
  } else if (key == "velocity_range") {
    const auto parts = split_list(e.value);
    if (parts.size() != 2) e.fail("expected two comma-separated speeds");
    cfg.velocity_min = Entry{e.field, parts[0], e.line}.as_double();
    cfg.velocity_max = Entry{e.field, parts[1], e.line}.as_double();
  } else if (key == "static_fraction") {
    cfg.static_fraction = e.as_double();
  } else if (key == "lane_offset") {
    cfg.lane_offset = e.as_double();
  } else if (key == "heading_mode") {
    const std::string v = lower(e.value);
    if (v == "random") cfg.heading_mode = HeadingMode::kRandom;
    else if (v == "forward") cfg.heading_mode = HeadingMode::kForward;
    else e.fail("expected random or forward");
  } else if (key == "min_degree") {
    cfg.min_degree = e.as_u32();
  } else if (key == "max_degree") {
    cfg.max_degree = e.as_u32();
  } else if (key == "dt") {
    cfg.dt = e.as_double();
  } else if (key == "ticks_per_episode") {
    cfg.ticks_per_episode = e.as_u32();
  } else if (key == "hello_interval") {
    cfg.hello_interval = e.as_u32();
  } else if (key == "hello_timeout") {
    cfg.hello_timeout = e.as_u32();
  } else if (key == "episodes") {
    cfg.episodes = e.as_uint();
  } else if (key == "topology_change_at") {
    if (e.is_none()) cfg.topology_change_at.reset();
    else cfg.topology_change_at = e.as_uint();
  } else if (key == "l_max") {
    cfg.l_max = e.as_double();
  } else if (key == "trust_enabled") {
    cfg.trust_enabled = e.as_bool();
  } else if (key == "trust_evaluation") {
    const std::string v = lower(e.value);
    if (v == "hop") cfg.trust_evaluation = TrustEvaluation::kPerHop;
    else if (v == "hello") cfg.trust_evaluation = TrustEvaluation::kPerHello;
    else e.fail("expected hop or hello");
  } else if (key == "source") {
    if (e.is_none()) cfg.source.reset();
    else cfg.source = e.as_u32();
  } else if (key == "destination") {
    if (e.is_none()) cfg.destination.reset();
    else cfg.destination = e.as_u32();
  } else if (key == "metrics_warmup_fraction") {
    cfg.metrics_warmup_fraction = e.as_double();
  } else if (key == "snapshot_every") {
    cfg.snapshot_every = e.as_uint();
  } else if (key == "seed") {
    cfg.seed = e.as_uint();
  } else if (key == "v_max") {
    cfg.learning.v_max = e.as_double();
  } else if (key == "v_min") {
    cfg.learning.v_min = e.as_double();
  } else if (key == "v_th") {
    cfg.learning.v_th = e.as_double();
  } else {
    e.fail("unknown key");
  }
}

void apply_trust_key(ScenarioConfig& cfg, const std::string& key, const Entry& e) {
  if (key == "c") {
    cfg.trust.decay = e.as_double();
  } else if (key == "t_th") {
    cfg.trust.threshold = e.as_double();
  } else if (key == "fusion_rule") {
    const std::string v = lower(e.value);
    if (v == "normalized") cfg.trust.fusion = trust::FusionRule::kNormalized;
    else if (v == "yager") cfg.trust.fusion = trust::FusionRule::kYager;
    else e.fail("expected normalized or yager");
  } else if (key == "decay_enabled") {
    cfg.trust.decay_enabled = e.as_bool();
  } else if (key == "fixed_confidence") {
    if (e.is_none()) cfg.trust.fixed_confidence.reset();
    else cfg.trust.fixed_confidence = e.as_double();
  } else {
    e.fail("unknown key");
  }
}

void apply_learning_key(ScenarioConfig& cfg, const std::string& key, const Entry& e) {
  if (key == "v_max") cfg.learning.v_max = e.as_double();
  else if (key == "v_min") cfg.learning.v_min = e.as_double();
  else if (key == "v_th") cfg.learning.v_th = e.as_double();
  else if (key == "lambda_fixed") cfg.learning.lambda_fixed = e.as_double();
  else if (key == "gamma") cfg.learning.gamma = e.as_double();
  else if (key == "epsilon") cfg.epsilon.start = cfg.epsilon.final = e.as_double();
  else if (key == "epsilon_start") cfg.epsilon.start = e.as_double();
  else if (key == "epsilon_final") cfg.epsilon.final = e.as_double();
  else if (key == "anneal_fraction") cfg.epsilon.anneal_fraction = e.as_double();
  else e.fail("unknown key");
}

void apply_attacker_key(AttackerGroup& g, const std::string& key, const Entry& e,
                        bool& lure_set) {
  auto& p = g.templ;
  if (key == "kind") {
    try {
      p.kind = adversary::parse_attack_kind(e.value);
    } catch (const std::invalid_argument& ex) {
      e.fail(ex.what());
    }
    if (!lure_set) p.lure = adversary::default_lure(p.kind);
  } else if (key == "ids") {
    g.ids = e.as_ids();
  } else if (key == "count") {
    g.count = e.as_u32();
  } else if (key == "fraction") {
    g.fraction = e.as_double();
  } else if (key == "lure") {
    p.lure = e.as_bool();
    lure_set = true;
  } else if (key == "grayhole_period") {
    p.grayhole_period = e.as_uint();
  } else if (key == "grayhole_duty") {
    p.grayhole_duty = e.as_double();
  } else if (key == "grayhole_drop_prob") {
    p.grayhole_drop_prob = e.as_double();
  } else if (key == "phase_mode") {
    const std::string v = lower(e.value);
    if (v == "time") p.phase_mode = adversary::PhaseMode::kTime;
    else if (v == "packets") p.phase_mode = adversary::PhaseMode::kPacketCount;
    else e.fail("expected time or packets");
  } else if (key == "targets") {
    p.targets = e.as_ids();
  } else {
    e.fail("unknown key");
  }
}

void apply_node_key(NodeOverride& o, const std::string& key, const Entry& e) {
  if (key == "x") {
    o.x = e.as_double();
  } else if (key == "y") {
    o.y = e.as_double();
  } else if (key == "speed") {
    o.speed = e.as_double();
  } else if (key == "heading") {
    const double h = e.as_double();
    if (h != 1.0 && h != -1.0) e.fail("heading must be +1 or -1");
    o.heading = static_cast<int>(h);
  } else if (key == "mobile") {
    o.mobile = e.as_bool();
  } else if (key == "static") {
    o.mobile = !e.as_bool();
  } else {
    e.fail("unknown key");
  }
}

}  // namespace

namespace {
std::string format_config_error(const std::string& field, std::size_t line,
                                const std::string& message) {
  std::string out;
  if (line > 0) out = "line " + std::to_string(line) + ": ";
  out += field + ": " + message;
  return out;
}
}  // namespace

ConfigError::ConfigError(std::string field, std::size_t line, const std::string& message)
    : std::runtime_error(format_config_error(field, line, message)),
      field_(std::move(field)),
      line_(line) {}

std::size_t ScenarioConfig::line_of(const std::string& field) const {
  auto it = origin.find(field);
  return it == origin.end() ? 0 : it->second;
}

void ScenarioConfig::validate() const {
  const auto check = [this](bool ok, const std::string& field, const std::string& why) {
    if (!ok) throw ConfigError(field, line_of(field), why);
  };

  check(n_nodes >= 2, "scenario.n_nodes", "must be at least 2");
  check(road_length > 0.0, "scenario.road_length", "must be positive");
  check(!road_length_per_node || *road_length_per_node > 0.0, "scenario.road_length_per_node",
        "must be positive");
  check(tx_range > 0.0, "scenario.tx_range", "must be positive");
  check(velocity_min >= 0.0 && velocity_min <= velocity_max, "scenario.velocity_range",
        "must satisfy 0 <= min <= max");
  check(static_fraction >= 0.0 && static_fraction <= 1.0, "scenario.static_fraction",
        "must lie in [0, 1]");
  check(min_degree <= max_degree, "scenario.min_degree", "must not exceed max_degree");
  check(max_degree >= 1, "scenario.max_degree", "must be at least 1");
  check(dt > 0.0, "scenario.dt", "must be positive");
  check(ticks_per_episode >= 1, "scenario.ticks_per_episode", "must be at least 1");
  check(hello_interval >= 1, "scenario.hello_interval", "must be at least 1");
  check(ticks_per_episode % hello_interval == 0, "scenario.ticks_per_episode",
        "must be a multiple of hello_interval");
  check(hello_timeout >= hello_interval, "scenario.hello_timeout",
        "must be at least hello_interval");
  check(episodes >= 1, "scenario.episodes", "must be at least 1");
  check(!topology_change_at || (*topology_change_at >= 1 && *topology_change_at <= episodes),
        "scenario.topology_change_at", "must lie in [1, episodes]");
  check(l_max > 0.0, "scenario.l_max", "must be positive");
  check(metrics_warmup_fraction >= 0.0 && metrics_warmup_fraction < 1.0,
        "scenario.metrics_warmup_fraction", "must lie in [0, 1)");

  check(trust.decay > 0.0 && trust.decay < 1.0, "trust.c", "must lie in (0, 1)");
  check(trust.threshold >= 0.0 && trust.threshold <= 1.0, "trust.T_th", "must lie in [0, 1]");
  check(!trust.fixed_confidence ||
            (*trust.fixed_confidence >= 0.0 && *trust.fixed_confidence <= 1.0),
        "trust.fixed_confidence", "must lie in [0, 1]");

  check(learning.v_max > learning.v_min, "learning.v_max", "must exceed v_min");
  check(learning.v_th >= 0.0, "learning.v_th", "must be non-negative");
  check(learning.lambda_fixed >= 0.0 && learning.lambda_fixed <= 1.0, "learning.lambda_fixed",
        "must lie in [0, 1]");
  check(learning.gamma >= 0.0 && learning.gamma <= 1.0, "learning.gamma", "must lie in [0, 1]");
  check(epsilon.start >= 0.0 && epsilon.start < 1.0, "learning.epsilon_start",
        "must lie in [0, 1)");
  check(epsilon.final >= 0.0 && epsilon.final < 1.0, "learning.epsilon_final",
        "must lie in [0, 1)");
  check(epsilon.anneal_fraction >= 0.0 && epsilon.anneal_fraction <= 1.0,
        "learning.anneal_fraction", "must lie in [0, 1]");

  check(!source || *source < n_nodes, "scenario.source", "must be a valid node id");
  check(!destination || *destination < n_nodes, "scenario.destination",
        "must be a valid node id");
  check(!(source && destination && *source == *destination), "scenario.destination",
        "must differ from source");

  std::set<NodeId> claimed;
  for (const auto& g : attackers) {
    const std::string prefix = "attackers." + g.name + ".";
    const int modes = (g.ids.empty() ? 0 : 1) + (g.count ? 1 : 0) + (g.fraction ? 1 : 0);
    check(modes == 1, prefix + "ids", "exactly one of ids, count or fraction is required");
    check(!g.fraction || (*g.fraction >= 0.0 && *g.fraction <= 1.0), prefix + "fraction",
          "must lie in [0, 1]");
    check(!g.count || *g.count <= n_nodes - 2, prefix + "count",
          "exceeds the number of non-endpoint nodes");
    for (NodeId id : g.ids) {
      check(id < n_nodes, prefix + "ids", "node id " + std::to_string(id) + " out of range");
      check(claimed.insert(id).second, prefix + "ids",
            "node " + std::to_string(id) + " already has an attacker profile");
      check(!source || id != *source, prefix + "ids", "the source cannot be an attacker");
      check(!destination || id != *destination, prefix + "ids",
            "the destination cannot be an attacker");
    }
    check(g.templ.grayhole_period > 0, prefix + "grayhole_period", "must be positive");
    check(g.templ.grayhole_duty >= 0.0 && g.templ.grayhole_duty <= 1.0,
          prefix + "grayhole_duty", "must lie in [0, 1]");
    check(g.templ.grayhole_drop_prob >= 0.0 && g.templ.grayhole_drop_prob <= 1.0,
          prefix + "grayhole_drop_prob", "must lie in [0, 1]");
    for (NodeId id : g.templ.targets) {
      check(id < n_nodes, prefix + "targets", "node id " + std::to_string(id) + " out of range");
    }
  }

  for (const auto& [id, o] : node_overrides) {
    const std::string prefix = "node." + std::to_string(id);
    check(id < n_nodes, prefix, "node id out of range");
    check(!o.speed || *o.speed >= 0.0, prefix + ".speed", "must be non-negative");
  }
}

ScenarioConfig parse_scenario(const std::string& text) {
  ScenarioConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  std::string section;
  std::map<std::string, bool> lure_set;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    // Comments start with '#' or ';' at the beginning of a line or after whitespace.
    for (std::size_t i = 0; i < line.size(); ++i) {
      if ((line[i] == '#' || line[i] == ';') &&
          (i == 0 || std::isspace(static_cast<unsigned char>(line[i - 1])))) {
        line.resize(i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("section", line_no, "unterminated section header");
      section = lower(trim(line.substr(1, line.size() - 2)));
      if (section == "scenario" || section == "trust" || section == "learning") continue;
      if (section.rfind("attackers.", 0) == 0 && section.size() > 10) {
        const std::string name = section.substr(10);
        auto it = std::find_if(cfg.attackers.begin(), cfg.attackers.end(),
                               [&](const AttackerGroup& g) { return g.name == name; });
        if (it != cfg.attackers.end()) {
          throw ConfigError(section, line_no, "duplicate attacker section");
        }
        AttackerGroup g;
        g.name = name;
        g.templ.lure = adversary::default_lure(g.templ.kind);
        cfg.attackers.push_back(std::move(g));
        continue;
      }
      if (section.rfind("node.", 0) == 0 && section.size() > 5) {
        Entry e{section, section.substr(5), line_no};
        const NodeId id = e.as_u32();
        if (cfg.node_overrides.contains(id)) {
          throw ConfigError(section, line_no, "duplicate node section");
        }
        cfg.node_overrides[id];
        continue;
      }
      throw ConfigError(section, line_no, "unknown section");
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(section.empty() ? "line" : section, line_no, "expected key = value");
    }
    if (section.empty()) throw ConfigError("line", line_no, "key outside of any section");
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string value = trim(line.substr(eq + 1));
    const std::string display_key = trim(line.substr(0, eq));
    Entry e{section + "." + display_key, value, line_no};
    if (!cfg.origin.emplace(section + "." + key, line_no).second) {
      e.fail("duplicate key");
    }
    // Normalise the reported field for the canonical threshold spelling.
    if (section == "trust" && key == "t_th") e.field = "trust.T_th";

    if (section == "scenario") {
      apply_scenario_key(cfg, key, e);
    } else if (section == "trust") {
      apply_trust_key(cfg, key, e);
      if (key == "t_th") cfg.origin["trust.T_th"] = line_no;
    } else if (section == "learning") {
      apply_learning_key(cfg, key, e);
    } else if (section.rfind("attackers.", 0) == 0) {
      auto& g = cfg.attackers.back();
      apply_attacker_key(g, key, e, lure_set[g.name]);
    } else {
      const NodeId id = Entry{section, section.substr(5), line_no}.as_u32();
      apply_node_key(cfg.node_overrides[id], key, e);
    }
  }

  // Pre-apply per-node scaling so validation sees the real road.
  if (cfg.road_length_per_node) cfg.road_length = cfg.effective_road_length();
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::system_error(std::make_error_code(std::errc::no_such_file_or_directory),
                            "cannot open config '" + path.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) {
    throw std::system_error(std::make_error_code(std::errc::io_error),
                            "cannot read config '" + path.string() + "'");
  }
  return parse_scenario(buf.str());
}

}  // namespace trustq
