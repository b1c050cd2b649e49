#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "trustq/adversary.hpp"
#include "trustq/qrouting.hpp"
#include "trustq/trust.hpp"
#include "trustq/types.hpp"

namespace trustq {

/// A configuration problem. `line` is 0 when the offending value came from a default.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, std::size_t line, const std::string& message);

  const std::string& field() const { return field_; }
  std::size_t line() const { return line_; }

 private:
  std::string field_;
  std::size_t line_;
};

enum class TopologyKind { kRandom, kGrid };
enum class HeadingMode { kRandom, kForward };
enum class TrustEvaluation { kPerHop, kPerHello };

/// How attackers of one group are placed: explicit ids, a count, or a
/// fraction of the non-endpoint nodes (the last two are drawn per seed).
struct AttackerGroup {
  std::string name;
  adversary::AttackerProfile templ;
  std::vector<NodeId> ids;
  std::optional<std::uint32_t> count;
  std::optional<double> fraction;
};

/// Per-node kinematic overrides applied after the layout is built.
struct NodeOverride {
  std::optional<double> x;
  std::optional<double> y;
  std::optional<double> speed;
  std::optional<int> heading;
  std::optional<bool> mobile;
};

struct ScenarioConfig {
  TopologyKind topology = TopologyKind::kRandom;
  std::uint32_t n_nodes = 16;
  double road_length = 4000.0;
  // When set, the road scales with the node count: road_length = n_nodes * value.
  std::optional<double> road_length_per_node;
  double tx_range = 300.0;
  double velocity_min = 5.0;
  double velocity_max = 35.0;
  double static_fraction = 0.0;
  double lane_offset = 0.0;
  HeadingMode heading_mode = HeadingMode::kRandom;
  std::uint32_t min_degree = 1;
  std::uint32_t max_degree = 3;

  double dt = 0.1;
  std::uint32_t ticks_per_episode = 10;
  std::uint32_t hello_interval = 5;
  std::uint32_t hello_timeout = 15;
  std::uint64_t episodes = 1000;
  std::optional<std::uint64_t> topology_change_at;  // 1-based episode index
  double l_max = 120.0;

  bool trust_enabled = true;
  TrustEvaluation trust_evaluation = TrustEvaluation::kPerHop;
  trust::TrustParams trust;
  qrouting::LearningParams learning;
  qrouting::EpsilonSchedule epsilon;

  std::vector<AttackerGroup> attackers;
  std::map<NodeId, NodeOverride> node_overrides;
  std::optional<NodeId> source;
  std::optional<NodeId> destination;

  double metrics_warmup_fraction = 0.1;
  std::uint64_t snapshot_every = 0;  // 0 disables snapshots
  std::uint64_t seed = 1;

  /// Source line of each key as "section.key", for error messages.
  std::map<std::string, std::size_t> origin;

  /// Throws ConfigError naming the first violated field.
  void validate() const;

  std::size_t line_of(const std::string& field) const;

  double effective_road_length() const {
    return road_length_per_node ? *road_length_per_node * n_nodes : road_length;
  }
};

/// Parses the sectioned key = value format. Unknown sections or keys,
/// malformed values and duplicate keys raise ConfigError with the line number.
ScenarioConfig parse_scenario(const std::string& text);

/// Reads and parses a file; I/O failures raise std::system_error.
ScenarioConfig load_scenario(const std::filesystem::path& path);

}  // namespace trustq
