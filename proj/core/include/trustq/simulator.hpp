#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "trustq/adversary.hpp"
#include "trustq/mobility.hpp"
#include "trustq/qrouting.hpp"
#include "trustq/scenario.hpp"
#include "trustq/trust.hpp"
#include "trustq/types.hpp"

namespace trustq {

/// No layout satisfying the degree and connectivity constraints was found.
class TopologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class DropCause { kNone, kAttackerDrop, kNoTrustedNeighbour, kTtlExceeded };

std::string_view to_string(DropCause cause);

struct EpisodeRecord {
  std::uint64_t episode = 0;
  bool delivered = false;
  std::uint32_t hops = 0;
  double reward_sum = 0.0;
  std::vector<NodeId> path;
  DropCause drop_cause = DropCause::kNone;
  // Largest |q_new - q_old| over the updates of this episode.
  double max_dq = 0.0;
  // True if any next hop in this episode was an exploratory pick.
  bool explored = false;
  // Total trust the sender held in each selected relay at selection time,
  // aligned with path[1..]. Direct deliveries to the destination report NaN.
  std::vector<double> hop_trust;
  Tick tick = 0;

  /// Every node after the source that is not the delivered destination.
  std::span<const NodeId> interior() const;
};

struct TrustSnapshotRow {
  Tick tick;
  NodeId owner;
  NodeId subject;
  double direct;
  double indirect;
  double confidence;
  double total;
};

struct QSnapshotRow {
  Tick tick;
  NodeId owner;
  NodeId destination;
  NodeId neighbour;
  double q;
};

struct PositionRow {
  Tick tick;
  NodeId node;
  double x;
  double y;
  double speed;
  int heading;
};

struct MetricsReport {
  std::uint64_t seed = 0;
  NodeId source = kNoNode;
  NodeId destination = kNoNode;
  std::vector<adversary::AttackerProfile> attackers;

  std::vector<EpisodeRecord> episodes;
  std::vector<std::uint64_t> intermediate_node_count;  // indexed by node id
  std::uint64_t packets_received = 0;
  std::uint64_t packets_dropped = 0;
  std::map<DropCause, std::uint64_t> dropped_by_cause;
  std::optional<std::uint64_t> convergence_episode;
  double wall_time_s = 0.0;

  // Summary statistics over episodes after the warm-up prefix.
  std::uint64_t warmup_episodes = 0;
  double mean_hops = 0.0;  // over delivered episodes; NaN if none
  double attacker_intermediate_count = 0.0;  // mean over attackers; NaN if none
  double normal_mean_intermediate_count = 0.0;

  std::vector<std::string> warnings;
  std::vector<TrustSnapshotRow> trust_snapshots;
  std::vector<QSnapshotRow> q_snapshots;
  std::vector<PositionRow> position_snapshots;

  bool is_attacker(NodeId node) const;
};

struct NodeState {
  explicit NodeState(NodeId id) : trust(id), q(id) { kin.node = id; }

  mobility::NodeKinematics kin;
  trust::TrustTable trust;
  qrouting::QTable q;
  std::vector<NodeId> neighbours;     // adjacency from the latest HELLO round
  std::map<NodeId, Tick> last_heard;  // neighbour -> tick of its last HELLO
  std::vector<NodeId> trusted;        // cached list when trust is evaluated per HELLO
};

/// Independent random streams so that, for instance, an honest adversary
/// profile cannot perturb exploration.
struct RngStreams {
  explicit RngStreams(std::uint64_t seed);

  std::mt19937_64 topology;
  std::mt19937_64 routing;
  std::mt19937_64 adversary;
  std::mt19937_64 change;
};

struct NetworkState {
  std::vector<NodeState> nodes;
  std::vector<std::optional<adversary::AttackerProfile>> profiles;  // indexed by node id
  std::vector<std::uint64_t> relay_requests;                        // per node
  std::map<std::vector<NodeId>, std::uint64_t> delivered_paths;
  std::vector<std::string> warnings;
  NodeId source = kNoNode;
  NodeId destination = kNoNode;
  Tick now = 0;
  double road_length = 0.0;

  const adversary::AttackerProfile* profile(NodeId node) const {
    const auto& p = profiles[node];
    return p ? &*p : nullptr;
  }
  bool is_attacker(NodeId node) const { return profiles[node].has_value(); }
};

/// Lays out nodes, assigns attackers and picks the endpoint pair (the pair
/// with the largest hop distance at t = 0 unless configured). Throws
/// TopologyError when the degree bounds cannot be met.
NetworkState build_topology(const ScenarioConfig& config, std::mt19937_64& rng);

/// Refreshes every node's adjacency and resets Q entries of neighbours that
/// have been silent for hello_timeout ticks.
void hello_round(NetworkState& state, const ScenarioConfig& config);

/// Advances all nodes by one dt; runs a HELLO round on hello_interval boundaries.
void tick(NetworkState& state, const ScenarioConfig& config);

/// Routes one packet from source to destination and records the outcome.
EpisodeRecord run_episode(NetworkState& state, const ScenarioConfig& config,
                          std::uint64_t episode, std::mt19937_64& routing_rng,
                          std::mt19937_64& adversary_rng);

/// Zeroes every Q entry pointing to one seeded interior node of the most
/// frequently delivered path. Returns false, with a warning, if there is none.
bool apply_topology_change(NetworkState& state, std::mt19937_64& rng);

/// Start of the first run of `window` consecutive non-exploratory episodes,
/// at or after `from_episode`, whose max |dQ| is below `threshold`.
/// Exploratory episodes neither extend nor break a run.
std::optional<std::uint64_t> convergence_episode(std::span<const EpisodeRecord> episodes,
                                                 double threshold, std::size_t window = 50,
                                                 std::uint64_t from_episode = 1);

/// Validates the config and runs it end to end.
MetricsReport run_scenario(const ScenarioConfig& config);

}  // namespace trustq
