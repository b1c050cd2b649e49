#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <string>

#include "trustq/simulator.hpp"

namespace trustq {

namespace {

using Adjacency = std::vector<std::vector<NodeId>>;

Adjacency adjacency(const std::vector<mobility::NodeKinematics>& kin, double range) {
  Adjacency adj(kin.size());
  for (std::size_t i = 0; i < kin.size(); ++i) {
    for (std::size_t j = i + 1; j < kin.size(); ++j) {
      if (mobility::distance(kin[i], kin[j]) <= range) {
        adj[i].push_back(static_cast<NodeId>(j));
        adj[j].push_back(static_cast<NodeId>(i));
      }
    }
  }
  for (auto& row : adj) std::sort(row.begin(), row.end());
  return adj;
}

std::vector<int> bfs_hops(const Adjacency& adj, NodeId from) {
  std::vector<int> dist(adj.size(), -1);
  std::deque<NodeId> queue{from};
  dist[from] = 0;
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    for (NodeId v : adj[u]) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

bool connected(const Adjacency& adj) {
  const auto dist = bfs_hops(adj, 0);
  return std::all_of(dist.begin(), dist.end(), [](int d) { return d >= 0; });
}

bool degrees_within(const Adjacency& adj, std::uint32_t lo, std::uint32_t hi) {
  return std::all_of(adj.begin(), adj.end(),
                     [lo, hi](const auto& row) { return row.size() >= lo && row.size() <= hi; });
}

void draw_motion(std::vector<mobility::NodeKinematics>& kin, const ScenarioConfig& cfg,
                 std::mt19937_64& rng) {
  const std::size_t n = kin.size();
  std::uniform_real_distribution<double> speed(cfg.velocity_min, cfg.velocity_max);
  std::bernoulli_distribution coin(0.5);
  for (auto& k : kin) {
    k.speed = cfg.velocity_max > cfg.velocity_min ? speed(rng) : cfg.velocity_min;
    k.heading = cfg.heading_mode == HeadingMode::kForward ? 1 : (coin(rng) ? 1 : -1);
    k.y = k.heading > 0 ? 0.0 : cfg.lane_offset;
    k.mobile = true;
  }
  const auto n_static =
      static_cast<std::size_t>(std::llround(cfg.static_fraction * static_cast<double>(n)));
  if (n_static > 0) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i = 0; i < n_static; ++i) {
      kin[order[i]].mobile = false;
      kin[order[i]].speed = 0.0;
    }
  }
}

void apply_overrides(std::vector<mobility::NodeKinematics>& kin, const ScenarioConfig& cfg) {
  for (const auto& [id, o] : cfg.node_overrides) {
    auto& k = kin[id];
    if (o.x) k.x = *o.x;
    if (o.heading) {
      k.heading = *o.heading;
      k.y = k.heading > 0 ? 0.0 : cfg.lane_offset;
    }
    if (o.y) k.y = *o.y;
    if (o.speed) {
      k.speed = *o.speed;
      k.mobile = *o.speed > 0.0;
    }
    if (o.mobile) k.mobile = *o.mobile;
    if (!k.mobile) k.speed = 0.0;
  }
}

std::vector<mobility::NodeKinematics> random_layout(const ScenarioConfig& cfg, double road,
                                                    std::mt19937_64& rng) {
  const std::size_t n = cfg.n_nodes;
  const double mean_gap = road / static_cast<double>(n);
  std::uniform_real_distribution<double> gap(0.5 * mean_gap, 1.5 * mean_gap);

  std::vector<double> gaps(n - 1);
  for (auto& g : gaps) g = gap(rng);
  const double sum = std::accumulate(gaps.begin(), gaps.end(), 0.0);
  const double target = mean_gap * static_cast<double>(n - 1);
  for (auto& g : gaps) g = std::min(g * target / sum, cfg.tx_range);

  std::vector<NodeId> slot_to_id(n);
  std::iota(slot_to_id.begin(), slot_to_id.end(), 0);
  std::shuffle(slot_to_id.begin(), slot_to_id.end(), rng);

  std::vector<mobility::NodeKinematics> kin(n);
  double x = 0.0;
  for (std::size_t slot = 0; slot < n; ++slot) {
    if (slot > 0) x += gaps[slot - 1];
    kin[slot_to_id[slot]].node = slot_to_id[slot];
    kin[slot_to_id[slot]].x = x;
  }
  draw_motion(kin, cfg, rng);
  apply_overrides(kin, cfg);
  return kin;
}

std::vector<mobility::NodeKinematics> grid_layout(const ScenarioConfig& cfg, double road,
                                                  std::mt19937_64& rng) {
  const std::size_t n = cfg.n_nodes;
  const double spacing = road / static_cast<double>(n);
  std::vector<mobility::NodeKinematics> kin(n);
  for (std::size_t i = 0; i < n; ++i) {
    kin[i].node = static_cast<NodeId>(i);
    kin[i].x = spacing * static_cast<double>(i);
  }
  draw_motion(kin, cfg, rng);
  apply_overrides(kin, cfg);
  return kin;
}

std::pair<NodeId, NodeId> farthest_pair(const Adjacency& adj) {
  int best = 0;
  std::pair<NodeId, NodeId> pair{kNoNode, kNoNode};
  for (NodeId s = 0; s < adj.size(); ++s) {
    const auto dist = bfs_hops(adj, s);
    for (NodeId d = s + 1; d < adj.size(); ++d) {
      if (dist[d] > best) {
        best = dist[d];
        pair = {s, d};
      }
    }
  }
  return pair;
}

}  // namespace

NetworkState build_topology(const ScenarioConfig& config, std::mt19937_64& rng) {
  const double road = config.effective_road_length();
  constexpr int kMaxAttempts = 1000;

  std::vector<mobility::NodeKinematics> kin;
  Adjacency adj;
  if (config.topology == TopologyKind::kGrid) {
    kin = grid_layout(config, road, rng);
    adj = adjacency(kin, config.tx_range);
  } else {
    bool found = false;
    for (int attempt = 0; attempt < kMaxAttempts && !found; ++attempt) {
      kin = random_layout(config, road, rng);
      adj = adjacency(kin, config.tx_range);
      found = degrees_within(adj, config.min_degree, config.max_degree) && connected(adj);
    }
    if (!found) {
      throw TopologyError("no connected layout with every degree in [" +
                          std::to_string(config.min_degree) + ", " +
                          std::to_string(config.max_degree) + "] after " +
                          std::to_string(kMaxAttempts) + " attempts (n_nodes=" +
                          std::to_string(config.n_nodes) + ", road_length=" +
                          std::to_string(road) + ", tx_range=" +
                          std::to_string(config.tx_range) + ")");
    }
  }

  NetworkState state;
  state.road_length = road;
  state.nodes.reserve(kin.size());
  for (std::size_t i = 0; i < kin.size(); ++i) {
    state.nodes.emplace_back(static_cast<NodeId>(i));
    state.nodes.back().kin = kin[i];
  }
  state.profiles.resize(kin.size());
  state.relay_requests.assign(kin.size(), 0);

  auto [src, dst] = farthest_pair(adj);
  if (config.source) src = *config.source;
  if (config.destination) dst = *config.destination;
  if (src == kNoNode || dst == kNoNode || src == dst) {
    throw TopologyError("no connected source/destination pair exists at t = 0");
  }
  state.source = src;
  state.destination = dst;

  std::vector<bool> claimed(kin.size(), false);
  claimed[src] = claimed[dst] = true;
  for (const auto& group : config.attackers) {
    for (NodeId id : group.ids) {
      if (id == src || id == dst) {
        throw ConfigError("attackers." + group.name + ".ids",
                          config.line_of("attackers." + group.name + ".ids"),
                          "node " + std::to_string(id) + " is a routing endpoint");
      }
    }
  }
  for (const auto& group : config.attackers) {
    for (NodeId id : group.ids) claimed[id] = true;
  }
  for (const auto& group : config.attackers) {
    std::vector<NodeId> chosen = group.ids;
    if (group.count || group.fraction) {
      std::vector<NodeId> pool;
      for (NodeId id = 0; id < kin.size(); ++id) {
        if (!claimed[id]) pool.push_back(id);
      }
      std::shuffle(pool.begin(), pool.end(), rng);
      const std::size_t want =
          group.count ? *group.count
                      : static_cast<std::size_t>(std::llround(
                            *group.fraction * static_cast<double>(config.n_nodes - 2)));
      if (want > pool.size()) {
        throw ConfigError("attackers." + group.name, config.line_of("attackers." + group.name),
                          "not enough free nodes for the requested attackers");
      }
      chosen.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(want));
      std::sort(chosen.begin(), chosen.end());
      for (NodeId id : chosen) claimed[id] = true;
    }
    for (NodeId id : chosen) {
      auto profile = group.templ;
      profile.node = id;
      state.profiles[id] = profile;
    }
  }
  return state;
}

}  // namespace trustq
