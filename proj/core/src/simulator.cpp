#include "trustq/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace trustq {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Recommenders abstain when their own evidence is this close to neutral.
constexpr double kNeutralBand = 1e-9;

std::mt19937_64 stream(std::uint64_t seed, std::uint32_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), tag};
  return std::mt19937_64(seq);
}

bool contains(const std::vector<NodeId>& sorted, NodeId id) {
  return std::binary_search(sorted.begin(), sorted.end(), id);
}

/// One round of one-hop recommendations about each candidate, gathered by `holder`.
trust::RecommendationMap gather_recommendations(const NetworkState& state, NodeId holder,
                                                const std::vector<NodeId>& candidates,
                                                const trust::TrustParams& params) {
  trust::RecommendationMap out;
  const NodeState& self = state.nodes[holder];
  for (NodeId subject : candidates) {
    auto& list = out[subject];
    const bool subject_is_attacker = state.is_attacker(subject);
    for (NodeId r : self.neighbours) {
      if (r == subject) continue;
      const double querier_trust = self.trust.direct_at(r, state.now, params);
      const double own = state.nodes[r].trust.direct_at(subject, state.now, params);
      trust::MassAssignment honest = trust::MassAssignment::vacuous();
      if (own > 0.5 + kNeutralBand) {
        honest = trust::mass_from_claim(querier_trust, trust::Claim::kNormal);
      } else if (own < 0.5 - kNeutralBand) {
        honest = trust::mass_from_claim(querier_trust, trust::Claim::kMalicious);
      }
      const auto reported = adversary::recommendation(state.profile(r), subject,
                                                      subject_is_attacker, honest, querier_trust);
      if (reported.unknown < 1.0) list.push_back({r, reported});
    }
  }
  return out;
}

std::vector<NodeId> trusted_candidates(NetworkState& state, const ScenarioConfig& config,
                                       NodeId holder, const std::vector<NodeId>& candidates) {
  if (!config.trust_enabled) return candidates;
  if (config.trust_evaluation == TrustEvaluation::kPerHello) {
    std::vector<NodeId> out;
    for (NodeId n : candidates) {
      if (contains(state.nodes[holder].trusted, n)) out.push_back(n);
    }
    return out;
  }
  const auto recs = gather_recommendations(state, holder, candidates, config.trust);
  return trust::trusted_neighbour_list(state.nodes[holder].trust, candidates, recs, state.now,
                                       config.trust);
}

std::vector<NodeId> unvisited(const std::vector<NodeId>& neighbours,
                              const std::vector<bool>& visited) {
  std::vector<NodeId> out;
  out.reserve(neighbours.size());
  for (NodeId n : neighbours) {
    if (!visited[n]) out.push_back(n);
  }
  return out;
}

void snapshot(const NetworkState& state, MetricsReport& report) {
  for (const auto& node : state.nodes) {
    for (const auto& [subject, rec] : node.trust.entries()) {
      report.trust_snapshots.push_back({state.now, node.kin.node, subject, rec.direct, rec.indirect,
                                        rec.confidence, rec.total});
    }
    for (const auto& [key, q] : node.q.values()) {
      report.q_snapshots.push_back({state.now, node.kin.node, key.first, key.second, q});
    }
    report.position_snapshots.push_back(
        {state.now, node.kin.node, node.kin.x, node.kin.y, node.kin.speed, node.kin.heading});
  }
}

void summarise(const ScenarioConfig& config, MetricsReport& report) {
  report.warmup_episodes = static_cast<std::uint64_t>(
      std::floor(config.metrics_warmup_fraction * static_cast<double>(config.episodes)));

  std::vector<std::uint64_t> counts(config.n_nodes, 0);
  double hop_sum = 0.0;
  std::uint64_t delivered = 0;
  for (const auto& rec : report.episodes) {
    if (rec.delivered) {
      hop_sum += rec.hops;
      ++delivered;
    }
    if (rec.episode <= report.warmup_episodes) continue;
    for (NodeId n : rec.interior()) ++counts[n];
  }
  report.mean_hops = delivered ? hop_sum / static_cast<double>(delivered) : kNaN;

  double attacker_sum = 0.0;
  double normal_sum = 0.0;
  std::size_t normal_n = 0;
  for (NodeId id = 0; id < config.n_nodes; ++id) {
    if (report.is_attacker(id)) {
      attacker_sum += static_cast<double>(counts[id]);
    } else if (id != report.source && id != report.destination) {
      normal_sum += static_cast<double>(counts[id]);
      ++normal_n;
    }
  }
  report.attacker_intermediate_count =
      report.attackers.empty() ? kNaN : attacker_sum / static_cast<double>(report.attackers.size());
  report.normal_mean_intermediate_count = normal_n ? normal_sum / static_cast<double>(normal_n) : kNaN;
}

}  // namespace

std::string_view to_string(DropCause cause) {
  switch (cause) {
    case DropCause::kNone:
      return "none";
    case DropCause::kAttackerDrop:
      return "attacker_drop";
    case DropCause::kNoTrustedNeighbour:
      return "no_trusted_neighbour";
    case DropCause::kTtlExceeded:
      return "ttl_exceeded";
  }
  return "none";
}

std::span<const NodeId> EpisodeRecord::interior() const {
  if (path.size() <= 1) return {};
  std::span<const NodeId> rest(path.data() + 1, path.size() - 1);
  return delivered ? rest.first(rest.size() - 1) : rest;
}

bool MetricsReport::is_attacker(NodeId node) const {
  return std::any_of(attackers.begin(), attackers.end(),
                     [node](const adversary::AttackerProfile& p) { return p.node == node; });
}

RngStreams::RngStreams(std::uint64_t seed)
    : topology(stream(seed, 0x746f706fu)),
      routing(stream(seed, 0x726f7574u)),
      adversary(stream(seed, 0x61647672u)),
      change(stream(seed, 0x6368616eu)) {}

void hello_round(NetworkState& state, const ScenarioConfig& config) {
  std::vector<mobility::NodeKinematics> kin;
  kin.reserve(state.nodes.size());
  for (const auto& n : state.nodes) kin.push_back(n.kin);

  for (auto& n : state.nodes) n.neighbours.clear();
  for (std::size_t i = 0; i < kin.size(); ++i) {
    for (std::size_t j = i + 1; j < kin.size(); ++j) {
      if (mobility::distance(kin[i], kin[j]) <= config.tx_range) {
        state.nodes[i].neighbours.push_back(static_cast<NodeId>(j));
        state.nodes[j].neighbours.push_back(static_cast<NodeId>(i));
      }
    }
  }

  for (auto& node : state.nodes) {
    // Pairs were appended in increasing (i, j) order, so each list is already sorted.
    for (NodeId n : node.neighbours) node.last_heard[n] = state.now;
    for (auto it = node.last_heard.begin(); it != node.last_heard.end();) {
      if (state.now - it->second >= config.hello_timeout) {
        qrouting::reset_neighbour(node.q, it->first);
        it = node.last_heard.erase(it);
      } else {
        ++it;
      }
    }
  }

  if (config.trust_enabled && config.trust_evaluation == TrustEvaluation::kPerHello) {
    for (auto& node : state.nodes) {
      const auto recs =
          gather_recommendations(state, node.kin.node, node.neighbours, config.trust);
      node.trusted = trust::trusted_neighbour_list(node.trust, node.neighbours, recs, state.now,
                                                   config.trust);
    }
  }
}

void tick(NetworkState& state, const ScenarioConfig& config) {
  for (auto& node : state.nodes) {
    if (!node.kin.mobile) continue;
    node.kin = mobility::step_kinematics(node.kin, config.dt);
    node.kin.x = mobility::wrap_position(node.kin.x, state.road_length);
  }
  ++state.now;
  if (state.now % config.hello_interval == 0) hello_round(state, config);
}

EpisodeRecord run_episode(NetworkState& state, const ScenarioConfig& config,
                          std::uint64_t episode, std::mt19937_64& routing_rng,
                          std::mt19937_64& adversary_rng) {
  EpisodeRecord rec;
  rec.episode = episode;
  rec.tick = state.now;
  rec.path.push_back(state.source);

  const NodeId dest = state.destination;
  const double epsilon = config.epsilon.at(episode - 1, config.episodes);
  std::vector<bool> visited(state.nodes.size(), false);
  visited[state.source] = true;

  NodeId holder = state.source;
  std::optional<std::vector<NodeId>> carried;  // holder's trusted set, computed upstream
  // The node that handed the packet to `holder`. It credits the holder once it
  // overhears the holder transmit and debits it if the packet stalls there.
  NodeId upstream = kNoNode;
  const auto overheard = [&](bool transmitted) {
    if (!config.trust_enabled || upstream == kNoNode) return;
    state.nodes[upstream].trust.observe(holder, transmitted ? 1 : 0, transmitted ? 0 : 1,
                                        state.now, config.trust);
  };

  const auto learn = [&](NodeState& from, NodeId to, double max_next) {
    const NodeState& next = state.nodes[to];
    const double reward = mobility::link_life(from.kin, next.kin, config.tx_range, config.l_max);
    const double lambda = qrouting::learning_rate(from.kin.speed, next.kin.speed, config.learning);
    const double before = from.q.get(dest, to);
    const double after =
        qrouting::update_q(from.q, dest, to, reward, max_next, lambda, config.learning.gamma);
    rec.max_dq = std::max(rec.max_dq, std::abs(after - before));
    rec.reward_sum += reward;
  };

  while (true) {
    if (rec.path.size() - 1 >= config.n_nodes) {
      overheard(false);
      rec.drop_cause = DropCause::kTtlExceeded;
      break;
    }
    NodeState& self = state.nodes[holder];

    if (contains(self.neighbours, dest)) {
      overheard(true);
      learn(self, dest, 0.0);
      if (config.trust_enabled) self.trust.observe(dest, 1, 0, state.now, config.trust);
      rec.path.push_back(dest);
      rec.hop_trust.push_back(kNaN);
      rec.delivered = true;
      break;
    }

    const auto trusted = carried ? std::move(*carried)
                                 : trusted_candidates(state, config, holder,
                                                      unvisited(self.neighbours, visited));
    carried.reset();
    const auto choice = qrouting::select_next_hop(self.q, dest, trusted, routing_rng, epsilon);
    if (!choice) {
      overheard(false);
      rec.drop_cause = DropCause::kNoTrustedNeighbour;
      break;
    }
    overheard(true);
    const NodeId next = choice->next_hop;
    rec.explored = rec.explored || choice->explored;
    const trust::TrustRecord* tr = self.trust.find(next);
    rec.hop_trust.push_back(config.trust_enabled && tr ? tr->total : kNaN);
    rec.path.push_back(next);

    const auto* profile = state.profile(next);
    const std::uint64_t clock =
        profile && profile->phase_mode == adversary::PhaseMode::kPacketCount
            ? state.relay_requests[next]
            : state.now;
    ++state.relay_requests[next];
    const auto action = adversary::forward_decision(profile, clock, adversary_rng);

    // The relay acknowledges with its best onward estimate, whether or not it
    // goes on to forward.
    visited[next] = true;
    const NodeState& downstream = state.nodes[next];
    double true_max = 0.0;
    if (contains(downstream.neighbours, dest)) {
      true_max = downstream.q.get(dest, dest);
    } else {
      carried = trusted_candidates(state, config, next, unvisited(downstream.neighbours, visited));
      true_max = downstream.q.max_over(dest, *carried);
    }
    learn(self, next, adversary::advertise_q(profile, true_max, config.l_max));

    if (action == adversary::ForwardAction::kDrop) {
      if (config.trust_enabled) self.trust.observe(next, 0, 1, state.now, config.trust);
      rec.drop_cause = DropCause::kAttackerDrop;
      break;
    }
    upstream = holder;
    holder = next;
  }

  rec.hops = static_cast<std::uint32_t>(rec.path.size() - 1);
  if (rec.delivered) ++state.delivered_paths[rec.path];
  return rec;
}

bool apply_topology_change(NetworkState& state, std::mt19937_64& rng) {
  const std::vector<NodeId>* modal = nullptr;
  std::uint64_t best = 0;
  for (const auto& [path, count] : state.delivered_paths) {
    if (count > best) {
      best = count;
      modal = &path;
    }
  }
  if (modal == nullptr || modal->size() < 3) {
    state.warnings.push_back(modal == nullptr
                                 ? "topology change skipped: no packet has been delivered yet"
                                 : "topology change skipped: the modal path has no relay");
    return false;
  }
  std::uniform_int_distribution<std::size_t> pick(1, modal->size() - 2);
  const NodeId broken = (*modal)[pick(rng)];
  for (auto& node : state.nodes) qrouting::reset_neighbour(node.q, broken);
  return true;
}

std::optional<std::uint64_t> convergence_episode(std::span<const EpisodeRecord> episodes,
                                                 double threshold, std::size_t window,
                                                 std::uint64_t from_episode) {
  std::size_t streak = 0;
  std::uint64_t start = 0;
  for (const auto& rec : episodes) {
    if (rec.episode < from_episode || rec.explored) continue;
    if (rec.max_dq < threshold) {
      if (streak == 0) start = rec.episode;
      if (++streak >= window) return start;
    } else {
      streak = 0;
    }
  }
  return std::nullopt;
}

MetricsReport run_scenario(const ScenarioConfig& config) {
  config.validate();
  const auto started = std::chrono::steady_clock::now();

  RngStreams rngs(config.seed);
  NetworkState state = build_topology(config, rngs.topology);
  hello_round(state, config);

  MetricsReport report;
  report.seed = config.seed;
  report.source = state.source;
  report.destination = state.destination;
  for (const auto& p : state.profiles) {
    if (p) report.attackers.push_back(*p);
  }
  report.intermediate_node_count.assign(config.n_nodes, 0);
  report.episodes.reserve(config.episodes);

  for (std::uint64_t e = 1; e <= config.episodes; ++e) {
    if (config.topology_change_at && *config.topology_change_at == e) {
      apply_topology_change(state, rngs.change);
    }
    for (std::uint32_t k = 0; k < config.ticks_per_episode; ++k) tick(state, config);

    EpisodeRecord rec = run_episode(state, config, e, rngs.routing, rngs.adversary);
    for (NodeId n : rec.interior()) ++report.intermediate_node_count[n];
    if (rec.delivered) {
      ++report.packets_received;
    } else {
      ++report.packets_dropped;
      ++report.dropped_by_cause[rec.drop_cause];
    }
    report.episodes.push_back(std::move(rec));

    if (config.snapshot_every > 0 && e % config.snapshot_every == 0) snapshot(state, report);
  }

  report.convergence_episode = convergence_episode(report.episodes, 1e-3 * config.l_max);
  report.warnings = state.warnings;
  summarise(config, report);
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

}  // namespace trustq
