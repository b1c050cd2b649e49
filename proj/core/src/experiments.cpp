#include "trustq/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "trustq/adversary.hpp"

namespace trustq::experiments {

std::vector<TracePoint> replay_direct_trust(const std::vector<Interaction>& schedule, double c) {
  trust::InteractionCounters counters;
  std::vector<TracePoint> out;
  out.reserve(schedule.size());
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const Tick now = i + 1;
    counters = trust::decay_counters(counters, now, c);
    counters = trust::record_interaction(counters, schedule[i].forwarded, schedule[i].dropped);
    out.push_back({now, trust::direct_trust(counters), trust::confidence_factor(counters)});
  }
  return out;
}

TrustDynamicsSchedules trust_dynamics_schedules(std::size_t horizon, std::size_t burst_every,
                                                std::uint64_t burst_size,
                                                std::size_t phase_length) {
  TrustDynamicsSchedules s;
  s.switch_tick = horizon / 2;
  s.burst_every = burst_every;
  s.phase_length = phase_length;
  s.steady_forwarder.resize(horizon);
  s.malicious_to_normal.resize(horizon);
  s.normal_to_malicious.resize(horizon);
  s.alternating.resize(horizon);
  for (std::size_t i = 0; i < horizon; ++i) {
    if (i % burst_every == 0) s.steady_forwarder[i].forwarded = burst_size;
    const bool before = i < s.switch_tick;
    s.malicious_to_normal[i] = before ? Interaction{0, 1} : Interaction{1, 0};
    s.normal_to_malicious[i] = before ? Interaction{1, 0} : Interaction{0, 1};
    const bool dropping = (i / phase_length) % 2 == 1;
    s.alternating[i] = dropping ? Interaction{0, 1} : Interaction{1, 0};
  }
  return s;
}

namespace {

AttackTrace recommendation_attack(const RecommendationAttackSetup& setup, bool subject_forwards) {
  const NodeId querier = 0;
  const NodeId subject = 1;
  const auto n_attackers = static_cast<std::size_t>(
      std::llround(setup.attacker_fraction * static_cast<double>(setup.recommenders)));

  trust::TrustParams adaptive;
  adaptive.decay_enabled = false;
  adaptive.fusion = setup.fusion;
  trust::TrustParams fixed = adaptive;
  fixed.fixed_confidence = setup.fixed_confidence;

  AttackTrace trace;
  trace.adaptive.assign(setup.evaluation_points, 0.0);
  trace.fixed.assign(setup.evaluation_points, 0.0);

  for (std::uint32_t s = 0; s < setup.seeds; ++s) {
    std::mt19937_64 rng(setup.seed + s);
    std::uniform_int_distribution<std::uint64_t> good(5, 20);
    std::uniform_int_distribution<std::uint64_t> bad(0, 3);

    trust::TrustTable table_a(querier);
    trust::TrustTable table_f(querier);
    std::vector<NodeId> recommenders(setup.recommenders);
    std::iota(recommenders.begin(), recommenders.end(), NodeId{2});
    for (NodeId r : recommenders) {
      const auto f = good(rng);
      const auto d = bad(rng);
      table_a.observe(r, f, d, 0, adaptive);
      table_f.observe(r, f, d, 0, fixed);
    }
    std::vector<NodeId> shuffled = recommenders;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);

    std::vector<adversary::AttackerProfile> profiles(recommenders.size());
    for (std::size_t i = 0; i < recommenders.size(); ++i) {
      profiles[i].node = recommenders[i];
      profiles[i].kind = subject_forwards ? adversary::AttackKind::kBadMouthing
                                          : adversary::AttackKind::kBallotStuffing;
    }
    const auto is_liar = [&](NodeId r) {
      return std::find(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(n_attackers),
                       r) != shuffled.begin() + static_cast<std::ptrdiff_t>(n_attackers);
    };

    for (std::uint32_t t = 0; t < setup.evaluation_points; ++t) {
      const Tick now = t + 1;
      for (auto* table : {&table_a, &table_f}) {
        table->observe(subject, subject_forwards ? 1 : 0, subject_forwards ? 0 : 1, now,
                       table == &table_a ? adaptive : fixed);
      }
      for (auto* table : {&table_a, &table_f}) {
        const auto& params = table == &table_a ? adaptive : fixed;
        std::vector<trust::Recommendation> recs;
        for (std::size_t i = 0; i < recommenders.size(); ++i) {
          const NodeId r = recommenders[i];
          const double t_r = table->direct_at(r, now, params);
          const auto honest = trust::mass_from_claim(
              t_r, subject_forwards ? trust::Claim::kNormal : trust::Claim::kMalicious);
          const auto* profile = is_liar(r) ? &profiles[i] : nullptr;
          recs.push_back({r, adversary::recommendation(profile, subject, !subject_forwards,
                                                       honest, t_r)});
        }
        const auto& rec = trust::evaluate_neighbour(*table, subject, recs, now, params);
        (table == &table_a ? trace.adaptive : trace.fixed)[t] += rec.total;
      }
    }
  }
  for (auto* series : {&trace.adaptive, &trace.fixed}) {
    for (double& v : *series) v /= static_cast<double>(setup.seeds);
  }
  return trace;
}

}  // namespace

AttackTrace badmouthing_trace(const RecommendationAttackSetup& setup) {
  return recommendation_attack(setup, true);
}

AttackTrace ballot_stuffing_trace(const RecommendationAttackSetup& setup) {
  return recommendation_attack(setup, false);
}

}  // namespace trustq::experiments
