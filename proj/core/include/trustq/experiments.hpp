#pragma once

#include <cstdint>
#include <vector>

#include "trustq/trust.hpp"

namespace trustq::experiments {

/// Interactions a single observer records about one subject during a tick.
struct Interaction {
  std::uint64_t forwarded = 0;
  std::uint64_t dropped = 0;
};

struct TracePoint {
  Tick tick = 0;
  double direct = 0.5;
  double confidence = 1.0;
};

/// Replays a per-tick interaction schedule through decay and conjugate
/// updates, evaluating direct trust after every tick (tick 1 is the first).
std::vector<TracePoint> replay_direct_trust(const std::vector<Interaction>& schedule, double c);

/// Canned behaviour schedules for the four trust-dynamics shapes.
struct TrustDynamicsSchedules {
  std::vector<Interaction> steady_forwarder;     // forwarding bursts separated by silence
  std::vector<Interaction> malicious_to_normal;  // drops, then forwards
  std::vector<Interaction> normal_to_malicious;  // forwards, then drops
  std::vector<Interaction> alternating;          // on/off dropping phases
  std::size_t switch_tick = 0;                   // first tick after the behaviour switch
  std::size_t burst_every = 0;                   // spacing of the forwarding bursts
  std::size_t phase_length = 0;                  // half-period of the alternating schedule
};

TrustDynamicsSchedules trust_dynamics_schedules(std::size_t horizon = 120,
                                                std::size_t burst_every = 20,
                                                std::uint64_t burst_size = 5,
                                                std::size_t phase_length = 15);

struct RecommendationAttackSetup {
  std::uint32_t recommenders = 10;
  double attacker_fraction = 0.3;
  std::uint32_t evaluation_points = 50;
  std::uint32_t seeds = 100;
  std::uint64_t seed = 1;
  double fixed_confidence = 0.5;
  trust::FusionRule fusion = trust::FusionRule::kNormalized;
};

/// Seed-averaged total trust of one subject at each evaluation point, once
/// with the adaptive confidence weight and once with a fixed weight.
struct AttackTrace {
  std::vector<double> adaptive;
  std::vector<double> fixed;
};

/// A perfect forwarder observed by a querier while a fraction of its
/// recommenders bad-mouth it. Counters do not decay.
AttackTrace badmouthing_trace(const RecommendationAttackSetup& setup);

/// A blackhole observed by a querier while a fraction of its recommenders
/// ballot-stuff for it. Counters do not decay.
AttackTrace ballot_stuffing_trace(const RecommendationAttackSetup& setup);

}  // namespace trustq::experiments
