#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "trustq/trust.hpp"
#include "trustq/types.hpp"

namespace trustq::adversary {

enum class AttackKind { kBlackhole, kGrayhole, kBadMouthing, kBallotStuffing };

/// What drives the grayhole's on/off schedule: the global tick or the number
/// of relay requests the attacker has received so far.
enum class PhaseMode { kTime, kPacketCount };

enum class ForwardAction { kForward, kDrop };

struct AttackerProfile {
  NodeId node = kNoNode;
  AttackKind kind = AttackKind::kBlackhole;
  std::uint64_t grayhole_period = 200;
  double grayhole_duty = 0.5;
  double grayhole_drop_prob = 1.0;
  bool lure = false;
  // Subjects a recommendation attacker lies about. Empty means all eligible subjects.
  std::vector<NodeId> targets;
  PhaseMode phase_mode = PhaseMode::kTime;

  /// Throws std::invalid_argument on out-of-range grayhole parameters.
  void validate() const;
};

/// Packet droppers solicit routes by default; recommendation attackers do not.
bool default_lure(AttackKind kind);

std::string_view to_string(AttackKind kind);
/// Accepts blackhole, grayhole, badmouthing, ballotstuffing (case-insensitive,
/// '-' and '_' ignored). Throws std::invalid_argument otherwise.
AttackKind parse_attack_kind(std::string_view text);

/// True while the grayhole schedule is in its dropping phase.
bool in_drop_phase(const AttackerProfile& profile, std::uint64_t phase_clock);

/// `phase_clock` is the tick or the relay-request count, per profile.phase_mode.
/// Honest nodes and recommendation attackers always forward and never touch
/// `rng`; a grayhole draws only inside its dropping phase with 0 < p < 1.
ForwardAction forward_decision(const AttackerProfile* profile, std::uint64_t phase_clock,
                               std::mt19937_64& rng);

/// The mass a node actually reports about `subject`. `querier_trust` is the
/// querying node's direct trust in the reporting node.
trust::MassAssignment recommendation(const AttackerProfile* profile, NodeId subject,
                                     bool subject_is_attacker,
                                     const trust::MassAssignment& honest_mass,
                                     double querier_trust);

/// The maximum downstream Q a node piggybacks on its acknowledgement.
double advertise_q(const AttackerProfile* profile, double true_max_q, double q_cap);

}  // namespace trustq::adversary
