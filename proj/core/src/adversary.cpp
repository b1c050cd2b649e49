#include "trustq/adversary.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

namespace trustq::adversary {

void AttackerProfile::validate() const {
  if (grayhole_period == 0) throw std::invalid_argument("grayhole_period must be positive");
  if (!(grayhole_duty >= 0.0 && grayhole_duty <= 1.0)) {
    throw std::invalid_argument("grayhole_duty must lie in [0, 1]");
  }
  if (!(grayhole_drop_prob >= 0.0 && grayhole_drop_prob <= 1.0)) {
    throw std::invalid_argument("grayhole_drop_prob must lie in [0, 1]");
  }
}

bool default_lure(AttackKind kind) {
  return kind == AttackKind::kBlackhole || kind == AttackKind::kGrayhole;
}

std::string_view to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::kBlackhole:
      return "blackhole";
    case AttackKind::kGrayhole:
      return "grayhole";
    case AttackKind::kBadMouthing:
      return "badmouthing";
    case AttackKind::kBallotStuffing:
      return "ballotstuffing";
  }
  return "unknown";
}

AttackKind parse_attack_kind(std::string_view text) {
  std::string key;
  for (char ch : text) {
    if (ch == '-' || ch == '_') continue;
    key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  if (key == "blackhole") return AttackKind::kBlackhole;
  if (key == "grayhole" || key == "greyhole") return AttackKind::kGrayhole;
  if (key == "badmouthing" || key == "badmouth") return AttackKind::kBadMouthing;
  if (key == "ballotstuffing" || key == "ballot") return AttackKind::kBallotStuffing;
  throw std::invalid_argument("unknown attacker kind '" + std::string(text) + "'");
}

bool in_drop_phase(const AttackerProfile& profile, std::uint64_t phase_clock) {
  const double position = static_cast<double>(phase_clock % profile.grayhole_period);
  return position < profile.grayhole_duty * static_cast<double>(profile.grayhole_period);
}

ForwardAction forward_decision(const AttackerProfile* profile, std::uint64_t phase_clock,
                               std::mt19937_64& rng) {
  if (profile == nullptr) return ForwardAction::kForward;
  switch (profile->kind) {
    case AttackKind::kBlackhole:
      return ForwardAction::kDrop;
    case AttackKind::kGrayhole: {
      if (!in_drop_phase(*profile, phase_clock)) return ForwardAction::kForward;
      const double p = profile->grayhole_drop_prob;
      if (p >= 1.0) return ForwardAction::kDrop;
      if (p <= 0.0) return ForwardAction::kForward;
      return std::bernoulli_distribution(p)(rng) ? ForwardAction::kDrop : ForwardAction::kForward;
    }
    case AttackKind::kBadMouthing:
    case AttackKind::kBallotStuffing:
      return ForwardAction::kForward;
  }
  return ForwardAction::kForward;
}

trust::MassAssignment recommendation(const AttackerProfile* profile, NodeId subject,
                                     bool subject_is_attacker,
                                     const trust::MassAssignment& honest_mass,
                                     double querier_trust) {
  if (profile == nullptr) return honest_mass;
  const bool targeted =
      profile->targets.empty() ||
      std::find(profile->targets.begin(), profile->targets.end(), subject) != profile->targets.end();
  if (!targeted) return honest_mass;
  if (profile->kind == AttackKind::kBadMouthing && !subject_is_attacker) {
    return trust::mass_from_claim(querier_trust, trust::Claim::kMalicious);
  }
  if (profile->kind == AttackKind::kBallotStuffing && subject_is_attacker) {
    return trust::mass_from_claim(querier_trust, trust::Claim::kNormal);
  }
  return honest_mass;
}

double advertise_q(const AttackerProfile* profile, double true_max_q, double q_cap) {
  if (profile != nullptr && profile->lure) return q_cap;
  return true_max_q;
}

}  // namespace trustq::adversary
