#include "trustq/trust.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace trustq::trust {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

InteractionCounters decay_to(InteractionCounters counters, Tick now, const TrustParams& params) {
  if (!params.decay_enabled || now <= counters.last_update) {
    counters.last_update = std::max(counters.last_update, now);
    return counters;
  }
  return decay_counters(counters, now, params.decay);
}

}  // namespace

bool MassAssignment::is_valid(double tol) const {
  const auto in_unit = [tol](double v) { return v >= -tol && v <= 1.0 + tol; };
  return in_unit(normal) && in_unit(malicious) && in_unit(unknown) &&
         std::abs(normal + malicious + unknown - 1.0) <= tol;
}

double direct_trust(const InteractionCounters& counters) {
  return counters.alpha / (counters.alpha + counters.beta);
}

InteractionCounters decay_counters(InteractionCounters counters, Tick now, double c) {
  if (!(c > 0.0 && c < 1.0)) {
    throw std::invalid_argument("decay factor must lie in (0, 1), got " + std::to_string(c));
  }
  if (now < counters.last_update) {
    throw std::invalid_argument("cannot decay counters backwards in time");
  }
  const Tick dt = now - counters.last_update;
  if (dt == 0) return counters;

  const double factor = std::pow(c, static_cast<double>(dt));
  const auto relax = [factor](double x) {
    return std::max(kCounterFloor + (x - kCounterFloor) * factor, kCounterFloor);
  };
  counters.alpha = relax(counters.alpha);
  counters.beta = relax(counters.beta);
  counters.last_update = now;
  return counters;
}

InteractionCounters record_interaction(InteractionCounters counters, std::uint64_t forwarded,
                                       std::uint64_t dropped) {
  counters.alpha += static_cast<double>(forwarded);
  counters.beta += static_cast<double>(dropped);
  return counters;
}

double confidence_factor(const InteractionCounters& counters) {
  const double a = counters.alpha;
  const double b = counters.beta;
  const double s = a + b;
  return clamp01(12.0 * a * b / (s * s * (s + 1.0)));
}

MassAssignment mass_from_claim(double recommender_trust, Claim claim) {
  const double t = clamp01(recommender_trust);
  if (claim == Claim::kNormal) return {t, 0.0, 1.0 - t};
  return {0.0, t, 1.0 - t};
}

double belief(const MassAssignment& mass, Hypothesis hypothesis) {
  switch (hypothesis) {
    case Hypothesis::kNormal:
      return mass.normal;
    case Hypothesis::kMalicious:
      return mass.malicious;
    case Hypothesis::kUnknown:
      return mass.normal + mass.malicious + mass.unknown;
  }
  return 0.0;
}

double plausibility(const MassAssignment& mass, Hypothesis hypothesis) {
  switch (hypothesis) {
    case Hypothesis::kNormal:
      return mass.normal + mass.unknown;
    case Hypothesis::kMalicious:
      return mass.malicious + mass.unknown;
    case Hypothesis::kUnknown:
      return mass.normal + mass.malicious + mass.unknown;
  }
  return 0.0;
}

double conflict_mass(const MassAssignment& m1, const MassAssignment& m2) {
  return m1.normal * m2.malicious + m1.malicious * m2.normal;
}

MassAssignment fuse_pair(const MassAssignment& m1, const MassAssignment& m2, FusionRule rule) {
  // Cross terms are grouped so that swapping m1 and m2 yields bit-identical sums.
  const double n_h = m1.normal * m2.normal + (m1.normal * m2.unknown + m1.unknown * m2.normal);
  const double n_m = m1.malicious * m2.malicious +
                     (m1.malicious * m2.unknown + m1.unknown * m2.malicious);
  const double n_u = m1.unknown * m2.unknown;
  const double k = conflict_mass(m1, m2);

  if (rule == FusionRule::kYager) return {n_h, n_m, n_u + k};
  // Without conflict the numerators already sum to one.
  if (k == 0.0) return {n_h, n_m, n_u};

  const double total = n_h + n_m + n_u;
  if (total < kConflictEpsilon) throw DegenerateConflict{};
  return {n_h / total, n_m / total, n_u / total};
}

double indirect_trust(std::span<const MassAssignment> recommendations, FusionRule rule) {
  if (recommendations.empty()) return 0.5;
  MassAssignment acc = MassAssignment::vacuous();
  for (const auto& m : recommendations) {
    try {
      acc = fuse_pair(acc, m, rule);
    } catch (const DegenerateConflict&) {
      acc = MassAssignment::vacuous();
    }
  }
  return clamp01(belief(acc, Hypothesis::kNormal));
}

double total_trust(double direct, double indirect, double confidence) {
  return clamp01(confidence * direct + (1.0 - confidence) * indirect);
}

void TrustParams::validate() const {
  if (!(decay > 0.0 && decay < 1.0)) {
    throw std::invalid_argument("trust decay c must lie in (0, 1)");
  }
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw std::invalid_argument("trust threshold T_th must lie in [0, 1]");
  }
  if (fixed_confidence && !(*fixed_confidence >= 0.0 && *fixed_confidence <= 1.0)) {
    throw std::invalid_argument("fixed confidence must lie in [0, 1]");
  }
}

TrustRecord& TrustTable::record(NodeId subject) {
  if (subject == owner_) {
    throw std::invalid_argument("a trust table holds no entry for its owner");
  }
  auto [it, inserted] = entries_.try_emplace(subject);
  if (inserted) it->second.subject = subject;
  return it->second;
}

const TrustRecord* TrustTable::find(NodeId subject) const {
  auto it = entries_.find(subject);
  return it == entries_.end() ? nullptr : &it->second;
}

void TrustTable::observe(NodeId subject, std::uint64_t forwarded, std::uint64_t dropped, Tick now,
                         const TrustParams& params) {
  const bool fresh = !contains(subject);
  TrustRecord& rec = record(subject);
  if (fresh) rec.counters.last_update = now;
  rec.counters = record_interaction(decay_to(rec.counters, now, params), forwarded, dropped);
  rec.direct = direct_trust(rec.counters);
}

double TrustTable::direct_at(NodeId subject, Tick now, const TrustParams& params) const {
  const TrustRecord* rec = find(subject);
  if (rec == nullptr) return 0.5;
  return direct_trust(decay_to(rec->counters, now, params));
}

const TrustRecord& evaluate_neighbour(TrustTable& table, NodeId subject,
                                      std::span<const Recommendation> recommendations, Tick now,
                                      const TrustParams& params) {
  const bool fresh = !table.contains(subject);
  TrustRecord& rec = table.record(subject);
  if (fresh) rec.counters.last_update = now;
  rec.counters = decay_to(rec.counters, now, params);

  std::vector<Recommendation> ordered(recommendations.begin(), recommendations.end());
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const Recommendation& a, const Recommendation& b) {
                     return a.recommender < b.recommender;
                   });
  std::vector<MassAssignment> masses;
  masses.reserve(ordered.size());
  for (const auto& r : ordered) masses.push_back(r.mass);

  rec.confidence = params.fixed_confidence.value_or(confidence_factor(rec.counters));
  rec.direct = direct_trust(rec.counters);
  rec.indirect = indirect_trust(masses, params.fusion);
  rec.total = total_trust(rec.direct, rec.indirect, rec.confidence);
  return rec;
}

std::vector<NodeId> trusted_neighbour_list(TrustTable& table, std::span<const NodeId> one_hop,
                                           const RecommendationMap& recommendations, Tick now,
                                           const TrustParams& params) {
  std::vector<NodeId> neighbours(one_hop.begin(), one_hop.end());
  std::sort(neighbours.begin(), neighbours.end());
  neighbours.erase(std::unique(neighbours.begin(), neighbours.end()), neighbours.end());

  std::vector<NodeId> trusted;
  for (NodeId n : neighbours) {
    if (n == table.owner()) continue;
    std::span<const Recommendation> recs;
    if (auto it = recommendations.find(n); it != recommendations.end()) recs = it->second;
    const TrustRecord& rec = evaluate_neighbour(table, n, recs, now, params);
    if (rec.total > params.threshold) trusted.push_back(n);
  }
  return trusted;
}

}  // namespace trustq::trust
