#pragma once

// Adaptive trust: Beta-posterior direct trust with time decay, evidence-fused
// indirect trust over the frame {normal, malicious}, and the confidence-weighted
// total that gates neighbour selection.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "trustq/types.hpp"

namespace trustq::trust {

/// Lower bound for decayed pseudo-counts. Keeps alpha + beta > 0.
inline constexpr double kCounterFloor = 1e-6;

/// Fusion denominators below this are treated as total contradiction.
inline constexpr double kConflictEpsilon = 1e-12;

/// Success/failure pseudo-counts behind a Beta(alpha, beta) posterior.
/// Default-constructed counters are the uniform prior Beta(1, 1).
struct InteractionCounters {
  double alpha = 1.0;
  double beta = 1.0;
  Tick last_update = 0;

  friend bool operator==(const InteractionCounters&, const InteractionCounters&) = default;
};

enum class Hypothesis { kNormal, kMalicious, kUnknown };
enum class Claim { kNormal, kMalicious };

/// `normalized` divides by the non-conflicting mass; `yager` routes the
/// conflict mass to the unknown set instead.
enum class FusionRule { kNormalized, kYager };

/// Basic probability assignment over H (normal), H' (malicious), U (either).
struct MassAssignment {
  double normal = 0.0;
  double malicious = 0.0;
  double unknown = 1.0;

  static constexpr MassAssignment vacuous() { return {0.0, 0.0, 1.0}; }

  bool is_valid(double tol = 1e-9) const;

  friend bool operator==(const MassAssignment&, const MassAssignment&) = default;
};

/// Thrown by fuse_pair when the two assignments contradict each other completely.
class DegenerateConflict : public std::runtime_error {
 public:
  DegenerateConflict() : std::runtime_error("degenerate conflict: fused mass is empty") {}
};

double direct_trust(const InteractionCounters& counters);

/// Fades both counters by c^(now - last_update), relaxing each toward
/// kCounterFloor: x <- floor + (x - floor) * c^dt.
/// Throws std::invalid_argument if c is outside (0, 1) or now < last_update.
InteractionCounters decay_counters(InteractionCounters counters, Tick now, double c);

/// Beta-Binomial conjugate update.
InteractionCounters record_interaction(InteractionCounters counters, std::uint64_t forwarded,
                                       std::uint64_t dropped);

/// 12 * Var(Beta(alpha, beta)), clamped to [0, 1]. The raw value exceeds 1
/// when both counters have decayed below 1.
double confidence_factor(const InteractionCounters& counters);

MassAssignment mass_from_claim(double recommender_trust, Claim claim);

double belief(const MassAssignment& mass, Hypothesis hypothesis);

/// Pls(Y) = 1 - bel(Y'). Pls(U) is 1 for any valid mass.
double plausibility(const MassAssignment& mass, Hypothesis hypothesis);

/// Conflict mass k = m1(H) m2(H') + m1(H') m2(H).
double conflict_mass(const MassAssignment& m1, const MassAssignment& m2);

/// Combines two independent assignments. Throws DegenerateConflict under the
/// normalized rule when the surviving mass is below kConflictEpsilon.
MassAssignment fuse_pair(const MassAssignment& m1, const MassAssignment& m2,
                         FusionRule rule = FusionRule::kNormalized);

/// Left fold of fuse_pair from the vacuous mass; returns bel(H) of the result.
/// An empty list yields the neutral 0.5. A degenerate step resets the
/// accumulator to total ignorance and the fold continues.
double indirect_trust(std::span<const MassAssignment> recommendations,
                      FusionRule rule = FusionRule::kNormalized);

double total_trust(double direct, double indirect, double confidence);

struct TrustRecord {
  NodeId subject = kNoNode;
  double direct = 0.5;
  double indirect = 0.5;
  double confidence = 1.0;
  double total = 0.5;
  InteractionCounters counters;
};

struct TrustParams {
  double decay = 0.9;       // c, per tick
  double threshold = 0.45;  // T_th, strict
  FusionRule fusion = FusionRule::kNormalized;
  bool decay_enabled = true;
  // Replaces the adaptive weight when set; used for fixed-weight comparisons.
  std::optional<double> fixed_confidence;

  void validate() const;
};

/// One recommender's statement about a subject.
struct Recommendation {
  NodeId recommender = kNoNode;
  MassAssignment mass;
};

using RecommendationMap = std::map<NodeId, std::vector<Recommendation>>;

class TrustTable {
 public:
  explicit TrustTable(NodeId owner) : owner_(owner) {}

  NodeId owner() const { return owner_; }

  /// Returns the record for `subject`, creating a fresh one if absent.
  TrustRecord& record(NodeId subject);
  const TrustRecord* find(NodeId subject) const;
  bool contains(NodeId subject) const { return entries_.contains(subject); }

  /// Decays the subject's counters to `now` and then adds the outcome.
  void observe(NodeId subject, std::uint64_t forwarded, std::uint64_t dropped, Tick now,
               const TrustParams& params);

  /// Current direct trust in `subject` after decaying to `now`, without
  /// mutating the table. Unknown subjects report the prior 0.5.
  double direct_at(NodeId subject, Tick now, const TrustParams& params) const;

  const std::map<NodeId, TrustRecord>& entries() const { return entries_; }

 private:
  NodeId owner_;
  std::map<NodeId, TrustRecord> entries_;
};

/// Re-evaluates every one-hop neighbour of the table's owner and returns
/// those whose total trust strictly exceeds the threshold, in ascending id
/// order. Recommendations are fused in ascending recommender order.
std::vector<NodeId> trusted_neighbour_list(TrustTable& table, std::span<const NodeId> one_hop,
                                           const RecommendationMap& recommendations, Tick now,
                                           const TrustParams& params);

/// Recomputes a single record in place; the building block of the list above.
const TrustRecord& evaluate_neighbour(TrustTable& table, NodeId subject,
                                      std::span<const Recommendation> recommendations, Tick now,
                                      const TrustParams& params);

}  // namespace trustq::trust
