#pragma once

#include <map>
#include <optional>
#include <random>
#include <span>
#include <utility>

#include "trustq/types.hpp"

namespace trustq::qrouting {

struct LearningParams {
  double v_max = 45.0;
  double v_min = 5.0;
  double v_th = 10.0;
  double lambda_fixed = 0.1;
  double gamma = 1.0;

  /// Throws std::invalid_argument on violated invariants.
  void validate() const;
};

/// Velocity-adaptive learning rate: |v_i - v_j| / (v_max - v_min) above the
/// threshold (clamped to [0, 1]), lambda_fixed otherwise.
double learning_rate(double v_i, double v_j, const LearningParams& params);

/// Sparse per-node table (destination, neighbour) -> q >= 0. Missing entries read as 0.
class QTable {
 public:
  using Key = std::pair<NodeId, NodeId>;  // (destination, neighbour)

  explicit QTable(NodeId owner) : owner_(owner) {}

  NodeId owner() const { return owner_; }

  double get(NodeId dest, NodeId neighbour) const;
  void set(NodeId dest, NodeId neighbour, double q);

  /// Highest q toward `dest` over `candidates`; 0 when empty.
  double max_over(NodeId dest, std::span<const NodeId> candidates) const;

  const std::map<Key, double>& values() const { return values_; }

 private:
  NodeId owner_;
  std::map<Key, double> values_;
};

/// q <- (1 - lambda) q + lambda (reward + gamma * max_next_q). Returns the new value.
/// Throws std::invalid_argument for a negative reward or lambda outside [0, 1].
double update_q(QTable& table, NodeId dest, NodeId neighbour, double reward, double max_next_q,
                double lambda, double gamma);

struct Selection {
  NodeId next_hop = kNoNode;
  bool explored = false;
};

/// Epsilon-greedy choice over the trusted set. The greedy branch takes the
/// argmax of q(dest, .) with ties going to the lowest id; the exploratory
/// branch picks uniformly. Returns nullopt for an empty set.
std::optional<Selection> select_next_hop(const QTable& table, NodeId dest,
                                         std::span<const NodeId> trusted, std::mt19937_64& rng,
                                         double epsilon);

/// Zeroes every (., neighbour) entry. Used on HELLO timeout.
void reset_neighbour(QTable& table, NodeId neighbour);

/// Linear annealing from `start` to `final` over the first `fraction` of the run.
struct EpsilonSchedule {
  double start = 0.1;
  double final = 0.01;
  double anneal_fraction = 0.1;

  double at(std::uint64_t episode, std::uint64_t total_episodes) const;
};

}  // namespace trustq::qrouting
