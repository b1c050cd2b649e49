#include "trustq/qrouting.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace trustq::qrouting {

void LearningParams::validate() const {
  if (!(v_max > v_min)) throw std::invalid_argument("v_max must exceed v_min");
  if (!(v_th >= 0.0)) throw std::invalid_argument("v_th must be non-negative");
  if (!(lambda_fixed >= 0.0 && lambda_fixed <= 1.0)) {
    throw std::invalid_argument("lambda_fixed must lie in [0, 1]");
  }
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0, 1]");
}

double learning_rate(double v_i, double v_j, const LearningParams& params) {
  const double diff = std::abs(v_i - v_j);
  if (diff > params.v_th) return std::clamp(diff / (params.v_max - params.v_min), 0.0, 1.0);
  return params.lambda_fixed;
}

double QTable::get(NodeId dest, NodeId neighbour) const {
  auto it = values_.find({dest, neighbour});
  return it == values_.end() ? 0.0 : it->second;
}

void QTable::set(NodeId dest, NodeId neighbour, double q) { values_[{dest, neighbour}] = q; }

double QTable::max_over(NodeId dest, std::span<const NodeId> candidates) const {
  double best = 0.0;
  for (NodeId n : candidates) best = std::max(best, get(dest, n));
  return best;
}

double update_q(QTable& table, NodeId dest, NodeId neighbour, double reward, double max_next_q,
                double lambda, double gamma) {
  if (reward < 0.0) throw std::invalid_argument("reward must be non-negative");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda must lie in [0, 1]");
  const double old_q = table.get(dest, neighbour);
  const double new_q = (1.0 - lambda) * old_q + lambda * (reward + gamma * max_next_q);
  table.set(dest, neighbour, new_q);
  return new_q;
}

std::optional<Selection> select_next_hop(const QTable& table, NodeId dest,
                                         std::span<const NodeId> trusted, std::mt19937_64& rng,
                                         double epsilon) {
  if (trusted.empty()) return std::nullopt;

  if (epsilon > 0.0) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng) < epsilon) {
      std::vector<NodeId> sorted(trusted.begin(), trusted.end());
      std::sort(sorted.begin(), sorted.end());
      std::uniform_int_distribution<std::size_t> pick(0, sorted.size() - 1);
      return Selection{sorted[pick(rng)], true};
    }
  }

  NodeId best = kNoNode;
  double best_q = 0.0;
  for (NodeId n : trusted) {
    const double q = table.get(dest, n);
    if (best == kNoNode || q > best_q || (q == best_q && n < best)) {
      best = n;
      best_q = q;
    }
  }
  return Selection{best, false};
}

void reset_neighbour(QTable& table, NodeId neighbour) {
  // Entries are keyed by destination first, so this is a full scan; tables are small.
  for (auto& [key, q] : const_cast<std::map<QTable::Key, double>&>(table.values())) {
    if (key.second == neighbour) q = 0.0;
  }
}

double EpsilonSchedule::at(std::uint64_t episode, std::uint64_t total_episodes) const {
  const double horizon = anneal_fraction * static_cast<double>(total_episodes);
  if (horizon <= 0.0) return final;
  const double progress = std::min(1.0, static_cast<double>(episode) / horizon);
  return start + (final - start) * progress;
}

}  // namespace trustq::qrouting
