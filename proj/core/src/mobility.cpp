#include "trustq/mobility.hpp"

#include <algorithm>
#include <cmath>

namespace trustq::mobility {

NodeKinematics step_kinematics(NodeKinematics state, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("kinematics step requires dt > 0");
  if (!state.mobile) return state;
  state.x += state.heading * state.speed * dt;
  return state;
}

double wrap_position(double x, double road_length) {
  if (road_length <= 0.0) return x;
  double w = std::fmod(x, road_length);
  if (w < 0.0) w += road_length;
  // fmod of a value just below zero can round up to road_length itself.
  return w >= road_length ? 0.0 : w;
}

double distance(const NodeKinematics& a, const NodeKinematics& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

std::vector<NodeId> neighbours_in_range(NodeId node, std::span<const NodeKinematics> all,
                                        double range) {
  if (!(range > 0.0)) throw std::invalid_argument("transmission range must be positive");
  const auto self = std::find_if(all.begin(), all.end(),
                                 [node](const NodeKinematics& k) { return k.node == node; });
  std::vector<NodeId> out;
  if (self == all.end()) return out;
  for (const auto& other : all) {
    if (other.node == node) continue;
    if (distance(*self, other) <= range) out.push_back(other.node);
  }
  std::sort(out.begin(), out.end());
  return out;
}

double link_life(const NodeKinematics& a, const NodeKinematics& b, double range, double cap) {
  const double dy = b.y - a.y;
  if (distance(a, b) > range) throw NotInRange{};
  const double break_distance = std::sqrt(std::max(range * range - dy * dy, 0.0));

  const double rel_pos = b.x - a.x;
  const double rel_vel = b.velocity() - a.velocity();
  if (rel_vel == 0.0) return cap;

  // Same expression for either argument order: swapping a and b negates both
  // rel_pos and rel_vel, which IEEE arithmetic does exactly.
  const double t = rel_vel > 0.0 ? (break_distance - rel_pos) / rel_vel
                                 : (break_distance + rel_pos) / -rel_vel;
  return std::clamp(t, 0.0, cap);
}

LinkEstimate estimate_link(const NodeKinematics& a, const NodeKinematics& b, double range,
                           double cap, Tick now) {
  return {a.node, b.node, link_life(a, b, range, cap), now};
}

}  // namespace trustq::mobility
