#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "trustq/types.hpp"

namespace trustq::mobility {

/// Default link-life cap in seconds; links with zero closing speed report this.
inline constexpr double kDefaultLinkLifeCap = 120.0;

/// Axial motion on a road embedded in the plane. `heading` is +1 or -1 along x;
/// `y` is fixed per lane.
struct NodeKinematics {
  NodeId node = kNoNode;
  double x = 0.0;
  double y = 0.0;
  double speed = 0.0;
  int heading = 1;
  bool mobile = true;

  /// Signed velocity along the road axis.
  double velocity() const { return mobile ? heading * speed : 0.0; }
};

struct LinkEstimate {
  NodeId a = kNoNode;
  NodeId b = kNoNode;
  double link_life = 0.0;
  Tick computed_at = 0;
};

class NotInRange : public std::runtime_error {
 public:
  NotInRange() : std::runtime_error("nodes are not within transmission range") {}
};

/// Constant-velocity step. Static nodes do not move. Throws std::invalid_argument if dt <= 0.
NodeKinematics step_kinematics(NodeKinematics state, double dt);

/// Maps x onto [0, road_length). No-op when road_length <= 0.
double wrap_position(double x, double road_length);

double distance(const NodeKinematics& a, const NodeKinematics& b);

/// Every other node within Euclidean distance <= range, ascending by id.
std::vector<NodeId> neighbours_in_range(NodeId node, std::span<const NodeKinematics> all,
                                        double range);

/// Remaining seconds until the axial separation of two in-range nodes exceeds
/// the break distance sqrt(R^2 - dy^2). Diverging pairs need to cover
/// (d' - d); approaching pairs first close the gap, then reopen it, covering
/// (d + d'). The result is clamped to [0, cap]; zero closing speed yields cap.
/// Throws NotInRange if the nodes are further apart than `range`.
double link_life(const NodeKinematics& a, const NodeKinematics& b, double range,
                 double cap = kDefaultLinkLifeCap);

LinkEstimate estimate_link(const NodeKinematics& a, const NodeKinematics& b, double range,
                           double cap, Tick now);

}  // namespace trustq::mobility
