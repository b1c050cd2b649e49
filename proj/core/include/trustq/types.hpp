#pragma once

#include <cstdint>
#include <limits>

namespace trustq {

using NodeId = std::uint32_t;

/// Simulation time in integer ticks. One tick is `ScenarioConfig::dt` seconds.
using Tick = std::uint64_t;

inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

}  // namespace trustq
