#pragma once

#include <cstdint>
#include <limits>

namespace rncsim {

using NodeId = std::uint32_t;
using MessageId = std::uint32_t;
using Slot = std::int64_t;

inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();
inline constexpr Slot kNever = -1;

}  // namespace rncsim
