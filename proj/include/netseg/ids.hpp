#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>

namespace netseg {

/// Integer identifier tagged with the kind of object it names, so node,
/// segment and trajectory ids cannot be mixed up.
template <class Tag>
struct StrongId {
  std::uint64_t value{};

  constexpr StrongId() = default;
  constexpr explicit StrongId(std::uint64_t v) : value(v) {}

  friend constexpr auto operator<=>(StrongId, StrongId) = default;
  friend std::ostream& operator<<(std::ostream& os, StrongId id) { return os << id.value; }
};

using NodeId = StrongId<struct NodeTag>;
using SegmentId = StrongId<struct SegmentTag>;
using TrajectoryId = StrongId<struct TrajectoryTag>;

}  // namespace netseg

template <class Tag>
struct std::hash<netseg::StrongId<Tag>> {
  std::size_t operator()(netseg::StrongId<Tag> id) const noexcept {
    return std::hash<std::uint64_t>{}(id.value);
  }
};
