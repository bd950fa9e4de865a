#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>

namespace gridsched {

/// Integer identifier that does not convert to or from other identifier kinds.
template <typename Tag, typename Rep = std::size_t>
struct StrongId {
    using rep_type = Rep;

    Rep value{};

    constexpr StrongId() = default;
    constexpr explicit StrongId(Rep v) noexcept : value(v) {}

    friend constexpr auto operator<=>(StrongId, StrongId) = default;

    friend std::ostream& operator<<(std::ostream& os, StrongId id) { return os << id.value; }
};

using EntityId = StrongId<struct EntityIdTag>;
using ResourceId = StrongId<struct ResourceIdTag>;
/// Task identifiers come from the DAG file and need not start at zero.
using TaskId = StrongId<struct TaskIdTag, std::int64_t>;

/// Virtual seconds since the start of a simulation run.
using SimTime = double;

}  // namespace gridsched

template <typename Tag, typename Rep>
struct std::hash<gridsched::StrongId<Tag, Rep>> {
    std::size_t operator()(gridsched::StrongId<Tag, Rep> id) const noexcept { return std::hash<Rep>{}(id.value); }
};
