#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "gridsched/grid/resource.hpp"

namespace gridsched::grid {

/// Half-open busy interval [start, end).
struct Interval {
    SimTime start = 0.0;
    SimTime end = 0.0;

    friend bool operator==(const Interval&, const Interval&) = default;
};

class ReservationConflict : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Sorted, pairwise-disjoint busy intervals of a single PE.
class PeCalendar {
public:
    bool is_free(SimTime start, SimTime end) const noexcept;

    /// Smallest start >= not_before such that [start, start + duration) is free.
    SimTime earliest_start(SimTime not_before, double duration) const noexcept;

    /// Throws ReservationConflict (leaving the calendar untouched) if the interval overlaps.
    void insert(SimTime start, SimTime end);

    std::span<const Interval> intervals() const noexcept { return busy_; }
    SimTime busy_time() const noexcept;

private:
    std::vector<Interval> busy_;
};

struct Reservation {
    std::uint64_t id = 0;
    TaskId task;
    PeId pe;
    SimTime start = 0.0;
    double duration = 0.0;

    SimTime finish() const noexcept { return start + duration; }
};

struct Slot {
    SimTime start = 0.0;
    PeId pe;
};

/// Advance-reservation, space-shared policy of one resource: one calendar per PE, one task per
/// PE at a time.
class ResourceCalendar {
public:
    ResourceCalendar(ResourceId id, ResourceSpec spec);

    ResourceId id() const noexcept { return id_; }
    const ResourceSpec& spec() const noexcept { return spec_; }

    /// Earliest start >= not_before on any PE; ties go to the lowest (machine, pe).
    Slot earliest_feasible_start(SimTime not_before, double duration) const;

    /// Books [start, start + duration) on `pe`. Throws ReservationConflict on overlap and
    /// std::invalid_argument for a bad PE or non-positive duration.
    Reservation commit(TaskId task, PeId pe, SimTime start, double duration);

    const PeCalendar& pe_calendar(int machine, int pe) const;
    std::span<const Reservation> reservations() const noexcept { return reservations_; }
    const Reservation* find(std::uint64_t reservation_id) const noexcept;

private:
    std::size_t flat_index(const PeId& pe) const;

    ResourceId id_;
    ResourceSpec spec_;
    std::vector<PeCalendar> pes_;
    std::vector<Reservation> reservations_;
    std::uint64_t next_id_ = 1;
};

/// Calendars for a set of discovered resources, keyed by ResourceId. Planning probes it
/// read-only and commits only chosen reservations.
class ReservationBook {
public:
    explicit ReservationBook(std::span<const RegistryEntry> resources);

    Slot earliest_feasible_start(ResourceId resource, SimTime not_before, double duration) const;
    Reservation commit_reservation(ResourceId resource, TaskId task, PeId pe, SimTime start, double duration);

    const ResourceCalendar& calendar(ResourceId resource) const;

private:
    ResourceCalendar& calendar_mut(ResourceId resource);

    std::map<ResourceId, ResourceCalendar> calendars_;
};

}  // namespace gridsched::grid
