#include "gridsched/grid/calendar.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gridsched::grid {

bool PeCalendar::is_free(SimTime start, SimTime end) const noexcept {
    // First interval that ends after `start`; it is the only candidate for overlap.
    auto it = std::upper_bound(busy_.begin(), busy_.end(), start,
                               [](SimTime t, const Interval& iv) { return t < iv.end; });
    return it == busy_.end() || end <= it->start;
}

SimTime PeCalendar::earliest_start(SimTime not_before, double duration) const noexcept {
    SimTime candidate = not_before;
    for (const auto& iv : busy_) {
        if (iv.end <= candidate) continue;
        if (candidate + duration <= iv.start) return candidate;
        candidate = std::max(candidate, iv.end);
    }
    return candidate;
}

void PeCalendar::insert(SimTime start, SimTime end) {
    if (!(start < end)) throw std::invalid_argument("reservation interval must have positive length");
    if (!is_free(start, end)) {
        throw ReservationConflict("interval [" + std::to_string(start) + ", " + std::to_string(end) +
                                  ") overlaps an existing reservation");
    }
    auto pos = std::lower_bound(busy_.begin(), busy_.end(), start,
                                [](const Interval& iv, SimTime t) { return iv.start < t; });
    busy_.insert(pos, Interval{start, end});
}

SimTime PeCalendar::busy_time() const noexcept {
    SimTime total = 0.0;
    for (const auto& iv : busy_) total += iv.end - iv.start;
    return total;
}

ResourceCalendar::ResourceCalendar(ResourceId id, ResourceSpec spec)
    : id_(id), spec_(std::move(spec)), pes_(static_cast<std::size_t>(std::max(spec_.pe_count(), 0))) {
    validate(spec_);
}

std::size_t ResourceCalendar::flat_index(const PeId& pe) const {
    if (pe.resource != id_ || pe.machine < 0 || pe.machine >= spec_.num_machines || pe.pe < 0 ||
        pe.pe >= spec_.pes_per_machine) {
        throw std::invalid_argument("PE (" + std::to_string(pe.machine) + "," + std::to_string(pe.pe) +
                                    ") is not part of resource '" + spec_.name + "'");
    }
    return static_cast<std::size_t>(pe.machine) * static_cast<std::size_t>(spec_.pes_per_machine) +
           static_cast<std::size_t>(pe.pe);
}

Slot ResourceCalendar::earliest_feasible_start(SimTime not_before, double duration) const {
    if (!(duration > 0)) throw std::invalid_argument("duration must be positive");
    Slot best{};
    bool found = false;
    for (int m = 0; m < spec_.num_machines; ++m) {
        for (int p = 0; p < spec_.pes_per_machine; ++p) {
            PeId pe{id_, m, p};
            SimTime start = pes_[flat_index(pe)].earliest_start(not_before, duration);
            // Strict comparison keeps the lowest (machine, pe) among equal starts.
            if (!found || start < best.start) {
                best = Slot{start, pe};
                found = true;
            }
        }
    }
    return best;
}

Reservation ResourceCalendar::commit(TaskId task, PeId pe, SimTime start, double duration) {
    if (!(duration > 0)) throw std::invalid_argument("reservation duration must be positive");
    if (!(start >= 0) || !std::isfinite(start)) throw std::invalid_argument("reservation start must be >= 0");
    pes_[flat_index(pe)].insert(start, start + duration);
    Reservation r{next_id_++, task, pe, start, duration};
    reservations_.push_back(r);
    return r;
}

const PeCalendar& ResourceCalendar::pe_calendar(int machine, int pe) const {
    return pes_[flat_index(PeId{id_, machine, pe})];
}

const Reservation* ResourceCalendar::find(std::uint64_t reservation_id) const noexcept {
    auto it = std::find_if(reservations_.begin(), reservations_.end(),
                           [&](const Reservation& r) { return r.id == reservation_id; });
    return it == reservations_.end() ? nullptr : &*it;
}

ReservationBook::ReservationBook(std::span<const RegistryEntry> resources) {
    for (const auto& e : resources) {
        auto [it, inserted] = calendars_.try_emplace(e.id, e.id, e.spec);
        if (!inserted) throw std::invalid_argument("resource id listed twice: " + std::to_string(e.id.value));
    }
}

const ResourceCalendar& ReservationBook::calendar(ResourceId resource) const {
    auto it = calendars_.find(resource);
    if (it == calendars_.end()) throw std::out_of_range("unknown resource id " + std::to_string(resource.value));
    return it->second;
}

ResourceCalendar& ReservationBook::calendar_mut(ResourceId resource) {
    return const_cast<ResourceCalendar&>(std::as_const(*this).calendar(resource));
}

Slot ReservationBook::earliest_feasible_start(ResourceId resource, SimTime not_before, double duration) const {
    return calendar(resource).earliest_feasible_start(not_before, duration);
}

Reservation ReservationBook::commit_reservation(ResourceId resource, TaskId task, PeId pe, SimTime start,
                                                double duration) {
    return calendar_mut(resource).commit(task, pe, start, duration);
}

}  // namespace gridsched::grid
