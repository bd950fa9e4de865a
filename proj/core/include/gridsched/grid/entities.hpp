#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gridsched/grid/calendar.hpp"
#include "gridsched/grid/information_service.hpp"
#include "gridsched/sim/kernel.hpp"

namespace gridsched::grid {

/// Message kinds exchanged between grid entities.
enum class MessageTag : sim::Tag {
    RegisterResource = 1,
    RegisterAck,
    ResourceListRequest,
    ResourceList,
    ReserveRequest,
    ReserveAck,
    ReserveReject,
    Dispatch,
    GridletReturn,
    StartReserved,
};

constexpr sim::Tag tag(MessageTag t) noexcept {
    return static_cast<sim::Tag>(t);
}

std::string_view to_string(MessageTag t) noexcept;

struct ResourceListing {
    std::vector<RegistryEntry> entries;
    std::vector<EntityId> entities;  // parallel to `entries`
};

struct ReserveRequest {
    TaskId task;
    PeId pe;
    SimTime start = 0.0;
    double duration = 0.0;
};

struct ReserveReply {
    TaskId task;
    std::uint64_t reservation_id = 0;
    std::string reason;  // set on rejection
};

/// A task submitted for execution against a committed reservation.
struct Gridlet {
    TaskId task;
    std::uint64_t reservation_id = 0;
    EntityId collector;
};

/// A finished task as reported to the collector.
struct CompletedGridlet {
    TaskId task;
    ResourceId resource;
    PeId pe;
    SimTime start = 0.0;
    SimTime finish = 0.0;
    double cost = 0.0;
};

/// A gridlet reached its resource after the reserved start time.
class LateDispatch : public std::runtime_error {
public:
    LateDispatch(TaskId task, SimTime reserved_start, SimTime arrival);

    TaskId task() const noexcept { return task_; }

private:
    TaskId task_;
};

/// Entity wrapper around InformationService. Must outlive the kernel's run.
class InformationServiceEntity {
public:
    explicit InformationServiceEntity(sim::Kernel& kernel, std::string name = "GIS");
    InformationServiceEntity(const InformationServiceEntity&) = delete;
    InformationServiceEntity& operator=(const InformationServiceEntity&) = delete;

    EntityId id() const noexcept { return id_; }
    const InformationService& registry() const noexcept { return registry_; }

private:
    void handle(sim::Context& ctx, const sim::Event& ev);

    InformationService registry_;
    std::vector<EntityId> entities_;
    EntityId id_;
};

/// A resource with the advance-reservation space-shared policy. Registers itself with the
/// information service at time zero, accepts reservation requests, and runs dispatched gridlets
/// in their reserved slots.
class ResourceEntity {
public:
    ResourceEntity(sim::Kernel& kernel, ResourceSpec spec, EntityId information_service);
    ResourceEntity(const ResourceEntity&) = delete;
    ResourceEntity& operator=(const ResourceEntity&) = delete;

    EntityId entity() const noexcept { return entity_; }
    /// Assigned by the information service; empty until registration is acknowledged.
    std::optional<ResourceId> resource_id() const noexcept;
    const ResourceSpec& spec() const noexcept { return spec_; }
    /// Throws std::logic_error before registration completes.
    const ResourceCalendar& calendar() const;

private:
    void handle(sim::Context& ctx, const sim::Event& ev);
    void start(sim::Context& ctx, const Gridlet& gridlet, const Reservation& reservation);

    ResourceSpec spec_;
    std::optional<ResourceCalendar> calendar_;
    EntityId entity_;
};

}  // namespace gridsched::grid
