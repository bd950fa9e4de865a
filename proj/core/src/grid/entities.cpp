#include "gridsched/grid/entities.hpp"

#include <algorithm>
#include <any>

namespace gridsched::grid {

std::string_view to_string(MessageTag t) noexcept {
    switch (t) {
        case MessageTag::RegisterResource: return "RegisterResource";
        case MessageTag::RegisterAck: return "RegisterAck";
        case MessageTag::ResourceListRequest: return "ResourceListRequest";
        case MessageTag::ResourceList: return "ResourceList";
        case MessageTag::ReserveRequest: return "ReserveRequest";
        case MessageTag::ReserveAck: return "ReserveAck";
        case MessageTag::ReserveReject: return "ReserveReject";
        case MessageTag::Dispatch: return "Dispatch";
        case MessageTag::GridletReturn: return "GridletReturn";
        case MessageTag::StartReserved: return "StartReserved";
    }
    return "Unknown";
}

LateDispatch::LateDispatch(TaskId task, SimTime reserved_start, SimTime arrival)
    : std::runtime_error("task " + std::to_string(task.value) + " dispatched at t=" + sim::format_time(arrival) +
                         " after its reserved start t=" + sim::format_time(reserved_start)),
      task_(task) {}

InformationServiceEntity::InformationServiceEntity(sim::Kernel& kernel, std::string name) {
    id_ = kernel.register_entity(std::move(name), [this](sim::Context& ctx, const sim::Event& ev) { handle(ctx, ev); });
}

void InformationServiceEntity::handle(sim::Context& ctx, const sim::Event& ev) {
    switch (static_cast<MessageTag>(ev.tag)) {
        case MessageTag::RegisterResource: {
            const auto& spec = std::any_cast<const ResourceSpec&>(ev.payload);
            ResourceId id = registry_.register_resource(spec, ctx.now());
            entities_.push_back(ev.src);
            ctx.send(ev.src, 0.0, tag(MessageTag::RegisterAck), id);
            break;
        }
        case MessageTag::ResourceListRequest: {
            auto entries = registry_.discover_resources();
            ctx.send(ev.src, 0.0, tag(MessageTag::ResourceList),
                     ResourceListing{{entries.begin(), entries.end()}, entities_});
            break;
        }
        default:
            throw std::invalid_argument("information service: unexpected message tag " + std::to_string(ev.tag));
    }
}

ResourceEntity::ResourceEntity(sim::Kernel& kernel, ResourceSpec spec, EntityId information_service)
    : spec_(std::move(spec)) {
    validate(spec_);
    entity_ = kernel.register_entity(spec_.name, [this](sim::Context& ctx, const sim::Event& ev) { handle(ctx, ev); });
    kernel.schedule(entity_, information_service, 0.0, tag(MessageTag::RegisterResource), spec_);
}

std::optional<ResourceId> ResourceEntity::resource_id() const noexcept {
    if (!calendar_) return std::nullopt;
    return calendar_->id();
}

const ResourceCalendar& ResourceEntity::calendar() const {
    if (!calendar_) throw std::logic_error("resource '" + spec_.name + "' has not completed registration");
    return *calendar_;
}

void ResourceEntity::handle(sim::Context& ctx, const sim::Event& ev) {
    switch (static_cast<MessageTag>(ev.tag)) {
        case MessageTag::RegisterAck:
            calendar_.emplace(std::any_cast<ResourceId>(ev.payload), spec_);
            break;
        case MessageTag::ReserveRequest: {
            const auto& req = std::any_cast<const ReserveRequest&>(ev.payload);
            (void)calendar();
            try {
                Reservation r = calendar_->commit(req.task, req.pe, req.start, req.duration);
                ctx.send(ev.src, 0.0, tag(MessageTag::ReserveAck), ReserveReply{req.task, r.id, {}});
            } catch (const std::exception& e) {
                ctx.send(ev.src, 0.0, tag(MessageTag::ReserveReject), ReserveReply{req.task, 0, e.what()});
            }
            break;
        }
        case MessageTag::Dispatch: {
            const auto& gridlet = std::any_cast<const Gridlet&>(ev.payload);
            const Reservation* r = calendar().find(gridlet.reservation_id);
            if (r == nullptr || r->task != gridlet.task) {
                throw std::invalid_argument("task " + std::to_string(gridlet.task.value) +
                                            " has no reservation on resource '" + spec_.name + "'");
            }
            if (ctx.now() > r->start) throw LateDispatch(gridlet.task, r->start, ctx.now());
            if (ctx.now() < r->start) {
                // Early arrival waits for its slot.
                ctx.send(entity_, r->start - ctx.now(), tag(MessageTag::StartReserved), gridlet);
                break;
            }
            start(ctx, gridlet, *r);
            break;
        }
        case MessageTag::StartReserved: {
            const auto& gridlet = std::any_cast<const Gridlet&>(ev.payload);
            start(ctx, gridlet, *calendar().find(gridlet.reservation_id));
            break;
        }
        default:
            throw std::invalid_argument("resource '" + spec_.name + "': unexpected message tag " +
                                        std::to_string(ev.tag));
    }
}

void ResourceEntity::start(sim::Context& ctx, const Gridlet& gridlet, const Reservation& r) {
    // Times come from the reservation; a held gridlet may resume a rounding step away from it.
    CompletedGridlet done{gridlet.task, calendar_->id(), r.pe, r.start, r.finish(), r.duration * spec_.cost_per_sec};
    const double delay = ctx.now() == r.start ? r.duration : std::max(0.0, r.finish() - ctx.now());
    ctx.send(gridlet.collector, delay, tag(MessageTag::GridletReturn), done);
}

}  // namespace gridsched::grid
