#include "gridsched/grid/information_service.hpp"

#include <algorithm>
#include <stdexcept>

namespace gridsched::grid {

ResourceId InformationService::register_resource(ResourceSpec spec, SimTime at) {
    validate(spec);
    auto same_name = [&](const RegistryEntry& e) { return e.spec.name == spec.name; };
    if (std::any_of(entries_.begin(), entries_.end(), same_name)) {
        throw std::invalid_argument("resource '" + spec.name + "' is already registered");
    }
    ResourceId id{entries_.size()};
    entries_.push_back(RegistryEntry{id, std::move(spec), at});
    return id;
}

const RegistryEntry& InformationService::entry(ResourceId id) const {
    if (id.value >= entries_.size()) throw std::out_of_range("unknown resource id " + std::to_string(id.value));
    return entries_[id.value];
}

}  // namespace gridsched::grid
