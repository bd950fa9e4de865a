#pragma once

#include <span>
#include <vector>

#include "gridsched/grid/resource.hpp"

namespace gridsched::grid {

/// Registry where resources register and brokers discover them.
class InformationService {
public:
    /// Validates `spec`; rejects names that are already registered.
    ResourceId register_resource(ResourceSpec spec, SimTime at = 0.0);

    /// All registered resources in registration order.
    std::span<const RegistryEntry> discover_resources() const noexcept { return entries_; }

    const RegistryEntry& entry(ResourceId id) const;
    std::size_t size() const noexcept { return entries_.size(); }

private:
    std::vector<RegistryEntry> entries_;
};

}  // namespace gridsched::grid
