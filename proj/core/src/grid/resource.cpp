#include "gridsched/grid/resource.hpp"

#include <algorithm>
#include <cmath>

namespace gridsched::grid {

namespace {

void require(bool ok, const char* field, const std::string& resource, const char* rule) {
    if (!ok) {
        throw InvalidResourceSpec(field, "resource '" + resource + "': " + field + " " + rule);
    }
}

}  // namespace

void validate(const ResourceSpec& spec) {
    require(!spec.name.empty(), "name", spec.name, "must not be empty");
    require(spec.num_machines >= 1, "num_machines", spec.name, "must be at least 1");
    require(spec.pes_per_machine >= 1, "pes_per_machine", spec.name, "must be at least 1");
    require(std::isfinite(spec.pe_rating_mips) && spec.pe_rating_mips > 0, "pe_rating_mips", spec.name,
            "must be positive");
    require(std::isfinite(spec.baud_rate_bps) && spec.baud_rate_bps > 0, "baud_rate_bps", spec.name,
            "must be positive");
    require(std::isfinite(spec.cost_per_sec) && spec.cost_per_sec >= 0, "cost_per_sec", spec.name,
            "must be non-negative");
    require(std::isfinite(spec.time_zone), "time_zone", spec.name, "must be finite");
}

double execution_duration(double length_mi, const ResourceSpec& spec) {
    return length_mi / spec.pe_rating_mips;
}

double transfer_duration(double bytes, const RegistryEntry& src, const RegistryEntry& dst) {
    if (src.id == dst.id) return 0.0;
    return (bytes * 8.0) / std::min(src.spec.baud_rate_bps, dst.spec.baud_rate_bps);
}

}  // namespace gridsched::grid
