#pragma once

#include <compare>
#include <stdexcept>
#include <string>

#include "gridsched/ids.hpp"

namespace gridsched::grid {

/// One grid resource, as configured in the resource table.
///
/// Units are fixed: PE ratings in MIPS, link rates in bits per second, cost in currency units
/// per second of PE occupancy. `architecture` and `time_zone` are descriptive only.
struct ResourceSpec {
    std::string name;
    std::string architecture = "generic";
    double time_zone = 0.0;
    int num_machines = 1;
    int pes_per_machine = 1;
    double pe_rating_mips = 0.0;
    double baud_rate_bps = 0.0;
    double cost_per_sec = 0.0;

    int pe_count() const noexcept { return num_machines * pes_per_machine; }

    friend bool operator==(const ResourceSpec&, const ResourceSpec&) = default;
};

/// A spec field that violates its constraint. `field()` uses the resource file's field name.
class InvalidResourceSpec : public std::invalid_argument {
public:
    InvalidResourceSpec(std::string field, const std::string& what)
        : std::invalid_argument(what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Throws InvalidResourceSpec naming the first offending field.
void validate(const ResourceSpec& spec);

/// Processing element address within a resource.
struct PeId {
    ResourceId resource;
    int machine = 0;
    int pe = 0;

    friend auto operator<=>(const PeId&, const PeId&) = default;
};

struct RegistryEntry {
    ResourceId id;
    ResourceSpec spec;
    SimTime registration_time = 0.0;
};

/// Seconds a task of `length_mi` million instructions occupies one PE of `spec`.
double execution_duration(double length_mi, const ResourceSpec& spec);

/// Seconds to move `bytes` from `src` to `dst`. Free within a resource; otherwise limited by the
/// slower of the two links.
double transfer_duration(double bytes, const RegistryEntry& src, const RegistryEntry& dst);

}  // namespace gridsched::grid
