#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gridsched/broker/broker.hpp"

namespace gridsched::io {

struct GanttBar {
    TaskId task;
    std::string name;
    SimTime start = 0.0;
    SimTime finish = 0.0;
    double cost = 0.0;
};

/// One row per PE, labelled "resource/machine/pe".
struct GanttRow {
    std::string label;
    ResourceId resource;
    int machine = 0;
    int pe = 0;
    std::vector<GanttBar> bars;  // sorted by start
};

struct GanttModel {
    std::vector<GanttRow> rows;
    SimTime makespan = 0.0;
};

enum class GanttFormat { Text, Svg, Structured };

std::optional<GanttFormat> parse_gantt_format(std::string_view text) noexcept;

/// Rows for every PE of every registered resource, in registration order.
GanttModel build_gantt(const broker::ExperimentResult& result);

/// Text: fixed-width timeline per PE with 3-decimal times. Svg: one rect and label per bar.
/// Structured: JSON serialization of the GanttModel at full precision.
std::string render_gantt(const broker::ExperimentResult& result, GanttFormat format);
std::string render_gantt(const GanttModel& model, GanttFormat format);

}  // namespace gridsched::io
