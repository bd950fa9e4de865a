#include "gridsched/io/gantt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <tuple>

#include "io/json_codec.hpp"

namespace gridsched::io {

namespace {

constexpr int kTimelineWidth = 60;

std::string fixed3(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::string xml_escape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string render_text(const GanttModel& model) {
    std::size_t label_width = 5;
    for (const auto& row : model.rows) label_width = std::max(label_width, row.label.size());

    std::string out = "makespan " + fixed3(model.makespan) + "\n";
    for (const auto& row : model.rows) {
        std::string line(kTimelineWidth, '.');
        for (std::size_t i = 0; i < row.bars.size(); ++i) {
            const auto& bar = row.bars[i];
            if (model.makespan <= 0) break;
            auto col = [&](double t) {
                return std::clamp(static_cast<int>(std::lround(t / model.makespan * kTimelineWidth)), 0, kTimelineWidth);
            };
            int from = col(bar.start);
            int to = std::max(col(bar.finish), from + 1);
            to = std::min(to, kTimelineWidth);
            for (int c = from; c < to; ++c) line[static_cast<std::size_t>(c)] = i % 2 == 0 ? '#' : '=';
        }
        out += row.label + std::string(label_width - row.label.size(), ' ') + " |" + line + "|\n";
    }
    for (const auto& row : model.rows) {
        for (const auto& bar : row.bars) {
            out += "  " + row.label + "  task " + std::to_string(bar.task.value) + " (" + bar.name + ")  " +
                   fixed3(bar.start) + " -> " + fixed3(bar.finish) + "  cost " + fixed3(bar.cost) + "\n";
        }
    }
    return out;
}

std::string render_svg(const GanttModel& model) {
    constexpr double kLabel = 140, kPlot = 720, kRow = 26, kTop = 30, kBar = 18;
    const double width = kLabel + kPlot + 20;
    const double height = kTop + kRow * static_cast<double>(model.rows.size()) + 30;
    const double scale = model.makespan > 0 ? kPlot / model.makespan : 0.0;

    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed3(width) + "\" height=\"" +
                      fixed3(height) + "\" font-family=\"monospace\" font-size=\"12\">\n";
    out += "<text x=\"" + fixed3(kLabel) + "\" y=\"18\">makespan " + fixed3(model.makespan) + "</text>\n";
    for (std::size_t r = 0; r < model.rows.size(); ++r) {
        const auto& row = model.rows[r];
        const double y = kTop + kRow * static_cast<double>(r);
        out += "<text x=\"4\" y=\"" + fixed3(y + 13) + "\">" + xml_escape(row.label) + "</text>\n";
        out += "<line x1=\"" + fixed3(kLabel) + "\" y1=\"" + fixed3(y + kBar) + "\" x2=\"" + fixed3(kLabel + kPlot) +
               "\" y2=\"" + fixed3(y + kBar) + "\" stroke=\"#ccc\"/>\n";
        for (std::size_t b = 0; b < row.bars.size(); ++b) {
            const auto& bar = row.bars[b];
            const double x = kLabel + bar.start * scale;
            const double w = std::max(1.0, (bar.finish - bar.start) * scale);
            out += "<g><rect x=\"" + fixed3(x) + "\" y=\"" + fixed3(y) + "\" width=\"" + fixed3(w) + "\" height=\"" +
                   fixed3(kBar) + "\" fill=\"" + (b % 2 == 0 ? "#4a7ab5" : "#7fb04a") + "\" stroke=\"#222\"/>";
            out += "<title>" + xml_escape(bar.name) + " " + fixed3(bar.start) + "-" + fixed3(bar.finish) + "</title>";
            out += "<text x=\"" + fixed3(x + 3) + "\" y=\"" + fixed3(y + 13) + "\" fill=\"#fff\">" +
                   std::to_string(bar.task.value) + "</text></g>\n";
        }
    }
    out += "</svg>\n";
    return out;
}

}  // namespace

std::optional<GanttFormat> parse_gantt_format(std::string_view text) noexcept {
    if (text == "text") return GanttFormat::Text;
    if (text == "svg") return GanttFormat::Svg;
    if (text == "structured" || text == "json") return GanttFormat::Structured;
    return std::nullopt;
}

GanttModel build_gantt(const broker::ExperimentResult& result) {
    GanttModel model;
    model.makespan = result.makespan;
    std::map<std::tuple<ResourceId, int, int>, std::size_t> row_of;
    for (const auto& r : result.resources) {
        for (int m = 0; m < r.spec.num_machines; ++m) {
            for (int p = 0; p < r.spec.pes_per_machine; ++p) {
                row_of[{r.id, m, p}] = model.rows.size();
                model.rows.push_back(GanttRow{r.spec.name + "/" + std::to_string(m) + "/" + std::to_string(p), r.id, m, p, {}});
            }
        }
    }
    for (const auto& rec : result.simulated) {
        auto& row = model.rows.at(row_of.at({rec.resource, rec.pe.machine, rec.pe.pe}));
        row.bars.push_back(GanttBar{rec.task, result.dag.task(rec.task).name, rec.start, rec.finish, rec.cost});
    }
    for (auto& row : model.rows) {
        std::sort(row.bars.begin(), row.bars.end(), [](const GanttBar& a, const GanttBar& b) {
            return std::tie(a.start, a.task) < std::tie(b.start, b.task);
        });
    }
    return model;
}

std::string render_gantt(const GanttModel& model, GanttFormat format) {
    switch (format) {
        case GanttFormat::Text: return render_text(model);
        case GanttFormat::Svg: return render_svg(model);
        case GanttFormat::Structured: return detail::gantt_to_json(model).dump(2) + "\n";
    }
    return {};
}

std::string render_gantt(const broker::ExperimentResult& result, GanttFormat format) {
    return render_gantt(build_gantt(result), format);
}

}  // namespace gridsched::io
