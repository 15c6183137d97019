#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <dsreg/experiments.hpp>

namespace dsreg {

struct PlotSpec
{
    std::string metric;
    std::string title;
    std::string x_label = "n";
    std::string y_label;
    int width = 640;
    int height = 420;
};

/// SVG 1.1 line chart of `metric` against n, one polyline with markers per
/// method. Output bytes depend only on the rows and the PlotSpec. Throws
/// InvalidInput when no row carries the metric.
std::string emit_plot(const std::vector<SweepRow>& rows, const PlotSpec& spec);
void write_plot(const std::filesystem::path& path, const std::vector<SweepRow>& rows,
                const PlotSpec& spec);

} // namespace dsreg
