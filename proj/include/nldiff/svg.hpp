#pragma once

#include <string>
#include <vector>

namespace nldiff {

/// One polyline; NaN values break the line.
struct PlotSeries {
    std::string label;
    std::vector<double> x, y;
    bool dashed = false;
};

struct PlotPanel {
    std::string title;
    std::string xlabel, ylabel;
    bool log_x = false;
    bool log_y = false;
    std::vector<PlotSeries> series;
};

/// Self-contained SVG document with the panels on a grid of `columns`.
std::string render_svg(const std::vector<PlotPanel>& panels, int columns = 1);

}  // namespace nldiff
