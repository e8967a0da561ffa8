#pragma once

#include <optional>
#include <string>
#include <vector>

namespace flspde::cli {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    /// Optional fitted line log10 y = intercept + slope log10 x.
    std::optional<std::pair<double, double>> fit;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    int width = 640;
    int height = 480;
};

/// Static log-log chart; every x and y must be positive.
std::string render_loglog_svg(const PlotSpec& spec, const std::vector<PlotSeries>& series);

} // namespace flspde::cli
