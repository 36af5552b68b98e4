#pragma once

#include <string>
#include <vector>

namespace mfl {

/// One plotted series; points with nonpositive coordinates are dropped by the
/// log-log renderer.
struct SvgSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Minimal self-contained log-log scatter/line plot (fixed 640x480 canvas,
/// decade ticks, one polyline + markers per series, legend top right).
std::string loglog_svg(const std::string& title, const std::string& x_label,
                       const std::string& y_label, const std::vector<SvgSeries>& series);

} // namespace mfl
