#include "mfl/svg.hpp"

#include <algorithm>
#include <cmath>

#include "mfl/csv.hpp"
#include "mfl/errors.hpp"

namespace mfl {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 610.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 430.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string attr(double v) { return format_number(v); }

} // namespace

std::string loglog_svg(const std::string& title, const std::string& x_label,
                       const std::string& y_label, const std::vector<SvgSeries>& series) {
    double lx_min = 0.0, lx_max = 0.0, ly_min = 0.0, ly_max = 0.0;
    bool any = false;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size()) {
            throw ConfigError("svg series '" + s.label + "': x and y sizes differ");
        }
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0)) continue;
            const double lx = std::log10(s.x[i]);
            const double ly = std::log10(s.y[i]);
            if (!any) {
                lx_min = lx_max = lx;
                ly_min = ly_max = ly;
                any = true;
            } else {
                lx_min = std::min(lx_min, lx);
                lx_max = std::max(lx_max, lx);
                ly_min = std::min(ly_min, ly);
                ly_max = std::max(ly_max, ly);
            }
        }
    }
    if (!any) {
        lx_min = ly_min = 0.0;
        lx_max = ly_max = 1.0;
    }
    if (lx_max - lx_min < 1e-9) lx_max = lx_min + 1.0;
    if (ly_max - ly_min < 1e-9) ly_max = ly_min + 1.0;
    const double pad_x = 0.05 * (lx_max - lx_min);
    const double pad_y = 0.05 * (ly_max - ly_min);
    lx_min -= pad_x;
    lx_max += pad_x;
    ly_min -= pad_y;
    ly_max += pad_y;

    auto px = [&](double lx) {
        return kLeft + (lx - lx_min) / (lx_max - lx_min) * (kRight - kLeft);
    };
    auto py = [&](double ly) {
        return kBottom - (ly - ly_min) / (ly_max - ly_min) * (kBottom - kTop);
    };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + attr(kWidth) +
           "\" height=\"" + attr(kHeight) + "\" viewBox=\"0 0 " + attr(kWidth) + " " +
           attr(kHeight) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + attr(kWidth / 2) + "\" y=\"28\" text-anchor=\"middle\" "
           "font-family=\"monospace\" font-size=\"16\">" + title + "</text>\n";
    svg += "<rect x=\"" + attr(kLeft) + "\" y=\"" + attr(kTop) + "\" width=\"" +
           attr(kRight - kLeft) + "\" height=\"" + attr(kBottom - kTop) +
           "\" fill=\"none\" stroke=\"black\"/>\n";

    // Decade ticks.
    for (int e = static_cast<int>(std::ceil(lx_min)); e <= static_cast<int>(std::floor(lx_max));
         ++e) {
        const double x = px(e);
        svg += "<line x1=\"" + attr(x) + "\" y1=\"" + attr(kBottom) + "\" x2=\"" + attr(x) +
               "\" y2=\"" + attr(kBottom + 6) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + attr(x) + "\" y=\"" + attr(kBottom + 22) +
               "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"12\">1e" +
               std::to_string(e) + "</text>\n";
    }
    for (int e = static_cast<int>(std::ceil(ly_min)); e <= static_cast<int>(std::floor(ly_max));
         ++e) {
        const double y = py(e);
        svg += "<line x1=\"" + attr(kLeft - 6) + "\" y1=\"" + attr(y) + "\" x2=\"" + attr(kLeft) +
               "\" y2=\"" + attr(y) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + attr(kLeft - 10) + "\" y=\"" + attr(y + 4) +
               "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"12\">1e" +
               std::to_string(e) + "</text>\n";
    }
    svg += "<text x=\"" + attr((kLeft + kRight) / 2) + "\" y=\"" + attr(kHeight - 12) +
           "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"13\">" + x_label +
           "</text>\n";
    svg += "<text x=\"18\" y=\"" + attr((kTop + kBottom) / 2) +
           "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"13\" "
           "transform=\"rotate(-90 18 " + attr((kTop + kBottom) / 2) + ")\">" + y_label +
           "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
        std::string points;
        for (std::size_t i = 0; i < series[s].x.size(); ++i) {
            if (!(series[s].x[i] > 0.0) || !(series[s].y[i] > 0.0)) continue;
            const double x = px(std::log10(series[s].x[i]));
            const double y = py(std::log10(series[s].y[i]));
            if (!points.empty()) points += ' ';
            points += attr(x) + "," + attr(y);
            svg += "<circle cx=\"" + attr(x) + "\" cy=\"" + attr(y) + "\" r=\"3\" fill=\"" +
                   color + "\"/>\n";
        }
        if (!points.empty()) {
            svg += "<polyline points=\"" + points + "\" fill=\"none\" stroke=\"" + color +
                   "\" stroke-width=\"1.5\"/>\n";
        }
        const double ly = kTop + 16.0 + 16.0 * static_cast<double>(s);
        svg += "<rect x=\"" + attr(kRight - 150) + "\" y=\"" + attr(ly - 9) +
               "\" width=\"10\" height=\"10\" fill=\"" + color + "\"/>\n";
        svg += "<text x=\"" + attr(kRight - 136) + "\" y=\"" + attr(ly) +
               "\" font-family=\"monospace\" font-size=\"12\">" + series[s].label + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace mfl
