#include "flspde_cli/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iterator>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace flspde::cli {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick(double log_value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", std::pow(10.0, log_value));
    return buf;
}

} // namespace

std::string render_loglog_svg(const PlotSpec& spec, const std::vector<PlotSeries>& series) {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size()) throw std::invalid_argument("plot: series length mismatch");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0)) throw std::invalid_argument("plot: log axes need positive data");
            xmin = std::min(xmin, std::log10(s.x[i]));
            xmax = std::max(xmax, std::log10(s.x[i]));
            ymin = std::min(ymin, std::log10(s.y[i]));
            ymax = std::max(ymax, std::log10(s.y[i]));
        }
    }
    if (!std::isfinite(xmin)) throw std::invalid_argument("plot: no data");
    xmin = std::floor(xmin * 2.0) / 2.0;
    xmax = std::ceil(xmax * 2.0) / 2.0;
    ymin = std::floor(ymin * 2.0) / 2.0;
    ymax = std::ceil(ymax * 2.0) / 2.0;
    if (xmax <= xmin) xmax = xmin + 0.5;
    if (ymax <= ymin) ymax = ymin + 0.5;

    const double left = 80, right = spec.width - 160.0, top = 40, bottom = spec.height - 60.0;
    auto px = [&](double lx) { return left + (lx - xmin) / (xmax - xmin) * (right - left); };
    auto py = [&](double ly) { return bottom - (ly - ymin) / (ymax - ymin) * (bottom - top); };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\"" << spec.height
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << fmt((left + right) / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
       << escape(spec.title) << "</text>\n";

    for (double t = std::ceil(xmin * 2) / 2; t <= xmax + 1e-9; t += 0.5) {
        os << "<line x1=\"" << fmt(px(t)) << "\" y1=\"" << fmt(top) << "\" x2=\"" << fmt(px(t)) << "\" y2=\""
           << fmt(bottom) << "\" stroke=\"#ddd\"/>\n";
        os << "<text x=\"" << fmt(px(t)) << "\" y=\"" << fmt(bottom + 16) << "\" text-anchor=\"middle\">" << tick(t)
           << "</text>\n";
    }
    for (double t = std::ceil(ymin * 2) / 2; t <= ymax + 1e-9; t += 0.5) {
        os << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(py(t)) << "\" x2=\"" << fmt(right) << "\" y2=\""
           << fmt(py(t)) << "\" stroke=\"#ddd\"/>\n";
        os << "<text x=\"" << fmt(left - 6) << "\" y=\"" << fmt(py(t) + 4) << "\" text-anchor=\"end\">" << tick(t)
           << "</text>\n";
    }
    os << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(right - left)
       << "\" height=\"" << fmt(bottom - top) << "\" fill=\"none\" stroke=\"black\"/>\n";
    os << "<text x=\"" << fmt((left + right) / 2) << "\" y=\"" << fmt(bottom + 40) << "\" text-anchor=\"middle\">"
       << escape(spec.x_label) << "</text>\n";
    os << "<text transform=\"translate(20," << fmt((top + bottom) / 2)
       << ") rotate(-90)\" text-anchor=\"middle\">" << escape(spec.y_label) << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* colour = kPalette[s % std::size(kPalette)];
        const auto& ser = series[s];
        os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < ser.x.size(); ++i)
            os << (i ? " " : "") << fmt(px(std::log10(ser.x[i]))) << "," << fmt(py(std::log10(ser.y[i])));
        os << "\"/>\n";
        for (std::size_t i = 0; i < ser.x.size(); ++i)
            os << "<circle cx=\"" << fmt(px(std::log10(ser.x[i]))) << "\" cy=\"" << fmt(py(std::log10(ser.y[i])))
               << "\" r=\"3\" fill=\"" << colour << "\"/>\n";
        if (ser.fit && !ser.x.empty()) {
            const auto [slope, intercept] = *ser.fit;
            const auto [lo, hi] = std::minmax_element(ser.x.begin(), ser.x.end());
            const double a = std::log10(*lo), b = std::log10(*hi);
            os << "<line x1=\"" << fmt(px(a)) << "\" y1=\"" << fmt(py(intercept + slope * a)) << "\" x2=\""
               << fmt(px(b)) << "\" y2=\"" << fmt(py(intercept + slope * b)) << "\" stroke=\"" << colour
               << "\" stroke-dasharray=\"4 3\"/>\n";
        }
        const double ly = top + 16 + 18.0 * static_cast<double>(s);
        os << "<rect x=\"" << fmt(right + 12) << "\" y=\"" << fmt(ly - 9) << "\" width=\"10\" height=\"10\" fill=\""
           << colour << "\"/>\n";
        os << "<text x=\"" << fmt(right + 28) << "\" y=\"" << fmt(ly) << "\">" << escape(ser.label) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace flspde::cli
