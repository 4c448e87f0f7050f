#include "asyncqp/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "asyncqp/types.hpp"

namespace asyncqp {

namespace {

constexpr double kWidth = 860.0, kHeight = 540.0;
constexpr double kLeft = 78.0, kRight = 30.0, kTop = 30.0, kBottom = 58.0;

const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b"};
const char* kDashes[] = {"", "10,6", "3,4", "12,4,3,4", "6,3"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string tick_label(double log_value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "1e%+03d", static_cast<int>(std::lround(log_value)));
    return buf;
}

}  // namespace

void render_convergence_svg(const std::vector<PlotSeries>& series, std::optional<double> epsilon,
                            const std::string& path) {
    if (series.empty()) throw std::invalid_argument("plot: no series");
    double x_max = 1.0;
    double y_lo = std::numeric_limits<double>::infinity(), y_hi = 0.0;
    for (const PlotSeries& s : series) {
        if (s.x.size() != s.y.size() || s.x.empty())
            throw std::invalid_argument("plot: series '" + s.label + "' is empty or ragged");
        x_max = std::max(x_max, *std::max_element(s.x.begin(), s.x.end()));
        for (double v : s.y)
            if (v > 0.0) {
                y_lo = std::min(y_lo, v);
                y_hi = std::max(y_hi, v);
            }
    }
    if (!(y_hi > 0.0)) throw std::invalid_argument("plot: no positive distances to draw");
    if (epsilon && *epsilon > 0.0) {
        y_lo = std::min(y_lo, *epsilon);
        y_hi = std::max(y_hi, *epsilon);
    }
    double log_lo = std::floor(std::log10(y_lo));
    double log_hi = std::ceil(std::log10(y_hi));
    if (log_hi <= log_lo) log_hi = log_lo + 1.0;

    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto sx = [&](double x) { return kLeft + plot_w * (x / x_max); };
    auto sy = [&](double y) {
        const double clamped = std::max(y, std::pow(10.0, log_lo));
        return kTop + plot_h * (1.0 - (std::log10(clamped) - log_lo) / (log_hi - log_lo));
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<g font-family=\"sans-serif\" font-size=\"13\">\n";

    // frame
    svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w
        << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#333\"/>\n";

    // y decades
    const int decades = static_cast<int>(log_hi - log_lo);
    const int stride = std::max(1, decades / 8);
    for (int d = 0; d <= decades; d += stride) {
        const double ly = log_lo + d;
        const double y = kTop + plot_h * (1.0 - static_cast<double>(d) / (log_hi - log_lo));
        svg << "<line x1=\"" << kLeft << "\" y1=\"" << num(y) << "\" x2=\"" << kLeft + plot_w
            << "\" y2=\"" << num(y) << "\" stroke=\"#ddd\"/>\n"
            << "<text x=\"" << kLeft - 8 << "\" y=\"" << num(y + 4)
            << "\" text-anchor=\"end\">" << tick_label(ly) << "</text>\n";
    }
    // x ticks
    for (int t = 0; t <= 5; ++t) {
        const double x = x_max * t / 5.0;
        svg << "<line x1=\"" << num(sx(x)) << "\" y1=\"" << kTop + plot_h << "\" x2=\""
            << num(sx(x)) << "\" y2=\"" << kTop + plot_h + 6 << "\" stroke=\"#333\"/>\n"
            << "<text x=\"" << num(sx(x)) << "\" y=\"" << kTop + plot_h + 22
            << "\" text-anchor=\"middle\">" << num(x) << "</text>\n";
    }
    svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 14
        << "\" text-anchor=\"middle\">timestep</text>\n";
    svg << "<text x=\"20\" y=\"" << kTop + plot_h / 2
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " << kTop + plot_h / 2
        << ")\">distance to minimizer</text>\n";

    if (epsilon && *epsilon > 0.0) {
        const double y = sy(*epsilon);
        svg << "<line class=\"epsilon-line\" x1=\"" << kLeft << "\" y1=\"" << num(y) << "\" x2=\""
            << kLeft + plot_w << "\" y2=\"" << num(y)
            << "\" stroke=\"#ccaa00\" stroke-width=\"2\" stroke-dasharray=\"12,4,3,4\"/>\n";
    }

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kColors[s % (sizeof kColors / sizeof kColors[0])];
        const char* dash = kDashes[s % (sizeof kDashes / sizeof kDashes[0])];
        svg << "<polyline class=\"trace-line\" fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.8\"";
        if (*dash) svg << " stroke-dasharray=\"" << dash << "\"";
        svg << " points=\"";
        for (std::size_t i = 0; i < series[s].x.size(); ++i) {
            if (i) svg << ' ';
            svg << num(sx(series[s].x[i])) << ',' << num(sy(series[s].y[i]));
        }
        svg << "\"/>\n";
    }

    // legend
    double ly = kTop + 16.0;
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kColors[s % (sizeof kColors / sizeof kColors[0])];
        const char* dash = kDashes[s % (sizeof kDashes / sizeof kDashes[0])];
        svg << "<line x1=\"" << kLeft + plot_w - 190 << "\" y1=\"" << num(ly) << "\" x2=\""
            << kLeft + plot_w - 150 << "\" y2=\"" << num(ly) << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"";
        if (*dash) svg << " stroke-dasharray=\"" << dash << "\"";
        svg << "/>\n<text x=\"" << kLeft + plot_w - 142 << "\" y=\"" << num(ly + 4) << "\">"
            << series[s].label << "</text>\n";
        ly += 18.0;
    }
    if (epsilon && *epsilon > 0.0) {
        svg << "<line x1=\"" << kLeft + plot_w - 190 << "\" y1=\"" << num(ly) << "\" x2=\""
            << kLeft + plot_w - 150 << "\" y2=\"" << num(ly)
            << "\" stroke=\"#ccaa00\" stroke-width=\"2\" stroke-dasharray=\"12,4,3,4\"/>\n"
            << "<text x=\"" << kLeft + plot_w - 142 << "\" y=\"" << num(ly + 4)
            << "\">epsilon</text>\n";
    }

    svg << "</g>\n</svg>\n";

    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << svg.str();
    if (!out) throw IoError("write failed for " + path);
}

}  // namespace asyncqp
