#pragma once

#include <optional>
#include <string>
#include <vector>

namespace asyncqp {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Self-contained SVG: one log-scale distance curve per series plus an
/// optional horizontal epsilon reference line. No external plotting runtime.
void render_convergence_svg(const std::vector<PlotSeries>& series, std::optional<double> epsilon,
                            const std::string& path);

}  // namespace asyncqp
