#pragma once

#include <string>
#include <vector>

namespace roco {

/// Renders one data series as an axis-labeled SVG line chart.  Non-finite
/// samples are skipped; the axes autoscale to the finite range.
void write_line_chart_svg(const std::string& path, const std::string& title,
                          const std::string& x_label, const std::string& y_label,
                          const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace roco
