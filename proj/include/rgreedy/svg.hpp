#pragma once

// Minimal deterministic SVG line/scatter plots.

#include <string>
#include <vector>

namespace rgreedy::svg {

enum class Style { line, markers };

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    Style style = Style::line;
    std::string color = "#1f77b4";
};

struct Plot {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    std::vector<Series> series;
};

/// Non-finite points, and non-positive points on log axes, are skipped.
std::string render(const Plot& plot, int width = 720, int height = 480);

} // namespace rgreedy::svg
