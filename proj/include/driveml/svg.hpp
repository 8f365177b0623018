#pragma once

#include <string>
#include <utility>
#include <vector>

namespace driveml::svg {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct ChartOptions {
    std::string title;
    std::string x_label;
    std::string y_label;
    int width = 480;
    int height = 320;
    bool diagonal = false;   // dashed y = x reference (ROC)
    bool unit_axes = false;  // fix both axes to [0, 1]
    bool markers = false;
};

/// Escapes &, <, >, " and ' for text and attribute content.
std::string escape(std::string_view text);

std::string line_chart(const std::vector<Series>& series, const ChartOptions& options);

/// Horizontal bars, first entry on top.
std::string bar_chart(const std::vector<std::pair<std::string, double>>& bars, const ChartOptions& options);

}  // namespace driveml::svg
