#pragma once

#include <string>
#include <vector>

namespace mgp::svg {

struct Series {
    std::string label;
    std::vector<double> xs;
    std::vector<double> ys;
    std::string color;
};

struct Panel {
    std::string title;
    std::vector<Series> lines;
    /// Bars are grouped by x position, one bar per series.
    std::vector<Series> bars;
    bool log_x = false;
};

/// Renders panels in a grid of `columns` columns. Output is a pure function
/// of the inputs.
std::string render(const std::string& title, const std::vector<Panel>& panels, int columns = 3,
                   const std::string& x_label = "", const std::string& y_label = "");

}  // namespace mgp::svg
