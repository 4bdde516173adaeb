#pragma once

#include <string>
#include <vector>

namespace wavekit::svg {

struct Series {
    std::string label;
    std::string color = "#1f77b4";
    std::vector<double> x, y;
};

struct Panel {
    std::string title;
    std::string xlabel, ylabel;
    std::vector<Series> series;
};

/// Static side-by-side line plots.
std::string render(const std::vector<Panel>& panels, int panel_width = 460,
                   int panel_height = 340);

}  // namespace wavekit::svg
