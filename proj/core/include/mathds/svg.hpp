#pragma once

#include <string>
#include <vector>

namespace mathds {

struct PlotSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    std::string color;  // empty: picked from the palette by position
};

struct PlotOptions {
    std::string title;
    std::string x_label;
    std::string y_label;
    int width = 800;
    int height = 500;
    bool scatter = false;       // points instead of polylines
    bool zero_line = true;      // horizontal rule at y = 0 when in range
    std::string version;        // written into a comment, the only varying text
};

struct HistogramSeries {
    std::string name;
    std::vector<double> counts;  // one per bin
    std::string color;
};

/// Palette by position: blue, red, green, then muted extras.
std::string palette_color(std::size_t index);

std::string svg_line_plot(const std::vector<PlotSeries>& series, const PlotOptions& options);

/// Overlaid bars; `edges` has one more entry than each `counts`.
std::string svg_histogram(const std::vector<double>& edges, const std::vector<HistogramSeries>& series,
                          const PlotOptions& options);

/// Equal-width bin counts of `values` over [lo, hi]; the top edge is closed.
std::vector<double> bin_counts(const std::vector<double>& values, double lo, double hi, std::size_t bins);

}  // namespace mathds
