#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mathds/errors.hpp"
#include "mathds/io.hpp"
#include "mathds/svg.hpp"

namespace mathds {

namespace {

constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 55;

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string num(double v) { return format_fixed(v, 2); }

// Round step (1, 2, 5 x 10^k) giving about `target` ticks.
double nice_step(double span, int target) {
    if (!(span > 0)) return 1.0;
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double r = raw / mag;
    return (r < 1.5 ? 1.0 : r < 3.5 ? 2.0 : r < 7.5 ? 5.0 : 10.0) * mag;
}

std::string tick_label(double v, double step) {
    int decimals = 0;
    if (step < 1) decimals = std::min(6, static_cast<int>(std::ceil(-std::log10(step) - 1e-9)));
    return format_fixed(v, decimals);
}

struct Frame {
    double x0, x1, y0, y1;
    double w, h;

    double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (w - kLeft - kRight); }
    double py(double y) const { return h - kBottom - (y - y0) / (y1 - y0) * (h - kTop - kBottom); }
};

void pad_range(double& lo, double& hi) {
    if (!(lo < hi)) {
        lo -= 1.0;
        hi += 1.0;
    }
}

void header(std::ostringstream& os, const Frame& f, const PlotOptions& o) {
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << o.width << "\" height=\"" << o.height
       << "\" viewBox=\"0 0 " << o.width << ' ' << o.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    if (!o.version.empty()) os << "<!-- mathds " << escape(o.version) << " -->\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!o.title.empty())
        os << "<text x=\"" << num(f.w / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(o.title)
           << "</text>\n";

    const double xs = nice_step(f.x1 - f.x0, 8), ys = nice_step(f.y1 - f.y0, 6);
    os << "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
    for (double t = std::ceil(f.x0 / xs) * xs; t <= f.x1 + 1e-9 * xs; t += xs)
        os << "<line x1=\"" << num(f.px(t)) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(f.px(t)) << "\" y2=\""
           << num(f.h - kBottom) << "\"/>\n";
    for (double t = std::ceil(f.y0 / ys) * ys; t <= f.y1 + 1e-9 * ys; t += ys)
        os << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(f.py(t)) << "\" x2=\"" << num(f.w - kRight)
           << "\" y2=\"" << num(f.py(t)) << "\"/>\n";
    os << "</g>\n<g fill=\"#333333\">\n";
    for (double t = std::ceil(f.x0 / xs) * xs; t <= f.x1 + 1e-9 * xs; t += xs)
        os << "<text x=\"" << num(f.px(t)) << "\" y=\"" << num(f.h - kBottom + 16)
           << "\" text-anchor=\"middle\">" << tick_label(t, xs) << "</text>\n";
    for (double t = std::ceil(f.y0 / ys) * ys; t <= f.y1 + 1e-9 * ys; t += ys)
        os << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(f.py(t) + 4) << "\" text-anchor=\"end\">"
           << tick_label(t, ys) << "</text>\n";
    os << "</g>\n";
    os << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(f.w - kLeft - kRight)
       << "\" height=\"" << num(f.h - kTop - kBottom) << "\" fill=\"none\" stroke=\"#333333\"/>\n";
    if (!o.x_label.empty())
        os << "<text x=\"" << num(f.w / 2) << "\" y=\"" << num(f.h - 12) << "\" text-anchor=\"middle\">"
           << escape(o.x_label) << "</text>\n";
    if (!o.y_label.empty())
        os << "<text transform=\"translate(16 " << num(f.h / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
           << escape(o.y_label) << "</text>\n";
}

template <class Names>
void legend(std::ostringstream& os, const Frame& f, const Names& entries) {
    double y = kTop + 14;
    for (const auto& [name, color] : entries) {
        const double x = f.w - kRight - 130;
        os << "<rect x=\"" << num(x) << "\" y=\"" << num(y - 9) << "\" width=\"12\" height=\"10\" fill=\"" << color
           << "\"/>\n<text x=\"" << num(x + 18) << "\" y=\"" << num(y) << "\">" << escape(name) << "</text>\n";
        y += 16;
    }
}

}  // namespace

std::string palette_color(std::size_t index) {
    static const char* colors[] = {"#1f4fd8", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};
    return colors[index % (sizeof colors / sizeof colors[0])];
}

std::string svg_line_plot(const std::vector<PlotSeries>& series, const PlotOptions& options) {
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size()) throw DataError("plot: series '" + s.name + "' has mismatched x and y");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    }
    if (!std::isfinite(x0)) throw DataError("plot: no finite points");
    pad_range(x0, x1);
    pad_range(y0, y1);
    const double margin = 0.05 * (y1 - y0);
    const Frame f{x0, x1, y0 - margin, y1 + margin, static_cast<double>(options.width),
                  static_cast<double>(options.height)};

    std::ostringstream os;
    header(os, f, options);
    if (options.zero_line && f.y0 < 0 && f.y1 > 0)
        os << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(f.py(0)) << "\" x2=\"" << num(f.w - kRight)
           << "\" y2=\"" << num(f.py(0)) << "\" stroke=\"#888888\" stroke-dasharray=\"4 3\"/>\n";
    std::vector<std::pair<std::string, std::string>> entries;
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const std::string color = s.color.empty() ? palette_color(k) : s.color;
        entries.emplace_back(s.name, color);
        if (options.scatter) {
            os << "<g fill=\"" << color << "\" fill-opacity=\"0.7\">\n";
            for (std::size_t i = 0; i < s.x.size(); ++i)
                if (std::isfinite(s.x[i]) && std::isfinite(s.y[i]))
                    os << "<circle cx=\"" << num(f.px(s.x[i])) << "\" cy=\"" << num(f.py(s.y[i])) << "\" r=\"2\"/>\n";
            os << "</g>\n";
        } else {
            os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            bool first = true;
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                os << (first ? "" : " ") << num(f.px(s.x[i])) << ',' << num(f.py(s.y[i]));
                first = false;
            }
            os << "\"/>\n";
        }
    }
    legend(os, f, entries);
    os << "</svg>\n";
    return os.str();
}

std::string svg_histogram(const std::vector<double>& edges, const std::vector<HistogramSeries>& series,
                          const PlotOptions& options) {
    if (edges.size() < 2) throw DataError("histogram: need at least one bin");
    double top = 0.0;
    for (const auto& s : series) {
        if (s.counts.size() + 1 != edges.size()) throw DataError("histogram: series '" + s.name + "' has wrong length");
        for (double c : s.counts) top = std::max(top, c);
    }
    if (top <= 0) top = 1.0;
    const Frame f{edges.front(), edges.back(), 0.0, top * 1.05, static_cast<double>(options.width),
                  static_cast<double>(options.height)};
    std::ostringstream os;
    header(os, f, options);
    std::vector<std::pair<std::string, std::string>> entries;
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const std::string color = s.color.empty() ? palette_color(k) : s.color;
        entries.emplace_back(s.name, color);
        os << "<g fill=\"" << color << "\" fill-opacity=\"0.5\">\n";
        for (std::size_t b = 0; b < s.counts.size(); ++b) {
            if (s.counts[b] <= 0) continue;
            const double xl = f.px(edges[b]), xr = f.px(edges[b + 1]);
            const double yt = f.py(s.counts[b]);
            os << "<rect x=\"" << num(xl) << "\" y=\"" << num(yt) << "\" width=\"" << num(xr - xl) << "\" height=\""
               << num(f.py(0) - yt) << "\"/>\n";
        }
        os << "</g>\n";
    }
    legend(os, f, entries);
    os << "</svg>\n";
    return os.str();
}

std::vector<double> bin_counts(const std::vector<double>& values, double lo, double hi, std::size_t bins) {
    if (bins == 0 || !(lo < hi)) throw DomainError("bin_counts: need bins >= 1 and lo < hi");
    std::vector<double> out(bins, 0.0);
    const double width = (hi - lo) / static_cast<double>(bins);
    for (double v : values) {
        if (!(v >= lo && v <= hi)) continue;
        auto b = static_cast<std::size_t>((v - lo) / width);
        out[std::min(b, bins - 1)] += 1.0;
    }
    return out;
}

}  // namespace mathds
