#pragma once

// Minimal native SVG line plots (polyline-based, no external renderer).
// Axes are base-10 logarithmic with decade ticks; points with nonpositive
// coordinates are skipped. CSV remains the canonical artifact, the plot is
// a convenience view.

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace rennala {

struct PlotSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;  // (x, y)
};

inline void write_line_plot_svg(std::ostream& os, const std::string& title,
                                const std::string& xlabel, const std::string& ylabel,
                                const std::vector<PlotSeries>& series) {
    static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                     "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};
    const double width = 860, height = 560;
    const double ml = 70, mr = 200, mt = 40, mb = 55;

    double xmin = std::numeric_limits<double>::infinity(), xmax = 0;
    double ymin = std::numeric_limits<double>::infinity(), ymax = 0;
    for (const auto& s : series) {
        for (const auto& [x, y] : s.points) {
            if (x <= 0 || y <= 0) continue;
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    }
    if (!(xmin < xmax)) { xmin = 1; xmax = 10; }
    if (!(ymin < ymax)) { ymin = 1; ymax = 10; }

    const double lx0 = std::log10(xmin), lx1 = std::log10(xmax);
    const double ly0 = std::log10(ymin), ly1 = std::log10(ymax);
    auto px = [&](double x) { return ml + (std::log10(x) - lx0) / (lx1 - lx0) * (width - ml - mr); };
    auto py = [&](double y) {
        return height - mb - (std::log10(y) - ly0) / (ly1 - ly0) * (height - mt - mb);
    };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << (ml + (width - ml - mr) / 2) << "\" y=\"24\" text-anchor=\"middle\" "
       << "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";

    // frame
    os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << (width - ml - mr)
       << "\" height=\"" << (height - mt - mb)
       << "\" fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>\n";

    // decade ticks
    for (int e = static_cast<int>(std::ceil(lx0)); e <= static_cast<int>(std::floor(lx1)); ++e) {
        const double x = px(std::pow(10.0, e));
        os << "<line x1=\"" << x << "\" y1=\"" << mt << "\" x2=\"" << x << "\" y2=\""
           << (height - mb) << "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
        os << "<text x=\"" << x << "\" y=\"" << (height - mb + 18)
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">1e" << e
           << "</text>\n";
    }
    for (int e = static_cast<int>(std::ceil(ly0)); e <= static_cast<int>(std::floor(ly1)); ++e) {
        const double y = py(std::pow(10.0, e));
        os << "<line x1=\"" << ml << "\" y1=\"" << y << "\" x2=\"" << (width - mr) << "\" y2=\"" << y
           << "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
        os << "<text x=\"" << (ml - 6) << "\" y=\"" << (y + 4)
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">1e" << e
           << "</text>\n";
    }
    os << "<text x=\"" << (ml + (width - ml - mr) / 2) << "\" y=\"" << (height - 12)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << xlabel
       << "</text>\n";
    os << "<text x=\"18\" y=\"" << (mt + (height - mt - mb) / 2)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
       << "transform=\"rotate(-90 18 " << (mt + (height - mt - mb) / 2) << ")\">" << ylabel
       << "</text>\n";

    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\" points=\"";
        for (const auto& [x, y] : series[i].points) {
            if (x <= 0 || y <= 0) continue;
            os << px(x) << "," << py(y) << " ";
        }
        os << "\"/>\n";
        const double ly = mt + 16 + 18 * static_cast<double>(i);
        os << "<line x1=\"" << (width - mr + 10) << "\" y1=\"" << ly << "\" x2=\""
           << (width - mr + 34) << "\" y2=\"" << ly << "\" stroke=\"" << color
           << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << (width - mr + 40) << "\" y=\"" << (ly + 4)
           << "\" font-family=\"sans-serif\" font-size=\"11\">" << series[i].label << "</text>\n";
    }
    os << "</svg>\n";
}

}  // namespace rennala
