#include "wavekit/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace wavekit::svg {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad() {
        if (!(lo < hi)) {
            lo -= 1.0;
            hi += 1.0;
        }
        const double m = 0.05 * (hi - lo);
        lo -= m;
        hi += m;
    }
};

}  // namespace

std::string render(const std::vector<Panel>& panels, int panel_width, int panel_height) {
    const int ml = 56, mr = 14, mt = 30, mb = 42;
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
        << panel_width * panels.size() << "\" height=\"" << panel_height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (std::size_t pi = 0; pi < panels.size(); ++pi) {
        const auto& panel = panels[pi];
        const double x0 = static_cast<double>(pi) * panel_width + ml;
        const double y0 = mt;
        const double w = panel_width - ml - mr;
        const double h = panel_height - mt - mb;

        Range rx, ry;
        for (const auto& s : panel.series) {
            for (double v : s.x) rx.add(v);
            for (double v : s.y) ry.add(v);
        }
        rx.pad();
        ry.pad();
        auto px = [&](double v) { return x0 + (v - rx.lo) / (rx.hi - rx.lo) * w; };
        auto py = [&](double v) { return y0 + h - (v - ry.lo) / (ry.hi - ry.lo) * h; };

        out << "<rect x=\"" << num(x0) << "\" y=\"" << num(y0) << "\" width=\"" << num(w)
            << "\" height=\"" << num(h) << "\" fill=\"none\" stroke=\"#444\"/>\n";
        out << "<text x=\"" << num(x0 + w / 2) << "\" y=\"18\" text-anchor=\"middle\" "
            << "font-family=\"sans-serif\" font-size=\"13\">" << panel.title << "</text>\n";
        out << "<text x=\"" << num(x0 + w / 2) << "\" y=\"" << num(y0 + h + 32)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << panel.xlabel << "</text>\n";
        out << "<text x=\"" << num(x0 - 44) << "\" y=\"" << num(y0 + h / 2)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\" "
            << "transform=\"rotate(-90 " << num(x0 - 44) << " " << num(y0 + h / 2) << ")\">"
            << panel.ylabel << "</text>\n";

        for (int i = 0; i <= 4; ++i) {
            const double vx = rx.lo + (rx.hi - rx.lo) * i / 4.0;
            const double vy = ry.lo + (ry.hi - ry.lo) * i / 4.0;
            out << "<line x1=\"" << num(px(vx)) << "\" y1=\"" << num(y0 + h) << "\" x2=\""
                << num(px(vx)) << "\" y2=\"" << num(y0 + h + 4) << "\" stroke=\"#444\"/>\n";
            out << "<text x=\"" << num(px(vx)) << "\" y=\"" << num(y0 + h + 16)
                << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
                << num(vx) << "</text>\n";
            out << "<line x1=\"" << num(x0 - 4) << "\" y1=\"" << num(py(vy)) << "\" x2=\""
                << num(x0) << "\" y2=\"" << num(py(vy)) << "\" stroke=\"#444\"/>\n";
            out << "<text x=\"" << num(x0 - 6) << "\" y=\"" << num(py(vy) + 3)
                << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
                << num(vy) << "</text>\n";
        }

        for (const auto& s : panel.series) {
            out << "<polyline fill=\"none\" stroke=\"" << s.color
                << "\" stroke-width=\"1.4\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                out << num(px(s.x[i])) << ',' << num(py(s.y[i])) << ' ';
            }
            out << "\"/>\n";
        }
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace wavekit::svg
