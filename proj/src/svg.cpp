#include "nldiff/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace nldiff {

namespace {

constexpr double kPanelW = 480, kPanelH = 340;
constexpr double kLeft = 70, kRight = 20, kTop = 36, kBottom = 50;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Axis {
    bool log = false;
    double lo = 0, hi = 1;

    double map(double v) const { return log ? std::log10(v) : v; }
    bool usable(double v) const { return std::isfinite(v) && (!log || v > 0); }

    void fit(const std::vector<double>& vals) {
        double a = std::numeric_limits<double>::infinity(), b = -a;
        for (double v : vals) {
            if (!usable(v)) continue;
            a = std::min(a, map(v));
            b = std::max(b, map(v));
        }
        if (!std::isfinite(a)) a = 0, b = 1;
        if (b - a < 1e-12 * std::max(1.0, std::abs(a))) a -= 0.5, b += 0.5;
        if (log) {
            lo = std::floor(a), hi = std::ceil(b);
        } else {
            const double pad = 0.05 * (b - a);
            lo = a - pad, hi = b + pad;
        }
    }

    std::vector<double> ticks() const {
        std::vector<double> t;
        if (log) {
            const int step = std::max(1, static_cast<int>((hi - lo) / 6));
            for (double e = lo; e <= hi + 1e-9; e += step) t.push_back(e);
        } else {
            const double raw = (hi - lo) / 5;
            const double mag = std::pow(10.0, std::floor(std::log10(raw)));
            double step = mag;
            for (double m : {1.0, 2.0, 5.0, 10.0})
                if (m * mag >= raw) { step = m * mag; break; }
            for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) t.push_back(v);
        }
        return t;
    }

    std::string label(double tick) const { return log ? "1e" + tick_label(tick) : tick_label(tick); }
};

void draw_panel(std::ostringstream& os, const PlotPanel& p, double ox, double oy) {
    Axis ax{p.log_x}, ay{p.log_y};
    std::vector<double> xs, ys;
    for (const auto& s : p.series) {
        xs.insert(xs.end(), s.x.begin(), s.x.end());
        ys.insert(ys.end(), s.y.begin(), s.y.end());
    }
    ax.fit(xs);
    ay.fit(ys);
    const double w = kPanelW - kLeft - kRight, h = kPanelH - kTop - kBottom;
    const double x0 = ox + kLeft, y0 = oy + kTop;
    auto px = [&](double v) { return x0 + (ax.map(v) - ax.lo) / (ax.hi - ax.lo) * w; };
    auto py = [&](double v) { return y0 + h - (ay.map(v) - ay.lo) / (ay.hi - ay.lo) * h; };

    os << "<rect x=\"" << num(x0) << "\" y=\"" << num(y0) << "\" width=\"" << num(w) << "\" height=\"" << num(h)
       << "\" fill=\"none\" stroke=\"#444\"/>\n";
    os << "<text x=\"" << num(x0 + w / 2) << "\" y=\"" << num(oy + 22)
       << "\" text-anchor=\"middle\" font-size=\"14\">" << escape(p.title) << "</text>\n";
    os << "<text x=\"" << num(x0 + w / 2) << "\" y=\"" << num(y0 + h + 38)
       << "\" text-anchor=\"middle\" font-size=\"12\">" << escape(p.xlabel) << "</text>\n";
    os << "<text x=\"" << num(ox + 14) << "\" y=\"" << num(y0 + h / 2) << "\" text-anchor=\"middle\" font-size=\"12\""
       << " transform=\"rotate(-90 " << num(ox + 14) << ' ' << num(y0 + h / 2) << ")\">" << escape(p.ylabel)
       << "</text>\n";
    for (double t : ax.ticks()) {
        const double x = x0 + (t - ax.lo) / (ax.hi - ax.lo) * w;
        os << "<line x1=\"" << num(x) << "\" y1=\"" << num(y0 + h) << "\" x2=\"" << num(x) << "\" y2=\""
           << num(y0 + h + 5) << "\" stroke=\"#444\"/>\n";
        os << "<text x=\"" << num(x) << "\" y=\"" << num(y0 + h + 18) << "\" text-anchor=\"middle\" font-size=\"10\">"
           << ax.label(t) << "</text>\n";
    }
    for (double t : ay.ticks()) {
        const double y = y0 + h - (t - ay.lo) / (ay.hi - ay.lo) * h;
        os << "<line x1=\"" << num(x0 - 5) << "\" y1=\"" << num(y) << "\" x2=\"" << num(x0) << "\" y2=\"" << num(y)
           << "\" stroke=\"#444\"/>\n";
        os << "<text x=\"" << num(x0 - 8) << "\" y=\"" << num(y + 3) << "\" text-anchor=\"end\" font-size=\"10\">"
           << ay.label(t) << "</text>\n";
    }
    for (std::size_t si = 0; si < p.series.size(); ++si) {
        const auto& s = p.series[si];
        const char* color = kColors[si % std::size(kColors)];
        std::string pts;
        auto flush = [&] {
            if (!pts.empty())
                os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\""
                   << (s.dashed ? " stroke-dasharray=\"5,3\"" : "") << " points=\"" << pts << "\"/>\n";
            pts.clear();
        };
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!ax.usable(s.x[i]) || !ay.usable(s.y[i])) {
                flush();
                continue;
            }
            if (!pts.empty()) pts += ' ';
            pts += num(px(s.x[i])) + "," + num(py(s.y[i]));
        }
        flush();
        const double ly = y0 + 14 + 14 * static_cast<double>(si);
        os << "<line x1=\"" << num(x0 + w - 110) << "\" y1=\"" << num(ly - 4) << "\" x2=\"" << num(x0 + w - 90)
           << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"1.5\""
           << (s.dashed ? " stroke-dasharray=\"5,3\"" : "") << "/>\n";
        os << "<text x=\"" << num(x0 + w - 85) << "\" y=\"" << num(ly) << "\" font-size=\"10\">" << escape(s.label)
           << "</text>\n";
    }
}

}  // namespace

std::string render_svg(const std::vector<PlotPanel>& panels, int columns) {
    columns = std::max(1, std::min(columns, static_cast<int>(std::max<std::size_t>(1, panels.size()))));
    const int rows = static_cast<int>((panels.size() + columns - 1) / columns);
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(columns * kPanelW) << "\" height=\""
       << num(std::max(1, rows) * kPanelH) << "\" font-family=\"sans-serif\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (std::size_t i = 0; i < panels.size(); ++i) {
        draw_panel(os, panels[i], static_cast<double>(i % columns) * kPanelW,
                   static_cast<double>(i / columns) * kPanelH);
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace nldiff
