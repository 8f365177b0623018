#include "driveml/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace driveml::svg {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2"};

// Fixed two-decimal coordinates; non-finite input collapses to 0.
std::string num(double v) {
    if (!std::isfinite(v)) v = 0.0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", std::isfinite(v) ? v : 0.0);
    return buf;
}

struct Frame {
    double left = 56, right = 16, top = 28, bottom = 44;
    double w, h;
    double x0, x1, y0, y1;

    double px(double x) const { return left + (x1 == x0 ? 0.5 : (x - x0) / (x1 - x0)) * (w - left - right); }
    double py(double y) const { return h - bottom - (y1 == y0 ? 0.5 : (y - y0) / (y1 - y0)) * (h - top - bottom); }
};

std::string open(const ChartOptions& o) {
    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(o.width) + "\" height=\"" +
                    std::to_string(o.height) + "\" viewBox=\"0 0 " + std::to_string(o.width) + " " +
                    std::to_string(o.height) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    s += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(o.width) + "\" height=\"" + std::to_string(o.height) +
         "\" fill=\"#ffffff\"/>\n";
    if (!o.title.empty()) {
        s += "<text x=\"" + num(o.width / 2.0) + "\" y=\"16\" text-anchor=\"middle\" font-size=\"13\">" +
             escape(o.title) + "</text>\n";
    }
    return s;
}

std::string axes(const Frame& f, const ChartOptions& o) {
    std::string s;
    s += "<line x1=\"" + num(f.left) + "\" y1=\"" + num(f.h - f.bottom) + "\" x2=\"" + num(f.w - f.right) +
         "\" y2=\"" + num(f.h - f.bottom) + "\" stroke=\"#333333\"/>\n";
    s += "<line x1=\"" + num(f.left) + "\" y1=\"" + num(f.top) + "\" x2=\"" + num(f.left) + "\" y2=\"" +
         num(f.h - f.bottom) + "\" stroke=\"#333333\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = f.x0 + (f.x1 - f.x0) * k / 4.0;
        const double yv = f.y0 + (f.y1 - f.y0) * k / 4.0;
        s += "<text x=\"" + num(f.px(xv)) + "\" y=\"" + num(f.h - f.bottom + 14) + "\" text-anchor=\"middle\">" +
             tick_label(xv) + "</text>\n";
        s += "<text x=\"" + num(f.left - 4) + "\" y=\"" + num(f.py(yv) + 4) + "\" text-anchor=\"end\">" +
             tick_label(yv) + "</text>\n";
    }
    if (!o.x_label.empty()) {
        s += "<text x=\"" + num((f.left + f.w - f.right) / 2) + "\" y=\"" + num(f.h - 8) +
             "\" text-anchor=\"middle\">" + escape(o.x_label) + "</text>\n";
    }
    if (!o.y_label.empty()) {
        s += "<text x=\"12\" y=\"" + num((f.top + f.h - f.bottom) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 12 " +
             num((f.top + f.h - f.bottom) / 2) + ")\">" + escape(o.y_label) + "</text>\n";
    }
    return s;
}

}  // namespace

std::string escape(std::string_view text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&#39;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string line_chart(const std::vector<Series>& series, const ChartOptions& o) {
    Frame f;
    f.w = o.width;
    f.h = o.height;
    if (o.unit_axes) {
        f.x0 = f.y0 = 0.0;
        f.x1 = f.y1 = 1.0;
    } else {
        bool any = false;
        for (const auto& s : series) {
            for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                if (!any) {
                    f.x0 = f.x1 = s.x[i];
                    f.y0 = f.y1 = s.y[i];
                    any = true;
                }
                f.x0 = std::min(f.x0, s.x[i]);
                f.x1 = std::max(f.x1, s.x[i]);
                f.y0 = std::min(f.y0, s.y[i]);
                f.y1 = std::max(f.y1, s.y[i]);
            }
        }
        if (!any) f.x0 = f.x1 = f.y0 = f.y1 = 0.0;
        if (f.y1 == f.y0) {
            f.y0 -= 0.05;
            f.y1 += 0.05;
        }
    }

    std::string out = open(o) + axes(f, o);
    if (o.diagonal) {
        out += "<line x1=\"" + num(f.px(0)) + "\" y1=\"" + num(f.py(0)) + "\" x2=\"" + num(f.px(1)) + "\" y2=\"" +
               num(f.py(1)) + "\" stroke=\"#999999\" stroke-dasharray=\"4 3\"/>\n";
    }
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = kPalette[k % std::size(kPalette)];
        std::string pts;
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!pts.empty()) pts += ' ';
            pts += num(f.px(s.x[i])) + "," + num(f.py(s.y[i]));
        }
        out += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"" + pts +
               "\"/>\n";
        if (o.markers) {
            for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
                out += "<circle cx=\"" + num(f.px(s.x[i])) + "\" cy=\"" + num(f.py(s.y[i])) + "\" r=\"2.5\" fill=\"" +
                       color + "\"/>\n";
            }
        }
        if (series.size() > 1 || !s.label.empty()) {
            const double ly = f.top + 4 + 14.0 * static_cast<double>(k);
            out += "<rect x=\"" + num(f.w - f.right - 120) + "\" y=\"" + num(ly) + "\" width=\"10\" height=\"3\" fill=\"" +
                   color + "\"/>\n";
            out += "<text x=\"" + num(f.w - f.right - 106) + "\" y=\"" + num(ly + 5) + "\">" + escape(s.label) +
                   "</text>\n";
        }
    }
    return out + "</svg>\n";
}

std::string bar_chart(const std::vector<std::pair<std::string, double>>& bars, const ChartOptions& o) {
    const double left = 150, right = 48, top = 28, bottom = 16;
    const double w = o.width, h = o.height;
    double hi = 0.0;
    for (const auto& [_, v] : bars) {
        if (std::isfinite(v)) hi = std::max(hi, v);
    }
    if (hi <= 0.0) hi = 1.0;
    const double slot = bars.empty() ? 0.0 : (h - top - bottom) / static_cast<double>(bars.size());

    std::string out = open(o);
    for (std::size_t k = 0; k < bars.size(); ++k) {
        const double v = std::isfinite(bars[k].second) ? std::max(0.0, bars[k].second) : 0.0;
        const double y = top + slot * static_cast<double>(k);
        const double len = v / hi * (w - left - right);
        out += "<text x=\"" + num(left - 6) + "\" y=\"" + num(y + slot * 0.65) + "\" text-anchor=\"end\">" +
               escape(bars[k].first) + "</text>\n";
        out += "<rect x=\"" + num(left) + "\" y=\"" + num(y + slot * 0.15) + "\" width=\"" + num(len) + "\" height=\"" +
               num(slot * 0.7) + "\" fill=\"" + kPalette[0] + "\"/>\n";
        out += "<text x=\"" + num(left + len + 4) + "\" y=\"" + num(y + slot * 0.65) + "\">" + tick_label(v) + "</text>\n";
    }
    return out + "</svg>\n";
}

}  // namespace driveml::svg
