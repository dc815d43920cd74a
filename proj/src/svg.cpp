#include "mgprof/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace mgp::svg {

namespace {

constexpr double kPanelW = 360.0;
constexpr double kPanelH = 260.0;
constexpr double kMarginL = 56.0;
constexpr double kMarginR = 16.0;
constexpr double kMarginT = 28.0;
constexpr double kMarginB = 40.0;
constexpr double kHeader = 36.0;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void finish() {
        if (!(lo <= hi)) { lo = 0.0; hi = 1.0; }
        if (hi - lo < 1e-12) { lo -= 0.5; hi += 0.5; }
    }
};

std::string render_panel(const Panel& p, double ox, double oy) {
    const double pw = kPanelW - kMarginL - kMarginR;
    const double ph = kPanelH - kMarginT - kMarginB;
    auto fx = [&](double x) { return p.log_x ? std::log10(std::max(x, 1e-300)) : x; };

    Range xr, yr;
    for (const auto& s : p.lines) {
        for (double x : s.xs) xr.add(fx(x));
        for (double y : s.ys) yr.add(y);
    }
    double bar_step = 0.0;
    if (!p.bars.empty()) {
        std::vector<double> xs;
        for (const auto& s : p.bars) {
            for (double x : s.xs) { xr.add(x); xs.push_back(x); }
            for (double y : s.ys) yr.add(y);
        }
        yr.add(0.0);
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        bar_step = xs.size() > 1 ? (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1) : 1.0;
        xr.add(xs.front() - 0.5 * bar_step);
        xr.add(xs.back() + 0.5 * bar_step);
    }
    xr.finish();
    yr.finish();
    auto px = [&](double x) { return ox + kMarginL + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
    auto py = [&](double y) { return oy + kMarginT + ph - (y - yr.lo) / (yr.hi - yr.lo) * ph; };

    std::string out;
    out += "<g>\n";
    out += "<rect x=\"" + num(ox + kMarginL) + "\" y=\"" + num(oy + kMarginT) + "\" width=\"" + num(pw) +
           "\" height=\"" + num(ph) + "\" fill=\"none\" stroke=\"#444\"/>\n";
    out += "<text x=\"" + num(ox + kPanelW / 2) + "\" y=\"" + num(oy + 18) +
           "\" text-anchor=\"middle\" font-size=\"13\">" + escape(p.title) + "</text>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = xr.lo + (xr.hi - xr.lo) * k / 4.0;
        const double yv = yr.lo + (yr.hi - yr.lo) * k / 4.0;
        out += "<text x=\"" + num(px(xv)) + "\" y=\"" + num(oy + kMarginT + ph + 14) +
               "\" text-anchor=\"middle\" font-size=\"10\">" + tick(p.log_x ? std::pow(10.0, xv) : xv) +
               "</text>\n";
        out += "<text x=\"" + num(ox + kMarginL - 4) + "\" y=\"" + num(py(yv) + 3) +
               "\" text-anchor=\"end\" font-size=\"10\">" + tick(yv) + "</text>\n";
    }
    if (!p.bars.empty()) {
        const double group_w = 0.8 * bar_step / (xr.hi - xr.lo) * pw;
        const double bar_w = group_w / static_cast<double>(p.bars.size());
        for (std::size_t s = 0; s < p.bars.size(); ++s) {
            const auto& b = p.bars[s];
            for (std::size_t i = 0; i < b.xs.size() && i < b.ys.size(); ++i) {
                const double left = px(b.xs[i]) - group_w / 2 + bar_w * static_cast<double>(s);
                const double top = py(std::max(b.ys[i], 0.0));
                out += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(bar_w) +
                       "\" height=\"" + num(py(0.0) - top) + "\" fill=\"" + b.color +
                       "\" fill-opacity=\"0.7\"/>\n";
            }
        }
    }
    for (const auto& s : p.lines) {
        std::string pts;
        for (std::size_t i = 0; i < s.xs.size() && i < s.ys.size(); ++i) {
            if (!std::isfinite(s.ys[i])) continue;
            if (!pts.empty()) pts += ' ';
            pts += num(px(fx(s.xs[i]))) + ',' + num(py(s.ys[i]));
        }
        out += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\" points=\"" + pts +
               "\"/>\n";
    }
    // Legend.
    double ly = oy + kMarginT + 12;
    auto legend = [&](const Series& s) {
        out += "<rect x=\"" + num(ox + kMarginL + pw - 90) + "\" y=\"" + num(ly - 8) +
               "\" width=\"10\" height=\"10\" fill=\"" + s.color + "\"/>\n";
        out += "<text x=\"" + num(ox + kMarginL + pw - 76) + "\" y=\"" + num(ly + 1) +
               "\" font-size=\"10\">" + escape(s.label) + "</text>\n";
        ly += 13;
    };
    for (const auto& s : p.bars) legend(s);
    for (const auto& s : p.lines)
        if (!s.label.empty()) legend(s);
    out += "</g>\n";
    return out;
}

}  // namespace

std::string render(const std::string& title, const std::vector<Panel>& panels, int columns,
                   const std::string& x_label, const std::string& y_label) {
    columns = std::max(1, std::min<int>(columns, static_cast<int>(std::max<std::size_t>(panels.size(), 1))));
    const int rows = static_cast<int>((panels.size() + columns - 1) / columns);
    const double width = columns * kPanelW;
    const double height = kHeader + std::max(rows, 1) * kPanelH + 20;
    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" +
           num(height) + "\" viewBox=\"0 0 " + num(width) + ' ' + num(height) +
           "\" font-family=\"sans-serif\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + num(width / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" +
           escape(title) + "</text>\n";
    for (std::size_t i = 0; i < panels.size(); ++i) {
        const double ox = static_cast<double>(i % columns) * kPanelW;
        const double oy = kHeader + static_cast<double>(i / columns) * kPanelH;
        out += render_panel(panels[i], ox, oy);
    }
    if (!x_label.empty()) {
        out += "<text x=\"" + num(width / 2) + "\" y=\"" + num(height - 6) +
               "\" text-anchor=\"middle\" font-size=\"12\">" + escape(x_label) + "</text>\n";
    }
    if (!y_label.empty()) {
        out += "<text x=\"12\" y=\"" + num(height / 2) + "\" font-size=\"12\" transform=\"rotate(-90 12 " +
               num(height / 2) + ")\" text-anchor=\"middle\">" + escape(y_label) + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

}  // namespace mgp::svg
