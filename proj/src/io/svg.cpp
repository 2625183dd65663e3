#include "auxrl/io/svg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <locale>
#include <sstream>

#include "auxrl/errors.hpp"
#include "auxrl/io/format.hpp"

namespace auxrl::io {

namespace {

constexpr double kLeft = 70, kRight = 170, kTop = 40, kBottom = 50;

double nice_step(double span, int target_ticks) {
    const double raw = span / target_ticks;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double r = raw / mag;
    const double nice = r < 1.5 ? 1 : r < 3 ? 2 : r < 7 ? 5 : 10;
    return nice * mag;
}

struct Extent {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void finish() {
        if (!std::isfinite(lo)) lo = 0, hi = 1;
        if (hi - lo < 1e-12) {
            const double pad = std::max(1.0, std::abs(lo) * 0.1);
            lo -= pad;
            hi += pad;
        }
    }
};

}  // namespace

std::string format_tick(double v) {
    if (std::abs(v) < 1e-12) return "0";
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 4);
    return std::string(buf, res.ptr);
}

std::string escape_xml(const std::string& s) {
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

const std::string& SvgPlot::palette(std::size_t i) {
    static const std::vector<std::string> colors = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                    "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};
    return colors[i % colors.size()];
}

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label, double width, double height)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)), width_(width), height_(height) {}

void SvgPlot::band(std::vector<double> x, std::vector<double> lo, std::vector<double> hi, std::string color) {
    if (x.size() != lo.size() || x.size() != hi.size()) throw InputError("svg band: series differ in length");
    bands_.push_back({std::move(x), std::move(lo), std::move(hi), std::move(color)});
}

void SvgPlot::line(std::vector<double> x, std::vector<double> y, std::string color, std::string label) {
    if (x.size() != y.size()) throw InputError("svg line: series differ in length");
    legend_.push_back({label, color, true});
    lines_.push_back({std::move(x), std::move(y), std::move(color), std::move(label)});
}

void SvgPlot::point(double x, double y, std::string color, std::string label, std::optional<Range> x_err,
                    std::optional<Range> y_err) {
    legend_.push_back({label, color, true});
    points_.push_back({x, y, std::move(color), std::move(label), x_err, y_err});
}

void SvgPlot::note(std::string label, std::string color) { legend_.push_back({std::move(label), std::move(color), false}); }

std::string SvgPlot::render() const {
    Extent ex, ey;
    for (const auto& b : bands_) {
        for (double v : b.x) ex.add(v);
        for (double v : b.lo) ey.add(v);
        for (double v : b.hi) ey.add(v);
    }
    for (const auto& l : lines_) {
        for (double v : l.x) ex.add(v);
        for (double v : l.y) ey.add(v);
    }
    for (const auto& p : points_) {
        ex.add(p.x);
        ey.add(p.y);
        if (p.x_err) ex.add(p.x_err->first), ex.add(p.x_err->second);
        if (p.y_err) ey.add(p.y_err->first), ey.add(p.y_err->second);
    }
    if (x_fixed_) ex.lo = x_fixed_->first, ex.hi = x_fixed_->second;
    ex.finish();
    ey.finish();
    const double ypad = 0.05 * (ey.hi - ey.lo);
    ey.lo -= ypad;
    ey.hi += ypad;

    const double pw = width_ - kLeft - kRight, ph = height_ - kTop - kBottom;
    auto sx = [&](double v) { return kLeft + (v - ex.lo) / (ex.hi - ex.lo) * pw; };
    auto sy = [&](double v) { return kTop + (ey.hi - v) / (ey.hi - ey.lo) * ph; };
    auto num = [](double v) { return format_number(std::round(v * 100.0) / 100.0); };

    std::ostringstream o;
    o.imbue(std::locale::classic());
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width_) << "\" height=\"" << num(height_)
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
      << escape_xml(title_) << "</text>\n";

    // grid and ticks
    for (int axis = 0; axis < 2; ++axis) {
        const double lo = axis == 0 ? ex.lo : ey.lo, hi = axis == 0 ? ex.hi : ey.hi;
        const double step = nice_step(hi - lo, 6);
        for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step) {
            if (axis == 0) {
                o << "<line x1=\"" << num(sx(t)) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(sx(t)) << "\" y2=\""
                  << num(kTop + ph) << "\" stroke=\"#e0e0e0\"/>\n";
                o << "<text x=\"" << num(sx(t)) << "\" y=\"" << num(kTop + ph + 15) << "\" text-anchor=\"middle\">"
                  << format_tick(t) << "</text>\n";
            } else {
                o << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(sy(t)) << "\" x2=\"" << num(kLeft + pw) << "\" y2=\""
                  << num(sy(t)) << "\" stroke=\"#e0e0e0\"/>\n";
                o << "<text x=\"" << num(kLeft - 5) << "\" y=\"" << num(sy(t) + 4) << "\" text-anchor=\"end\">"
                  << format_tick(t) << "</text>\n";
            }
        }
    }
    o << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    o << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(height_ - 10) << "\" text-anchor=\"middle\">"
      << escape_xml(x_label_) << "</text>\n";
    o << "<text transform=\"translate(15," << num(kTop + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape_xml(y_label_) << "</text>\n";

    for (const auto& b : bands_) {
        o << "<polygon class=\"band\" fill=\"" << b.color << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
        for (std::size_t i = 0; i < b.x.size(); ++i) o << num(sx(b.x[i])) << ',' << num(sy(b.hi[i])) << ' ';
        for (std::size_t i = b.x.size(); i-- > 0;) o << num(sx(b.x[i])) << ',' << num(sy(b.lo[i])) << ' ';
        o << "\"/>\n";
    }
    for (const auto& l : lines_) {
        o << "<polyline class=\"line\" data-series=\"" << escape_xml(l.label) << "\" fill=\"none\" stroke=\"" << l.color
          << "\" stroke-width=\"1.8\" points=\"";
        for (std::size_t i = 0; i < l.x.size(); ++i) o << num(sx(l.x[i])) << ',' << num(sy(l.y[i])) << ' ';
        o << "\"/>\n";
    }
    for (const auto& p : points_) {
        const std::string attrs = "stroke=\"" + p.color + "\" stroke-width=\"1.2\"";
        if (p.x_err)
            o << "<line class=\"errorbar\" x1=\"" << num(sx(p.x_err->first)) << "\" y1=\"" << num(sy(p.y)) << "\" x2=\""
              << num(sx(p.x_err->second)) << "\" y2=\"" << num(sy(p.y)) << "\" " << attrs << "/>\n";
        if (p.y_err)
            o << "<line class=\"errorbar\" x1=\"" << num(sx(p.x)) << "\" y1=\"" << num(sy(p.y_err->first)) << "\" x2=\""
              << num(sx(p.x)) << "\" y2=\"" << num(sy(p.y_err->second)) << "\" " << attrs << "/>\n";
        o << "<circle class=\"marker\" data-series=\"" << escape_xml(p.label) << "\" cx=\"" << num(sx(p.x)) << "\" cy=\""
          << num(sy(p.y)) << "\" r=\"4\" fill=\"" << p.color << "\"/>\n";
    }

    double ly = kTop + 10;
    const double lx = kLeft + pw + 15;
    for (const auto& e : legend_) {
        if (e.marked)
            o << "<rect x=\"" << num(lx) << "\" y=\"" << num(ly - 8) << "\" width=\"10\" height=\"10\" fill=\"" << e.color
              << "\"/>\n";
        else
            o << "<rect x=\"" << num(lx) << "\" y=\"" << num(ly - 8) << "\" width=\"10\" height=\"10\" fill=\"none\" stroke=\""
              << e.color << "\" stroke-dasharray=\"2,2\"/>\n";
        o << "<text x=\"" << num(lx + 15) << "\" y=\"" << num(ly + 1) << "\">" << escape_xml(e.label) << "</text>\n";
        ly += 16;
    }
    o << "</svg>\n";
    return o.str();
}

}  // namespace auxrl::io
