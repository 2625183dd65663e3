#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace auxrl::io {

// Tiny SVG chart: lines, shaded bands and points with error bars on linear
// axes fitted to the data.
class SvgPlot {
public:
    SvgPlot(std::string title, std::string x_label, std::string y_label, double width = 640, double height = 420);

    using Range = std::pair<double, double>;

    void band(std::vector<double> x, std::vector<double> lo, std::vector<double> hi, std::string color);
    void line(std::vector<double> x, std::vector<double> y, std::string color, std::string label);
    void point(double x, double y, std::string color, std::string label, std::optional<Range> x_err = std::nullopt,
               std::optional<Range> y_err = std::nullopt);
    // Legend entry without a mark, e.g. for series that have no point.
    void note(std::string label, std::string color);

    void set_x_range(double lo, double hi) { x_fixed_ = Range{lo, hi}; }

    std::string render() const;

    static const std::string& palette(std::size_t i);

private:
    struct Band {
        std::vector<double> x, lo, hi;
        std::string color;
    };
    struct Line {
        std::vector<double> x, y;
        std::string color, label;
    };
    struct Point {
        double x, y;
        std::string color, label;
        std::optional<Range> x_err, y_err;
    };
    struct Legend {
        std::string label, color;
        bool marked;
    };

    std::string title_, x_label_, y_label_;
    double width_, height_;
    std::optional<Range> x_fixed_;
    std::vector<Band> bands_;
    std::vector<Line> lines_;
    std::vector<Point> points_;
    std::vector<Legend> legend_;
};

// Locale-independent short number for labels.
std::string format_tick(double v);

std::string escape_xml(const std::string& s);

}  // namespace auxrl::io
