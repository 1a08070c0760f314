#include "plot.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace qemtool {

namespace {

constexpr double kDomainMin = -2.1;
constexpr double kDomainMax = 2.1;

// Pixel position of data coordinate v within [lo, hi] on a canvas of the
// given extent; the y axis is flipped by the caller passing (hi, lo).
double to_pixel(double v, double lo, double hi, int extent) {
    return (v - lo) / (hi - lo) * static_cast<double>(extent);
}

void append_line(std::string& out, double x1, double y1, double x2, double y2) {
    out += "<line x1=\"" + format_double(x1) + "\" y1=\"" + format_double(y1) +
           "\" x2=\"" + format_double(x2) + "\" y2=\"" + format_double(y2) +
           "\"/>\n";
}

} // namespace

const std::array<TrefoilProjection, 3>& trefoil_projections() {
    static const std::array<TrefoilProjection, 3> table = {{
        {"trefoil-12.svg", "projection (t^3-3t, t^4-4t^2-1)", 1, 2,
         -3.0, 3.0, -5.1, 1.0, 1.0, 1.0},
        {"trefoil-13.svg", "projection (t^3-3t, t^5-10t)", 1, 3,
         -3.0, 3.0, -15.0, 15.0, 1.0, 5.0},
        {"trefoil-23.svg", "projection (t^4-4t^2-1, t^5-10t)", 2, 3,
         -5.1, 1.0, -15.0, 15.0, 1.0, 5.0},
    }};
    return table;
}

std::array<double, 3> trefoil_point(double t) {
    return {t * t * t - 3.0 * t,
            t * t * t * t - 4.0 * t * t - 1.0,
            t * t * t * t * t - 10.0 * t};
}

std::vector<double> trefoil_grid(int samples) {
    if (samples < 2)
        throw std::invalid_argument("trefoil_grid needs at least 2 samples");
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(samples));
    const double n1 = static_cast<double>(samples - 1);
    for (int i = 0; i < samples; ++i) {
        const double a = static_cast<double>(samples - 1 - i);
        const double b = static_cast<double>(i);
        grid.push_back((a * kDomainMin + b * kDomainMax) / n1);
    }
    return grid;
}

std::string format_double(double v) {
    if (v == 0.0)
        v = 0.0; // collapse -0 to 0
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string trefoil_svg(const TrefoilProjection& proj, int size, int samples) {
    if (size < 16)
        throw std::invalid_argument("canvas size must be at least 16 pixels");
    const std::string dim = std::to_string(size);
    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + dim +
           "\" height=\"" + dim + "\" viewBox=\"0 0 " + dim + " " + dim +
           "\">\n";
    svg += "<title>" + std::string(proj.title) + "</title>\n";
    svg += "<rect width=\"" + dim + "\" height=\"" + dim +
           "\" fill=\"#ffffff\"/>\n";

    const auto px = [&](double x) {
        return to_pixel(x, proj.xmin, proj.xmax, size);
    };
    const auto py = [&](double y) {
        return to_pixel(y, proj.ymax, proj.ymin, size);
    };

    svg += "<g stroke=\"#606060\" stroke-width=\"1\" fill=\"none\">\n";
    const bool has_x_axis = proj.ymin < 0.0 && 0.0 < proj.ymax;
    const bool has_y_axis = proj.xmin < 0.0 && 0.0 < proj.xmax;
    if (has_x_axis)
        append_line(svg, 0.0, py(0.0), static_cast<double>(size), py(0.0));
    if (has_y_axis)
        append_line(svg, px(0.0), 0.0, px(0.0), static_cast<double>(size));
    if (has_x_axis) {
        const long k_lo = static_cast<long>(std::ceil(proj.xmin / proj.xtick));
        const long k_hi = static_cast<long>(std::floor(proj.xmax / proj.xtick));
        for (long k = k_lo; k <= k_hi; ++k) {
            if (k == 0)
                continue;
            const double x = px(static_cast<double>(k) * proj.xtick);
            append_line(svg, x, py(0.0) - 3.0, x, py(0.0) + 3.0);
        }
    }
    if (has_y_axis) {
        const long k_lo = static_cast<long>(std::ceil(proj.ymin / proj.ytick));
        const long k_hi = static_cast<long>(std::floor(proj.ymax / proj.ytick));
        for (long k = k_lo; k <= k_hi; ++k) {
            if (k == 0)
                continue;
            const double y = py(static_cast<double>(k) * proj.ytick);
            append_line(svg, px(0.0) - 3.0, y, px(0.0) + 3.0, y);
        }
    }
    svg += "</g>\n";

    svg += "<polyline fill=\"none\" stroke=\"#1f4e79\" stroke-width=\"1.5\" "
           "points=\"";
    const std::vector<double> grid = trefoil_grid(samples);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const std::array<double, 3> point = trefoil_point(grid[i]);
        if (i != 0)
            svg += ' ';
        svg += format_double(px(point[static_cast<std::size_t>(proj.first - 1)]));
        svg += ',';
        svg += format_double(py(point[static_cast<std::size_t>(proj.second - 1)]));
    }
    svg += "\"/>\n</svg>\n";
    return svg;
}

} // namespace qemtool
