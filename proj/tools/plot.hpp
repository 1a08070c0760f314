#pragma once

#include <array>
#include <string>
#include <vector>

// SVG rendering of the three planar projections of the knotted curve
//   t -> (t^3 - 3t, t^4 - 4t^2 - 1, t^5 - 10t),
// sampled over t in [-2.1, 2.1].  This is the only floating-point code in
// the tool; everything upstream is exact.  Output bytes are pinned by
// shortest-round-trip formatting so identical flags give identical files.

namespace qemtool {

struct TrefoilProjection {
    const char* file_name; // output file written under the --out directory
    const char* title;     // human-readable description embedded in the SVG
    int first;             // 1-based index of the component drawn on x
    int second;            // 1-based index of the component drawn on y
    double xmin, xmax;     // figure window, matching the reference figures
    double ymin, ymax;
    double xtick, ytick;   // tick spacing along each axis
};

const std::array<TrefoilProjection, 3>& trefoil_projections();

// Curve components (t^3 - 3t, t^4 - 4t^2 - 1, t^5 - 10t) at parameter t.
std::array<double, 3> trefoil_point(double t);

// n equally spaced parameters covering [-2.1, 2.1]; requires n >= 2.
std::vector<double> trefoil_grid(int samples);

// Shortest decimal string that round-trips to v (std::to_chars); negative
// zero is normalized so "-0" never appears.
std::string format_double(double v);

// Complete SVG document for one projection on a size-by-size pixel canvas.
// The window clips the curve exactly as in the reference figures: samples
// mapping outside the canvas fall outside the SVG viewport.
std::string trefoil_svg(const TrefoilProjection& proj, int size, int samples);

} // namespace qemtool
