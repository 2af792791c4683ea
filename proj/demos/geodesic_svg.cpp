// nnmetric: demo — single-site geodesics at several wedge angles.
// Computes the closed-form distance from x = (1, 0) to points at angle theta
// and renders the geodesic fan into geodesics.svg.
// SPDX-License-Identifier: MIT
#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

#include "nnmetric/nnmetric.hpp"

int main() {
    const nnm::Vec p{0.0, 0.0};
    const nnm::Vec x{1.0, 0.0};
    const std::size_t segments = 96;

    std::vector<nnm::PolylinePath> fan;
    std::printf("%-10s %-12s %s\n", "theta", "distance", "shape");
    for (const double deg : {30.0, 60.0, 90.0, 120.0, 180.0}) {
        const double th = deg * std::numbers::pi / 180.0;
        const nnm::Vec y{std::cos(th), std::sin(th)};
        const double d = nnm::single_site_nn_distance(p, x, y);
        // Below pi/2 the geodesic bends around the site; from pi/2 on it is
        // cheapest to pass straight through it.
        const char* shape = th < std::numbers::pi / 2.0 ? "curved arc" : "through the site";
        std::printf("%-10.1f %-12.6f %s\n", deg, d, shape);
        fan.push_back(nnm::single_site_geodesic_path(p, x, y, segments));
    }

    const nnm::PointSet site({0.0, 0.0}, 2);
    const std::string svg = nnm::render_scene_svg(site, fan);
    nnm::write_svg_file("geodesics.svg", svg);
    std::printf("wrote geodesics.svg (%zu geodesics, %zu segments each)\n", fan.size(), segments);
    return 0;
}
