// nnmetric: exact nearest-neighbor geodesics for a single site.
//
// With one site p, the metric weights Euclidean length by |z - p|. In the
// plane through p, x, y (polar coordinates about p) the map z -> z^2 / 2 is a
// local isometry onto the Euclidean plane wherever the angular wedge spanned
// is below pi (after doubling), so geodesics pull back from straight lines:
//
//   angle(x,p,y) <  pi/2:  dist = sqrt(r1^4 + r2^4 - 2 r1^2 r2^2 cos(2 theta)) / 2
//   angle(x,p,y) >= pi/2:  dist = (r1^2 + r2^2) / 2, geodesic runs through p
//
// Both branches agree at theta = pi/2 and when either point sits on the site.
// SPDX-License-Identifier: MIT
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "nnmetric/core.hpp"
#include "nnmetric/path.hpp"

namespace nnm {

namespace detail {

/// cos(angle(x, p, y)); r1, r2 must be positive.
inline double cos_angle_at(const Vec& p, const Vec& x, const Vec& y, double r1, double r2) {
    double dp = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) dp += (x[k] - p[k]) * (y[k] - p[k]);
    return std::min(1.0, std::max(-1.0, dp / (r1 * r2)));
}

}  // namespace detail

/// Length of a shortest path from the site itself to a point, = |px|^2 / 2
/// (integrating radius along the straight segment).
inline double site_to_point_nn_distance(const Vec& p, const Vec& x) {
    if (p.size() != x.size())
        throw std::invalid_argument("site_to_point_nn_distance: dimension mismatch");
    const double r = dist(p, x);
    return 0.5 * r * r;
}

/// Exact nearest-neighbor distance between x and y when P = {p}.
inline double single_site_nn_distance(const Vec& p, const Vec& x, const Vec& y) {
    if (p.size() != x.size() || p.size() != y.size())
        throw std::invalid_argument("single_site_nn_distance: dimension mismatch");
    const double r1 = dist(p, x), r2 = dist(p, y);
    if (r1 == 0.0 || r2 == 0.0) return 0.5 * (r1 * r1 + r2 * r2);
    const double c = detail::cos_angle_at(p, x, y, r1, r2);
    if (c <= 0.0) return 0.5 * (r1 * r1 + r2 * r2);  // wedge >= pi/2: through the site
    const double c2 = 2.0 * c * c - 1.0;  // cos(2 theta)
    // Grouped via s1 = r1^2, s2 = r2^2 so every operation commutes under
    // swapping x and y: the distance is bitwise symmetric.
    const double s1 = r1 * r1, s2 = r2 * r2;
    const double q = s1 * s1 + s2 * s2 - 2.0 * (s1 * s2) * c2;
    return 0.5 * std::sqrt(std::max(0.0, q));
}

/// Polyline approximation of the geodesic between x and y for P = {p}, with
/// the requested number of segments (>= 2). Vertices lie in the plane of
/// p, x, y; the first and last vertices are exactly x and y.
inline PolylinePath single_site_geodesic_path(const Vec& p, const Vec& x, const Vec& y,
                                              std::size_t segments) {
    if (p.size() != x.size() || p.size() != y.size())
        throw std::invalid_argument("single_site_geodesic_path: dimension mismatch");
    if (segments < 2)
        throw std::invalid_argument("single_site_geodesic_path: need at least 2 segments");
    const std::size_t d = p.size();
    const double r1 = dist(p, x), r2 = dist(p, y);
    if (dist(x, y) == 0.0)
        throw std::invalid_argument("single_site_geodesic_path: x and y coincide");

    std::vector<double> flat;
    flat.reserve((segments + 1) * d);
    auto push = [&](const Vec& v) { flat.insert(flat.end(), v.begin(), v.end()); };
    auto push_leg = [&](const Vec& a, const Vec& b, std::size_t k) {
        // Interior vertices of a straight leg a -> b split into k segments.
        for (std::size_t i = 1; i < k; ++i) {
            Vec v(d);
            const double t = static_cast<double>(i) / static_cast<double>(k);
            for (std::size_t kk = 0; kk < d; ++kk) v[kk] = a[kk] + t * (b[kk] - a[kk]);
            push(v);
        }
    };

    if (r1 == 0.0 || r2 == 0.0) {
        // One endpoint is the site: the geodesic is the straight radial segment.
        push(x);
        push_leg(x, y, segments);
        push(y);
        return PolylinePath(std::move(flat), d);
    }

    const double c = detail::cos_angle_at(p, x, y, r1, r2);
    if (c <= 0.0) {
        // Through the site: straight legs x -> p -> y, segments split by length.
        std::size_t k1 = static_cast<std::size_t>(
            std::lround(static_cast<double>(segments) * r1 / (r1 + r2)));
        k1 = std::min(segments - 1, std::max<std::size_t>(1, k1));
        const std::size_t k2 = segments - k1;
        push(x);
        push_leg(x, p, k1);
        push(p);
        push_leg(p, y, k2);
        push(y);
        return PolylinePath(std::move(flat), d);
    }

    // Wedge below pi/2: orthonormal frame (e1, e2) in the plane of x and y about p.
    Vec e1(d), e2(d);
    for (std::size_t k = 0; k < d; ++k) e1[k] = (x[k] - p[k]) / r1;
    double w_par = 0.0;
    for (std::size_t k = 0; k < d; ++k) w_par += (y[k] - p[k]) * e1[k];
    double h2 = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        e2[k] = (y[k] - p[k]) - w_par * e1[k];
        h2 += e2[k] * e2[k];
    }
    const double h = std::sqrt(h2);
    if (h > 1e-15 * r2) {
        for (std::size_t k = 0; k < d; ++k) e2[k] /= h;
    } else {
        std::fill(e2.begin(), e2.end(), 0.0);  // collinear: geodesic is radial, e2 unused
    }
    const double theta = std::atan2(h, w_par);

    // Image endpoints under z -> z^2 / 2 (doubled angles, squared radii).
    const double ax = 0.5 * r1 * r1, ay_r = 0.5 * r2 * r2;
    const double bx = ay_r * std::cos(2.0 * theta), by = ay_r * std::sin(2.0 * theta);
    push(x);
    for (std::size_t i = 1; i < segments; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(segments);
        const double px_ = (1.0 - t) * ax + t * bx;
        const double py_ = (1.0 - t) * 0.0 + t * by;
        const double big_r = std::sqrt(px_ * px_ + py_ * py_);
        const double phi = std::atan2(py_, px_);
        const double rr = std::sqrt(2.0 * big_r);
        const double u = rr * std::cos(0.5 * phi), v = rr * std::sin(0.5 * phi);
        Vec z(d);
        for (std::size_t k = 0; k < d; ++k) z[k] = p[k] + u * e1[k] + v * e2[k];
        push(z);
    }
    push(y);
    return PolylinePath(std::move(flat), d);
}

}  // namespace nnm
