// nnmetric: path discretization sequences.
//
// breaking mode: a sequence t_0 <= ... <= t_k of arc positions whose first and
// last points have the path's endpoints as nearest sites and where every
// consecutive arc has Euclidean length (dnn(t_{i-1}) + dnn(t_i)) / 2. Existence
// follows from the intermediate value theorem: along the path, dnn is
// 1-Lipschitz in arc length, so the residual (arc length minus required
// average) is strictly monotone with unit-or-better slope and brackets a root
// within two dnn radii. The construction anchors at the point of maximum dnn,
// places the first pair symmetrically about the anchor, and marches outward in
// both directions; on mirror-symmetric inputs whose maximizer is unique the
// output is mirror-symmetric (tied maxima break toward the smaller arc
// position, deterministically).
//
// epsilon_alpha mode: interior points where each consecutive chord satisfies
// |gamma(t_i) gamma(t_{i+1})| = eps * dnn(gamma(t_i)), starting just inside the
// Voronoi cell of the first endpoint (at half its inradius scaled by eps, which
// forces the first two points into that cell) and stopping once two
// consecutive points lie in the cell of the last endpoint.
// SPDX-License-Identifier: MIT
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "nnmetric/core.hpp"
#include "nnmetric/integrate.hpp"
#include "nnmetric/path.hpp"

namespace nnm {

enum class DiscretizeMode { breaking, epsilon_alpha };

struct DiscretizePoint {
    double s;  // arc-length position along the path
    Vec point;
};

namespace detail {

inline constexpr double kBisectTol = 1e-12;  // absolute, on arc length
inline constexpr std::size_t kMaxSequence = 1000000;

/// Arc positions (including endpoints 0 and L) where the path touches a site.
inline std::vector<double> site_touch_positions(const PointSet& ps, const PolylinePath& path,
                                                double tol) {
    std::vector<double> touches;
    const std::size_t d = ps.dim();
    for (std::size_t seg = 0; seg + 1 < path.num_vertices(); ++seg) {
        const double* a = path.vertex_ptr(seg);
        const double* b = path.vertex_ptr(seg + 1);
        const double len = path.cum_length(seg + 1) - path.cum_length(seg);
        for (std::size_t j = 0; j < ps.size(); ++j) {
            const double* p = ps.point_ptr(j);
            double t = 0.0, ab2 = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                t += (p[k] - a[k]) * (b[k] - a[k]);
                ab2 += (b[k] - a[k]) * (b[k] - a[k]);
            }
            t = std::min(1.0, std::max(0.0, t / ab2));
            double d2 = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                const double w = a[k] + t * (b[k] - a[k]) - p[k];
                d2 += w * w;
            }
            if (d2 <= tol * tol) touches.push_back(path.cum_length(seg) + t * len);
        }
    }
    std::sort(touches.begin(), touches.end());
    return touches;
}

}  // namespace detail

/// Cuts a polyline at every point where it touches a site, so that each piece
/// is internally disjoint from P. The input's endpoints must themselves lie on
/// sites; consequently every returned piece runs from site to site.
inline std::vector<PolylinePath> split_polyline_at_sites(const PointSet& ps,
                                                         const PolylinePath& path,
                                                         double tol = 1e-9) {
    if (path.dim() != ps.dim())
        throw std::invalid_argument("split_polyline_at_sites: dimension mismatch");
    std::vector<double> cuts = detail::site_touch_positions(ps, path, tol);
    cuts.insert(cuts.begin(), 0.0);
    cuts.push_back(path.length());
    std::vector<PolylinePath> pieces;
    const std::size_t d = path.dim();
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        const double s0 = cuts[c], s1 = cuts[c + 1];
        if (s1 - s0 <= tol) continue;
        std::vector<double> flat;
        Vec z0 = path.point_at(s0);
        flat.insert(flat.end(), z0.begin(), z0.end());
        for (std::size_t v = 0; v < path.num_vertices(); ++v) {
            const double s = path.cum_length(v);
            if (s <= s0 + tol || s >= s1 - tol) continue;
            flat.insert(flat.end(), path.vertex_ptr(v), path.vertex_ptr(v) + d);
        }
        Vec z1 = path.point_at(s1);
        flat.insert(flat.end(), z1.begin(), z1.end());
        pieces.emplace_back(std::move(flat), d);
    }
    return pieces;
}

/// Discretizes an (x,y)-path whose endpoints are sites and which is internally
/// disjoint from P. Returns the interior sequence of (arc position, point)
/// pairs; see the file comment for the two modes' defining properties.
inline std::vector<DiscretizePoint> discretize_path(const PointSet& ps, const PolylinePath& path,
                                                    DiscretizeMode mode, double param = 0.0) {
    if (path.dim() != ps.dim()) throw std::invalid_argument("discretize_path: dimension mismatch");
    const double L = path.length();
    const double scale = 1.0 + L;
    const double touch_tol = 1e-12 * scale;

    const auto [x_idx, dx] = ps.nearest_site(path.vertex_ptr(0));
    const auto [y_idx, dy] = ps.nearest_site(path.vertex_ptr(path.num_vertices() - 1));
    if (dx > touch_tol || dy > touch_tol)
        throw std::invalid_argument("discretize_path: path endpoints must be sites");

    // Internal disjointness: a site touched strictly inside the path is an error.
    for (double s : detail::site_touch_positions(ps, path, touch_tol))
        if (s > touch_tol && s < L - touch_tol)
            throw std::invalid_argument("discretize_path: path touches P internally");

    auto dnn_at = [&](double s) { return ps.dnn(path.point_at(s)); };
    auto nearest_at = [&](double s) { return ps.nearest_site(path.point_at(s)).first; };

    std::vector<double> seq;

    if (mode == DiscretizeMode::breaking) {
        // Anchor at the maximum of dnn along the path. Within a fixed nearest-site
        // piece the integrand is convex, so the maximum sits at a piece boundary:
        // a polyline vertex or a bisector crossing.
        std::vector<double> candidates;
        for (std::size_t v = 0; v < path.num_vertices(); ++v)
            candidates.push_back(path.cum_length(v));
        for (std::size_t seg = 0; seg + 1 < path.num_vertices(); ++seg) {
            std::vector<double> breaks;
            segment_nn_length_with_breaks(ps, path.vertex_ptr(seg), path.vertex_ptr(seg + 1),
                                          breaks);
            for (double b : breaks) candidates.push_back(path.cum_length(seg) + b);
        }
        double anchor = 0.0, anchor_dnn = -1.0;
        for (double s : candidates) {
            const double v = dnn_at(s);
            if (v > anchor_dnn) {
                anchor_dnn = v;
                anchor = s;
            }
        }
        if (anchor_dnn <= 0.0)
            throw std::invalid_argument("discretize_path: path has no interior clearance");

        // First pair straddles the anchor: 2*rho = (dnn(a-rho) + dnn(a+rho)) / 2.
        double lo = 0.0, hi = anchor_dnn;
        for (int it = 0; it < 200 && hi - lo > detail::kBisectTol; ++it) {
            const double rho = 0.5 * (lo + hi);
            const double g =
                2.0 * rho - 0.5 * (dnn_at(anchor - rho) + dnn_at(anchor + rho));
            (g < 0.0 ? lo : hi) = rho;
        }
        const double rho = 0.5 * (lo + hi);
        double left = anchor - rho, right = anchor + rho;
        seq.push_back(left);
        seq.push_back(right);

        // March right until the nearest site is y, then left until it is x.
        while (nearest_at(seq.back()) != y_idx) {
            if (seq.size() > detail::kMaxSequence)
                throw std::runtime_error("discretize_path: breaking sequence did not terminate");
            const double s_cur = seq.back();
            const double d_cur = dnn_at(s_cur);
            double a = s_cur, b = std::min(L, s_cur + 2.0 * d_cur + detail::kBisectTol);
            for (int it = 0; it < 200 && b - a > detail::kBisectTol; ++it) {
                const double m = 0.5 * (a + b);
                const double g = (m - s_cur) - 0.5 * (d_cur + dnn_at(m));
                (g < 0.0 ? a : b) = m;
            }
            seq.push_back(0.5 * (a + b));
        }
        std::vector<double> left_seq;
        while (nearest_at(left_seq.empty() ? left : left_seq.back()) != x_idx) {
            if (left_seq.size() > detail::kMaxSequence)
                throw std::runtime_error("discretize_path: breaking sequence did not terminate");
            const double s_cur = left_seq.empty() ? left : left_seq.back();
            const double d_cur = dnn_at(s_cur);
            double a = std::max(0.0, s_cur - 2.0 * d_cur - detail::kBisectTol), b = s_cur;
            for (int it = 0; it < 200 && b - a > detail::kBisectTol; ++it) {
                const double m = 0.5 * (a + b);
                const double g = (s_cur - m) - 0.5 * (d_cur + dnn_at(m));
                (g < 0.0 ? b : a) = m;
            }
            left_seq.push_back(0.5 * (a + b));
        }
        seq.insert(seq.begin(), left_seq.rbegin(), left_seq.rend());
    } else {
        if (!(param > 0.0 && param < 1.0))
            throw std::invalid_argument("discretize_path: epsilon_alpha parameter must be in (0,1)");
        if (ps.size() < 2)
            throw std::invalid_argument("discretize_path: epsilon_alpha mode needs >= 2 sites");

        // Start where |gamma(s) - x| first reaches eps * r_x / 2; both the first
        // and the second point then provably lie in x's Voronoi cell.
        const double rho0 = param * ps.voronoi_inradius(x_idx) * 0.5;
        const double* x = ps.point_ptr(x_idx);
        auto chord_from = [&](const Vec& c, double s) { return dist(c.data(), path.point_at(s).data(), ps.dim()); };

        auto first_crossing = [&](const Vec& c, double start, double target) -> double {
            // Walk vertices; within a segment the distance to a fixed point is
            // convex, so the first up-crossing brackets uniquely.
            double prev = start;
            const std::size_t seg = path.segment_at(start);
            for (std::size_t v = seg + 1; v < path.num_vertices(); ++v) {
                const double s_v = path.cum_length(v);
                if (chord_from(c, s_v) >= target) {
                    double a = prev, b = s_v;
                    for (int it = 0; it < 200 && b - a > detail::kBisectTol; ++it) {
                        const double m = 0.5 * (a + b);
                        (chord_from(c, m) < target ? a : b) = m;
                    }
                    return 0.5 * (a + b);
                }
                prev = s_v;
            }
            throw std::runtime_error("discretize_path: chord target not reached before path end");
        };

        seq.push_back(first_crossing(Vec(x, x + ps.dim()), 0.0, rho0));
        bool prev_in_y = nearest_at(seq.back()) == y_idx;
        while (true) {
            if (seq.size() > detail::kMaxSequence)
                throw std::runtime_error("discretize_path: epsilon sequence did not terminate");
            const double s_cur = seq.back();
            const Vec z = path.point_at(s_cur);
            const double target = param * ps.dnn(z);
            seq.push_back(first_crossing(z, s_cur, target));
            const bool in_y = nearest_at(seq.back()) == y_idx;
            if (in_y && prev_in_y) break;
            prev_in_y = in_y;
        }
    }

    std::vector<DiscretizePoint> out;
    out.reserve(seq.size());
    for (double s : seq) out.push_back({s, path.point_at(s)});
    return out;
}

}  // namespace nnm
