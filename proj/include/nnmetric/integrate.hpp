// nnmetric: exact integration of the nearest-site distance along segments and
// polylines. Within the Voronoi cell of one site the integrand along a line is
// sqrt((s - t0)^2 + h^2), which has the closed-form antiderivative
//   F(t) = (t sqrt(t^2 + h^2) + h^2 asinh(t / h)) / 2,
// so a segment integrates exactly once it is split at bisector crossings. Along
// a line every squared site distance is an affine function of the arc parameter
// after subtracting s^2, so each crossing is an exact linear solve.
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

/// Antiderivative of sqrt(t^2 + h2) evaluated between ts and te (h2 >= 0).
inline double sqrt_quad_integral(double ts, double te, double h2) {
    if (h2 <= 0.0) {
        // Integrand degenerates to |t|.
        return 0.5 * (te * std::abs(te) - ts * std::abs(ts));
    }
    const double h = std::sqrt(h2);
    const double fe = te * std::sqrt(te * te + h2) + h2 * std::asinh(te / h);
    const double fs = ts * std::sqrt(ts * ts + h2) + h2 * std::asinh(ts / h);
    return 0.5 * (fe - fs);
}

struct SegmentSite {
    std::uint32_t index;  // site index in the point set
    double t;             // arc position of the orthogonal projection onto the line
    double c;             // squared distance from the segment start point
    double h2;            // squared distance from the line itself
};

/// Sweeps the lower envelope of per-site distances along the segment [a, b] and
/// invokes `piece(s0, s1, site)` for each maximal interval with a fixed nearest
/// site. Returns the exact integral of the nearest-site distance.
template <class PieceFn>
double segment_nn_sweep(const PointSet& ps, const double* a, const double* b, PieceFn&& piece) {
    const std::size_t d = ps.dim();
    const double L = dist(a, b, d);
    if (L == 0.0) throw std::invalid_argument("segment_nn_length: degenerate segment");

    thread_local std::vector<SegmentSite> cand;
    thread_local std::vector<std::uint32_t> hits;
    cand.clear();

    Vec u(d);
    for (std::size_t k = 0; k < d; ++k) u[k] = (b[k] - a[k]) / L;

    auto push_candidate = [&](std::uint32_t i) {
        const double* p = ps.point_ptr(i);
        double t = 0.0, c = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            const double w = p[k] - a[k];
            t += w * u[k];
            c += w * w;
        }
        cand.push_back({i, t, c, std::max(0.0, c - t * t)});
    };

    if (ps.size() <= 64) {
        for (std::size_t i = 0; i < ps.size(); ++i) push_candidate(std::uint32_t(i));
    } else {
        // Any site nearest somewhere on the segment lies within
        // max(dnn(a), dnn(b)) + L of the midpoint (Lipschitz bound).
        Vec mid(d);
        for (std::size_t k = 0; k < d; ++k) mid[k] = 0.5 * (a[k] + b[k]);
        const double r = std::max(ps.dnn(a), ps.dnn(b)) + L;
        hits.clear();
        ps.tree().range(mid.data(), r * (1.0 + 1e-12), hits);
        for (std::uint32_t i : hits) push_candidate(i);
    }

    // Nearest site at the start: minimize squared distance, break ties by the
    // steepest improving slope (largest t), then lowest index.
    std::size_t cur = 0;
    {
        double bestD = cand[0].t * cand[0].t + cand[0].h2;
        for (std::size_t j = 1; j < cand.size(); ++j) {
            const double dj = cand[j].t * cand[j].t + cand[j].h2;
            if (dj < bestD ||
                (dj == bestD && (cand[j].t > cand[cur].t ||
                                 (cand[j].t == cand[cur].t && cand[j].index < cand[cur].index)))) {
                bestD = dj;
                cur = j;
            }
        }
    }

    // Envelope walk. All squared site distances along the line share the s^2
    // term, so pairwise differences are affine in s and each owner, once
    // overtaken, never returns. The site producing the earliest crossing IS
    // the next owner (re-evaluating distances at the crossing point would
    // compare two equal values through rounding noise); ties at one crossing
    // go to the largest t, which dominates beyond it.
    double total = 0.0;
    double s_cur = 0.0;
    const std::size_t max_iter = cand.size() + 1;
    for (std::size_t iter = 0;; ++iter) {
        if (iter > max_iter)
            throw std::runtime_error("segment_nn_length: envelope sweep failed to terminate");
        double s_next = L;
        std::size_t owner_next = cand.size();
        for (std::size_t j = 0; j < cand.size(); ++j) {
            if (j == cur || cand[j].t <= cand[cur].t) continue;  // never overtakes
            const double s = (cand[j].c - cand[cur].c) / (2.0 * (cand[j].t - cand[cur].t));
            if (s <= s_cur || s >= s_next) continue;
            if (s < s_next) {
                s_next = s;
                owner_next = j;
            }
        }
        // Co-located crossings: keep the steepest improver among them.
        if (owner_next != cand.size()) {
            for (std::size_t j = 0; j < cand.size(); ++j) {
                if (j == cur || cand[j].t <= cand[cur].t) continue;
                const double s = (cand[j].c - cand[cur].c) / (2.0 * (cand[j].t - cand[cur].t));
                if (s == s_next && (cand[j].t > cand[owner_next].t ||
                                    (cand[j].t == cand[owner_next].t &&
                                     cand[j].index < cand[owner_next].index)))
                    owner_next = j;
            }
        }
        const double s_end = owner_next == cand.size() ? L : s_next;
        total += sqrt_quad_integral(s_cur - cand[cur].t, s_end - cand[cur].t, cand[cur].h2);
        piece(s_cur, s_end, std::size_t(cand[cur].index));
        if (owner_next == cand.size()) break;
        s_cur = s_next;
        cur = owner_next;
    }
    return total;
}

}  // namespace detail

/// Exact value of the nearest-neighbor length of the segment [a, b].
inline double segment_nn_length(const PointSet& ps, const double* a, const double* b) {
    return detail::segment_nn_sweep(ps, a, b, [](double, double, std::size_t) {});
}

inline double segment_nn_length(const PointSet& ps, const Vec& a, const Vec& b) {
    if (a.size() != ps.dim() || b.size() != ps.dim())
        throw std::invalid_argument("segment_nn_length: dimension mismatch");
    return segment_nn_length(ps, a.data(), b.data());
}

/// Exact segment integral plus the interior arc positions where the nearest
/// site changes (useful for locating extrema of dnn along the segment: within
/// each piece the integrand is convex, so extrema sit at piece boundaries).
inline double segment_nn_length_with_breaks(const PointSet& ps, const double* a, const double* b,
                                            std::vector<double>& breaks) {
    const double L = dist(a, b, ps.dim());
    return detail::segment_nn_sweep(ps, a, b, [&](double, double s1, std::size_t) {
        if (s1 < L) breaks.push_back(s1);
    });
}

/// Exact nearest-neighbor length of a polyline: the sum of its segment values.
inline double polyline_nn_length(const PointSet& ps, const PolylinePath& path) {
    if (path.dim() != ps.dim())
        throw std::invalid_argument("polyline_nn_length: dimension mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < path.num_vertices(); ++i)
        total += segment_nn_length(ps, path.vertex_ptr(i), path.vertex_ptr(i + 1));
    return total;
}

}  // namespace nnm
