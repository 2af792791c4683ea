// nnmetric: delta-sample generation by adaptive quadtree refinement.
//
// A delta-sample S of a domain (minus the shrunken Voronoi in-balls
// B(p_i, u_i), u_i = (1 - delta^{2/3}) r_i) is a point set with
// d(z, S) <= delta * dnn(z) for every admissible z. Cells are refined while
//
//   diam(c) > (delta/4) * max(dist(center(c), P) - diam(c)/2, u_min/2)
//
// and admissible leaf centers are emitted. The first term makes cell radius
// at most (delta/8) * dnn anywhere in the cell; the u_min/2 floor stops
// refinement below the scale where dnn is bounded by exclusion radii, keeping
// the tree finite. Cells entirely inside an open exclusion ball are pruned
// (only the nearest site's ball can contain a point, because in-balls are
// disjoint). The sample property is enforced statistically by the test suite
// rather than trusted from this sketch.
// SPDX-License-Identifier: MIT
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "nnmetric/core.hpp"

namespace nnm {

/// u_i = (1 - delta^{2/3}) * voronoi_inradius(i) for every site.
inline std::vector<double> compute_exclusion_radii(const PointSet& ps, double delta) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("compute_exclusion_radii: delta must be in (0,1)");
    if (ps.size() < 2) throw std::invalid_argument("compute_exclusion_radii: need >= 2 sites");
    const double shrink = 1.0 - std::pow(delta, 2.0 / 3.0);
    std::vector<double> u(ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i) u[i] = shrink * ps.voronoi_inradius(i);
    return u;
}

struct DeltaSample {
    double delta = 0.0;
    BoundingBox domain{Vec{0.0}, Vec{0.0}};
    std::vector<double> exclusion_radii;  // u_i, indexed like the sites
    std::vector<double> steiner_flat;     // |S| * dim coordinates
    std::size_t dim = 0;
    // build statistics
    std::size_t num_sites = 0;
    double spread = 0.0;  // largest / smallest pairwise site distance
    std::size_t leaf_count = 0;
    std::size_t max_depth = 0;

    std::size_t size() const { return dim == 0 ? 0 : steiner_flat.size() / dim; }
    const double* point_ptr(std::size_t k) const { return steiner_flat.data() + k * dim; }
    Vec point(std::size_t k) const {
        return Vec(point_ptr(k), point_ptr(k) + dim);
    }
};

/// Builds a delta-sample of `domain` for the sites in `ps` by quadtree/octree
/// refinement (deterministic traversal). The domain must contain every site.
inline DeltaSample generate_delta_sample(const PointSet& ps, const BoundingBox& domain,
                                         double delta) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("generate_delta_sample: delta must be in (0,1)");
    if (domain.dim() != ps.dim())
        throw std::invalid_argument("generate_delta_sample: dimension mismatch");
    for (std::size_t i = 0; i < ps.size(); ++i)
        if (!domain.contains(ps.point_ptr(i)))
            throw std::invalid_argument("generate_delta_sample: domain must contain all sites");
    if (!(domain.max_extent() > 0.0))
        throw std::invalid_argument("generate_delta_sample: domain too small");

    DeltaSample out;
    out.delta = delta;
    out.domain = domain;
    out.dim = ps.dim();
    out.num_sites = ps.size();
    out.spread = ps.spread();
    out.exclusion_radii = compute_exclusion_radii(ps, delta);

    double u_min = out.exclusion_radii[0];
    for (double u : out.exclusion_radii) u_min = std::min(u_min, u);
    if (!(u_min > 0.0))
        throw std::invalid_argument("generate_delta_sample: degenerate exclusion radii");

    const std::size_t d = ps.dim();
    // Only axes with positive extent are split; splitting a flat axis would
    // duplicate cells without refining anything.
    std::vector<std::size_t> split_axes;
    for (std::size_t k = 0; k < d; ++k)
        if (domain.hi[k] > domain.lo[k]) split_axes.push_back(k);
    const std::size_t children = std::size_t(1) << split_axes.size();
    constexpr std::size_t kMaxDepth = 64;

    // Explicit stack of (lo, hi, depth); children pushed in reverse index
    // order so they are processed in ascending order (fixed traversal).
    struct Cell {
        Vec lo, hi;
        std::size_t depth;
    };
    std::vector<Cell> stack;
    stack.push_back({domain.lo, domain.hi, 0});
    Vec center(d);

    while (!stack.empty()) {
        Cell c = std::move(stack.back());
        stack.pop_back();
        double diam2 = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            center[k] = 0.5 * (c.lo[k] + c.hi[k]);
            diam2 += (c.hi[k] - c.lo[k]) * (c.hi[k] - c.lo[k]);
        }
        const double diam = std::sqrt(diam2);
        const auto [site, d_c] = ps.nearest_site(center.data());

        // Prune cells entirely inside the nearest site's open exclusion ball.
        if (d_c + 0.5 * diam < out.exclusion_radii[site]) {
            ++out.leaf_count;
            out.max_depth = std::max(out.max_depth, c.depth);
            continue;
        }

        const double threshold = (delta / 4.0) * std::max(d_c - 0.5 * diam, 0.5 * u_min);
        if (diam > threshold) {
            if (c.depth + 1 > kMaxDepth)
                throw std::runtime_error("generate_delta_sample: refinement too deep");
            for (std::size_t mask = children; mask-- > 0;) {
                Cell child{c.lo, c.hi, c.depth + 1};
                for (std::size_t a = 0; a < split_axes.size(); ++a) {
                    const std::size_t k = split_axes[a];
                    if (mask & (std::size_t(1) << a))
                        child.lo[k] = center[k];
                    else
                        child.hi[k] = center[k];
                }
                stack.push_back(std::move(child));
            }
            continue;
        }

        ++out.leaf_count;
        out.max_depth = std::max(out.max_depth, c.depth);
        if (d_c >= out.exclusion_radii[site])  // admissible center
            out.steiner_flat.insert(out.steiner_flat.end(), center.begin(), center.end());
    }
    return out;
}

struct SampleSizeReport {
    std::size_t size = 0;   // |S|
    std::size_t num_sites = 0;
    double delta = 0.0;
    double spread = 0.0;
    double ratio = 0.0;  // |S| / (n log spread); 0 when log spread is 0
};

/// Summary statistics of a sample for growth-trend inspection.
inline SampleSizeReport sample_size_report(const DeltaSample& sample) {
    SampleSizeReport r;
    r.size = sample.size();
    r.num_sites = sample.num_sites;
    r.delta = sample.delta;
    r.spread = sample.spread;
    const double log_spread = sample.spread > 0.0 ? std::log(sample.spread) : 0.0;
    if (log_spread > 0.0 && sample.num_sites > 0)
        r.ratio = static_cast<double>(r.size) /
                  (static_cast<double>(sample.num_sites) * log_spread);
    return r;
}

}  // namespace nnm
