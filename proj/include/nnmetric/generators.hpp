// nnmetric: seeded point-cloud generators for tests, demos, and the CLI.
// SPDX-License-Identifier: MIT
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "nnmetric/core.hpp"

namespace nnm {

enum class PointKind { uniform, clusters, star, collinear };

inline PointKind parse_point_kind(const std::string& s) {
    if (s == "uniform") return PointKind::uniform;
    if (s == "clusters") return PointKind::clusters;
    if (s == "star") return PointKind::star;
    if (s == "collinear") return PointKind::collinear;
    throw std::invalid_argument("unknown point kind: " + s);
}

/// Deterministic point cloud (flat row-major coordinates). Same (kind, n, d,
/// seed) always produces identical bytes.
inline std::vector<double> generate_points(PointKind kind, std::size_t n, std::size_t d,
                                           std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("generate_points: n must be >= 2");
    if (d < 1) throw std::invalid_argument("generate_points: d must be >= 1");
    std::mt19937_64 rng(seed);
    std::vector<double> pts;
    pts.reserve(n * d);

    switch (kind) {
        case PointKind::uniform: {
            std::uniform_real_distribution<double> u(0.0, 1.0);
            for (std::size_t i = 0; i < n * d; ++i) pts.push_back(u(rng));
            break;
        }
        case PointKind::clusters: {
            // Two blobs of side 0.5 with centers 3 apart: the inter-blob gap
            // (>= 3 - sqrt(d)/2) exceeds the intra-blob diameter (sqrt(d)/2)
            // for every d <= 16.
            if (d > 16) throw std::invalid_argument("generate_points: clusters needs d <= 16");
            std::uniform_real_distribution<double> u(-0.25, 0.25);
            for (std::size_t i = 0; i < n; ++i) {
                const double cx = (i < n / 2) ? 0.0 : 3.0;
                for (std::size_t k = 0; k < d; ++k) pts.push_back((k == 0 ? cx : 0.0) + u(rng));
            }
            break;
        }
        case PointKind::star: {
            // Hub at the origin plus evenly dense spokes along the +-axis
            // directions, reaching radius 1.
            const std::size_t spokes = 2 * d;
            pts.assign(d, 0.0);  // hub
            std::size_t placed = 1;
            for (std::size_t s = 0; placed < n; s = (s + 1) % spokes) {
                const std::size_t axis = s / 2;
                const double sign = (s % 2 == 0) ? 1.0 : -1.0;
                // Walk outward: spoke s receives its i-th point at radius
                // (i+1)/m where m = points this spoke will hold in total.
                const std::size_t per = (n - 1 + spokes - 1) / spokes;
                const std::size_t idx = (placed - 1) / spokes;  // round-robin depth
                Vec p(d, 0.0);
                p[axis] = sign * (double(idx) + 1.0) / double(per);
                pts.insert(pts.end(), p.begin(), p.end());
                ++placed;
            }
            break;
        }
        case PointKind::collinear: {
            // {0, 1, ..., n-1} along the first axis: unit spacing.
            for (std::size_t i = 0; i < n; ++i) {
                pts.push_back(double(i));
                for (std::size_t k = 1; k < d; ++k) pts.push_back(0.0);
            }
            break;
        }
    }
    return pts;
}

inline PointSet generate_point_set(PointKind kind, std::size_t n, std::size_t d,
                                   std::uint64_t seed) {
    return PointSet(generate_points(kind, n, d, seed), d);
}

}  // namespace nnm
