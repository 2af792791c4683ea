// nnmetric: polyline paths with arc-length parameterization.
// SPDX-License-Identifier: MIT
#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "nnmetric/core.hpp"

namespace nnm {

/// Ordered vertex sequence in R^d, the unit of geodesic representation.
/// Consecutive vertices are distinct; cumulative arc lengths are derived at
/// construction and immutable afterwards.
class PolylinePath {
public:
    PolylinePath(std::vector<double> flat, std::size_t dim) : coords_(std::move(flat)), d_(dim) {
        if (d_ == 0) throw std::invalid_argument("PolylinePath: dimension must be >= 1");
        if (coords_.size() % d_ != 0)
            throw std::invalid_argument("PolylinePath: coordinate count not a multiple of dimension");
        m_ = coords_.size() / d_;
        if (m_ < 2) throw std::invalid_argument("PolylinePath: needs at least 2 vertices");
        cum_.resize(m_);
        cum_[0] = 0.0;
        for (std::size_t i = 1; i < m_; ++i) {
            const double len = dist(vertex_ptr(i - 1), vertex_ptr(i), d_);
            if (len == 0.0)
                throw std::invalid_argument("PolylinePath: consecutive vertices must be distinct");
            cum_[i] = cum_[i - 1] + len;
        }
    }

    explicit PolylinePath(const std::vector<Vec>& vertices)
        : PolylinePath(flatten(vertices), vertices.empty() ? 0 : vertices.front().size()) {}

    std::size_t dim() const { return d_; }
    std::size_t num_vertices() const { return m_; }
    std::size_t num_segments() const { return m_ - 1; }
    const double* vertex_ptr(std::size_t i) const { return coords_.data() + i * d_; }
    Vec vertex(std::size_t i) const {
        if (i >= m_) throw std::out_of_range("PolylinePath: vertex index out of range");
        return Vec(vertex_ptr(i), vertex_ptr(i) + d_);
    }

    /// Total Euclidean length.
    double length() const { return cum_.back(); }
    /// Arc-length position of vertex i (nondecreasing, cum(0) = 0).
    double cum_length(std::size_t i) const { return cum_[i]; }

    /// Index of the segment containing arc-length position s (clamped to the path).
    std::size_t segment_at(double s) const {
        if (s <= 0.0) return 0;
        if (s >= cum_.back()) return m_ - 2;
        const auto it = std::upper_bound(cum_.begin(), cum_.end(), s);
        return std::size_t(it - cum_.begin()) - 1;
    }

    /// Point at arc-length position s (clamped to [0, length]).
    Vec point_at(double s) const {
        const std::size_t i = segment_at(s);
        const double seg = cum_[i + 1] - cum_[i];
        double t = (std::min(std::max(s, 0.0), cum_.back()) - cum_[i]) / seg;
        Vec z(d_);
        const double* a = vertex_ptr(i);
        const double* b = vertex_ptr(i + 1);
        for (std::size_t k = 0; k < d_; ++k) z[k] = a[k] + t * (b[k] - a[k]);
        return z;
    }

private:
    static std::vector<double> flatten(const std::vector<Vec>& pts) {
        std::vector<double> flat;
        if (pts.empty()) return flat;
        const std::size_t d = pts.front().size();
        flat.reserve(pts.size() * d);
        for (const Vec& p : pts) {
            if (p.size() != d) throw std::invalid_argument("PolylinePath: mixed dimensions");
            flat.insert(flat.end(), p.begin(), p.end());
        }
        return flat;
    }

    std::vector<double> coords_;
    std::size_t d_ = 0, m_ = 0;
    std::vector<double> cum_;
};

}  // namespace nnm
