// nnmetric: point sets, nearest-site queries, and the spatial index they share.
// SPDX-License-Identifier: MIT
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nnm {

/// Dense coordinate vector; dimension is a runtime property.
using Vec = std::vector<double>;

inline double dot(const double* a, const double* b, std::size_t d) {
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) s += a[k] * b[k];
    return s;
}

inline double dist2(const double* a, const double* b, std::size_t d) {
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        const double t = a[k] - b[k];
        s += t * t;
    }
    return s;
}

inline double dist(const double* a, const double* b, std::size_t d) {
    return std::sqrt(dist2(a, b, d));
}

inline double dist(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("nnm::dist: dimension mismatch");
    return dist(a.data(), b.data(), a.size());
}

inline double norm(const Vec& a) { return std::sqrt(dot(a.data(), a.data(), a.size())); }

/// Axis-aligned box; the only convex domain shape used by the samplers and oracles.
struct BoundingBox {
    Vec lo;
    Vec hi;

    BoundingBox() = default;
    BoundingBox(Vec lo_, Vec hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
        if (lo.size() != hi.size() || lo.empty())
            throw std::invalid_argument("BoundingBox: lo/hi dimension mismatch");
        for (std::size_t k = 0; k < lo.size(); ++k)
            if (!(lo[k] <= hi[k])) throw std::invalid_argument("BoundingBox: min > max on an axis");
    }

    std::size_t dim() const { return lo.size(); }

    bool contains(const double* z, double eps = 0.0) const {
        for (std::size_t k = 0; k < lo.size(); ++k)
            if (z[k] < lo[k] - eps || z[k] > hi[k] + eps) return false;
        return true;
    }
    bool contains(const Vec& z, double eps = 0.0) const {
        if (z.size() != dim()) throw std::invalid_argument("BoundingBox::contains: dimension mismatch");
        return contains(z.data(), eps);
    }

    Vec center() const {
        Vec c(dim());
        for (std::size_t k = 0; k < dim(); ++k) c[k] = 0.5 * (lo[k] + hi[k]);
        return c;
    }

    double diagonal() const {
        double s = 0.0;
        for (std::size_t k = 0; k < dim(); ++k) {
            const double t = hi[k] - lo[k];
            s += t * t;
        }
        return std::sqrt(s);
    }

    double max_extent() const {
        double m = 0.0;
        for (std::size_t k = 0; k < dim(); ++k) m = std::max(m, hi[k] - lo[k]);
        return m;
    }

    BoundingBox inflated(double margin) const {
        BoundingBox b = *this;
        for (std::size_t k = 0; k < dim(); ++k) {
            b.lo[k] -= margin;
            b.hi[k] += margin;
        }
        return b;
    }

    /// Grow symmetrically about the center until every axis has the same extent.
    BoundingBox squared_up() const {
        const double m = max_extent();
        BoundingBox b = *this;
        for (std::size_t k = 0; k < dim(); ++k) {
            const double pad = 0.5 * (m - (hi[k] - lo[k]));
            b.lo[k] -= pad;
            b.hi[k] += pad;
        }
        return b;
    }

    static BoundingBox of_points(const double* pts, std::size_t n, std::size_t d) {
        if (n == 0 || d == 0) throw std::invalid_argument("BoundingBox::of_points: empty input");
        Vec lo(pts, pts + d), hi(pts, pts + d);
        for (std::size_t i = 1; i < n; ++i)
            for (std::size_t k = 0; k < d; ++k) {
                lo[k] = std::min(lo[k], pts[i * d + k]);
                hi[k] = std::max(hi[k], pts[i * d + k]);
            }
        return BoundingBox(std::move(lo), std::move(hi));
    }
};

/// Bucketed kd-tree over a flat coordinate array owned by the caller.
///
/// Supports exact nearest / two-nearest / fixed-radius queries in any dimension.
/// Ties on distance are broken toward the lowest point index so that query
/// results are deterministic. The tree never copies the coordinates; the owner
/// must keep them alive and unchanged.
class KdTree {
public:
    KdTree() = default;

    KdTree(const double* pts, std::size_t n, std::size_t d) { build(pts, n, d); }

    void build(const double* pts, std::size_t n, std::size_t d) {
        if (n == 0 || d == 0) throw std::invalid_argument("KdTree: empty input");
        pts_ = pts;
        n_ = n;
        d_ = d;
        idx_.resize(n);
        std::iota(idx_.begin(), idx_.end(), std::uint32_t(0));
        nodes_.clear();
        nodes_.reserve(2 * (n / kLeafSize + 1));
        root_ = build_rec(0, n);
    }

    std::size_t size() const { return n_; }
    bool empty() const { return n_ == 0; }

    /// Index and squared distance of the nearest point; `skip` is excluded if valid.
    std::pair<std::uint32_t, double> nearest(const double* q,
                                             std::uint32_t skip = kNoSkip) const {
        Best b;
        nearest_rec(root_, q, skip, b);
        return {b.idx, b.d2};
    }

    /// The two nearest distinct points, ordered by (distance, index).
    struct Pair2 {
        std::uint32_t idx1 = kNoSkip, idx2 = kNoSkip;
        double d2_1 = inf(), d2_2 = inf();
    };
    Pair2 nearest2(const double* q) const {
        Pair2 b;
        nearest2_rec(root_, q, b);
        return b;
    }

    /// Appends the indices of all points with dist(q, p) <= r to `out` (unsorted).
    void range(const double* q, double r, std::vector<std::uint32_t>& out) const {
        range_rec(root_, q, r * r, out);
    }

    /// The k nearest points to q, ordered by (distance, index). Fewer than k
    /// results when the tree is smaller. `out` is replaced.
    void knn(const double* q, std::size_t k, std::vector<std::pair<double, std::uint32_t>>& out)
        const {
        out.clear();
        if (k == 0) return;
        knn_rec(root_, q, k, out);
        std::sort_heap(out.begin(), out.end());
    }

    static constexpr std::uint32_t kNoSkip = 0xffffffffu;

private:
    static constexpr std::size_t kLeafSize = 16;
    static double inf() { return std::numeric_limits<double>::infinity(); }

    struct Node {
        double split = 0.0;
        std::int32_t left = -1, right = -1;  // < 0: leaf; payload in leaf fields
        std::uint32_t begin = 0, end = 0;    // leaf range in idx_
        std::uint8_t axis = 0;
    };

    struct Best {
        std::uint32_t idx = kNoSkip;
        double d2 = inf();
    };

    const double* pt(std::uint32_t i) const { return pts_ + std::size_t(i) * d_; }

    std::int32_t build_rec(std::size_t begin, std::size_t end) {
        Node node;
        if (end - begin <= kLeafSize) {
            node.begin = std::uint32_t(begin);
            node.end = std::uint32_t(end);
            nodes_.push_back(node);
            return std::int32_t(nodes_.size()) - 1;
        }
        // Split on the widest axis at the median.
        Vec lo(pts_ + std::size_t(idx_[begin]) * d_, pts_ + std::size_t(idx_[begin]) * d_ + d_);
        Vec hi = lo;
        for (std::size_t i = begin + 1; i < end; ++i) {
            const double* p = pt(idx_[i]);
            for (std::size_t k = 0; k < d_; ++k) {
                lo[k] = std::min(lo[k], p[k]);
                hi[k] = std::max(hi[k], p[k]);
            }
        }
        std::size_t axis = 0;
        for (std::size_t k = 1; k < d_; ++k)
            if (hi[k] - lo[k] > hi[axis] - lo[axis]) axis = k;
        const std::size_t mid = (begin + end) / 2;
        std::nth_element(idx_.begin() + begin, idx_.begin() + mid, idx_.begin() + end,
                         [&](std::uint32_t a, std::uint32_t b) {
                             const double va = pt(a)[axis], vb = pt(b)[axis];
                             return va < vb || (va == vb && a < b);
                         });
        node.axis = std::uint8_t(axis);
        node.split = pt(idx_[mid])[axis];
        nodes_.push_back(node);
        const std::int32_t self = std::int32_t(nodes_.size()) - 1;
        const std::int32_t l = build_rec(begin, mid);
        const std::int32_t r = build_rec(mid, end);
        nodes_[self].left = l;
        nodes_[self].right = r;
        return self;
    }

    void consider(std::uint32_t i, const double* q, std::uint32_t skip, Best& b) const {
        if (i == skip) return;
        const double d2 = dist2(q, pt(i), d_);
        if (d2 < b.d2 || (d2 == b.d2 && i < b.idx)) {
            b.d2 = d2;
            b.idx = i;
        }
    }

    void nearest_rec(std::int32_t ni, const double* q, std::uint32_t skip, Best& b) const {
        const Node& node = nodes_[std::size_t(ni)];
        if (node.left < 0) {
            for (std::uint32_t i = node.begin; i < node.end; ++i) consider(idx_[i], q, skip, b);
            return;
        }
        const double diff = q[node.axis] - node.split;
        const std::int32_t near = diff < 0 ? node.left : node.right;
        const std::int32_t far = diff < 0 ? node.right : node.left;
        nearest_rec(near, q, skip, b);
        if (diff * diff <= b.d2) nearest_rec(far, q, skip, b);
    }

    void consider2(std::uint32_t i, const double* q, Pair2& b) const {
        const double d2 = dist2(q, pt(i), d_);
        const bool before1 = d2 < b.d2_1 || (d2 == b.d2_1 && i < b.idx1);
        if (before1) {
            b.idx2 = b.idx1;
            b.d2_2 = b.d2_1;
            b.idx1 = i;
            b.d2_1 = d2;
            return;
        }
        if (d2 < b.d2_2 || (d2 == b.d2_2 && i < b.idx2)) {
            b.idx2 = i;
            b.d2_2 = d2;
        }
    }

    void nearest2_rec(std::int32_t ni, const double* q, Pair2& b) const {
        const Node& node = nodes_[std::size_t(ni)];
        if (node.left < 0) {
            for (std::uint32_t i = node.begin; i < node.end; ++i) consider2(idx_[i], q, b);
            return;
        }
        const double diff = q[node.axis] - node.split;
        const std::int32_t near = diff < 0 ? node.left : node.right;
        const std::int32_t far = diff < 0 ? node.right : node.left;
        nearest2_rec(near, q, b);
        if (diff * diff <= b.d2_2) nearest2_rec(far, q, b);
    }

    // Bounded max-heap of (d2, idx); the heap top is the current k-th best.
    void knn_rec(std::int32_t ni, const double* q, std::size_t k,
                 std::vector<std::pair<double, std::uint32_t>>& heap) const {
        const Node& node = nodes_[std::size_t(ni)];
        if (node.left < 0) {
            for (std::uint32_t ii = node.begin; ii < node.end; ++ii) {
                const std::uint32_t i = idx_[ii];
                const std::pair<double, std::uint32_t> cand{dist2(q, pt(i), d_), i};
                if (heap.size() < k) {
                    heap.push_back(cand);
                    std::push_heap(heap.begin(), heap.end());
                } else if (cand < heap.front()) {
                    std::pop_heap(heap.begin(), heap.end());
                    heap.back() = cand;
                    std::push_heap(heap.begin(), heap.end());
                }
            }
            return;
        }
        const double diff = q[node.axis] - node.split;
        const std::int32_t near = diff < 0 ? node.left : node.right;
        const std::int32_t far = diff < 0 ? node.right : node.left;
        knn_rec(near, q, k, heap);
        if (heap.size() < k || diff * diff <= heap.front().first) knn_rec(far, q, k, heap);
    }

    void range_rec(std::int32_t ni, const double* q, double r2,
                   std::vector<std::uint32_t>& out) const {
        const Node& node = nodes_[std::size_t(ni)];
        if (node.left < 0) {
            for (std::uint32_t i = node.begin; i < node.end; ++i)
                if (dist2(q, pt(idx_[i]), d_) <= r2) out.push_back(idx_[i]);
            return;
        }
        const double diff = q[node.axis] - node.split;
        const std::int32_t near = diff < 0 ? node.left : node.right;
        const std::int32_t far = diff < 0 ? node.right : node.left;
        range_rec(near, q, r2, out);
        if (diff * diff <= r2) range_rec(far, q, r2, out);
    }

    const double* pts_ = nullptr;
    std::size_t n_ = 0, d_ = 0;
    std::vector<std::uint32_t> idx_;
    std::vector<Node> nodes_;
    std::int32_t root_ = -1;
};

/// The input sites P: pairwise-distinct points of a common dimension with a
/// spatial index. Immutable after construction; all queries are const and safe
/// for concurrent readers.
class PointSet {
public:
    PointSet(std::vector<double> flat, std::size_t dim) : coords_(std::move(flat)), d_(dim) {
        if (d_ == 0) throw std::invalid_argument("PointSet: dimension must be >= 1");
        if (coords_.empty() || coords_.size() % d_ != 0)
            throw std::invalid_argument("PointSet: coordinate count not a multiple of dimension");
        n_ = coords_.size() / d_;
        for (double c : coords_)
            if (!std::isfinite(c)) throw std::invalid_argument("PointSet: non-finite coordinate");
        reject_duplicates();
        tree_.build(coords_.data(), n_, d_);
        if (n_ >= 2) {
            inradii_.resize(n_);
            for (std::size_t i = 0; i < n_; ++i) {
                const auto [j, d2] = tree_.nearest(point_ptr(i), std::uint32_t(i));
                (void)j;
                inradii_[i] = 0.5 * std::sqrt(d2);
            }
        }
    }

    explicit PointSet(const std::vector<Vec>& pts)
        : PointSet(flatten(pts), pts.empty() ? 0 : pts.front().size()) {}

    std::size_t size() const { return n_; }
    std::size_t dim() const { return d_; }
    const double* data() const { return coords_.data(); }
    const double* point_ptr(std::size_t i) const { return coords_.data() + i * d_; }
    Vec point(std::size_t i) const {
        check_index(i);
        return Vec(point_ptr(i), point_ptr(i) + d_);
    }
    const KdTree& tree() const { return tree_; }

    /// Index of the site minimizing |z - p_i| plus that distance; ties go to the
    /// lowest index.
    std::pair<std::size_t, double> nearest_site(const double* z) const {
        const auto [i, d2] = tree_.nearest(z);
        return {i, std::sqrt(d2)};
    }
    std::pair<std::size_t, double> nearest_site(const Vec& z) const {
        check_dim(z);
        return nearest_site(z.data());
    }

    /// Distance to the nearest site (the integrand of the nearest-neighbor metric).
    double dnn(const double* z) const { return nearest_site(z).second; }
    double dnn(const Vec& z) const { return nearest_site(z).second; }

    /// Distance from z to its second-nearest site.
    double second_nearest_distance(const double* z) const {
        if (n_ < 2) throw std::invalid_argument("second_nearest_distance: needs at least 2 sites");
        return std::sqrt(tree_.nearest2(z).d2_2);
    }
    double second_nearest_distance(const Vec& z) const {
        check_dim(z);
        return second_nearest_distance(z.data());
    }

    /// Half the distance from p_i to the rest of P; equals the inradius of the
    /// Voronoi cell of p_i.
    double voronoi_inradius(std::size_t i) const {
        check_index(i);
        if (n_ < 2) throw std::invalid_argument("voronoi_inradius: unbounded cell (n < 2)");
        return inradii_[i];
    }

    BoundingBox bbox() const { return BoundingBox::of_points(coords_.data(), n_, d_); }

    /// Ratio of the largest to the smallest pairwise distance.
    double spread() const {
        if (n_ < 2) throw std::invalid_argument("spread: needs at least 2 sites");
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = i + 1; j < n_; ++j) {
                const double d = dist(point_ptr(i), point_ptr(j), d_);
                lo = std::min(lo, d);
                hi = std::max(hi, d);
            }
        return hi / lo;
    }

private:
    static std::vector<double> flatten(const std::vector<Vec>& pts) {
        std::vector<double> flat;
        if (pts.empty()) return flat;
        const std::size_t d = pts.front().size();
        flat.reserve(pts.size() * d);
        for (const Vec& p : pts) {
            if (p.size() != d) throw std::invalid_argument("PointSet: mixed dimensions");
            flat.insert(flat.end(), p.begin(), p.end());
        }
        return flat;
    }

    void reject_duplicates() const {
        std::vector<std::uint32_t> order(n_);
        std::iota(order.begin(), order.end(), 0u);
        std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
            return std::lexicographical_compare(point_ptr(a), point_ptr(a) + d_, point_ptr(b),
                                                point_ptr(b) + d_);
        });
        for (std::size_t i = 1; i < n_; ++i)
            if (std::equal(point_ptr(order[i - 1]), point_ptr(order[i - 1]) + d_,
                           point_ptr(order[i])))
                throw std::invalid_argument("PointSet: duplicate points rejected (indices " +
                                            std::to_string(order[i - 1]) + ", " +
                                            std::to_string(order[i]) + ")");
    }

    void check_dim(const Vec& z) const {
        if (z.size() != d_) throw std::invalid_argument("PointSet: query dimension mismatch");
    }
    void check_index(std::size_t i) const {
        if (i >= n_) throw std::out_of_range("PointSet: site index out of range");
    }

    std::vector<double> coords_;
    std::size_t d_ = 0, n_ = 0;
    KdTree tree_;
    std::vector<double> inradii_;
};

}  // namespace nnm
