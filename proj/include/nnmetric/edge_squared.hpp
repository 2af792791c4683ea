// nnmetric: edge-squared metric and the (3+eps)-approximation.
//
// The edge-squared metric is the shortest-path metric on the complete graph
// over the sites with weights |p_i - p_j|^2. It sandwiches the
// nearest-neighbor distance: sq/12 <= nndist <= sq/4. Running it on a
// (1+eps)-Euclidean spanner instead of the complete graph keeps the value
// within a factor (1 + eps + eps^2/2): a spanner path for an edge of length l
// has total length at most (1+eps) l, and because the path must return to the
// far endpoint no single hop exceeds (1+eps/2) l, so the sum of squared hops
// is at most ((1+eps/2)^2 + (eps/2)^2) l^2. Combining both sandwiches gives
// certified bounds whose ratio is exactly 3 (1 + eps + eps^2/2).
// SPDX-License-Identifier: MIT
#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "nnmetric/core.hpp"
#include "nnmetric/graph.hpp"

namespace nnm {

enum class SpannerMethod { greedy, theta_graph };

struct SpannerConfig {
    double epsilon = 0.5;
    SpannerMethod method = SpannerMethod::greedy;
};

enum class SqDistMode { exact, spanner };

/// Result of a distance computation with certified two-sided bounds.
struct DistanceResult {
    std::size_t i = 0, j = 0;
    std::string algorithm;
    double estimate = 0.0;
    double certified_lower = 0.0;
    double certified_upper = 0.0;
    std::vector<std::uint32_t> witness;  // vertex indices, endpoints i and j
    double runtime_seconds = 0.0;
};

/// Edge-squared stretch of a (1+eps)-Euclidean spanner: 1 + eps + eps^2/2.
inline double spanner_sq_stretch(double epsilon) {
    return 1.0 + epsilon + 0.5 * epsilon * epsilon;
}

/// Complete graph over the sites with weights |p_i - p_j|^2.
inline WeightedGraph<double> complete_edge_squared_graph(const PointSet& ps) {
    const std::size_t n = ps.size();
    if (n < 2) throw std::invalid_argument("complete_edge_squared_graph: need >= 2 sites");
    WeightedGraph<double> g(n);
    g.reserve_edges(n * (n - 1) / 2);
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j)
            g.add_edge(i, j, dist2(ps.point_ptr(i), ps.point_ptr(j), ps.dim()));
    g.finalize();
    return g;
}

/// Squares every edge weight (Euclidean spanner -> edge-squared spanner).
inline WeightedGraph<double> squared_graph(const WeightedGraph<double>& g) {
    WeightedGraph<double> out(g.num_vertices());
    out.reserve_edges(g.num_edges());
    g.for_each_edge([&](std::uint32_t u, std::uint32_t v, double w, std::uint8_t tag) {
        out.add_edge(u, v, w * w, tag);
    });
    out.finalize();
    return out;
}

/// Greedy (1+eps)-spanner of the complete Euclidean graph. Pairs are scanned
/// in ascending length; a pair becomes an edge exactly when the partial
/// spanner cannot already connect it within (1+eps) times its length, which
/// certifies the stretch for every pair on completion. Weights are Euclidean.
inline WeightedGraph<double> euclidean_spanner(const PointSet& ps, const SpannerConfig& cfg = {}) {
    const std::size_t n = ps.size();
    if (n < 2) throw std::invalid_argument("euclidean_spanner: need >= 2 sites");
    if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("euclidean_spanner: epsilon must be > 0");
    if (cfg.method != SpannerMethod::greedy)
        throw std::invalid_argument("euclidean_spanner: only the greedy method is implemented");

    struct PairRec {
        double len;
        std::uint32_t u, v;
    };
    std::vector<PairRec> pairs;
    pairs.reserve(n * (n - 1) / 2);
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j)
            pairs.push_back({dist(ps.point_ptr(i), ps.point_ptr(j), ps.dim()), i, j});
    std::sort(pairs.begin(), pairs.end(), [](const PairRec& a, const PairRec& b) {
        if (a.len != b.len) return a.len < b.len;
        if (a.u != b.u) return a.u < b.u;
        return a.v < b.v;
    });

    std::vector<std::vector<std::pair<std::uint32_t, double>>> adj(n);
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist_buf(n, inf);
    std::vector<std::uint32_t> stamp(n, 0);
    std::uint32_t epoch = 0;
    using Item = std::pair<double, std::uint32_t>;
    std::vector<Item> heap;

    // Dijkstra on the partial spanner, pruned at `bound`; +inf if farther.
    auto bounded_dist = [&](std::uint32_t s, std::uint32_t t, double bound) -> double {
        ++epoch;
        auto dref = [&](std::uint32_t v) -> double& {
            if (stamp[v] != epoch) {
                stamp[v] = epoch;
                dist_buf[v] = inf;
            }
            return dist_buf[v];
        };
        heap.clear();
        dref(s) = 0.0;
        heap.push_back({0.0, s});
        while (!heap.empty()) {
            std::pop_heap(heap.begin(), heap.end(), std::greater<Item>());
            const auto [d, u] = heap.back();
            heap.pop_back();
            if (d > bound) return inf;
            if (d > dref(u)) continue;
            if (u == t) return d;
            for (const auto& [to, w] : adj[u]) {
                const double nd = d + w;
                if (nd <= bound && nd < dref(to)) {
                    dref(to) = nd;
                    heap.push_back({nd, to});
                    std::push_heap(heap.begin(), heap.end(), std::greater<Item>());
                }
            }
        }
        return inf;
    };

    WeightedGraph<double> g(n);
    for (const PairRec& pr : pairs) {
        const double bound = (1.0 + cfg.epsilon) * pr.len;
        if (bounded_dist(pr.u, pr.v, bound) <= bound) continue;
        adj[pr.u].push_back({pr.v, pr.len});
        adj[pr.v].push_back({pr.u, pr.len});
        g.add_edge(pr.u, pr.v, pr.len);
    }
    g.finalize();
    return g;
}

namespace detail {

inline DistanceResult finish_sqdist_result(std::size_t i, std::size_t j, SqDistMode mode,
                                           double epsilon, const ShortestPathResult& sp,
                                           double runtime) {
    DistanceResult r;
    r.i = i;
    r.j = j;
    r.estimate = sp.distance;
    r.witness = sp.path;
    r.runtime_seconds = runtime;
    if (mode == SqDistMode::exact) {
        r.algorithm = "sqdist-exact";
        r.certified_lower = sp.distance;
        r.certified_upper = sp.distance;
    } else {
        r.algorithm = "sqdist-spanner";
        r.certified_lower = sp.distance / spanner_sq_stretch(epsilon);
        r.certified_upper = sp.distance;
    }
    return r;
}

}  // namespace detail

/// Edge-squared distance between sites i and j, exact or spanner-approximated.
/// Spanner mode certifies [value / (1+eps+eps^2/2), value] around the exact
/// edge-squared distance.
inline DistanceResult sqdist(const PointSet& ps, std::size_t i, std::size_t j, SqDistMode mode,
                             const SpannerConfig& cfg = {}) {
    if (i >= ps.size() || j >= ps.size()) throw std::invalid_argument("sqdist: index out of range");
    if (i == j) throw std::invalid_argument("sqdist: i and j must differ");
    const auto t0 = std::chrono::steady_clock::now();
    ShortestPathResult sp;
    if (mode == SqDistMode::exact) {
        sp = shortest_path(complete_edge_squared_graph(ps), static_cast<std::uint32_t>(i),
                           static_cast<std::uint32_t>(j));
    } else {
        sp = shortest_path(squared_graph(euclidean_spanner(ps, cfg)),
                           static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
    }
    const double rt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return detail::finish_sqdist_result(i, j, mode, cfg.epsilon, sp, rt);
}

/// Converts a spanner edge-squared value s_hat into the certified
/// (3+eps)-approximation of nndist: estimate = upper = s_hat/4,
/// lower = s_hat / (12 (1+eps+eps^2/2)).
inline DistanceResult make_approx3_result(std::size_t i, std::size_t j, double epsilon,
                                          double s_hat, std::vector<std::uint32_t> witness,
                                          double runtime) {
    DistanceResult r;
    r.i = i;
    r.j = j;
    r.algorithm = "approx3";
    r.estimate = 0.25 * s_hat;
    r.certified_upper = 0.25 * s_hat;
    r.certified_lower = s_hat / (12.0 * spanner_sq_stretch(epsilon));
    r.witness = std::move(witness);
    r.runtime_seconds = runtime;
    return r;
}

/// (3+eps)-approximation of the nearest-neighbor distance between sites i, j
/// via the edge-squared metric on a (1+eps)-spanner. The certified interval
/// contains nndist(p_i, p_j) and its endpoints are within ratio 3(1+eps+eps^2/2).
inline DistanceResult approx3_nn_distance(const PointSet& ps, std::size_t i, std::size_t j,
                                          const SpannerConfig& cfg = {}) {
    if (i >= ps.size() || j >= ps.size())
        throw std::invalid_argument("approx3_nn_distance: index out of range");
    if (i == j) throw std::invalid_argument("approx3_nn_distance: i and j must differ");
    const auto t0 = std::chrono::steady_clock::now();
    const ShortestPathResult sp = shortest_path(squared_graph(euclidean_spanner(ps, cfg)),
                                                static_cast<std::uint32_t>(i),
                                                static_cast<std::uint32_t>(j));
    const double rt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return make_approx3_result(i, j, cfg.epsilon, sp.distance, sp.path, rt);
}

}  // namespace nnm
