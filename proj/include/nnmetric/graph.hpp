// nnmetric: undirected weighted graphs (CSR) and Dijkstra shortest paths.
//
// Graphs are built by appending edges, then finalized into a compressed
// sparse-row layout before queries. Vertex ids are 32-bit; weights are a
// template parameter (float for the large approximation graphs, double where
// path values feed tight certifications). Distances always accumulate in
// double. Edges may carry a small integer tag (used to mark edge kinds in
// serialized graphs); tags default to zero and cost nothing until used.
// SPDX-License-Identifier: MIT
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

namespace nnm {

inline constexpr std::uint32_t kInvalidVertex = 0xffffffffu;

template <class W>
class WeightedGraph {
  public:
    struct Neighbor {
        std::uint32_t to;
        W weight;
    };

    WeightedGraph() = default;
    explicit WeightedGraph(std::size_t num_vertices) : n_(num_vertices) {
        if (num_vertices >= kInvalidVertex)
            throw std::invalid_argument("WeightedGraph: too many vertices");
    }

    std::size_t num_vertices() const { return n_; }
    std::size_t num_edges() const { return finalized_ ? m_ : eu_.size(); }
    bool finalized() const { return finalized_; }

    void reserve_edges(std::size_t m) {
        eu_.reserve(m);
        ev_.reserve(m);
        ew_.reserve(m);
    }

    /// Appends one undirected edge. Self-loops and out-of-range endpoints are
    /// rejected; weights must be finite and non-negative.
    void add_edge(std::uint32_t u, std::uint32_t v, W w, std::uint8_t tag = 0) {
        if (finalized_) throw std::logic_error("WeightedGraph: add_edge after finalize");
        if (u >= n_ || v >= n_) throw std::invalid_argument("WeightedGraph: vertex out of range");
        if (u == v) throw std::invalid_argument("WeightedGraph: self-loop");
        if (!(std::isfinite(static_cast<double>(w)) && w >= W(0)))
            throw std::invalid_argument("WeightedGraph: bad edge weight");
        eu_.push_back(u);
        ev_.push_back(v);
        ew_.push_back(w);
        if (tag != 0 && etag_.empty()) etag_.resize(eu_.size() - 1, 0);
        if (!etag_.empty() || tag != 0) etag_.push_back(tag);
    }

    /// Builds the CSR adjacency and releases the edge-list buffers.
    void finalize() {
        if (finalized_) return;
        m_ = eu_.size();
        const bool tagged = !etag_.empty();
        off_.assign(n_ + 1, 0);
        for (std::size_t e = 0; e < m_; ++e) {
            ++off_[eu_[e] + 1];
            ++off_[ev_[e] + 1];
        }
        for (std::size_t i = 0; i < n_; ++i) off_[i + 1] += off_[i];
        adj_.resize(2 * m_);
        if (tagged) adj_tag_.resize(2 * m_);
        std::vector<std::size_t> cursor(off_.begin(), off_.end() - 1);
        for (std::size_t e = 0; e < m_; ++e) {
            const std::uint32_t u = eu_[e], v = ev_[e];
            adj_[cursor[u]] = {v, ew_[e]};
            adj_[cursor[v]] = {u, ew_[e]};
            if (tagged) {
                adj_tag_[cursor[u]] = etag_[e];
                adj_tag_[cursor[v]] = etag_[e];
            }
            ++cursor[u];
            ++cursor[v];
        }
        eu_ = {};
        ev_ = {};
        ew_ = {};
        etag_ = {};
        finalized_ = true;
    }

    std::pair<const Neighbor*, const Neighbor*> neighbors(std::uint32_t u) const {
        require_finalized();
        if (u >= n_) throw std::invalid_argument("WeightedGraph: vertex out of range");
        return {adj_.data() + off_[u], adj_.data() + off_[u + 1]};
    }

    /// Tag of the k-th adjacency entry of u (ordered as in neighbors(u)).
    std::uint8_t neighbor_tag(std::uint32_t u, std::size_t k) const {
        require_finalized();
        if (u >= n_ || k >= off_[u + 1] - off_[u])
            throw std::invalid_argument("WeightedGraph: bad adjacency entry");
        return adj_tag_.empty() ? std::uint8_t(0) : adj_tag_[off_[u] + k];
    }

    /// Visits every undirected edge once as f(u, v, weight, tag) with u < v.
    template <class F>
    void for_each_edge(F&& f) const {
        require_finalized();
        for (std::uint32_t u = 0; u < n_; ++u)
            for (std::size_t k = off_[u]; k < off_[u + 1]; ++k)
                if (adj_[k].to > u)
                    f(u, adj_[k].to, adj_[k].weight,
                      adj_tag_.empty() ? std::uint8_t(0) : adj_tag_[k]);
    }

  private:
    void require_finalized() const {
        if (!finalized_) throw std::logic_error("WeightedGraph: not finalized");
    }

    std::size_t n_ = 0;
    std::size_t m_ = 0;
    bool finalized_ = false;
    std::vector<std::uint32_t> eu_, ev_;
    std::vector<W> ew_;
    std::vector<std::uint8_t> etag_;
    std::vector<std::size_t> off_;
    std::vector<Neighbor> adj_;
    std::vector<std::uint8_t> adj_tag_;
};

struct ShortestPathResult {
    double distance = std::numeric_limits<double>::infinity();
    std::vector<std::uint32_t> path;  // empty when unreachable
};

/// Dijkstra from src to every vertex. Unreachable vertices report +infinity.
template <class W>
std::vector<double> dijkstra_all(const WeightedGraph<W>& g, std::uint32_t src) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(g.num_vertices(), inf);
    if (src >= g.num_vertices()) throw std::invalid_argument("dijkstra_all: bad source");
    using Item = std::pair<double, std::uint32_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    dist[src] = 0.0;
    pq.push({0.0, src});
    while (!pq.empty()) {
        const auto [d, u] = pq.top();
        pq.pop();
        if (d > dist[u]) continue;
        const auto [it, end] = g.neighbors(u);
        for (auto* e = it; e != end; ++e) {
            const double nd = d + static_cast<double>(e->weight);
            if (nd < dist[e->to]) {
                dist[e->to] = nd;
                pq.push({nd, e->to});
            }
        }
    }
    return dist;
}

/// Dijkstra from src to dst with early exit; reconstructs one shortest path.
template <class W>
ShortestPathResult shortest_path(const WeightedGraph<W>& g, std::uint32_t src,
                                 std::uint32_t dst) {
    if (src >= g.num_vertices() || dst >= g.num_vertices())
        throw std::invalid_argument("shortest_path: bad endpoints");
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(g.num_vertices(), inf);
    std::vector<std::uint32_t> parent(g.num_vertices(), kInvalidVertex);
    using Item = std::pair<double, std::uint32_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    dist[src] = 0.0;
    pq.push({0.0, src});
    while (!pq.empty()) {
        const auto [d, u] = pq.top();
        pq.pop();
        if (d > dist[u]) continue;
        if (u == dst) break;
        const auto [it, end] = g.neighbors(u);
        for (auto* e = it; e != end; ++e) {
            const double nd = d + static_cast<double>(e->weight);
            if (nd < dist[e->to]) {
                dist[e->to] = nd;
                parent[e->to] = u;
                pq.push({nd, e->to});
            }
        }
    }
    ShortestPathResult r;
    r.distance = dist[dst];
    if (std::isfinite(r.distance)) {
        for (std::uint32_t v = dst; v != kInvalidVertex; v = parent[v]) r.path.push_back(v);
        std::reverse(r.path.begin(), r.path.end());
    }
    return r;
}

}  // namespace nnm
