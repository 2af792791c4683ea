// nnmetric: file formats — point CSV and the approximation-graph text format.
//
// Graph weights are serialized as hexfloats so a round-trip is bit-exact;
// the validator's "recompute every weight from geometry" check stays sound
// on a graph loaded from disk.
// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nnmetric/approx_graph.hpp"
#include "nnmetric/core.hpp"
#include "nnmetric/graph.hpp"
#include "nnmetric/sampler.hpp"

namespace nnm {

// --- point CSV --------------------------------------------------------------

/// Writes one row per point, comma-separated, with enough digits for an exact
/// double round-trip. Lines starting with '#' are comments.
inline void write_points_csv(const std::string& path, const std::vector<double>& flat,
                             std::size_t d) {
    if (d == 0 || flat.size() % d != 0)
        throw std::invalid_argument("write_points_csv: bad coordinate count");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_points_csv: cannot open " + path);
    out << "# nnmetric points, dim=" << d << "\n";
    out << std::setprecision(17);
    for (std::size_t i = 0; i < flat.size(); i += d) {
        for (std::size_t k = 0; k < d; ++k) {
            if (k) out << ',';
            out << flat[i + k];
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write_points_csv: write failed for " + path);
}

struct PointsFile {
    std::vector<double> flat;
    std::size_t dim = 0;
};

inline PointsFile read_points_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_points_csv: cannot open " + path);
    PointsFile pf;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos || line[b] == '#') continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                const double v = std::stod(cell, &used);
                while (used < cell.size() &&
                       (cell[used] == ' ' || cell[used] == '\t' || cell[used] == '\r'))
                    ++used;
                if (used != cell.size()) throw std::invalid_argument("trailing junk");
                row.push_back(v);
            } catch (const std::exception&) {
                throw std::runtime_error("read_points_csv: " + path + ":" +
                                         std::to_string(lineno) + ": bad number '" + cell + "'");
            }
        }
        if (row.empty())
            throw std::runtime_error("read_points_csv: " + path + ":" + std::to_string(lineno) +
                                     ": empty row");
        if (pf.dim == 0) pf.dim = row.size();
        if (row.size() != pf.dim)
            throw std::runtime_error("read_points_csv: " + path + ":" + std::to_string(lineno) +
                                     ": inconsistent dimension");
        pf.flat.insert(pf.flat.end(), row.begin(), row.end());
    }
    if (pf.flat.empty()) throw std::runtime_error("read_points_csv: " + path + ": no points");
    return pf;
}

// --- approximation-graph text format ----------------------------------------

struct ApproxGraphFile {
    std::size_t dim = 0;
    std::size_t num_sites = 0;
    std::size_t num_samples = 0;
    double delta = 0.0;
    ApproxGraphConstants constants;
    ApproxBuildOptions options;
    struct Edge {
        std::uint32_t u, v;
        float w;
        std::uint8_t tag;
    };
    std::vector<Edge> edges;
};

inline void write_approx_graph(const std::string& path, const ApproxGraph& ag) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_approx_graph: cannot open " + path);
    out << "nnmetric-graph v1\n";
    out << std::hexfloat;
    out << "dim " << ag.dim << "\n";
    out << "sites " << ag.num_sites << "\n";
    out << "samples " << ag.num_samples << "\n";
    out << "delta " << ag.delta << "\n";
    out << "c2 " << ag.constants.c2 << "\n";
    out << "c4 " << ag.constants.c4 << "\n";
    out << "knn " << ag.options.type2_knn << "\n";
    out << "angular " << ag.options.angular_reps << "\n";
    out << "radial " << ag.options.radial_reps << "\n";
    std::size_t m = 0;
    ag.graph.for_each_edge([&](std::uint32_t, std::uint32_t, float, std::uint8_t) { ++m; });
    out << "edges " << m << "\n";
    ag.graph.for_each_edge([&](std::uint32_t u, std::uint32_t v, float w, std::uint8_t tag) {
        out << u << ' ' << v << ' ' << double(w) << ' ' << int(tag) << "\n";
    });
    if (!out) throw std::runtime_error("write_approx_graph: write failed for " + path);
}

namespace detail {
// istream double extraction does not portably parse hexfloats; strtod does.
inline double read_double_token(std::istream& in, const std::string& what) {
    std::string tok;
    if (!(in >> tok)) throw std::runtime_error("read_approx_graph: truncated " + what);
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size())
        throw std::runtime_error("read_approx_graph: bad number '" + tok + "' for " + what);
    return v;
}
}  // namespace detail

inline ApproxGraphFile read_approx_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_approx_graph: cannot open " + path);
    std::string magic, version;
    in >> magic >> version;
    if (magic != "nnmetric-graph" || version != "v1")
        throw std::runtime_error("read_approx_graph: " + path + ": bad header");
    ApproxGraphFile f;
    std::size_t edge_count = 0;
    std::string key;
    while (in >> key) {
        if (key == "dim") in >> f.dim;
        else if (key == "sites") in >> f.num_sites;
        else if (key == "samples") in >> f.num_samples;
        else if (key == "delta") f.delta = detail::read_double_token(in, key);
        else if (key == "c2") f.constants.c2 = detail::read_double_token(in, key);
        else if (key == "c4") f.constants.c4 = detail::read_double_token(in, key);
        else if (key == "knn") in >> f.options.type2_knn;
        else if (key == "angular") in >> f.options.angular_reps;
        else if (key == "radial") in >> f.options.radial_reps;
        else if (key == "edges") {
            in >> edge_count;
            break;
        } else {
            throw std::runtime_error("read_approx_graph: " + path + ": unknown key '" + key + "'");
        }
        if (!in) throw std::runtime_error("read_approx_graph: " + path + ": bad value for " + key);
    }
    if (!in) throw std::runtime_error("read_approx_graph: " + path + ": truncated header");
    f.edges.reserve(edge_count);
    for (std::size_t e = 0; e < edge_count; ++e) {
        std::uint64_t u, v;
        int tag;
        if (!(in >> u >> v))
            throw std::runtime_error("read_approx_graph: " + path + ": truncated edge list");
        const double w = detail::read_double_token(in, "edge weight");
        if (!(in >> tag) || tag < 0 || tag > 255)
            throw std::runtime_error("read_approx_graph: " + path + ": bad edge tag");
        f.edges.push_back({static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v),
                           static_cast<float>(w), static_cast<std::uint8_t>(tag)});
    }
    return f;
}

/// Reassembles an ApproxGraph over the given sites and sample from a loaded
/// file. The geometry must match the header (the validator then re-derives
/// every weight from it).
inline ApproxGraph assemble_approx_graph(const PointSet& ps, const DeltaSample& sample,
                                         const ApproxGraphFile& f) {
    if (f.dim != ps.dim() || f.num_sites != ps.size() || f.num_samples != sample.size())
        throw std::invalid_argument("assemble_approx_graph: file does not match geometry");
    if (f.delta != sample.delta)
        throw std::invalid_argument("assemble_approx_graph: delta mismatch");
    detail::require_sample_matches(ps, sample, "assemble_approx_graph");
    ApproxGraph ag;
    ag.constants = f.constants;
    ag.options = f.options;
    ag.delta = f.delta;
    ag.num_samples = f.num_samples;
    ag.num_sites = f.num_sites;
    ag.dim = f.dim;
    ag.sites = &ps;
    ag.sample = &sample;
    WeightedGraph<float> g(f.num_samples + f.num_sites);
    g.reserve_edges(f.edges.size());
    for (const ApproxGraphFile::Edge& e : f.edges) g.add_edge(e.u, e.v, e.w, e.tag);
    g.finalize();
    ag.graph = std::move(g);
    return ag;
}

}  // namespace nnm
