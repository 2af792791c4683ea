// nnmetric: command-line tool — generate point clouds, compute nearest-neighbor
// metric distances with certified bounds, validate invariants, export figures.
// SPDX-License-Identifier: MIT
#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "nnmetric/nnmetric.hpp"

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;       // bad flags, bad input data, parameter violations
constexpr int kExitValidation = 2;  // a checked invariant failed (or graph disconnected)
constexpr int kExitInternal = 3;    // unexpected internal failure

/// Canonical query domain for a point set: its bounding box inflated by 3/4
/// of the diagonal. Every command derives domains this way so that samples,
/// graphs, and figures built in separate invocations line up exactly.
nnm::BoundingBox cli_domain(const nnm::PointSet& ps) {
    nnm::BoundingBox box = ps.bbox();
    return box.inflated(0.75 * box.diagonal());
}

nnm::PointSet load_points(const std::string& path) {
    try {
        const nnm::PointsFile pf = nnm::read_points_csv(path);
        return nnm::PointSet(pf.flat, pf.dim);
    } catch (const std::runtime_error& e) {
        // Unreadable or malformed input is a usage error, not an internal one.
        throw std::invalid_argument(e.what());
    }
}

/// Parses "i:j,k:l,..." into validated site pairs.
std::vector<std::pair<std::size_t, std::size_t>> parse_pairs(const std::string& text,
                                                             std::size_t n) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::size_t colon = item.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("--pairs: expected i:j, got '" + item + "'");
        std::size_t i = 0, j = 0;
        try {
            i = std::stoul(item.substr(0, colon));
            j = std::stoul(item.substr(colon + 1));
        } catch (const std::exception&) {
            throw std::invalid_argument("--pairs: bad index in '" + item + "'");
        }
        if (i >= n || j >= n)
            throw std::invalid_argument("--pairs: index out of range in '" + item + "'");
        if (i == j) throw std::invalid_argument("--pairs: i and j must differ in '" + item + "'");
        out.emplace_back(i, j);
    }
    if (out.empty()) throw std::invalid_argument("--pairs: no pairs given");
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> all_pairs(std::size_t n) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    out.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) out.emplace_back(i, j);
    return out;
}

/// Runs f(0..count-1) on up to NNMETRIC_THREADS workers. Output slots are
/// preassigned, so result ordering does not depend on scheduling.
template <typename F>
void parallel_for(std::size_t count, F&& f) {
    const std::size_t workers = std::min<std::size_t>(std::max<std::size_t>(nnm::thread_cap(), 1),
                                                      count);
    if (workers <= 1) {
        for (std::size_t k = 0; k < count; ++k) f(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            for (std::size_t k; (k = next.fetch_add(1)) < count;) {
                try {
                    f(k);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (std::thread& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

ordered_json polyline_to_json(const nnm::PolylinePath& path) {
    ordered_json arr = ordered_json::array();
    for (std::size_t k = 0; k < path.num_vertices(); ++k) {
        const nnm::Vec v = path.vertex(k);
        arr.push_back(ordered_json(v));
    }
    return arr;
}

/// A site-index witness (approx3/sqdist) as a polyline through the sites.
nnm::PolylinePath sites_polyline(const nnm::PointSet& ps,
                                 const std::vector<std::uint32_t>& chain) {
    std::vector<double> flat;
    flat.reserve(chain.size() * ps.dim());
    for (const std::uint32_t s : chain) {
        const double* p = ps.point_ptr(s);
        flat.insert(flat.end(), p, p + ps.dim());
    }
    return nnm::PolylinePath(flat, ps.dim());
}

/// Expands a ptas witness (graph vertices) into a concrete polyline: type-1
/// hops become sampled single-site geodesics, type-2/3 hops straight segments.
nnm::PolylinePath expand_ptas_witness(const nnm::ApproxGraph& ag, const nnm::PtasResult& r,
                                      std::size_t segments) {
    const nnm::PointSet& ps = *ag.sites;
    const nnm::DeltaSample& sample = *ag.sample;
    const std::size_t d = ag.dim;
    auto vertex_coords = [&](std::uint32_t v) {
        return v >= ag.num_samples ? ps.point(v - ag.num_samples)
                                   : sample.point(v);
    };
    std::vector<double> flat;
    auto push = [&](const nnm::Vec& z) {
        // Skip exact duplicates at hop junctions.
        if (flat.size() >= d) {
            bool same = true;
            for (std::size_t k = 0; k < d; ++k)
                if (flat[flat.size() - d + k] != z[k]) same = false;
            if (same) return;
        }
        flat.insert(flat.end(), z.begin(), z.end());
    };
    push(vertex_coords(r.witness.front()));
    for (std::size_t h = 0; h + 1 < r.witness.size(); ++h) {
        const nnm::Vec a = vertex_coords(r.witness[h]);
        const nnm::Vec b = vertex_coords(r.witness[h + 1]);
        if (r.witness_edge_types[h] == 1) {
            const std::size_t ball = ps.nearest_site(a.data()).first;
            const nnm::PolylinePath geo =
                nnm::single_site_geodesic_path(ps.point(ball), a, b, segments);
            for (std::size_t k = 1; k < geo.num_vertices(); ++k) push(geo.vertex(k));
        } else {
            push(b);
        }
    }
    return nnm::PolylinePath(flat, d);
}

double to_ms(double seconds) { return seconds * 1e3; }

// ---------------------------------------------------------------------------
// gen

struct GenArgs {
    std::string kind = "uniform";
    std::size_t n = 16;
    std::size_t d = 2;
    std::uint64_t seed = 0;
    std::string out;
};

int run_gen(const GenArgs& a) {
    const nnm::PointKind kind = nnm::parse_point_kind(a.kind);
    const std::vector<double> flat = nnm::generate_points(kind, a.n, a.d, a.seed);
    nnm::write_points_csv(a.out, flat, a.d);
    std::cout << "wrote " << a.n << " points (dim " << a.d << ", kind " << a.kind << ", seed "
              << a.seed << ") to " << a.out << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// dist

struct DistArgs {
    std::string input;
    std::string algorithm = "approx3";
    std::optional<double> epsilon;
    std::optional<double> delta;
    std::size_t resolution = 512;
    std::string pairs;
    bool all = false;
    std::uint64_t seed = 0;
    std::string out;
    std::string graph_out;
    double c2 = nnm::ApproxGraphConstants{}.c2;
    double c4 = nnm::ApproxGraphConstants{}.c4;
    std::size_t segments = 64;
    bool no_witness = false;
};

int run_dist(const DistArgs& a) {
    const nnm::PointSet ps = load_points(a.input);
    if (!a.all && a.pairs.empty())
        throw std::invalid_argument("dist: give --pairs i:j,... or --all-pairs");
    std::vector<std::pair<std::size_t, std::size_t>> pairs =
        a.all ? all_pairs(ps.size()) : parse_pairs(a.pairs, ps.size());
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

    std::vector<ordered_json> records(pairs.size());
    ordered_json meta;

    auto base_record = [&](const nnm::DistanceResult& r) {
        ordered_json rec;
        rec["i"] = r.i;
        rec["j"] = r.j;
        rec["algorithm"] = r.algorithm;
        rec["estimate"] = r.estimate;
        rec["lower"] = r.certified_lower;
        rec["upper"] = r.certified_upper;
        rec["runtime_ms"] = to_ms(r.runtime_seconds);
        return rec;
    };

    if (a.algorithm == "approx3") {
        nnm::SpannerConfig cfg;
        cfg.epsilon = a.epsilon.value_or(cfg.epsilon);
        const nnm::WeightedGraph<double> sq =
            nnm::squared_graph(nnm::euclidean_spanner(ps, cfg));
        meta["epsilon"] = cfg.epsilon;
        meta["stretch"] = nnm::spanner_sq_stretch(cfg.epsilon);
        parallel_for(pairs.size(), [&](std::size_t k) {
            const auto [i, j] = pairs[k];
            const auto t0 = std::chrono::steady_clock::now();
            const nnm::ShortestPathResult sp =
                nnm::shortest_path(sq, static_cast<std::uint32_t>(i),
                                   static_cast<std::uint32_t>(j));
            const double rt =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            const nnm::DistanceResult r =
                nnm::make_approx3_result(i, j, cfg.epsilon, sp.distance, sp.path, rt);
            ordered_json rec = base_record(r);
            if (!a.no_witness) {
                rec["witness_sites"] = r.witness;
                rec["witness"] = polyline_to_json(sites_polyline(ps, r.witness));
            }
            records[k] = std::move(rec);
        });
    } else if (a.algorithm == "sqdist") {
        const bool spanner = a.epsilon.has_value();
        nnm::SpannerConfig cfg;
        cfg.epsilon = a.epsilon.value_or(cfg.epsilon);
        const nnm::WeightedGraph<double> sq =
            spanner ? nnm::squared_graph(nnm::euclidean_spanner(ps, cfg))
                    : nnm::complete_edge_squared_graph(ps);
        meta["mode"] = spanner ? "spanner" : "exact";
        if (spanner) meta["epsilon"] = cfg.epsilon;
        parallel_for(pairs.size(), [&](std::size_t k) {
            const auto [i, j] = pairs[k];
            const auto t0 = std::chrono::steady_clock::now();
            const nnm::ShortestPathResult sp =
                nnm::shortest_path(sq, static_cast<std::uint32_t>(i),
                                   static_cast<std::uint32_t>(j));
            const double rt =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            const nnm::DistanceResult r =
                nnm::detail::finish_sqdist_result(i, j,
                                                  spanner ? nnm::SqDistMode::spanner
                                                          : nnm::SqDistMode::exact,
                                                  cfg.epsilon, sp, rt);
            ordered_json rec = base_record(r);
            if (!a.no_witness) {
                rec["witness_sites"] = r.witness;
                rec["witness"] = polyline_to_json(sites_polyline(ps, r.witness));
            }
            records[k] = std::move(rec);
        });
    } else if (a.algorithm == "ptas") {
        nnm::ApproxGraphConstants constants;
        constants.c2 = a.c2;
        constants.c4 = a.c4;
        double delta = 0.0;
        if (a.delta)
            delta = *a.delta;
        else if (a.epsilon)
            delta = nnm::epsilon_to_delta(*a.epsilon, constants);
        else
            throw std::invalid_argument("dist --algorithm ptas: give --delta or --epsilon");
        const nnm::DeltaSample sample = nnm::generate_delta_sample(ps, cli_domain(ps), delta);
        const nnm::ApproxGraph ag = nnm::build_approx_graph(ps, sample, constants);
        if (!a.graph_out.empty()) nnm::write_approx_graph(a.graph_out, ag);
        meta["delta"] = delta;
        if (a.epsilon) meta["epsilon"] = *a.epsilon;
        meta["samples"] = ag.num_samples;
        parallel_for(pairs.size(), [&](std::size_t k) {
            const auto [i, j] = pairs[k];
            const nnm::PtasResult r = nnm::ptas_nn_distance(ag, i, j);
            ordered_json rec = base_record(r);
            rec["delta"] = delta;
            if (a.epsilon) rec["epsilon"] = *a.epsilon;
            if (!a.no_witness) {
                rec["witness_edge_types"] = r.witness_edge_types;
                rec["witness"] =
                    polyline_to_json(expand_ptas_witness(ag, r, a.segments));
            }
            records[k] = std::move(rec);
        });
    } else if (a.algorithm == "oracle") {
        nnm::GridOracleConfig cfg;
        cfg.resolution = a.resolution;
        const nnm::GridOracle oracle(ps, {}, cfg);
        meta["resolution"] = a.resolution;
        parallel_for(pairs.size(), [&](std::size_t k) {
            const auto [i, j] = pairs[k];
            const nnm::OracleResult r = oracle.query(i, j);
            // Discretization allowance: 2% of the upper sandwich bound at
            // resolution 512, rescaled for the requested resolution.
            const double sq_exact =
                nnm::sqdist(ps, i, j, nnm::SqDistMode::exact).estimate;
            const double allowance =
                0.02 * (sq_exact / 4.0) * (512.0 / static_cast<double>(a.resolution));
            ordered_json rec;
            rec["i"] = i;
            rec["j"] = j;
            rec["algorithm"] = "oracle";
            rec["estimate"] = r.value;
            // The oracle value is the exact nn-length of a concrete path, so
            // it upper-bounds nndist; the allowance bounds the gap.
            rec["lower"] = std::max(0.0, r.value - allowance);
            rec["upper"] = r.value;
            rec["runtime_ms"] = to_ms(r.runtime_seconds);
            rec["resolution"] = a.resolution;
            rec["error_allowance"] = allowance;
            if (!a.no_witness) rec["witness"] = polyline_to_json(r.witness);
            records[k] = std::move(rec);
        });
    } else {
        throw std::invalid_argument("dist: unknown --algorithm '" + a.algorithm +
                                    "' (use approx3|ptas|oracle|sqdist)");
    }

    ordered_json doc;
    doc["schema"] = "nnmetric-v1";
    doc["input"] = a.input;
    doc["algorithm"] = a.algorithm;
    doc["seed"] = a.seed;
    doc["parameters"] = meta;
    doc["results"] = records;

    const std::string text = doc.dump(2) + "\n";
    if (a.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(a.out);
        if (!out) throw std::runtime_error("dist: cannot open --out " + a.out);
        out << text;
        std::cout << "wrote " << records.size() << " results to " << a.out << "\n";
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// validate

struct ValidateArgs {
    std::string input;
    std::uint64_t seed = 0;
    std::string level = "quick";
    std::string graph;
};

struct Reporter {
    int failures = 0;
    void check(bool ok, const std::string& name, const std::string& detail) {
        std::cout << (ok ? "[ok]   " : "[FAIL] ") << name << ": " << detail << "\n";
        if (!ok) ++failures;
    }
};

int run_validate(const ValidateArgs& a) {
    const nnm::PointSet ps = load_points(a.input);
    const bool full = a.level == "full";
    if (!full && a.level != "quick")
        throw std::invalid_argument("validate: --level must be quick or full");
    Reporter rep;
    std::cout << "validate " << a.input << " (n=" << ps.size() << ", d=" << ps.dim()
              << ", seed=" << a.seed << ", level=" << a.level << ")\n";

    // 1. Sandwich bounds: oracle value within [sq/12 - tol, sq/4 + tol].
    if (ps.dim() == 2 && ps.size() >= 2) {
        nnm::GridOracleConfig cfg;
        cfg.resolution = full ? 192 : 128;
        const nnm::GridOracle oracle(ps, {}, cfg);
        const std::vector<double> vals = oracle.values_from(0);
        const std::size_t upto = std::min<std::size_t>(ps.size(), full ? ps.size() : 5);
        bool ok = true;
        std::string why = "all pairs (0,j) within bounds";
        for (std::size_t j = 1; j < upto; ++j) {
            const double sq = nnm::sqdist(ps, 0, j, nnm::SqDistMode::exact).estimate;
            const double tol = 0.02 * (sq / 4.0) * (512.0 / double(cfg.resolution));
            if (!(vals[j] >= sq / 12.0 - tol && vals[j] <= sq / 4.0 + tol)) {
                ok = false;
                why = "pair (0," + std::to_string(j) + "): oracle " + std::to_string(vals[j]) +
                      " outside [sq/12, sq/4] with sq=" + std::to_string(sq) +
                      " (repro: --input " + a.input + " --resolution " +
                      std::to_string(cfg.resolution) + ")";
                break;
            }
        }
        rep.check(ok, "sandwich-bounds", why);
    } else {
        std::cout << "[skip] sandwich-bounds: needs d=2 and n>=2\n";
    }

    // 2. Delta-sample probes: coverage, exclusion, and bounded local feature.
    {
        const double delta = 0.2;
        const nnm::BoundingBox domain = cli_domain(ps);
        const nnm::DeltaSample sample = nnm::generate_delta_sample(ps, domain, delta);
        nnm::KdTree steiner_tree(sample.steiner_flat.data(), sample.size(), sample.dim);
        std::mt19937_64 rng(a.seed ^ 0x5eedULL);
        const std::size_t probes = full ? 4000 : 1500;
        std::size_t admissible = 0, cover_bad = 0, feature_bad = 0;
        std::vector<std::uniform_real_distribution<double>> axis;
        for (std::size_t k = 0; k < ps.dim(); ++k)
            axis.emplace_back(domain.lo[k], domain.hi[k]);
        for (std::size_t t = 0; t < probes; ++t) {
            nnm::Vec z(ps.dim());
            for (std::size_t k = 0; k < ps.dim(); ++k) z[k] = axis[k](rng);
            const auto [site, dist_site] = ps.nearest_site(z.data());
            if (dist_site < sample.exclusion_radii[site]) continue;  // inside an exclusion ball
            ++admissible;
            const double dz = ps.dnn(z.data());
            const double d_cover = std::sqrt(steiner_tree.nearest(z.data()).second);
            if (d_cover > delta * dz * (1.0 + 1e-9)) ++cover_bad;
            const double f = ps.size() >= 2 ? ps.second_nearest_distance(z.data()) : dz;
            if (f > 5.0 * dz * (1.0 + 1e-9) || f < dz * (1.0 - 1e-9)) ++feature_bad;
        }
        rep.check(cover_bad == 0 && feature_bad == 0, "delta-sample",
                  std::to_string(admissible) + " admissible probes, " +
                      std::to_string(cover_bad) + " coverage violations, " +
                      std::to_string(feature_bad) + " local-feature violations (delta=0.2, seed=" +
                      std::to_string(a.seed) + ")");
    }

    // 3. Spanner stretch audit.
    if (ps.size() >= 2) {
        nnm::SpannerConfig cfg;
        cfg.epsilon = 0.5;
        const nnm::WeightedGraph<double> spanner = nnm::euclidean_spanner(ps, cfg);
        bool ok = true;
        std::string why = "all pairs within (1+eps) Euclidean stretch (eps=0.5)";
        for (std::size_t i = 0; i < ps.size() && ok; ++i) {
            const std::vector<double> d = nnm::dijkstra_all(spanner, i);
            for (std::size_t j = 0; j < ps.size(); ++j) {
                if (j == i) continue;
                const double direct = nnm::dist(ps.point_ptr(i), ps.point_ptr(j), ps.dim());
                if (d[j] > (1.0 + cfg.epsilon) * direct * (1.0 + 1e-12) ||
                    d[j] < direct * (1.0 - 1e-12)) {
                    ok = false;
                    why = "pair (" + std::to_string(i) + "," + std::to_string(j) + "): spanner " +
                          std::to_string(d[j]) + " vs direct " + std::to_string(direct);
                    break;
                }
            }
        }
        rep.check(ok, "spanner-stretch", why);
    }

    // 4. Single-site closed form vs a small oracle.
    if (ps.dim() == 2) {
        std::mt19937_64 rng(a.seed ^ 0xA11CEULL);
        std::uniform_real_distribution<double> ur(0.5, 1.5), uth(0.3, 3.1);
        bool ok = true;
        std::string why = "closed form matches the grid oracle";
        const std::size_t cases = full ? 6 : 3;
        for (std::size_t t = 0; t < cases && ok; ++t) {
            const double r1 = ur(rng), r2 = ur(rng), th = uth(rng);
            const nnm::PointSet site({0.0, 0.0}, 2);
            const nnm::Vec x{r1, 0.0};
            const nnm::Vec y{r2 * std::cos(th), r2 * std::sin(th)};
            const double exact = nnm::single_site_nn_distance(nnm::Vec{0.0, 0.0}, x, y);
            nnm::GridOracleConfig cfg;
            cfg.resolution = full ? 256 : 160;
            const double v = nnm::grid_oracle_nn_distance(site, x, y, cfg);
            if (std::abs(v - exact) > 0.03 * exact) {
                ok = false;
                why = "config r1=" + std::to_string(r1) + " r2=" + std::to_string(r2) +
                      " theta=" + std::to_string(th) + ": oracle " + std::to_string(v) +
                      " vs exact " + std::to_string(exact);
            }
        }
        rep.check(ok, "single-site-agreement", why);
    }

    // 5. Approximation-graph soundness (file if given, else a fresh build).
    {
        if (!a.graph.empty()) {
            const nnm::ApproxGraphFile gf = nnm::read_approx_graph(a.graph);
            const nnm::DeltaSample sample =
                nnm::generate_delta_sample(ps, cli_domain(ps), gf.delta);
            const nnm::ApproxGraph ag = nnm::assemble_approx_graph(ps, sample, gf);
            const nnm::ApproxValidationReport r = nnm::validate_approx_graph(ag);
            rep.check(r.ok, "graph-soundness",
                      r.ok ? a.graph + ": " + std::to_string(r.edges_checked) + " edges verified"
                           : a.graph + ": " + r.first_error);
        } else {
            const double delta = 0.2;
            const nnm::DeltaSample sample =
                nnm::generate_delta_sample(ps, cli_domain(ps), delta);
            const nnm::ApproxGraph ag = nnm::build_approx_graph(ps, sample);
            const nnm::ApproxValidationReport r = nnm::validate_approx_graph(ag);
            rep.check(r.ok, "graph-soundness",
                      r.ok ? std::to_string(r.edges_checked) + " edges verified (delta=0.2)"
                           : r.first_error);
        }
    }

    // 6. Full level: the certified ptas interval tightens as delta shrinks.
    if (full && ps.size() >= 2) {
        double prev_gap = std::numeric_limits<double>::infinity();
        bool ok = true;
        std::string why = "certified interval tightens over delta {0.2, 0.1}";
        for (const double delta : {0.2, 0.1}) {
            const nnm::DeltaSample sample =
                nnm::generate_delta_sample(ps, cli_domain(ps), delta);
            const nnm::ApproxGraph ag = nnm::build_approx_graph(ps, sample);
            const nnm::PtasResult r = nnm::ptas_nn_distance(ag, 0, 1);
            const double gap = r.certified_upper / r.certified_lower;
            if (!(gap < prev_gap) || !(r.certified_lower <= r.estimate) ||
                !(r.estimate <= r.certified_upper)) {
                ok = false;
                why = "delta=" + std::to_string(delta) + ": gap " + std::to_string(gap) +
                      " did not tighten (prev " + std::to_string(prev_gap) + ")";
                break;
            }
            prev_gap = gap;
        }
        rep.check(ok, "delta-convergence", why);
    }

    if (rep.failures > 0) {
        std::cout << rep.failures << " check(s) failed\n";
        return kExitValidation;
    }
    std::cout << "all checks passed\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// export-path

struct ExportArgs {
    std::string result;
    std::string input;
    std::string out;
    std::string graph;
    std::size_t index = 0;
};

int run_export(const ExportArgs& a) {
    const nnm::PointSet ps = load_points(a.input);
    if (ps.dim() != 2)
        throw std::invalid_argument("export-path: only d=2 point sets can be rendered");

    std::ifstream in(a.result);
    if (!in) throw std::invalid_argument("export-path: cannot open --result " + a.result);
    ordered_json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw std::invalid_argument("export-path: bad JSON in " + a.result + ": " + e.what());
    }
    if (!doc.contains("schema") || doc["schema"] != "nnmetric-v1")
        throw std::invalid_argument("export-path: --result is not an nnmetric-v1 document");
    const auto& results = doc["results"];
    if (a.index >= results.size())
        throw std::invalid_argument("export-path: --index out of range (have " +
                                    std::to_string(results.size()) + " results)");
    const auto& rec = results[a.index];
    if (!rec.contains("witness"))
        throw std::invalid_argument("export-path: selected result has no witness");

    std::vector<double> flat;
    for (const auto& v : rec["witness"]) {
        if (v.size() != 2)
            throw std::invalid_argument("export-path: witness vertices must be 2-dimensional");
        flat.push_back(v[0].get<double>());
        flat.push_back(v[1].get<double>());
    }
    const nnm::PolylinePath witness(flat, 2);

    std::vector<nnm::Vec> steiner;
    if (!a.graph.empty()) {
        const nnm::ApproxGraphFile gf = nnm::read_approx_graph(a.graph);
        const nnm::DeltaSample sample =
            nnm::generate_delta_sample(ps, cli_domain(ps), gf.delta);
        for (std::size_t k = 0; k < sample.size(); ++k) steiner.push_back(sample.point(k));
    }

    const std::string svg = nnm::render_scene_svg(ps, {witness}, steiner);
    nnm::write_svg_file(a.out, svg);
    std::cout << "wrote " << a.out << " (" << witness.num_vertices() - 1 << " path segments, "
              << steiner.size() << " steiner points)\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nearest-neighbor (density-based) metric toolkit"};
    app.require_subcommand(1);

    GenArgs gen;
    CLI::App* cmd_gen = app.add_subcommand("gen", "generate a point-cloud CSV");
    cmd_gen->add_option("--kind", gen.kind, "uniform|clusters|star|collinear")
        ->default_val("uniform");
    cmd_gen->add_option("--n", gen.n, "number of points")->default_val(16);
    cmd_gen->add_option("--d", gen.d, "dimension")->default_val(2);
    cmd_gen->add_option("--seed", gen.seed, "random seed")->default_val(0);
    cmd_gen->add_option("--out", gen.out, "output CSV path")->required();

    DistArgs dist;
    CLI::App* cmd_dist = app.add_subcommand("dist", "compute distances with certified bounds");
    cmd_dist->add_option("--input", dist.input, "point CSV")->required();
    cmd_dist->add_option("--algorithm", dist.algorithm, "approx3|ptas|oracle|sqdist")
        ->default_val("approx3");
    cmd_dist->add_option("--epsilon", dist.epsilon, "approximation parameter");
    cmd_dist->add_option("--delta", dist.delta, "sample refinement (ptas)");
    cmd_dist->add_option("--resolution", dist.resolution, "oracle grid resolution")
        ->default_val(512);
    cmd_dist->add_option("--pairs", dist.pairs, "query pairs i:j,k:l,...");
    cmd_dist->add_flag("--all-pairs", dist.all, "query every site pair");
    cmd_dist->add_option("--seed", dist.seed, "seed echoed into the output")->default_val(0);
    cmd_dist->add_option("--out", dist.out, "output JSON path (default: stdout)");
    cmd_dist->add_option("--graph-out", dist.graph_out,
                         "also write the ptas approximation graph to this file");
    cmd_dist->add_option("--c2", dist.c2, "ptas local-edge constant");
    cmd_dist->add_option("--c4", dist.c4, "ptas upper-bound constant");
    cmd_dist->add_option("--segments", dist.segments,
                         "vertices per curved geodesic hop in witnesses")
        ->default_val(64);
    cmd_dist->add_flag("--no-witness", dist.no_witness, "omit witness paths from output");

    ValidateArgs val;
    CLI::App* cmd_val = app.add_subcommand("validate", "run invariant checks on an input");
    cmd_val->add_option("--input", val.input, "point CSV")->required();
    cmd_val->add_option("--seed", val.seed, "probe seed")->default_val(0);
    cmd_val->add_option("--level", val.level, "quick|full")->default_val("quick");
    cmd_val->add_option("--graph", val.graph, "approximation-graph file to verify");

    ExportArgs exp;
    CLI::App* cmd_exp = app.add_subcommand("export-path", "render a result witness as SVG");
    cmd_exp->add_option("--result", exp.result, "results JSON from dist")->required();
    cmd_exp->add_option("--input", exp.input, "point CSV the result was computed on")->required();
    cmd_exp->add_option("--out", exp.out, "output SVG path")->required();
    cmd_exp->add_option("--graph", exp.graph, "overlay Steiner points from this graph file");
    cmd_exp->add_option("--index", exp.index, "result record to render")->default_val(0);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*cmd_gen) return run_gen(gen);
        if (*cmd_dist) return run_dist(dist);
        if (*cmd_val) return run_validate(val);
        if (*cmd_exp) return run_export(exp);
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::runtime_error& e) {
        // Disconnection and similar data-level conditions are validation
        // failures; genuine I/O or logic faults are internal errors.
        const std::string what = e.what();
        std::cerr << "error: " << what << "\n";
        return what.find("disconnected") != std::string::npos ? kExitValidation : kExitInternal;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}
