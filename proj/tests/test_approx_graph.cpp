// nnmetric: tests for the Steiner approximation graph (build, validate, query).
// SPDX-License-Identifier: MIT
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <vector>

#include "nnmetric/nnmetric.hpp"

namespace {

nnm::BoundingBox default_domain(const nnm::PointSet& ps) {
    nnm::BoundingBox box = ps.bbox();
    return box.inflated(0.75 * box.diagonal());
}

struct Fixture {
    nnm::PointSet ps;
    nnm::DeltaSample sample;
    nnm::ApproxGraph ag;
};

Fixture make_fixture(std::vector<double> flat, std::size_t dim, double delta,
                     nnm::ApproxGraphConstants constants = {},
                     nnm::ApproxBuildOptions options = {}) {
    Fixture f{nnm::PointSet(std::move(flat), dim), {}, {}};
    f.sample = nnm::generate_delta_sample(f.ps, default_domain(f.ps), delta);
    f.ag = nnm::build_approx_graph(f.ps, f.sample, constants, options);
    return f;
}

// Deep-copies the graph, applying `mutate(u, v, w&, tag&)` to each edge, and
// returns an ApproxGraph aliasing the original sites/sample for validation.
template <typename F>
nnm::ApproxGraph tampered_copy(const nnm::ApproxGraph& ag, F mutate) {
    nnm::WeightedGraph<float> g(ag.graph.num_vertices());
    ag.graph.for_each_edge([&](std::uint32_t u, std::uint32_t v, float w, std::uint8_t tag) {
        mutate(u, v, w, tag);
        g.add_edge(u, v, w, tag);
    });
    g.finalize();
    nnm::ApproxGraph out;
    out.graph = std::move(g);
    out.constants = ag.constants;
    out.options = ag.options;
    out.delta = ag.delta;
    out.num_samples = ag.num_samples;
    out.num_sites = ag.num_sites;
    out.dim = ag.dim;
    out.sites = ag.sites;
    out.sample = ag.sample;
    return out;
}

}  // namespace

TEST_CASE("epsilon_to_delta follows the clamped inverse error form") {
    const nnm::ApproxGraphConstants unit{2.0, 1.0};

    // (0.01 / 1)^{3/2} = 0.001, well under the cap.
    CHECK(nnm::epsilon_to_delta(0.01, unit) == Catch::Approx(0.001).epsilon(1e-12));

    // Raw algebra at C4 = 1, eps = 0.25 gives 0.125; the contract caps the
    // result at 1/10, so the clamp must win here.
    CHECK(nnm::epsilon_to_delta(0.25, unit) == 0.1);
    CHECK(nnm::epsilon_to_delta(0.9, unit) == 0.1);

    // Default constants (C4 = 60) push delta far below the cap.
    const double d = nnm::epsilon_to_delta(0.5);
    CHECK(d == Catch::Approx(std::pow(0.5 / 60.0, 1.5)).epsilon(1e-12));

    SECTION("result is always in (0, 1/10]") {
        for (double eps = 0.01; eps < 1.0; eps += 0.03) {
            const double v = nnm::epsilon_to_delta(eps, unit);
            CHECK(v > 0.0);
            CHECK(v <= 0.1);
        }
    }

    SECTION("epsilon outside (0,1) is rejected") {
        CHECK_THROWS_AS(nnm::epsilon_to_delta(0.0), std::invalid_argument);
        CHECK_THROWS_AS(nnm::epsilon_to_delta(1.0), std::invalid_argument);
        CHECK_THROWS_AS(nnm::epsilon_to_delta(-0.2), std::invalid_argument);
        CHECK_THROWS_AS(nnm::epsilon_to_delta(1.7), std::invalid_argument);
    }
}

TEST_CASE("build_approx_graph: structure on the two-site instance") {
    const Fixture f = make_fixture({0.0, 0.0, 2.0, 0.0}, 2, 0.1);
    const nnm::ApproxGraph& ag = f.ag;

    CHECK(ag.num_sites == 2);
    CHECK(ag.num_samples == f.sample.size());
    CHECK(ag.num_samples > 0);
    CHECK(ag.dim == 2);
    CHECK(ag.delta == 0.1);
    CHECK(ag.graph.num_vertices() == ag.num_samples + ag.num_sites);
    CHECK(ag.site_vertex(0) == ag.num_samples);
    CHECK(ag.site_vertex(1) == ag.num_samples + 1);
    CHECK(ag.sites == &f.ps);
    CHECK(ag.sample == &f.sample);

    SECTION("every edge carries a known tag and a positive finite weight") {
        ag.graph.for_each_edge([&](std::uint32_t, std::uint32_t, float w, std::uint8_t tag) {
            CHECK((tag == 1 || tag == 2 || tag == 3));
            CHECK(std::isfinite(w));
            CHECK(w > 0.0f);
        });
    }

    SECTION("all three edge families are populated") {
        const nnm::ApproxValidationReport rep = nnm::validate_approx_graph(ag);
        CHECK(rep.ok);
        CHECK(rep.first_error.empty());
        CHECK(rep.edges_checked == ag.graph.num_edges());
        CHECK(rep.count_type1 > 0);
        CHECK(rep.count_type2 > 0);
        CHECK(rep.count_type3 > 0);
        CHECK(rep.count_type1 + rep.count_type2 + rep.count_type3 == rep.edges_checked);
    }
}

TEST_CASE("edge weights match their defining formulas") {
    const Fixture f = make_fixture({0.0, 0.0, 2.0, 0.0}, 2, 0.15);
    const nnm::ApproxGraph& ag = f.ag;
    const nnm::PointSet& ps = f.ps;
    const std::size_t m = ag.num_samples;
    const double t2factor = ag.constants.c2 * std::pow(ag.delta, 2.0 / 3.0);

    std::size_t checked1 = 0, checked2 = 0, checked3 = 0;
    ag.graph.for_each_edge([&](std::uint32_t u, std::uint32_t v, float w, std::uint8_t tag) {
        if (tag == 3) {
            // Half squared distance between the site and its in-ball sample.
            const bool u_site = u >= m;
            const std::size_t site = (u_site ? u : v) - m;
            const std::uint32_t s = u_site ? v : u;
            const double d2 = nnm::dist2(ps.point_ptr(site), f.sample.point_ptr(s), ag.dim);
            const double r = ps.voronoi_inradius(site);
            CHECK(d2 <= r * r * (1.0 + 1e-12));
            CHECK(w == static_cast<float>(0.5 * d2));
            ++checked3;
        } else if (tag == 2) {
            // Conservative local edge: max endpoint density times length,
            // admitted only inside the delta^{2/3} radius predicate.
            const double len = nnm::dist(f.sample.point_ptr(u), f.sample.point_ptr(v), ag.dim);
            const double du = ps.dnn(f.sample.point_ptr(u));
            const double dv = ps.dnn(f.sample.point_ptr(v));
            CHECK(len <= t2factor * std::max(du, dv) * (1.0 + 1e-12));
            CHECK(w == static_cast<float>(std::max(du, dv) * len));
            ++checked2;
        } else {
            REQUIRE(tag == 1);
            // Exact single-site geodesic between two samples in a common ball.
            const nnm::Vec s1 = f.sample.point(u);
            const nnm::Vec s2 = f.sample.point(v);
            const std::size_t ball = ps.nearest_site(s1.data()).first;
            const double exact =
                nnm::single_site_nn_distance(ps.point(ball), s1, s2);
            CHECK(w == static_cast<float>(exact));
            ++checked1;
        }
    });
    CHECK(checked1 > 0);
    CHECK(checked2 > 0);
    CHECK(checked3 > 0);
}

TEST_CASE("validate_approx_graph flags injected faults") {
    const Fixture f = make_fixture({0.0, 0.0, 2.0, 0.0, 1.0, 1.6}, 2, 0.2);
    REQUIRE(nnm::validate_approx_graph(f.ag).ok);

    SECTION("a single perturbed weight fails edge-weight soundness") {
        bool hit = false;
        const nnm::ApproxGraph bad = tampered_copy(
            f.ag, [&](std::uint32_t, std::uint32_t, float& w, std::uint8_t&) {
                if (!hit) {
                    w *= 1.5f;
                    hit = true;
                }
            });
        REQUIRE(hit);
        const nnm::ApproxValidationReport rep = nnm::validate_approx_graph(bad);
        CHECK_FALSE(rep.ok);
        CHECK_THAT(rep.first_error, Catch::Matchers::ContainsSubstring("mismatch"));
    }

    SECTION("an unknown tag is rejected") {
        bool hit = false;
        const nnm::ApproxGraph bad = tampered_copy(
            f.ag, [&](std::uint32_t, std::uint32_t, float&, std::uint8_t& tag) {
                if (!hit && tag == 2) {
                    tag = 7;
                    hit = true;
                }
            });
        REQUIRE(hit);
        const nnm::ApproxValidationReport rep = nnm::validate_approx_graph(bad);
        CHECK_FALSE(rep.ok);
        CHECK_THAT(rep.first_error, Catch::Matchers::ContainsSubstring("unknown edge type"));
    }

    SECTION("a retagged edge violates its new family's predicate") {
        bool hit = false;
        const nnm::ApproxGraph bad = tampered_copy(
            f.ag, [&](std::uint32_t, std::uint32_t, float&, std::uint8_t& tag) {
                if (!hit && tag == 2) {
                    tag = 3;  // two samples can never satisfy the site/sample shape
                    hit = true;
                }
            });
        REQUIRE(hit);
        CHECK_FALSE(nnm::validate_approx_graph(bad).ok);
    }
}

TEST_CASE("ptas_nn_distance: two sites at distance 2") {
    const Fixture f = make_fixture({0.0, 0.0, 2.0, 0.0}, 2, 0.1);
    const nnm::PtasResult r = nnm::ptas_nn_distance(f.ag, 0, 1);

    // True value is exactly 1: each unit half costs (1^2)/2 at its own site.
    CHECK(r.algorithm == "ptas");
    CHECK(r.i == 0);
    CHECK(r.j == 1);
    CHECK(r.estimate == Catch::Approx(1.0).margin(0.1));
    CHECK(r.certified_lower <= r.estimate);
    CHECK(r.estimate <= r.certified_upper);
    CHECK(r.certified_lower <= 1.0);
    CHECK(1.0 <= r.certified_upper);
    CHECK(r.runtime_seconds >= 0.0);

    SECTION("witness runs from site vertex to site vertex") {
        REQUIRE(r.witness.size() >= 2);
        CHECK(r.witness.front() == f.ag.site_vertex(0));
        CHECK(r.witness.back() == f.ag.site_vertex(1));
        REQUIRE(r.witness_edge_types.size() == r.witness.size() - 1);
        for (std::uint8_t t : r.witness_edge_types) CHECK((t == 1 || t == 2 || t == 3));
        // Endpoints are sites, so the first and last hops leave/enter a ball.
        CHECK(r.witness_edge_types.front() == 3);
        CHECK(r.witness_edge_types.back() == 3);
    }

    SECTION("certified interval uses the configured constants") {
        const double d23 = std::pow(f.ag.delta, 2.0 / 3.0);
        CHECK(r.certified_lower ==
              Catch::Approx(r.estimate / (1.0 + f.ag.constants.c4 * d23)).epsilon(1e-12));
        CHECK(r.certified_upper ==
              Catch::Approx(r.estimate / (1.0 - f.ag.constants.c2 * d23)).epsilon(1e-12));
    }

    SECTION("queries are symmetric") {
        const nnm::PtasResult rev = nnm::ptas_nn_distance(f.ag, 1, 0);
        CHECK(rev.estimate == r.estimate);
    }
}

TEST_CASE("ptas_nn_distance on a random instance: bounds and refinement") {
    const nnm::PointSet ps(nnm::generate_points(nnm::PointKind::uniform, 6, 2, 77), 2);
    double prev_gap = std::numeric_limits<double>::infinity();
    for (const double delta : {0.2, 0.1}) {
        const nnm::DeltaSample sample =
            nnm::generate_delta_sample(ps, default_domain(ps), delta);
        const nnm::ApproxGraph ag = nnm::build_approx_graph(ps, sample);
        REQUIRE(nnm::validate_approx_graph(ag).ok);
        const nnm::PtasResult r = nnm::ptas_nn_distance(ag, 0, 1);
        CHECK(std::isfinite(r.estimate));
        CHECK(r.estimate > 0.0);
        CHECK(r.certified_lower <= r.estimate);
        CHECK(r.estimate <= r.certified_upper);
        // The certified interval tightens as delta shrinks.
        const double gap = r.certified_upper / r.certified_lower;
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }
}

TEST_CASE("ptas_nn_distance rejects bad queries and disconnection") {
    const Fixture f = make_fixture({0.0, 0.0, 2.0, 0.0}, 2, 0.2);
    CHECK_THROWS_AS(nnm::ptas_nn_distance(f.ag, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(nnm::ptas_nn_distance(f.ag, 0, 2), std::invalid_argument);
    CHECK_THROWS_AS(nnm::ptas_nn_distance(f.ag, 5, 1), std::invalid_argument);

    SECTION("vanishing local-edge radius disconnects the two balls") {
        // c2 ~ 0 removes every type-2 edge, leaving two site-centered
        // components with no bridge between them.
        nnm::ApproxGraphConstants tiny;
        tiny.c2 = 1e-12;
        const Fixture g = make_fixture({0.0, 0.0, 2.0, 0.0}, 2, 0.2, tiny);
        CHECK_THROWS_WITH(nnm::ptas_nn_distance(g.ag, 0, 1),
                          Catch::Matchers::ContainsSubstring("disconnected"));
    }
}

TEST_CASE("build_approx_graph validates its inputs") {
    const nnm::PointSet a({0.0, 0.0, 2.0, 0.0}, 2);
    const nnm::PointSet b({0.0, 0.0, 3.0, 1.0}, 2);
    const nnm::DeltaSample sample = nnm::generate_delta_sample(a, default_domain(a), 0.2);
    CHECK_THROWS_WITH(nnm::build_approx_graph(b, sample),
                      Catch::Matchers::ContainsSubstring("sample does not match"));
    CHECK_NOTHROW(nnm::build_approx_graph(a, sample));
}

TEST_CASE("approximation graph build is deterministic") {
    auto build_once = [] {
        const Fixture f = make_fixture({0.0, 0.0, 2.0, 0.0, 1.0, 1.6}, 2, 0.15);
        std::vector<std::tuple<std::uint32_t, std::uint32_t, float, std::uint8_t>> edges;
        f.ag.graph.for_each_edge([&](std::uint32_t u, std::uint32_t v, float w, std::uint8_t t) {
            edges.emplace_back(u, v, w, t);
        });
        return edges;
    };
    CHECK(build_once() == build_once());
}
