// nnmetric: tests for single-site geodesics. The closed form is checked
// against its defining examples, against sampled-path lengths (which converge
// to it from above), and for the structural properties a geodesic distance
// must satisfy (symmetry, branch continuity, chaining through the site).
// SPDX-License-Identifier: MIT
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "nnmetric/core.hpp"
#include "nnmetric/integrate.hpp"
#include "nnmetric/path.hpp"
#include "nnmetric/single_site.hpp"

using namespace nnm;

namespace {

Vec on_circle(double r, double theta) { return Vec{r * std::cos(theta), r * std::sin(theta)}; }

}  // namespace

TEST_CASE("single-site distance: defining examples") {
    const Vec p{0.0, 0.0};

    // Unit points at angle pi/3: distance sqrt(3)/2.
    CHECK(single_site_nn_distance(p, on_circle(1.0, 0.0), on_circle(1.0, M_PI / 3.0)) ==
          Catch::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-12));

    // Antipodal unit points (angle pi): exactly one, through the site.
    CHECK(single_site_nn_distance(p, Vec{1.0, 0.0}, Vec{-1.0, 0.0}) == 1.0);

    // Collapsing one endpoint onto the site: r^2/2 radial cost.
    CHECK(single_site_nn_distance(p, p, Vec{3.0, 0.0}) == Catch::Approx(4.5).epsilon(1e-12));
    CHECK(site_to_point_nn_distance(p, Vec{3.0, 0.0}) == Catch::Approx(4.5).epsilon(1e-12));

    // Same ray, different radii: |r1^2 - r2^2| / 2 (walk straight).
    CHECK(single_site_nn_distance(p, Vec{1.0, 0.0}, Vec{2.0, 0.0}) ==
          Catch::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("single-site distance: symmetry and shift invariance") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int t = 0; t < 200; ++t) {
        const Vec p{u(rng), u(rng)};
        const Vec x{u(rng), u(rng)}, y{u(rng), u(rng)};
        const double a = single_site_nn_distance(p, x, y);
        const double b = single_site_nn_distance(p, y, x);
        CHECK(a == b);  // exactly: the formula is symmetric operation by operation

        const Vec shift{u(rng), u(rng)};
        const Vec ps{p[0] + shift[0], p[1] + shift[1]};
        const Vec xs{x[0] + shift[0], x[1] + shift[1]};
        const Vec ys{y[0] + shift[0], y[1] + shift[1]};
        CHECK(single_site_nn_distance(ps, xs, ys) == Catch::Approx(a).margin(1e-12));
    }
}

TEST_CASE("single-site distance: continuity across the pi/2 branch") {
    const Vec p{0.0, 0.0};
    const double r1 = 1.3, r2 = 0.7;
    const double below = single_site_nn_distance(p, on_circle(r1, 0.0),
                                                 on_circle(r2, M_PI / 2.0 - 1e-9));
    const double at = single_site_nn_distance(p, on_circle(r1, 0.0), on_circle(r2, M_PI / 2.0));
    const double above = single_site_nn_distance(p, on_circle(r1, 0.0),
                                                 on_circle(r2, M_PI / 2.0 + 1e-9));
    CHECK(at == Catch::Approx(0.5 * (r1 * r1 + r2 * r2)).epsilon(1e-12));
    CHECK(std::abs(below - at) < 1e-8);
    CHECK(std::abs(above - at) < 1e-8);
}

TEST_CASE("single-site distance: bounded by straight chord and radial chain") {
    // Lower bound |r1^2 - r2^2|/2 (radial monotone part is unavoidable);
    // upper bounds: straight chord integral and the through-site chain.
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    const PointSet origin({0.0, 0.0}, 2);
    for (int t = 0; t < 100; ++t) {
        const Vec x{u(rng), u(rng)}, y{u(rng), u(rng)};
        if (dist(x, y) < 1e-9) continue;
        const double g = single_site_nn_distance(Vec{0.0, 0.0}, x, y);
        const double r1 = norm(x), r2 = norm(y);
        CHECK(g >= 0.5 * std::abs(r1 * r1 - r2 * r2) - 1e-12);
        CHECK(g <= 0.5 * (r1 * r1 + r2 * r2) + 1e-12);
        CHECK(g <= segment_nn_length(origin, x, y) + 1e-12);
    }
}

TEST_CASE("geodesic path: endpoints exact, length converges from above") {
    const Vec p{0.25, -0.5};
    const PointSet site({0.25, -0.5}, 2);
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int t = 0; t < 20; ++t) {
        const Vec x{u(rng), u(rng)}, y{u(rng), u(rng)};
        if (dist(x, y) < 1e-6) continue;
        const double g = single_site_nn_distance(p, x, y);

        const PolylinePath coarse = single_site_geodesic_path(p, x, y, 64);
        CHECK(coarse.vertex(0) == x);
        CHECK(coarse.vertex(coarse.num_vertices() - 1) == y);
        const double len_coarse = polyline_nn_length(site, coarse);
        CHECK(len_coarse >= g - 1e-10);

        const PolylinePath fine = single_site_geodesic_path(p, x, y, 10000);
        const double len_fine = polyline_nn_length(site, fine);
        CHECK(len_fine >= g - 1e-10);
        CHECK(len_fine - g <= 1e-4 * (g + 1e-12));
        CHECK(len_fine <= len_coarse + 1e-10);
    }
}

TEST_CASE("geodesic path: wide angles route through the site") {
    const Vec p{0.0, 0.0};
    const PolylinePath path =
        single_site_geodesic_path(p, Vec{1.0, 0.0}, Vec{-0.5, -0.5}, 50);
    bool hits_site = false;
    for (std::size_t v = 0; v < path.num_vertices(); ++v)
        hits_site |= dist(path.vertex_ptr(v), p.data(), 2) < 1e-12;
    CHECK(hits_site);
}

TEST_CASE("geodesic path in 3d stays in the spanned plane") {
    const Vec p{0.0, 0.0, 0.0};
    const Vec x{1.0, 0.2, -0.3}, y{-0.1, 0.9, 0.4};
    const double g = single_site_nn_distance(p, x, y);
    const PolylinePath path = single_site_geodesic_path(p, x, y, 2000);

    // Plane normal via cross product of the spanning directions.
    const Vec n{x[1] * y[2] - x[2] * y[1], x[2] * y[0] - x[0] * y[2],
                x[0] * y[1] - x[1] * y[0]};
    const double nn = norm(n);
    REQUIRE(nn > 1e-12);
    for (std::size_t v = 0; v < path.num_vertices(); ++v) {
        const double off = std::abs(dot(path.vertex_ptr(v), n.data(), 3)) / nn;
        CHECK(off < 1e-12);
    }

    const PointSet site({0.0, 0.0, 0.0}, 3);
    CHECK(polyline_nn_length(site, path) == Catch::Approx(g).epsilon(1e-5));
}

TEST_CASE("geodesic path: input validation") {
    const Vec p{0.0, 0.0};
    CHECK_THROWS_AS(single_site_geodesic_path(p, Vec{1.0, 0.0}, Vec{1.0, 0.0}, 10),
                    std::invalid_argument);
    CHECK_THROWS_AS(single_site_geodesic_path(p, Vec{1.0, 0.0}, Vec{0.0, 1.0}, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(single_site_nn_distance(Vec{0.0}, Vec{1.0, 0.0}, Vec{0.0, 1.0}),
                    std::invalid_argument);
}
