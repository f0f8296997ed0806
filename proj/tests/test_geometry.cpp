// Copyright helmtrace contributors.
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "helmtrace/geometry.hpp"

using namespace helmtrace;

TEST_SUITE("geometry") {

TEST_CASE("sigmoid transform: bijection, symmetry, endpoint flatness") {
    for (int p : {2, 3, 4}) {
        Sigmoid s(p);
        CHECK(s.w(0.0) == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(s.w(1.0) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(s.w(0.5) == doctest::Approx(0.5).epsilon(1e-14));
        // strictly increasing
        double prev = -1.0;
        for (int i = 0; i <= 200; ++i) {
            const double x = i / 200.0;
            CHECK(s.w(x) > prev);
            prev = s.w(x);
        }
        // symmetry about 1/2
        for (double x : {0.1, 0.23, 0.4})
            CHECK(s.w(x) + s.w(1.0 - x) == doctest::Approx(1.0).epsilon(1e-14));
        // analytic derivatives match finite differences
        for (double x : {0.2, 0.5, 0.77}) {
            const double h = 1e-6;
            CHECK(s.wp(x) == doctest::Approx((s.w(x + h) - s.w(x - h)) / (2 * h)).epsilon(1e-6));
            CHECK(s.wpp(x) ==
                  doctest::Approx((s.wp(x + h) - s.wp(x - h)) / (2 * h)).epsilon(1e-5));
        }
    }
    // p=3: w'(0) = w'(1) = 0 numerically via finite differences
    Sigmoid s3(3);
    const double h = 1e-5;
    CHECK(std::abs((s3.w(h) - s3.w(0.0)) / h) < 1e-9);
    CHECK(std::abs((s3.w(1.0) - s3.w(1.0 - h)) / h) < 1e-9);
    CHECK_THROWS_AS(Sigmoid(1), GeometryError);
}

TEST_CASE("node spacing near the corner scales like the sigmoid degree") {
    for (int p : {2, 3}) {
        Sigmoid s(p);
        auto corner_gap = [&](int n) { return s.w(1.5 / n) - s.w(0.5 / n); };
        const double r = corner_gap(128) / corner_gap(64);
        const double order = -std::log2(r); // gap ~ N^{-p}
        CHECK(order == doctest::Approx(double(p)).epsilon(0.15));
    }
}

TEST_CASE("three-subdomain preset: closure, matching, counts, junctions") {
    const int n = 16;
    Geometry g = build_geometry(GeometryKind::three_subdomain_halfdisks, n, 3);
    REQUIRE(g.curves.size() == 3);
    REQUIRE(g.interfaces.size() == 3);

    for (const auto& c : g.curves) CHECK(c.size() == 2 * n);
    CHECK(g.robin_unknowns() == 6 * n);
    CHECK(g.skeleton_nodes() == 3 * n);

    // matched meshes: interface nodes coincide across the two sides
    for (const auto& f : g.interfaces) {
        for (int k = 0; k < f.size(); ++k) {
            const Vec2 a = g.curves[std::size_t(f.id.lo)].x[std::size_t(f.nodes_lo[std::size_t(k)])];
            const Vec2 b = g.curves[std::size_t(f.id.hi)].x[std::size_t(f.nodes_hi[std::size_t(k)])];
            CHECK((a - b).norm() < 1e-13);
        }
    }

    // junctions at (+1,0), (-1,0)
    REQUIRE(g.junctions.size() == 2);
    CHECK(std::abs(g.junctions[0].x) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(g.junctions[0].y) < 1e-14);

    // no node sits on a junction
    for (const auto& c : g.curves)
        for (const auto& q : c.x)
            for (const auto& j : g.junctions) CHECK((q - j).norm() > 1e-6);

    // outward normals on the circular arcs of interior subdomains point away
    // from the centroid; exterior normals point toward the disk
    for (int dom : {1, 2}) {
        const Curve& c = g.curves[std::size_t(dom)];
        Vec2 centroid{0, 0};
        for (const auto& q : c.x) centroid = centroid + q * (1.0 / c.size());
        for (int i = 0; i < c.size(); ++i)
            if (c.x[std::size_t(i)].norm() > 0.999)
                CHECK(c.normal[std::size_t(i)].dot(c.x[std::size_t(i)] - centroid) > 0.0);
    }
    const Curve& c0 = g.curves[0];
    for (int i = 0; i < c0.size(); ++i)
        CHECK(c0.normal[std::size_t(i)].dot(c0.x[std::size_t(i)]) < 0.0);
}

TEST_CASE("DDM unknown total for n=64 is 384") {
    Geometry g = build_geometry(GeometryKind::three_subdomain_halfdisks, 64, 3);
    CHECK(g.robin_unknowns() == 384);
}

TEST_CASE("corner weights vanish at the sigmoid rate") {
    const int n = 32, p = 3;
    Geometry g = build_geometry(GeometryKind::three_subdomain_halfdisks, n, p);
    const Curve& c = g.curves[1];
    const double w_corner = c.what[0];                 // node nearest a junction
    const double w_mid = c.what[std::size_t(n / 2)];   // mid-arc node
    CHECK(w_corner < w_mid);
    const double bound = std::pow(2.0 / (2.0 * n), p - 1);
    CHECK(w_corner / w_mid < 40.0 * bound);
    CHECK(w_corner > 0.0);
}

TEST_CASE("five-subdomain preset: interfaces, counts, quadruple junction") {
    const int n = 8;
    Geometry g = build_geometry(GeometryKind::five_subdomain_quadrants, n, 3);
    REQUIRE(g.curves.size() == 5);
    REQUIRE(g.interfaces.size() == 8);
    CHECK(g.robin_unknowns() == 16 * n);
    for (int dom = 1; dom <= 4; ++dom) CHECK(g.curves[std::size_t(dom)].size() == 3 * n);
    CHECK(g.curves[0].size() == 4 * n);
    bool origin_junction = false;
    for (const auto& j : g.junctions) origin_junction |= j.norm() < 1e-13;
    CHECK(origin_junction);
    // interface ordering follows the solver data layout
    CHECK(g.interfaces[0].id == InterfaceId(1, 2));
    CHECK(g.interfaces[1].id == InterfaceId(3, 4));
    CHECK(g.interfaces[2].id == InterfaceId(2, 3));
    CHECK(g.interfaces[3].id == InterfaceId(1, 4));
    for (const auto& f : g.interfaces)
        for (int k = 0; k < f.size(); ++k) {
            const Vec2 a = g.curves[std::size_t(f.id.lo)].x[std::size_t(f.nodes_lo[std::size_t(k)])];
            const Vec2 b = g.curves[std::size_t(f.id.hi)].x[std::size_t(f.nodes_hi[std::size_t(k)])];
            CHECK((a - b).norm() < 1e-13);
        }
}

TEST_CASE("single-disk preset is a smooth closed curve") {
    const int n = 32;
    Geometry g = build_geometry(GeometryKind::single_disk, n, 3);
    CHECK(g.curves.size() == 2);
    CHECK(g.curves[1].size() == n);
    CHECK(g.junctions.empty());
    for (int i = 0; i < n; ++i)
        CHECK(g.curves[1].w[std::size_t(i)] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("odd n is rejected; non-closing custom chain is rejected") {
    CHECK_THROWS_AS(build_geometry(GeometryKind::three_subdomain_halfdisks, 15, 3),
                    GeometryError);
    std::vector<Arc> arcs = {Arc::segment({0, 0}, {1, 0}), Arc::segment({1, 0}, {2, 1})};
    std::vector<std::vector<CurveArc>> chains = {
        {{0, true, InterfaceId(0, 1)}, {1, true, InterfaceId(0, 1)}}};
    CHECK_THROWS_AS(build_custom_geometry(arcs, chains, {InterfaceId(0, 1)}, 8, 3),
                    GeometryError);
}

TEST_CASE("membership assignment for preset points") {
    Geometry g3 = build_geometry(GeometryKind::three_subdomain_halfdisks, 8, 3);
    CHECK(subdomain_of_point(g3, {0.2, 0.3}) == 1);
    CHECK(subdomain_of_point(g3, {0.2, -0.3}) == 2);
    CHECK(subdomain_of_point(g3, {2.0, 0.0}) == 0);
    Geometry g5 = build_geometry(GeometryKind::five_subdomain_quadrants, 8, 3);
    CHECK(subdomain_of_point(g5, {-0.3, -0.4}) == 3);
    CHECK(subdomain_of_point(g5, {0.3, -0.4}) == 4);
}

} // TEST_SUITE
