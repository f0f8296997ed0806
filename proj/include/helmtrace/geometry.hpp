// Copyright helmtrace contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Subdomain boundaries as chains of analytic arcs with graded (sigmoid)
// meshes. Nodes live on the arcs and are shared verbatim by the two curves
// incident to an interface, so matched meshes hold to the last bit. Each
// closed curve gets a 2*pi parametrization with one equal parameter slot per
// arc and nodes shifted half a step off the arc endpoints.
//
// Weights: the per-arc "canonical" weight w_hat = |d(position)/dx| on the
// arc's own [0,1] coordinate is side-independent; a curve with m arcs sees
// |x'(t)| = w_hat / lambda with lambda = 2*pi/m. Data weighted by w_hat can
// be exchanged across an interface by pure index maps.

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "helmtrace/scenario.hpp"
#include "helmtrace/types.hpp"

namespace helmtrace {

struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Polynomial-ratio graded transform of degree p on [0,1] (the classical
/// corner transform): strictly increasing bijection, symmetric about 1/2,
/// first p-1 derivatives vanishing at both endpoints.
struct Sigmoid {
    int p = 3;
    bool identity = false; // used on smooth closed arcs where no grading is needed

    explicit Sigmoid(int degree, bool ident = false) : p(degree), identity(ident) {
        if (!ident && degree < 2) throw GeometryError("sigmoid degree must be >= 2");
    }

    Real v(Real x) const {
        const Real c = 1.0 / p - 0.5;
        const Real u = 1.0 - 2.0 * x;
        return c * u * u * u + (2.0 * x - 1.0) / p + 0.5;
    }
    Real vp(Real x) const {
        const Real c = 1.0 / p - 0.5;
        const Real u = 1.0 - 2.0 * x;
        return -6.0 * c * u * u + 2.0 / p;
    }
    Real vpp(Real x) const {
        const Real c = 1.0 / p - 0.5;
        return 24.0 * c * (1.0 - 2.0 * x);
    }

    Real w(Real x) const {
        if (identity) return x;
        const Real a = std::pow(v(x), p), b = std::pow(v(1.0 - x), p);
        return a / (a + b);
    }
    Real wp(Real x) const {
        if (identity) return 1.0;
        const Real va = v(x), vb = v(1.0 - x);
        const Real a = std::pow(va, p), b = std::pow(vb, p);
        const Real ap = p * std::pow(va, p - 1) * vp(x);
        const Real bp = -p * std::pow(vb, p - 1) * vp(1.0 - x);
        const Real d = a + b;
        return (ap * b - a * bp) / (d * d);
    }
    Real wpp(Real x) const {
        if (identity) return 0.0;
        const Real va = v(x), vb = v(1.0 - x);
        const Real a = std::pow(va, p), b = std::pow(vb, p);
        const Real ap = p * std::pow(va, p - 1) * vp(x);
        const Real bp = -p * std::pow(vb, p - 1) * vp(1.0 - x);
        const Real app = p * (p - 1) * std::pow(va, p - 2) * vp(x) * vp(x) +
                         p * std::pow(va, p - 1) * vpp(x);
        const Real bpp = p * (p - 1) * std::pow(vb, p - 2) * vp(1.0 - x) * vp(1.0 - x) +
                         p * std::pow(vb, p - 1) * vpp(1.0 - x);
        const Real d = a + b, dp = ap + bp;
        const Real num = ap * b - a * bp;
        const Real nump = app * b - a * bpp;
        return (nump * d - 2.0 * num * dp) / (d * d * d);
    }
};

/// Analytic arc: circular arc or straight segment on s in [0,1].
struct Arc {
    enum class Kind { circle, segment } kind = Kind::segment;
    // circle: center, radius, angles theta0 -> theta1; segment: p0 -> p1
    Vec2 center{0, 0}, p0{0, 0}, p1{0, 0};
    Real radius = 1.0, theta0 = 0.0, theta1 = 0.0;
    bool closed = false; // full circle: periodic, no endpoint grading

    static Arc circle_arc(Vec2 c, Real r, Real a0, Real a1, bool closed_curve = false) {
        Arc a;
        a.kind = Kind::circle;
        a.center = c;
        a.radius = r;
        a.theta0 = a0;
        a.theta1 = a1;
        a.closed = closed_curve;
        return a;
    }
    static Arc segment(Vec2 a, Vec2 b) {
        Arc s;
        s.kind = Kind::segment;
        s.p0 = a;
        s.p1 = b;
        return s;
    }

    Vec2 point(Real s) const {
        if (kind == Kind::circle) {
            const Real th = theta0 + s * (theta1 - theta0);
            return {center.x + radius * std::cos(th), center.y + radius * std::sin(th)};
        }
        return {p0.x + s * (p1.x - p0.x), p0.y + s * (p1.y - p0.y)};
    }
    Vec2 d1(Real s) const {
        if (kind == Kind::circle) {
            const Real th = theta0 + s * (theta1 - theta0), dth = theta1 - theta0;
            return {-radius * dth * std::sin(th), radius * dth * std::cos(th)};
        }
        return {p1.x - p0.x, p1.y - p0.y};
    }
    Vec2 d2(Real s) const {
        if (kind == Kind::circle) {
            const Real th = theta0 + s * (theta1 - theta0), dth = theta1 - theta0;
            return {-radius * dth * dth * std::cos(th), -radius * dth * dth * std::sin(th)};
        }
        return {0.0, 0.0};
    }
    Vec2 start() const { return point(0.0); }
    Vec2 end() const { return point(1.0); }
};

/// Graded nodes on one arc, shared by both incident subdomain boundaries.
struct ArcMesh {
    Arc arc;
    int n = 0;
    std::vector<Vec2> pos, dpos, d2pos; // derivatives w.r.t. the arc coordinate x in [0,1]
    std::vector<Real> what;             // canonical weight |dpos|

    void build(int nodes, const Sigmoid& sig) {
        n = nodes;
        pos.resize(std::size_t(n));
        dpos.resize(std::size_t(n));
        d2pos.resize(std::size_t(n));
        what.resize(std::size_t(n));
        for (int i = 0; i < n; ++i) {
            const Real x = (i + 0.5) / n;
            const Real s = sig.w(x), sp = sig.wp(x), spp = sig.wpp(x);
            const Vec2 a1 = arc.d1(s), a2 = arc.d2(s);
            pos[std::size_t(i)] = arc.point(s);
            dpos[std::size_t(i)] = a1 * sp;
            d2pos[std::size_t(i)] = a2 * (sp * sp) + a1 * spp;
            what[std::size_t(i)] = dpos[std::size_t(i)].norm();
        }
    }
};

/// Interface label: unordered pair of subdomain indices, stored lo < hi.
struct InterfaceId {
    int lo = 0, hi = 0;
    InterfaceId() = default;
    InterfaceId(int a, int b) : lo(std::min(a, b)), hi(std::max(a, b)) {}
    bool operator==(const InterfaceId& o) const { return lo == o.lo && hi == o.hi; }
    std::string label() const { return std::to_string(lo) + "-" + std::to_string(hi); }
};

/// One arc slot in a closed curve: which mesh, traversal direction, interface.
struct CurveArc {
    int mesh = 0;
    bool forward = true;
    InterfaceId iface;
};

/// Closed subdomain boundary with its 2*pi parametrization, t_i = (i+1/2)*2*pi/N.
/// The parametrization is oriented with the subdomain on the left, so the
/// outward normal is the tangent rotated by -90 degrees; this holds for the
/// exterior subdomain as well (its curve runs clockwise around the scatterer).
struct Curve {
    int domain = 0;
    int n = 0; // nodes per arc
    std::vector<CurveArc> arcs;
    Real lambda = 2.0 * pi; // parameter length per arc slot

    std::vector<Vec2> x, xp, xpp;
    std::vector<Real> w;    // |x'(t)|
    std::vector<Real> what; // canonical weight = lambda * |x'(t)|
    std::vector<Vec2> normal;

    int size() const { return int(x.size()); }
    int arc_count() const { return int(arcs.size()); }
    Real grid_step() const { return 2.0 * pi / size(); }
    Real t(int i) const { return (i + 0.5) * grid_step(); }

    /// Curve-node index of arc-canonical node (slot a, arc-local r).
    int node_of(int slot, int r) const {
        return arcs[std::size_t(slot)].forward ? slot * n + r : slot * n + (n - 1 - r);
    }

    void build(const std::vector<ArcMesh>& meshes) {
        const int m = arc_count();
        lambda = 2.0 * pi / m;
        const int total = m * n;
        x.resize(std::size_t(total));
        xp.resize(std::size_t(total));
        xpp.resize(std::size_t(total));
        w.resize(std::size_t(total));
        what.resize(std::size_t(total));
        normal.resize(std::size_t(total));
        for (int a = 0; a < m; ++a) {
            const ArcMesh& am = meshes[std::size_t(arcs[std::size_t(a)].mesh)];
            const bool fwd = arcs[std::size_t(a)].forward;
            for (int i = 0; i < n; ++i) {
                const int gi = a * n + i;
                const int ai = fwd ? i : n - 1 - i;
                const Real sgn = fwd ? 1.0 : -1.0;
                x[std::size_t(gi)] = am.pos[std::size_t(ai)];
                xp[std::size_t(gi)] = am.dpos[std::size_t(ai)] * (sgn / lambda);
                xpp[std::size_t(gi)] = am.d2pos[std::size_t(ai)] * (1.0 / (lambda * lambda));
                w[std::size_t(gi)] = am.what[std::size_t(ai)] / lambda;
                what[std::size_t(gi)] = am.what[std::size_t(ai)];
                const Vec2 tangent = xp[std::size_t(gi)] * (1.0 / w[std::size_t(gi)]);
                normal[std::size_t(gi)] = tangent.rot_m90();
            }
        }
    }
};

/// Interface between two subdomains: its arcs plus aligned node index lists
/// into both incident curves (entry k on either side is the same point).
struct Interface {
    InterfaceId id;
    std::vector<int> mesh_ids;
    std::vector<int> nodes_lo, nodes_hi; // curve-node indices in curves[id.lo], curves[id.hi]

    int size() const { return int(nodes_lo.size()); }
    const std::vector<int>& side(int domain) const {
        if (domain == id.lo) return nodes_lo;
        if (domain == id.hi) return nodes_hi;
        throw GeometryError("domain " + std::to_string(domain) + " not incident to interface " +
                            id.label());
    }
    int other(int domain) const {
        if (domain == id.lo) return id.hi;
        if (domain == id.hi) return id.lo;
        throw GeometryError("domain not incident to interface");
    }
};

struct Geometry {
    GeometryKind kind = GeometryKind::three_subdomain_halfdisks;
    int n = 0;
    std::vector<ArcMesh> meshes;
    std::vector<Curve> curves;         // index = subdomain, 0 = exterior
    std::vector<Curve> curves_fine;    // same curves at doubled node count
    std::vector<Interface> interfaces; // canonical order, see preset builders
    std::vector<Vec2> junctions;

    int interface_index(const InterfaceId& id) const {
        for (std::size_t g = 0; g < interfaces.size(); ++g)
            if (interfaces[g].id == id) return int(g);
        throw GeometryError("no interface " + id.label());
    }
    const Interface& iface(int a, int b) const {
        return interfaces[std::size_t(interface_index(InterfaceId(a, b)))];
    }
    /// Interfaces incident to one subdomain, in the order its arcs appear.
    std::vector<int> interfaces_of(int domain) const {
        std::vector<int> out;
        for (const auto& ca : curves[std::size_t(domain)].arcs) {
            const int g = interface_index(ca.iface);
            bool seen = false;
            for (int h : out) seen |= (h == g);
            if (!seen) out.push_back(g);
        }
        return out;
    }
    /// Total classical interface-data unknown count (one value per curve node).
    int robin_unknowns() const {
        int total = 0;
        for (const auto& c : curves) total += c.size();
        return total;
    }
    int skeleton_nodes() const {
        int total = 0;
        for (const auto& f : interfaces) total += f.size();
        return total;
    }
};

namespace detail {

inline void fill_interface_nodes(Geometry& g) {
    for (auto& f : g.interfaces) {
        f.nodes_lo.clear();
        f.nodes_hi.clear();
        for (int mid : f.mesh_ids) {
            for (int side = 0; side < 2; ++side) {
                const int dom = side == 0 ? f.id.lo : f.id.hi;
                const Curve& c = g.curves[std::size_t(dom)];
                int slot = -1;
                for (int a = 0; a < c.arc_count(); ++a)
                    if (c.arcs[std::size_t(a)].mesh == mid) slot = a;
                if (slot < 0)
                    throw GeometryError("interface " + f.id.label() + " mesh missing from curve " +
                                        std::to_string(dom));
                auto& list = side == 0 ? f.nodes_lo : f.nodes_hi;
                for (int r = 0; r < g.n; ++r) list.push_back(c.node_of(slot, r));
            }
        }
    }
}

inline void check_closed(const Geometry& g, const std::vector<Arc>& arcs) {
    for (const auto& c : g.curves) {
        const int m = c.arc_count();
        for (int a = 0; a < m; ++a) {
            const auto& ca = c.arcs[std::size_t(a)];
            const auto& cb = c.arcs[std::size_t((a + 1) % m)];
            const Arc& arc_a = arcs[std::size_t(ca.mesh)];
            const Arc& arc_b = arcs[std::size_t(cb.mesh)];
            if (arc_a.closed && m == 1) continue;
            const Vec2 ea = ca.forward ? arc_a.end() : arc_a.start();
            const Vec2 sb = cb.forward ? arc_b.start() : arc_b.end();
            if ((ea - sb).norm() > 1e-13)
                throw GeometryError("curve of subdomain " + std::to_string(c.domain) +
                                    " does not close");
        }
    }
}

} // namespace detail

/// Build a geometry from explicit arcs and per-subdomain arc chains.
/// chains[j] lists (arc index, forward?, interface id) for subdomain j.
inline Geometry build_custom_geometry(const std::vector<Arc>& arcs,
                                      const std::vector<std::vector<CurveArc>>& chains,
                                      const std::vector<InterfaceId>& interface_order, int n,
                                      int sigmoid_degree) {
    if (n <= 0 || n % 2 != 0) throw GeometryError("points per interface must be positive and even");
    Geometry g;
    g.kind = GeometryKind::custom;
    g.n = n;
    std::vector<ArcMesh> meshes_fine;
    for (const auto& a : arcs) {
        ArcMesh m, mf;
        m.arc = a;
        m.build(n, Sigmoid(sigmoid_degree, a.closed));
        g.meshes.push_back(std::move(m));
        mf.arc = a;
        mf.build(2 * n, Sigmoid(sigmoid_degree, a.closed));
        meshes_fine.push_back(std::move(mf));
    }
    for (std::size_t j = 0; j < chains.size(); ++j) {
        Curve c;
        c.domain = int(j);
        c.n = n;
        c.arcs = chains[j];
        c.build(g.meshes);
        g.curves.push_back(std::move(c));
        Curve cf;
        cf.domain = int(j);
        cf.n = 2 * n;
        cf.arcs = chains[j];
        cf.build(meshes_fine);
        g.curves_fine.push_back(std::move(cf));
    }
    for (const auto& id : interface_order) {
        Interface f;
        f.id = id;
        for (std::size_t j = 0; j < chains.size(); ++j)
            if (int(j) == id.lo)
                for (const auto& ca : chains[j])
                    if (ca.iface == id) f.mesh_ids.push_back(ca.mesh);
        g.interfaces.push_back(std::move(f));
    }
    detail::check_closed(g, arcs);
    detail::fill_interface_nodes(g);

    // junctions: arc endpoints shared by three or more arcs
    std::vector<Vec2> endpoints;
    std::vector<int> counts;
    for (const auto& a : arcs) {
        if (a.closed) continue;
        for (const Vec2& e : {a.start(), a.end()}) {
            bool found = false;
            for (std::size_t i = 0; i < endpoints.size(); ++i)
                if ((endpoints[i] - e).norm() < 1e-12) {
                    ++counts[i];
                    found = true;
                }
            if (!found) {
                endpoints.push_back(e);
                counts.push_back(1);
            }
        }
    }
    for (std::size_t i = 0; i < endpoints.size(); ++i)
        if (counts[i] >= 3) g.junctions.push_back(endpoints[i]);
    return g;
}

/// Unit disk, possibly split by coordinate axes, per the named presets.
inline Geometry build_geometry(GeometryKind kind, int n, int sigmoid_degree) {
    using K = GeometryKind;
    if (kind == K::single_disk) {
        std::vector<Arc> arcs = {Arc::circle_arc({0, 0}, 1.0, 0.0, 2.0 * pi, /*closed=*/true)};
        std::vector<std::vector<CurveArc>> chains = {
            {{0, false, InterfaceId(0, 1)}}, // exterior runs clockwise
            {{0, true, InterfaceId(0, 1)}},
        };
        Geometry g = build_custom_geometry(arcs, chains, {InterfaceId(0, 1)}, n, sigmoid_degree);
        g.kind = kind;
        return g;
    }
    if (kind == K::three_subdomain_halfdisks) {
        std::vector<Arc> arcs = {
            Arc::circle_arc({0, 0}, 1.0, 0.0, pi),        // 0: upper semicircle
            Arc::circle_arc({0, 0}, 1.0, pi, 2.0 * pi),   // 1: lower semicircle
            Arc::segment({-1.0, 0.0}, {1.0, 0.0}),        // 2: diameter
        };
        std::vector<std::vector<CurveArc>> chains = {
            {{1, false, InterfaceId(0, 2)}, {0, false, InterfaceId(0, 1)}}, // exterior, clockwise
            {{0, true, InterfaceId(0, 1)}, {2, true, InterfaceId(1, 2)}},   // upper half disk
            {{1, true, InterfaceId(0, 2)}, {2, false, InterfaceId(1, 2)}},  // lower half disk
        };
        Geometry g = build_custom_geometry(
            arcs, chains, {InterfaceId(1, 2), InterfaceId(0, 1), InterfaceId(0, 2)}, n,
            sigmoid_degree);
        g.kind = kind;
        return g;
    }
    if (kind == K::five_subdomain_quadrants) {
        std::vector<Arc> arcs = {
            Arc::circle_arc({0, 0}, 1.0, 0.0, 0.5 * pi),        // 0: quarter, quadrant 1
            Arc::circle_arc({0, 0}, 1.0, 0.5 * pi, pi),         // 1: quadrant 2
            Arc::circle_arc({0, 0}, 1.0, pi, 1.5 * pi),         // 2: quadrant 3
            Arc::circle_arc({0, 0}, 1.0, 1.5 * pi, 2.0 * pi),   // 3: quadrant 4
            Arc::segment({0, 0}, {0.0, 1.0}),                   // 4: +y axis (1|2)
            Arc::segment({0, 0}, {-1.0, 0.0}),                  // 5: -x axis (2|3)
            Arc::segment({0, 0}, {0.0, -1.0}),                  // 6: -y axis (3|4)
            Arc::segment({0, 0}, {1.0, 0.0}),                   // 7: +x axis (1|4)
        };
        std::vector<std::vector<CurveArc>> chains = {
            {{3, false, InterfaceId(0, 4)},
             {2, false, InterfaceId(0, 3)},
             {1, false, InterfaceId(0, 2)},
             {0, false, InterfaceId(0, 1)}}, // exterior, clockwise from (1,0)
            {{0, true, InterfaceId(0, 1)}, {4, false, InterfaceId(1, 2)}, {7, true, InterfaceId(1, 4)}},
            {{1, true, InterfaceId(0, 2)}, {5, false, InterfaceId(2, 3)}, {4, true, InterfaceId(1, 2)}},
            {{2, true, InterfaceId(0, 3)}, {6, false, InterfaceId(3, 4)}, {5, true, InterfaceId(2, 3)}},
            {{3, true, InterfaceId(0, 4)}, {7, false, InterfaceId(1, 4)}, {6, true, InterfaceId(3, 4)}},
        };
        Geometry g = build_custom_geometry(
            arcs, chains,
            {InterfaceId(1, 2), InterfaceId(3, 4), InterfaceId(2, 3), InterfaceId(1, 4),
             InterfaceId(0, 1), InterfaceId(0, 2), InterfaceId(0, 3), InterfaceId(0, 4)},
            n, sigmoid_degree);
        g.kind = kind;
        return g;
    }
    throw GeometryError("unsupported geometry kind");
}

inline Geometry build_geometry(const Scenario& s) {
    return build_geometry(s.geometry_kind, s.points_per_interface, s.sigmoid_degree);
}

/// Which subdomain contains a point (preset geometries only; points on cut
/// lines are assigned by sign convention: nonnegative sides win).
inline int subdomain_of_point(const Geometry& g, const Vec2& q) {
    const bool inside = q.norm() < 1.0;
    switch (g.kind) {
        case GeometryKind::single_disk: return inside ? 1 : 0;
        case GeometryKind::three_subdomain_halfdisks:
            if (!inside) return 0;
            return q.y >= 0.0 ? 1 : 2;
        case GeometryKind::five_subdomain_quadrants:
            if (!inside) return 0;
            if (q.x >= 0.0 && q.y >= 0.0) return 1;
            if (q.x < 0.0 && q.y >= 0.0) return 2;
            if (q.x < 0.0 && q.y < 0.0) return 3;
            return 4;
        default: throw GeometryError("membership undefined for custom geometry");
    }
}

} // namespace helmtrace
