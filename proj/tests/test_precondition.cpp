#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "polymem/geom.hpp"
#include "polymem/oracle.hpp"
#include "polymem/precondition.hpp"

using namespace polymem;

namespace {

Polytope tangent_ball_body(int d, int n, double r, uint64_t seed) {
    Rng rng(seed);
    std::vector<Halfspace> hs;
    for (int i = 0; i < n; ++i) hs.emplace_back(rng.unit_vector(d), r);
    for (auto& h : box_halfspaces(unit_box(d))) hs.push_back(h);
    return Polytope(d, std::move(hs));
}

Polytope cross_polytope2() {
    double r0 = inscribed_radius(2);
    std::vector<Halfspace> hs;
    for (int sx : {-1, 1})
        for (int sy : {-1, 1})
            hs.emplace_back(Vec{double(sx), double(sy)}, r0);  // ctor rescales
    return Polytope(2, std::move(hs));
}

}  // namespace

TEST_CASE("canonicalize leaves a symmetric body nearly untouched") {
    CanonicalForm cf = canonicalize(cross_polytope2(), 0.1);
    CHECK(cf.gamma >= 1.0 / 2.0 - 1e-6);
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) {
            double want = (r == c) ? 1.0 : 0.0;
            CHECK(std::abs(cf.map.M[r * 2 + c] - want) < 1e-3);
        }
    CHECK(std::abs(cf.map.shift[0]) < 1e-6);
    CHECK(std::abs(cf.map.shift[1]) < 1e-6);
    CHECK(cf.eps_abs == doctest::Approx(0.1 / (2.0 * std::sqrt(2.0))).epsilon(1e-12));
}

TEST_CASE("canonicalize fattens a thin box") {
    std::vector<Halfspace> hs;
    hs.emplace_back(Vec{1.0, 0.0}, 0.4);
    hs.emplace_back(Vec{-1.0, 0.0}, 0.4);
    hs.emplace_back(Vec{0.0, 1.0}, 0.001);
    hs.emplace_back(Vec{0.0, -1.0}, 0.001);
    CanonicalForm cf = canonicalize(Polytope(2, hs), 0.1);

    double r0 = inscribed_radius(2);
    for (const auto& h : cf.body.halfspaces) CHECK(h.offset >= 0.5 * r0 - 1e-6);
    VertexSet v = enumerate_vertices(cf.body);
    Box q0 = unit_box(2);
    for (const auto& p : v.pts) CHECK(q0.contains(p, 1e-9));
}

TEST_CASE("canonical fatness certificate on random bodies") {
    for (uint64_t seed : {21u, 22u, 23u}) {
        Polytope K = tangent_ball_body(3, 20, 0.18, seed);
        // push it off-center and squash one axis so the map has work to do
        std::vector<Halfspace> hs;
        for (const auto& h : K.halfspaces) {
            Vec n = h.normal;
            n[1] *= 4.0;
            hs.emplace_back(n, h.offset + 0.05 * n[0]);
        }
        CanonicalForm cf = canonicalize(Polytope(3, hs), 0.2);
        CHECK(cf.gamma >= 1.0 / 3.0 - 1e-6);
        double r0 = inscribed_radius(3);
        for (const auto& h : cf.body.halfspaces) CHECK(h.offset >= cf.gamma * r0 - 1e-9);
        VertexSet v = enumerate_vertices(cf.body);
        Box q0 = unit_box(3);
        for (const auto& p : v.pts) CHECK(q0.contains(p, 1e-9));
    }
}

TEST_CASE("mvee rejects flat input") {
    std::vector<Vec> flat{{0.0, 0.0}, {0.1, 0.1}, {0.2, 0.2}};
    CHECK_THROWS(mvee(flat));
}

TEST_CASE("polar points") {
    std::vector<Halfspace> hs;
    hs.emplace_back(Vec{1.0, 0.0}, 0.5);
    hs.emplace_back(Vec{0.0, 1.0}, 0.25);
    auto pts = polar_points(Polytope(2, hs));
    CHECK(dist(pts[0], {2.0, 0.0}) < 1e-12);
    CHECK(dist(pts[1], {0.0, 4.0}) < 1e-12);

    Rng rng(9);
    std::vector<Halfspace> tang;
    for (int i = 0; i < 40; ++i) tang.emplace_back(rng.unit_vector(3), 0.2);
    auto dual = polar_points(Polytope(3, tang));
    for (const auto& p : dual) CHECK(std::abs(norm(p) - 5.0) < 1e-12);

    std::vector<Halfspace> off;
    off.emplace_back(Vec{1.0, 0.0}, -0.1);
    CHECK_THROWS(polar_points(Polytope(2, off)));
}

TEST_CASE("polar involution on a symmetric box") {
    double a = 0.3;
    std::vector<Halfspace> box;
    box.emplace_back(Vec{1.0, 0.0}, a);
    box.emplace_back(Vec{-1.0, 0.0}, a);
    box.emplace_back(Vec{0.0, 1.0}, a);
    box.emplace_back(Vec{0.0, -1.0}, a);
    auto dual = polar_points(Polytope(2, box));
    // conv(dual) is the cross-polytope with vertices (+-1/a, 0), (0, +-1/a);
    // its facets dualize back to the box corners' generators
    std::vector<Halfspace> cross;
    for (int sx : {-1, 1})
        for (int sy : {-1, 1})
            cross.emplace_back(Vec{double(sx), double(sy)}, 1.0 / a);
    for (const auto& p : dual) {
        bool on = false;
        for (const auto& h : cross) on = on || std::abs(h.eval(p)) < 1e-12;
        CHECK(on);
    }
    auto back = polar_points(Polytope(2, cross));
    for (const auto& p : back) {
        CHECK(std::abs(std::abs(p[0]) - a) < 1e-12);
        CHECK(std::abs(std::abs(p[1]) - a) < 1e-12);
    }
}

TEST_CASE("direction-net kernel keeps widths") {
    // a coarse kernel of box corners keeps the corners
    std::vector<Vec> S;
    Rng rng(31);
    for (int i = 0; i < 200; ++i) S.push_back(rng.point_in_box(unit_box(2)));
    for (int sx : {-1, 1})
        for (int sy : {-1, 1}) S.push_back(Vec{0.45 * sx, 0.45 * sy});
    auto idx = epsilon_kernel(S, 1.0);
    CHECK(idx.size() >= 4);
    int corners = 0;
    for (int i : idx)
        if (i >= 200) ++corners;
    CHECK(corners == 4);

    // sphere point cloud: size shrinks by orders of magnitude, widths survive
    std::vector<Vec> sph;
    Rng rng3(32);
    for (int i = 0; i < 10000; ++i) sph.push_back(scale(rng3.unit_vector(3), 0.4));
    double eps = 0.05;
    auto kidx = epsilon_kernel(sph, eps);
    CHECK(kidx.size() <= 400 / eps);
    CHECK(kidx.size() < sph.size() / 4);
    Rng rngu(33);
    for (int it = 0; it < 10000; ++it) {
        Vec u = rngu.unit_vector(3);
        double wfull;
        double lo = 1e300, hi = -1e300, klo = 1e300, khi = -1e300;
        for (const auto& p : sph) {
            double v = dot(u, p);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        for (int i : kidx) {
            double v = dot(u, sph[i]);
            klo = std::min(klo, v);
            khi = std::max(khi, v);
        }
        wfull = hi - lo;
        CHECK(khi - klo >= (1.0 - eps) * wfull - 1e-12);
    }

    // a segment reduces to its endpoints
    std::vector<Vec> seg;
    Vec p0{0.1, 0.2}, p1{0.47, 0.71};
    for (int i = 0; i < 50; ++i) {
        double t = double(i) / 49.0;
        seg.push_back(add(scale(p0, 1.0 - t), scale(p1, t)));
    }
    for (double e : {1.0, 0.3, 0.05}) {
        auto si = epsilon_kernel(seg, e);
        CHECK(si == std::vector<int>{0, 49});
    }

    CHECK_THROWS(epsilon_kernel({}, 0.5));
}

TEST_CASE("halfspace reduction on a disk") {
    int n = 512;
    std::vector<Halfspace> hs;
    for (int i = 0; i < n; ++i) {
        double a = 2.0 * M_PI * i / n;
        hs.emplace_back(Vec{std::cos(a), std::sin(a)}, 0.3);
    }
    Polytope K(2, hs);
    double eps = 0.1;
    CanonicalForm red = reduce_halfspaces(K, eps);

    CHECK(red.body.size() < n / 4);
    CHECK(red.body.size() >= 8);
    CHECK(red.gamma >= 1.0 / 4.0 - 1e-6);
    CHECK(red.eps_abs == doctest::Approx(eps / (8.0 * std::sqrt(2.0))).epsilon(1e-12));

    // genuine sublist of the transformed input, order preserved
    REQUIRE(int(red.source_ids.size()) == red.body.size());
    for (size_t i = 1; i < red.source_ids.size(); ++i)
        CHECK(red.source_ids[i - 1] < red.source_ids[i]);
    AffineMap halfmap = AffineMap::scaling(2, 0.5).composed_with(canonicalize(K, eps).map);
    for (size_t i = 0; i < red.source_ids.size(); ++i) {
        Halfspace h = halfmap.apply(K.halfspaces[red.source_ids[i]]);
        CHECK(dist(h.normal, red.body.halfspaces[i].normal) < 1e-12);
        CHECK(std::abs(h.offset - red.body.halfspaces[i].offset) < 1e-12);
    }

    // the reduced body hugs the full transformed body
    std::vector<Halfspace> full;
    for (const auto& h : K.halfspaces) full.push_back(red.map.apply(h));
    BodyOracle OF{Polytope(2, full)};
    BodyOracle OR_{red.body};
    CHECK(hausdorff_outer(OR_, OF) <= eps / (4.0 * std::sqrt(2.0)) + 1e-9);
}

TEST_CASE("reduction pullback never contradicts the relative band") {
    Polytope K = tangent_ball_body(2, 128, 0.27, 77);
    double eps = 0.15;
    CanonicalForm red = reduce_halfspaces(K, eps);
    BodyOracle OK(K);
    double diam = 0.0;
    for (const auto& a : OK.verts.pts)
        for (const auto& b : OK.verts.pts) diam = std::max(diam, dist(a, b));

    Rng rng(55);
    Box probe{Vec(2, -0.6), Vec(2, 0.6)};
    int inside_checked = 0, far_checked = 0;
    for (int it = 0; it < 10000; ++it) {
        Vec x = rng.point_in_box(probe);
        bool accepted = exact_membership(red.body, red.map.apply(x));
        if (exact_membership(K, x)) {
            CHECK(accepted);
            ++inside_checked;
        } else if (distance_to_polytope(OK, x) > eps * diam) {
            CHECK_FALSE(accepted);
            ++far_checked;
        }
    }
    CHECK(inside_checked > 1000);
    CHECK(far_checked > 1000);
}

TEST_CASE("affine and canonical round trips") {
    Polytope K = tangent_ball_body(3, 16, 0.22, 3);
    CanonicalForm cf = canonicalize(K, 0.1);

    Rng rng(8);
    Box probe{Vec(3, -0.3), Vec(3, 0.3)};
    for (int it = 0; it < 100; ++it) {
        Vec x = rng.point_in_box(probe);
        CHECK(dist(cf.map.apply_inverse(cf.map.apply(x)), x) < 1e-9);
    }

    // halfspace images preserve membership
    for (int it = 0; it < 1000; ++it) {
        Vec x = rng.point_in_box(probe);
        Vec y = cf.map.apply(x);
        for (const auto& h : K.halfspaces) {
            Halfspace hy = cf.map.apply(h);
            if (std::abs(h.eval(x)) < 1e-9) continue;
            CHECK((h.eval(x) <= 0.0) == (hy.eval(y) <= 0.0));
        }
    }

    std::stringstream ss;
    write_canonical(ss, cf);
    CanonicalForm cf2 = read_canonical(ss);
    CHECK(cf2.map.dim == 3);
    CHECK(std::abs(cf2.gamma - cf.gamma) < 1e-15);
    CHECK(std::abs(cf2.eps_abs - cf.eps_abs) < 1e-15);
    CHECK(cf2.body.size() == cf.body.size());
    for (int it = 0; it < 100; ++it) {
        Vec x = rng.point_in_box(probe);
        CHECK(dist(cf.map.apply(x), cf2.map.apply(x)) < 1e-12);
        CHECK(dist(cf.map.apply_inverse(x), cf2.map.apply_inverse(x)) < 1e-9);
    }
}
