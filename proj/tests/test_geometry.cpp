#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>

#include "polymem/geom.hpp"
#include "polymem/lp.hpp"
#include "polymem/oracle.hpp"

using namespace polymem;

namespace {

Polytope q0_polytope(int d) {
    return Polytope(d, box_halfspaces(unit_box(d)));
}

// tangent halfspaces of ball(center 0, r) at random directions, plus the box
Polytope random_tangent_body(int d, int n, double r, uint64_t seed) {
    Rng rng(seed);
    std::vector<Halfspace> hs;
    for (int i = 0; i < n; ++i) hs.emplace_back(rng.unit_vector(d), r);
    for (auto& h : box_halfspaces(unit_box(d))) hs.push_back(h);
    return Polytope(d, std::move(hs));
}

}  // namespace

TEST_CASE("membership against the definition") {
    Polytope K = q0_polytope(2);
    CHECK(exact_membership(K, {0.0, 0.0}));
    CHECK_FALSE(exact_membership(K, {1.0, 0.0}));

    Polytope B = random_tangent_body(2, 32, 0.25, 7);
    Rng rng(11);
    for (int it = 0; it < 10000; ++it) {
        Vec q = rng.point_in_box(unit_box(2));
        bool scan = true;
        for (const auto& h : B.halfspaces)
            if (dot(h.normal, q) > h.offset + kTol.membership) scan = false;
        CHECK(exact_membership(B, q) == scan);
    }
    CHECK_THROWS(exact_membership(K, {0.0, 0.0, 0.0}));
}

TEST_CASE("cell feasibility by LP") {
    Polytope K = q0_polytope(2);
    CHECK(feasible(K, QuadtreeCell::root(2)));

    // many tangent planes of a radius-0.1 ball; the (3,3) cell at level 2
    // starts 0.25 away from the origin
    std::vector<Halfspace> hs;
    int m = 256;
    for (int i = 0; i < m; ++i) {
        double a = 2.0 * M_PI * i / m;
        hs.emplace_back(Vec{std::cos(a), std::sin(a)}, 0.1);
    }
    Polytope ball2(2, std::move(hs));
    QuadtreeCell far_cell{2, {3, 3}};
    CHECK_FALSE(feasible(ball2, far_cell));
    QuadtreeCell near_cell{2, {2, 2}};
    CHECK(feasible(ball2, near_cell));

    // shared boundary face still counts as intersecting
    std::vector<Halfspace> half = box_halfspaces(unit_box(2));
    half.emplace_back(Vec{1.0, 0.0}, 0.0);
    Polytope left(2, std::move(half));
    QuadtreeCell pos{1, {1, 1}};
    CHECK(feasible(left, pos));
}

TEST_CASE("vertex enumeration on known bodies") {
    VertexSet v = enumerate_vertices(q0_polytope(2));
    CHECK(v.pts.size() == 4);
    double c = 1.0 / (2.0 * std::sqrt(2.0));
    for (const auto& p : v.pts) {
        CHECK(std::abs(std::abs(p[0]) - c) < 1e-12);
        CHECK(std::abs(std::abs(p[1]) - c) < 1e-12);
    }

    std::vector<Halfspace> shs;
    for (int i = 0; i < 3; ++i) {
        Vec n(3, 0.0);
        n[i] = -1.0;
        shs.emplace_back(n, 0.1);
    }
    shs.emplace_back(Vec{1.0, 1.0, 1.0}, 0.1);
    VertexSet sv = enumerate_vertices(Polytope(3, shs));
    CHECK(sv.pts.size() == 4);
}

namespace {

// exact rational vertex count for integer halfspace data in 3d
int rational_vertex_count(const std::vector<std::array<long long, 4>>& rows) {
    using I = __int128;
    auto det3 = [](I a, I b, I c, I d, I e, I f, I g, I h, I i) {
        return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
    };
    size_t n = rows.size();
    std::vector<std::array<I, 4>> verts;  // numerators and positive denominator
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            for (size_t k = j + 1; k < n; ++k) {
                const auto &A = rows[i], &B = rows[j], &C = rows[k];
                I D = det3(A[0], A[1], A[2], B[0], B[1], B[2], C[0], C[1], C[2]);
                if (D == 0) continue;
                I N0 = det3(A[3], A[1], A[2], B[3], B[1], B[2], C[3], C[1], C[2]);
                I N1 = det3(A[0], A[3], A[2], B[0], B[3], B[2], C[0], C[3], C[2]);
                I N2 = det3(A[0], A[1], A[3], B[0], B[1], B[3], C[0], C[1], C[3]);
                if (D < 0) {
                    D = -D;
                    N0 = -N0;
                    N1 = -N1;
                    N2 = -N2;
                }
                bool ok = true;
                for (const auto& R : rows) {
                    I lhs = R[0] * N0 + R[1] * N1 + R[2] * N2;
                    if (lhs > R[3] * D) {
                        ok = false;
                        break;
                    }
                }
                if (!ok) continue;
                bool dup = false;
                for (const auto& V : verts)
                    if (V[0] * D == N0 * V[3] && V[1] * D == N1 * V[3] &&
                        V[2] * D == N2 * V[3]) {
                        dup = true;
                        break;
                    }
                if (!dup) verts.push_back({N0, N1, N2, D});
            }
    return int(verts.size());
}

}  // namespace

TEST_CASE("vertex enumeration matches the exact rational oracle") {
    Rng rng(1234);
    std::vector<std::array<long long, 4>> rows;
    for (int i = 0; i < 3; ++i) {
        std::array<long long, 4> r{0, 0, 0, 3};
        r[i] = 1;
        rows.push_back(r);
        r[i] = -1;
        rows.push_back(r);
    }
    while (rows.size() < 20) {
        std::array<long long, 4> r;
        long long s = 0;
        for (int i = 0; i < 3; ++i) {
            r[i] = (long long)(rng.index(19)) - 9;
            s += r[i] * r[i];
        }
        if (s == 0) continue;
        r[3] = 1 + (long long)rng.index(4);
        rows.push_back(r);
    }
    int exact = rational_vertex_count(rows);

    std::vector<Halfspace> hs;
    for (const auto& r : rows)
        hs.emplace_back(Vec{double(r[0]), double(r[1]), double(r[2])}, double(r[3]));
    VertexSet v = enumerate_vertices(Polytope(3, hs));
    CHECK(int(v.pts.size()) == exact);
    CHECK(exact > 4);
}

namespace {

// exact nearest point: project onto every active-set candidate (affine hulls
// of up to d facet planes), keep feasible projections
double exact_distance(const Polytope& K, const Vec& q) {
    if (K.contains(q)) return 0.0;
    int d = K.dim;
    int n = K.size();
    double best = 1e300;
    std::vector<int> pick;
    auto try_subset = [&](const std::vector<int>& S) {
        int k = int(S.size());
        std::vector<double> G(size_t(k) * k), rhs(k);
        for (int a = 0; a < k; ++a) {
            const auto& ha = K.halfspaces[S[a]];
            rhs[a] = ha.eval(q);
            for (int b = 0; b < k; ++b)
                G[a * k + b] = dot(ha.normal, K.halfspaces[S[b]].normal);
        }
        // x = q - N^T lambda with G lambda = N q - b
        std::vector<double> lam = rhs;
        std::vector<double> M = G;
        for (int c = 0; c < k; ++c) {  // tiny gaussian elimination
            int p = c;
            for (int r2 = c + 1; r2 < k; ++r2)
                if (std::abs(M[r2 * k + c]) > std::abs(M[p * k + c])) p = r2;
            if (std::abs(M[p * k + c]) < 1e-12) return;
            for (int cc = 0; cc < k; ++cc) std::swap(M[c * k + cc], M[p * k + cc]);
            std::swap(lam[c], lam[p]);
            for (int r2 = 0; r2 < k; ++r2) {
                if (r2 == c) continue;
                double f = M[r2 * k + c] / M[c * k + c];
                for (int cc = 0; cc < k; ++cc) M[r2 * k + cc] -= f * M[c * k + cc];
                lam[r2] -= f * lam[c];
            }
        }
        Vec x = q;
        for (int a = 0; a < k; ++a) {
            double la = lam[a] / M[a * k + a];
            for (int i = 0; i < d; ++i) x[i] -= la * K.halfspaces[S[a]].normal[i];
        }
        for (const auto& h : K.halfspaces)
            if (h.eval(x) > 1e-9) return;
        best = std::min(best, dist(q, x));
    };
    std::function<void(int, int)> rec = [&](int start, int left) {
        if (left == 0) {
            try_subset(pick);
            return;
        }
        for (int i = start; i < n; ++i) {
            pick.push_back(i);
            rec(i + 1, left - 1);
            pick.pop_back();
        }
    };
    for (int k = 1; k <= d; ++k) rec(0, k);
    return best;
}

}  // namespace

TEST_CASE("distance oracle basics and exact cross-check") {
    Polytope K2 = q0_polytope(2);
    BodyOracle O2(K2);
    CHECK(distance_to_polytope(O2, {0.0, 0.0}) == 0.0);
    double c = 1.0 / (2.0 * std::sqrt(2.0));
    CHECK(std::abs(distance_to_polytope(O2, {0.5 + c, 0.0}) - 0.5) < 1e-9);

    Polytope K3 = random_tangent_body(3, 24, 0.2, 99);
    BodyOracle O3(K3);
    Rng rng(100);
    Box probe{Vec(3, -0.8), Vec(3, 0.8)};
    for (int it = 0; it < 200; ++it) {
        Vec q = rng.point_in_box(probe);
        double got = distance_to_polytope(O3, q);
        double want = exact_distance(K3, q);
        CHECK(std::abs(got - want) < 1e-7);
    }
}

TEST_CASE("outer Hausdorff distance") {
    // dense tangents keep every vertex inside the inscribed ball, which the
    // growth-factor bounds need
    Polytope K = random_tangent_body(2, 64, 0.25, 5);
    BodyOracle OK(K);
    for (const auto& v : OK.verts.pts) CHECK(norm(v) <= inscribed_radius(2));
    CHECK(hausdorff_outer(OK, OK) < 1e-12);

    // uniform growth of a fat origin-centered body lands between the
    // inscribed-scaled and circumscribed bounds
    double eps = 0.05;
    double grow = 1.0 + 2.0 * std::sqrt(2.0) * eps;
    std::vector<Halfspace> ghs;
    for (const auto& h : K.halfspaces) ghs.emplace_back(h.normal, h.offset * grow);
    BodyOracle OG{Polytope(2, ghs)};
    double gamma = 1e300;
    double r0 = inscribed_radius(2);
    for (const auto& h : K.halfspaces) gamma = std::min(gamma, h.offset / r0);
    double hd = hausdorff_outer(OG, OK);
    CHECK(hd >= gamma * eps - 1e-9);
    CHECK(hd <= eps + 1e-9);

    CHECK_THROWS(hausdorff_outer(OK, OG));
}

TEST_CASE("sphere sampling density") {
    Ball S{{0.0, 0.0}, 3.0};
    double spacing = std::sqrt(0.04) / 4.0;
    auto pts = sphere_sample(S, spacing);
    CHECK(pts.size() >= 377);
    for (const auto& p : pts) CHECK(std::abs(norm(p) - 3.0) < 1e-12);

    std::vector<double> ang;
    for (const auto& p : pts) ang.push_back(std::atan2(p[1], p[0]));
    std::sort(ang.begin(), ang.end());
    double worst = 2.0 * M_PI + ang.front() - ang.back();
    for (size_t i = 1; i < ang.size(); ++i) worst = std::max(worst, ang[i] - ang[i - 1]);
    CHECK(3.0 * worst <= spacing + 1e-12);  // arc length bounds the chord

    auto coarse = sphere_sample(Ball{{0.0, 0.0, 0.0}, 1.0}, 2.0);
    CHECK(coarse.size() >= 6);

    auto fine = sphere_sample(Ball{{0.0, 0.0, 0.0}, 1.0}, 0.1);
    Rng rng(3);
    for (int it = 0; it < 10000; ++it) {
        Vec u = rng.unit_vector(3);
        double best = 1e300;
        for (const auto& p : fine) best = std::min(best, dist(u, p));
        CHECK(best <= 0.1);
    }
}

TEST_CASE("point location in the quadtree grid") {
    QuadtreeCell root = locate_cell(2, 0, {0.0, 0.0});
    CHECK(root.level == 0);
    CHECK(root.idx == std::vector<int64_t>{0, 0});

    QuadtreeCell tie = locate_cell(2, 1, {0.0, -0.1});
    CHECK(tie.idx == std::vector<int64_t>{1, 0});

    Rng rng(17);
    Box q0 = unit_box(3);
    for (int it = 0; it < 100000; ++it) {
        Vec q = rng.point_in_box(q0);
        QuadtreeCell c = locate_cell(3, 4, q);
        Box b = c.box();
        for (int i = 0; i < 3; ++i) {
            CHECK(q[i] >= b.lo[i] - 1e-12);
            CHECK(q[i] <= b.hi[i] + 1e-12);
        }
    }
    CHECK_THROWS(locate_cell(2, 3, {5.0, 0.0}));
}

TEST_CASE("cell refinement arithmetic") {
    QuadtreeCell c{2, {1, 2, 3}};
    Box pb = c.box();
    CHECK(c.diameter() == 0.25);
    for (int mask = 0; mask < 8; ++mask) {
        QuadtreeCell ch = c.child(mask);
        CHECK(ch.diameter() == 0.125);
        Box cb = ch.box();
        for (int i = 0; i < 3; ++i) {
            CHECK(cb.lo[i] >= pb.lo[i] - 1e-15);
            CHECK(cb.hi[i] <= pb.hi[i] + 1e-15);
        }
    }
    // shared corners are computed identically from integer indices
    Box b0 = c.child(0).box();
    Box b1 = c.child(1).box();
    CHECK(b0.hi[0] == b1.lo[0]);
}

TEST_CASE("text round trips") {
    Polytope K = random_tangent_body(3, 8, 0.2, 42);
    std::stringstream ss;
    write_polytope(ss, K);
    Polytope K2 = read_polytope(ss);
    CHECK(K2.dim == 3);
    CHECK(K2.size() == K.size());
    for (int i = 0; i < K.size(); ++i) {
        CHECK(dist(K.halfspaces[i].normal, K2.halfspaces[i].normal) < 1e-15);
        CHECK(std::abs(K.halfspaces[i].offset - K2.halfspaces[i].offset) < 1e-15);
    }

    std::stringstream ps("2 2\n0.25, -0.5\n0.125 0.75\n");
    auto pts = read_points(ps);
    CHECK(pts.size() == 2);
    CHECK(pts[1][1] == 0.75);
}
