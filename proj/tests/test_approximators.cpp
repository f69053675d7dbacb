#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "polymem/approx.hpp"
#include "polymem/geom.hpp"
#include "polymem/oracle.hpp"

using namespace polymem;

namespace {

Polytope tangent_body(int d, int n, double r, uint64_t seed) {
    Rng rng(seed);
    std::vector<Halfspace> hs;
    for (int i = 0; i < n; ++i) hs.emplace_back(rng.unit_vector(d), r);
    for (auto& h : box_halfspaces(unit_box(d))) hs.push_back(h);
    return Polytope(d, std::move(hs));
}

// least squares slope of ln(y) against ln(1/eps)
double loglog_slope(const std::vector<double>& eps, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = int(eps.size());
    for (int i = 0; i < n; ++i) {
        double x = std::log(1.0 / eps[i]);
        double v = std::log(y[i]);
        sx += x;
        sy += v;
        sxx += x * x;
        sxy += x * v;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("global sphere-support approximation is outer and close") {
    std::vector<Halfspace> hs;
    hs.emplace_back(Vec{1.0, 0.0}, 0.25);
    hs.emplace_back(Vec{-1.0, 0.0}, 0.25);
    hs.emplace_back(Vec{0.0, 1.0}, 0.25);
    hs.emplace_back(Vec{0.0, -1.0}, 0.25);
    BodyOracle K{Polytope(2, hs)};
    Polytope P = dudley_approx(K, 0.5);
    BodyOracle OP(P);
    CHECK(hausdorff_outer(OP, K) <= 0.5);
}

TEST_CASE("sphere-support facet counts scale linearly in 3d") {
    BodyOracle K{tangent_body(3, 32, 0.2, 40)};
    std::vector<double> epses{0.2, 0.1, 0.05, 0.025};
    std::vector<double> counts;
    for (double e : epses) {
        Polytope P = dudley_approx(K, e);
        counts.push_back(double(P.size()));

        // spot-check the supporting property
        for (int i = 0; i < P.size(); i += 97) {
            double slack = 1e300;
            for (const auto& v : K.verts.pts)
                slack = std::min(slack, -P.halfspaces[i].eval(v));
            CHECK(slack >= -1e-9);
        }
    }
    double slope = loglog_slope(epses, counts);
    CHECK(slope == doctest::Approx(1.0).epsilon(0.3));

    // sample-set size stays under the frozen density constant
    for (double e : epses) {
        auto samples = dudley_samples(K, e);
        CHECK(double(samples.size()) * e <= 10500.0);
    }
}

TEST_CASE("supports touch the body") {
    BodyOracle K{tangent_body(2, 24, 0.3, 41)};
    auto samples = dudley_samples(K, 0.3);
    for (size_t i = 0; i < samples.size(); i += 13) {
        const auto& s = samples[i];
        CHECK(std::abs(s.support.eval(s.contact)) < 1e-9);
        CHECK(dot(s.support.normal, sub(s.sphere_point, s.contact)) > 0.0);
        double worst = -1e300;
        for (const auto& v : K.verts.pts) worst = std::max(worst, s.support.eval(v));
        CHECK(worst <= 1e-9);
    }
}

TEST_CASE("column table on the full box") {
    Polytope K(2, box_halfspaces(unit_box(2)));
    ColumnTable T = bentley_columns(K, 0.1);
    double side = unit_box_side(2);
    CHECK(T.nonempty_count() == int64_t(T.range.size()));
    for (const auto& [lo, hi] : T.range) {
        CHECK(lo == doctest::Approx(-side / 2).epsilon(1e-9));
        CHECK(hi == doctest::Approx(side / 2).epsilon(1e-9));
    }
}

TEST_CASE("column table agrees with the band oracle") {
    // bevel two opposite corners so the diagonal realizes diameter 1
    std::vector<Halfspace> hs = box_halfspaces(unit_box(2));
    hs.emplace_back(Vec{1.0, -1.0}, 0.28 * std::sqrt(2.0));
    hs.emplace_back(Vec{-1.0, 1.0}, 0.28 * std::sqrt(2.0));
    Polytope K(2, hs);
    BodyOracle O(K);
    double diam = 0.0;
    for (const auto& a : O.verts.pts)
        for (const auto& b : O.verts.pts) diam = std::max(diam, dist(a, b));
    CHECK(diam == doctest::Approx(1.0).epsilon(1e-9));

    double eps = 0.05;
    ColumnTable T = bentley_columns(K, eps);
    Rng rng(50);
    Box q0 = unit_box(2);
    int inside_n = 0, far_n = 0;
    for (int it = 0; it < 10000; ++it) {
        Vec q = rng.point_in_box(q0);
        if (exact_membership(K, q)) {
            CHECK(T.query(q));
            ++inside_n;
        } else if (distance_to_polytope(O, q) > eps * diam + 1e-9) {
            CHECK_FALSE(T.query(q));
            ++far_n;
        }
    }
    CHECK(inside_n > 2000);
    CHECK(far_n > 100);
}

TEST_CASE("column table records empty columns") {
    Polytope K = tangent_body(2, 64, 0.15, 42);
    ColumnTable T = bentley_columns(K, 0.05);
    CHECK(T.nonempty_count() < int64_t(T.range.size()));
    Vec corner{0.49 * unit_box_side(2), 0.0};
    CHECK(T.column_of(corner) >= 0);
    CHECK_FALSE(T.query(corner));
}

TEST_CASE("grid hybrid collapses to the sphere construction at alpha 2") {
    BodyOracle K{tangent_body(2, 24, 0.25, 43)};
    double eps = 0.1;
    HybridGrid G = hybrid_tradeoff(K, eps, 2.0);
    CHECK(G.level == 0);
    CHECK(G.boundary_cells() == 1);
    Polytope P = dudley_approx(K, eps);
    REQUIRE(G.planes[0].size() == size_t(P.size()));
    for (size_t i = 0; i < G.planes[0].size(); ++i) {
        CHECK(dist(G.planes[0][i].normal, P.halfspaces[i].normal) < 1e-12);
        CHECK(std::abs(G.planes[0][i].offset - P.halfspaces[i].offset) < 1e-12);
    }
}

TEST_CASE("grid hybrid approaches constant cell payloads at large alpha") {
    BodyOracle K{tangent_body(2, 24, 0.25, 44)};
    HybridGrid G = hybrid_tradeoff(K, 0.05, 64.0);
    CHECK(G.level >= 3);
    size_t worst = 0;
    for (const auto& p : G.planes) worst = std::max(worst, p.size());
    CHECK(worst <= 64);

    // membership still sound
    BodyOracle& O = K;
    Rng rng(51);
    Box q0 = unit_box(2);
    for (int it = 0; it < 2000; ++it) {
        Vec q = rng.point_in_box(q0);
        if (exact_membership(K.poly, q))
            CHECK(G.query(q));
        else if (distance_to_polytope(O, q) > 0.05)
            CHECK_FALSE(G.query(q));
    }
}

TEST_CASE("grid hybrid storage exponent in 3d") {
    BodyOracle K{tangent_body(3, 32, 0.2, 45)};
    std::vector<double> epses{0.2, 0.1, 0.05, 0.025};
    std::vector<double> storage;
    for (double e : epses) {
        HybridGrid G = hybrid_tradeoff(K, e, 4.0);
        storage.push_back(double(G.total_halfspaces()));
    }
    double slope = loglog_slope(epses, storage);
    CHECK(slope == doctest::Approx(1.5).epsilon(0.2));
}

TEST_CASE("uniform growth sandwich") {
    Polytope K = tangent_body(2, 64, 0.25, 46);
    Polytope same = scaled_body(K, 0.0);
    for (int i = 0; i < K.size(); ++i)
        CHECK(same.halfspaces[i].offset == K.halfspaces[i].offset);

    double r0 = inscribed_radius(2);
    double gamma = 1e300;
    for (const auto& h : K.halfspaces) gamma = std::min(gamma, h.offset / r0);
    BodyOracle OK(K);
    for (const auto& v : OK.verts.pts) REQUIRE(norm(v) <= r0 + 1e-12);
    double eps = 0.1;
    BodyOracle OG{scaled_body(K, eps)};
    double hd = hausdorff_outer(OG, OK);
    CHECK(hd >= gamma * eps - 1e-9);
    CHECK(hd <= eps + 1e-9);

    Polytope twice = scaled_body(scaled_body(K, 0.05), 0.05);
    Polytope once = scaled_body(K, 0.05);
    for (int i = 0; i < K.size(); ++i)
        CHECK(twice.halfspaces[i].offset >= once.halfspaces[i].offset);
}

TEST_CASE("witness cover: quiet cells and single facets") {
    Polytope K = tangent_body(2, 32, 0.25, 47);
    QuadtreeCell center{3, {4, 4}};
    SetCoverOutcome out = set_cover_local(K, center, 0.1, 1000);
    CHECK(out.status == SetCoverOutcome::Status::Ok);
    CHECK(out.approx.planes.empty());

    std::vector<Halfspace> hs = box_halfspaces(unit_box(2));
    hs.emplace_back(Vec{1.0, 0.0}, 0.05);
    Polytope cut(2, hs);
    QuadtreeCell straddle{2, {2, 1}};
    SetCoverOutcome one = set_cover_local(cut, straddle, 0.2, 1000);
    CHECK(one.status == SetCoverOutcome::Status::Ok);
    REQUIRE(one.approx.planes.size() == 1);
    CHECK(one.approx.input_ids[0] == 4);
    CHECK(one.approx.planes[0].normal[0] == doctest::Approx(1.0));
}

TEST_CASE("witness cover matches the greedy bound against brute force") {
    // small bodies so optimal covers are enumerable
    for (uint64_t seed : {60u, 61u, 62u, 63u}) {
        Rng rng(seed);
        std::vector<Halfspace> hs;
        for (int i = 0; i < 8; ++i) hs.emplace_back(rng.unit_vector(2), 0.22 + 0.05 * rng.uniform());
        for (auto& h : box_halfspaces(unit_box(2))) hs.push_back(h);
        Polytope K(2, hs);
        QuadtreeCell cell{1, {int64_t(rng.index(2)), int64_t(rng.index(2))}};
        double eps = 0.25;
        SetCoverOutcome out = set_cover_local(K, cell, eps, 1000);
        REQUIRE(out.status == SetCoverOutcome::Status::Ok);
        if (out.approx.planes.empty()) continue;

        // replicate the witness grid to evaluate covers exactly
        int d = 2;
        double r0 = inscribed_radius(d);
        double gamma = 1e300;
        for (const auto& h : K.halfspaces) gamma = std::min(gamma, h.offset / r0);
        double eps_eff = std::min(eps, 2.0 / std::sqrt(2.0));
        double beta = std::sqrt(2.0) * eps_eff / 2.0;
        double delta = gamma * eps_eff / 4.0;
        Box cb = cell.box();
        int64_t m = int64_t(std::ceil(cb.side(0) * std::sqrt(2.0) / delta));
        double pitch = cb.side(0) / double(m);
        double grow2 = (1.0 + beta) * (1.0 + beta);
        std::vector<Vec> R;
        for (int64_t i = 0; i <= m; ++i)
            for (int64_t j = 0; j <= m; ++j) {
                Vec g{cb.lo[0] + i * pitch, cb.lo[1] + j * pitch};
                for (const auto& h : K.halfspaces)
                    if (dot(h.normal, g) > grow2 * h.offset) {
                        R.push_back(g);
                        break;
                    }
            }
        REQUIRE(!R.empty());

        int n = K.size();
        std::vector<std::vector<bool>> covers(n, std::vector<bool>(R.size(), false));
        for (int j = 0; j < n; ++j)
            for (size_t i = 0; i < R.size(); ++i)
                covers[j][i] = dot(K.halfspaces[j].normal, R[i]) >
                               (1.0 + beta) * K.halfspaces[j].offset;

        int best = n + 1;
        for (uint32_t mask = 1; mask < (1u << n); ++mask) {
            if (__builtin_popcount(mask) >= best) continue;
            bool all = true;
            for (size_t i = 0; all && i < R.size(); ++i) {
                bool cov = false;
                for (int j = 0; !cov && j < n; ++j)
                    if (mask & (1u << j)) cov = covers[j][i];
                all = cov;
            }
            if (all) best = __builtin_popcount(mask);
        }
        REQUIRE(best <= n);
        double harm = 1.0 + std::log(double(R.size()));
        CHECK(double(out.approx.planes.size()) <= best * harm + 1e-9);
    }
}

TEST_CASE("witness cover outputs are sound in the cell") {
    for (uint64_t seed : {70u, 71u, 72u, 73u, 74u}) {
        Rng rng(seed);
        Polytope K = tangent_body(2, 24, 0.2 + 0.1 * rng.uniform(), seed * 3 + 1);
        BodyOracle O(K);
        QuadtreeCell cell{2, {int64_t(rng.index(4)), int64_t(rng.index(4))}};
        double eps = 0.1 + 0.2 * rng.uniform();
        SetCoverOutcome out = set_cover_local(K, cell, eps, 100000);
        REQUIRE(out.status == SetCoverOutcome::Status::Ok);
        VerifyReport rep = verify_local_approx(O, out.approx, eps, 2000, seed + 5);
        CHECK(rep.inside_violations == 0);
        CHECK(rep.far_violations == 0);
    }
}

TEST_CASE("cell-local sphere supports at the root equal the global ones") {
    BodyOracle K{tangent_body(2, 24, 0.25, 48)};
    double eps = 0.12;
    LocalApprox A = local_dudley(K, QuadtreeCell::root(2), eps);
    Polytope P = dudley_approx(K, eps);
    REQUIRE(A.planes.size() == size_t(P.size()));
    for (size_t i = 0; i < A.planes.size(); ++i) {
        CHECK(dist(A.planes[i].normal, P.halfspaces[i].normal) < 1e-12);
        CHECK(std::abs(A.planes[i].offset - P.halfspaces[i].offset) < 1e-12);
    }
}

TEST_CASE("cell-local sphere supports collapse on a flat facet") {
    std::vector<Halfspace> hs = box_halfspaces(unit_box(2));
    hs.emplace_back(Vec{1.0, 0.0}, 0.05);
    BodyOracle K{Polytope(2, hs)};
    QuadtreeCell cell{2, {2, 1}};
    LocalApprox A = local_dudley(K, cell, 0.05);
    CHECK(A.planes.size() >= 1);
    CHECK(A.planes.size() <= 10);
    bool has_cut = false;
    for (const auto& h : A.planes)
        has_cut = has_cut || (std::abs(h.normal[0] - 1.0) < 1e-6 &&
                              std::abs(h.offset - 0.05) < 1e-6);
    CHECK(has_cut);
}

TEST_CASE("cell-local sphere supports are sound across random triples") {
    Rng rng(52);
    int done = 0;
    for (uint64_t seed = 0; done < 100; ++seed) {
        int d = (done % 5 == 4) ? 3 : 2;
        double eps = (d == 3) ? 0.2 + 0.2 * rng.uniform() : 0.05 + 0.25 * rng.uniform();
        Polytope K = tangent_body(d, 20, 0.18 + 0.12 * rng.uniform(), 1000 + seed);
        BodyOracle O(K);
        int level = int(rng.index(3));
        QuadtreeCell cell;
        cell.level = level;
        for (int i = 0; i < d; ++i) cell.idx.push_back(int64_t(rng.index(size_t(1) << level)));
        LocalApprox A = local_dudley(O, cell, eps);
        VerifyReport rep = verify_local_approx(O, A, eps, 500, 2000 + seed);
        CHECK(rep.inside_violations == 0);
        CHECK(rep.far_violations == 0);
        ++done;
    }
}

TEST_CASE("the sampled checker notices a missing plane") {
    std::vector<Halfspace> hs = box_halfspaces(unit_box(2));
    hs.emplace_back(Vec{1.0, 0.0}, 0.05);
    Polytope K(2, hs);
    BodyOracle O(K);
    QuadtreeCell cell{2, {2, 1}};
    SetCoverOutcome out = set_cover_local(K, cell, 0.1, 1000);
    REQUIRE(out.status == SetCoverOutcome::Status::Ok);
    REQUIRE(!out.approx.planes.empty());
    VerifyReport good = verify_local_approx(O, out.approx, 0.1, 3000, 7);
    CHECK(good.ok());

    LocalApprox mutated = out.approx;
    mutated.planes.clear();
    mutated.input_ids.clear();
    VerifyReport bad = verify_local_approx(O, mutated, 0.1, 3000, 7);
    CHECK(bad.far_checked > 0);
    CHECK(bad.far_violations > 0);
}

TEST_CASE("full and empty plane lists pass where they should") {
    Polytope K = tangent_body(2, 16, 0.25, 49);
    BodyOracle O(K);

    LocalApprox full;
    full.cell = QuadtreeCell{1, {1, 0}};
    full.method = LocalMethod::SetCover;
    full.planes = K.halfspaces;
    for (int i = 0; i < K.size(); ++i) full.input_ids.push_back(i);
    CHECK(verify_local_approx(O, full, 0.05, 2000, 8).ok());

    LocalApprox empty;
    empty.cell = QuadtreeCell{3, {4, 4}};  // interior cell
    empty.method = LocalMethod::SetCover;
    CHECK(verify_local_approx(O, empty, 0.05, 2000, 9).ok());
}

TEST_CASE("local approximations round trip through text") {
    Polytope K = tangent_body(2, 16, 0.25, 53);
    BodyOracle O(K);
    QuadtreeCell cell{2, {1, 2}};

    SetCoverOutcome sc = set_cover_local(K, cell, 0.15, 1000);
    REQUIRE(sc.status == SetCoverOutcome::Status::Ok);
    std::stringstream s1;
    write_local_approx(s1, sc.approx);
    LocalApprox back1 = read_local_approx(s1, K);
    CHECK(back1.method == LocalMethod::SetCover);
    CHECK(back1.input_ids == sc.approx.input_ids);
    CHECK(back1.cell.idx == cell.idx);

    LocalApprox ld = local_dudley(O, cell, 0.15);
    std::stringstream s2;
    write_local_approx(s2, ld);
    LocalApprox back2 = read_local_approx(s2, K);
    REQUIRE(back2.planes.size() == ld.planes.size());
    for (size_t i = 0; i < ld.planes.size(); ++i)
        CHECK(std::abs(back2.planes[i].offset - ld.planes[i].offset) < 1e-15);
}
