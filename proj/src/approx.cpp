#include "polymem/approx.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "polymem/lp.hpp"

namespace polymem {

namespace {

void dedup_planes(std::vector<Halfspace>& hs) {
    std::sort(hs.begin(), hs.end(), [](const Halfspace& a, const Halfspace& b) {
        for (size_t i = 0; i < a.normal.size(); ++i)
            if (a.normal[i] != b.normal[i]) return a.normal[i] < b.normal[i];
        return a.offset < b.offset;
    });
    std::vector<Halfspace> out;
    for (auto& h : hs) {
        if (!out.empty()) {
            const Halfspace& p = out.back();
            bool same = std::abs(h.offset - p.offset) <= kTol.dedup;
            for (size_t i = 0; same && i < h.normal.size(); ++i)
                same = std::abs(h.normal[i] - p.normal[i]) <= kTol.dedup;
            if (same) continue;
        }
        out.push_back(std::move(h));
    }
    hs = std::move(out);
}

}  // namespace

std::vector<DudleySample> dudley_samples(const BodyOracle& K, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("dudley: eps must be positive");
    int d = K.poly.dim;
    Ball sphere{Vec(d, 0.0), 3.0};
    auto pts = sphere_sample(sphere, std::sqrt(eps) / 4.0);
    std::vector<DudleySample> out;
    out.reserve(pts.size());
    for (auto& x : pts) {
        Vec contact;
        nearest_point(K.verts, x, &contact);
        Vec n = sub(x, contact);
        Halfspace h(n, 0.0);
        h.offset = dot(h.normal, contact);
        out.push_back({std::move(x), std::move(contact), std::move(h)});
    }
    return out;
}

Polytope dudley_approx(const BodyOracle& K, double eps) {
    auto samples = dudley_samples(K, eps);
    std::vector<Halfspace> hs;
    hs.reserve(samples.size());
    for (auto& s : samples) hs.push_back(std::move(s.support));
    dedup_planes(hs);
    return Polytope(K.poly.dim, std::move(hs));
}

int64_t ColumnTable::column_of(const Vec& q) const {
    double side = unit_box_side(d);
    int64_t flat = 0, stride = 1;
    for (int i = 0; i < d - 1; ++i) {
        if (std::abs(q[i]) > 0.5 * side + 1e-12) return -1;
        int64_t k = int64_t(std::floor((q[i] + 0.5 * side) / pitch));
        k = std::clamp(k, int64_t(0), int64_t(cols_per_axis - 1));
        flat += k * stride;
        stride *= cols_per_axis;
    }
    return flat;
}

bool ColumnTable::query(const Vec& q) const {
    int64_t c = column_of(q);
    if (c < 0) return false;
    const auto& [lo, hi] = range[c];
    return lo <= hi && q[d - 1] >= lo - kTol.membership && q[d - 1] <= hi + kTol.membership;
}

int64_t ColumnTable::nonempty_count() const {
    int64_t n = 0;
    for (const auto& [lo, hi] : range)
        if (lo <= hi) ++n;
    return n;
}

ColumnTable bentley_columns(const Polytope& K, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("bentley: eps must be positive");
    int d = K.dim;
    double side = unit_box_side(d);
    int m = std::max(1, int(std::ceil(side / eps)));

    ColumnTable T;
    T.d = d;
    T.cols_per_axis = m;
    T.pitch = side / m;
    int64_t total = 1;
    for (int i = 0; i < d - 1; ++i) total *= m;
    T.range.assign(total, {1.0, -1.0});

    Vec cd(d, 0.0);
    cd[d - 1] = 1.0;
    Vec cu(d, 0.0);
    cu[d - 1] = -1.0;
    for (int64_t flat = 0; flat < total; ++flat) {
        Box col = unit_box(d);
        int64_t rest = flat;
        for (int i = 0; i < d - 1; ++i) {
            int64_t k = rest % m;
            rest /= m;
            col.lo[i] = -0.5 * side + k * T.pitch;
            col.hi[i] = col.lo[i] + T.pitch;
        }
        LpResult lo = lp_minimize(cd, K.halfspaces, col);
        if (lo.status != LpStatus::Optimal) continue;
        LpResult hi = lp_minimize(cu, K.halfspaces, col);
        T.range[flat] = {lo.x[d - 1], hi.x[d - 1]};
    }
    return T;
}

bool LocalApprox::accepts(const Vec& q, double tol) const {
    for (const auto& h : planes)
        if (h.eval(q) > tol) return false;
    return true;
}

bool HybridGrid::query(const Vec& q) const {
    QuadtreeCell c = locate_cell(d, level, q);
    int64_t flat = 0, stride = 1;
    for (int i = 0; i < d; ++i) {
        flat += c.idx[i] * stride;
        stride <<= level;
    }
    switch (kind[flat]) {
        case CellKind::Inside: return true;
        case CellKind::Outside: return false;
        default: break;
    }
    for (const auto& h : planes[flat])
        if (h.eval(q) > kTol.membership) return false;
    return true;
}

size_t HybridGrid::total_halfspaces() const {
    size_t n = 0;
    for (const auto& p : planes) n += p.size();
    return n;
}

size_t HybridGrid::boundary_cells() const {
    size_t n = 0;
    for (auto k : kind)
        if (k == CellKind::Boundary) ++n;
    return n;
}

HybridGrid hybrid_tradeoff(const BodyOracle& K, double eps, double alpha) {
    if (!(alpha >= 2.0)) throw std::invalid_argument("hybrid: alpha must be >= 2");
    int d = K.poly.dim;
    double side = unit_box_side(d);
    double r = std::pow(eps, 1.0 - 2.0 / alpha);
    int level = std::max(0, int(std::lround(std::log2(side / r))));

    HybridGrid G;
    G.d = d;
    G.level = level;
    G.eps = eps;
    int64_t m = int64_t(1) << level;
    int64_t total = 1;
    for (int i = 0; i < d; ++i) total *= m;
    G.kind.assign(total, HybridGrid::CellKind::Outside);
    G.planes.resize(total);

    QuadtreeCell c;
    c.level = level;
    c.idx.assign(d, 0);
    for (int64_t flat = 0; flat < total; ++flat) {
        int64_t rest = flat;
        for (int i = 0; i < d; ++i) {
            c.idx[i] = rest % m;
            rest /= m;
        }
        Box b = c.box();
        if (!feasible(K.poly, b)) continue;
        bool interior = true;
        for (uint64_t mask = 0; interior && mask < b.corner_count(); ++mask)
            interior = K.poly.contains(b.corner(mask));
        if (interior) {
            G.kind[flat] = HybridGrid::CellKind::Inside;
            continue;
        }
        G.kind[flat] = HybridGrid::CellKind::Boundary;
        G.planes[flat] = local_dudley(K, c, eps).planes;
    }
    return G;
}

Polytope scaled_body(const Polytope& K, double eps) {
    double grow = 1.0 + 2.0 * std::sqrt(double(K.dim)) * eps;
    Polytope P = K;
    for (auto& h : P.halfspaces) h.offset *= grow;
    return P;
}

SetCoverOutcome set_cover_local(const Polytope& K, const QuadtreeCell& cell,
                                double eps, int64_t budget, int64_t grid_cap) {
    int d = K.dim;
    double r0 = inscribed_radius(d);
    double gamma = 1e300;
    for (const auto& h : K.halfspaces) gamma = std::min(gamma, h.offset / r0);
    if (!(gamma > 0.0))
        throw std::invalid_argument("set_cover_local: body must be fat around the origin");

    // The margin algebra needs eps <= 2/sqrt(d); larger requests only make
    // the job easier, so clamp.
    double eps_eff = std::min(eps, 2.0 / std::sqrt(double(d)));
    double beta = std::sqrt(double(d)) * eps_eff / 2.0;
    double delta = gamma * eps_eff / 4.0;

    SetCoverOutcome out;
    out.approx.cell = cell;
    out.approx.method = LocalMethod::SetCover;

    Box cb = cell.box();
    double cside = cb.side(0);
    int64_t m = std::max(int64_t(1), int64_t(std::ceil(cside * std::sqrt(double(d)) / delta)));
    double points = std::pow(double(m + 1), d);
    if (points > double(grid_cap)) {
        out.status = SetCoverOutcome::Status::GridCap;
        return out;
    }
    double pitch = cside / double(m);
    double grow1 = 1.0 + beta;
    double grow2 = grow1 * grow1;

    // A plane whose maximum over the cell stays under its grown offset cannot
    // fire at any cell point, so only the active planes touch the lattice.
    // Inactive planes have empty coverage sets and greedy never picks them,
    // so the selection is unchanged, just cheaper.
    std::vector<int> act1, act2;
    for (int j = 0; j < K.size(); ++j) {
        const auto& h = K.halfspaces[j];
        double hi = 0.0;
        for (int i = 0; i < d; ++i) hi += h.normal[i] * (h.normal[i] > 0 ? cb.hi[i] : cb.lo[i]);
        if (hi > grow1 * h.offset) act1.push_back(j);
        if (hi > grow2 * h.offset) act2.push_back(j);
    }

    // Lattice-times-planes work cap, same escape hatch as the point cap:
    // coarse cells of many-faceted bodies are cheaper to split than to cover.
    if (points * double(std::max<size_t>(act1.size(), 1)) > 128.0 * double(grid_cap)) {
        out.status = SetCoverOutcome::Status::GridCap;
        return out;
    }

    // witness grid: lattice points of the cell outside the twice-grown body
    std::vector<Vec> R;
    if (!act2.empty()) {
        std::vector<int64_t> odo(d, 0);
        Vec g(d);
        for (;;) {
            for (int i = 0; i < d; ++i) g[i] = cb.lo[i] + odo[i] * pitch;
            for (int j : act2)
                if (dot(K.halfspaces[j].normal, g) > grow2 * K.halfspaces[j].offset) {
                    R.push_back(g);
                    break;
                }
            int i = 0;
            while (i < d && ++odo[i] > m) odo[i++] = 0;
            if (i == d) break;
        }
    }
    if (R.empty()) return out;  // cell clear of the outer band: nothing to separate

    // coverage bitmasks per active halfspace
    size_t words = (R.size() + 63) / 64;
    int n = int(act1.size());
    std::vector<std::vector<uint64_t>> masks(n, std::vector<uint64_t>(words, 0));
    for (int a = 0; a < n; ++a) {
        const auto& h = K.halfspaces[act1[a]];
        for (size_t i = 0; i < R.size(); ++i)
            if (dot(h.normal, R[i]) > grow1 * h.offset) masks[a][i >> 6] |= uint64_t(1) << (i & 63);
    }

    auto picks = greedy_cover(R.size(), masks, budget);
    if (!picks) {
        out.status = SetCoverOutcome::Status::TooLarge;
        return out;
    }
    for (int a : *picks) {
        out.approx.planes.push_back(K.halfspaces[act1[a]]);
        out.approx.input_ids.push_back(act1[a]);
    }
    return out;
}

std::optional<std::vector<int>> greedy_cover(
    size_t n_elems, const std::vector<std::vector<uint64_t>>& masks, int64_t budget) {
    size_t words = (n_elems + 63) / 64;
    std::vector<uint64_t> covered(words, 0);
    std::vector<int> picks;
    size_t ncov = 0;
    while (ncov < n_elems) {
        int best = -1;
        int64_t best_gain = 0;
        for (size_t a = 0; a < masks.size(); ++a) {
            int64_t gain = 0;
            for (size_t w = 0; w < words; ++w)
                gain += __builtin_popcountll(masks[a][w] & ~covered[w]);
            if (gain > best_gain) {
                best_gain = gain;
                best = int(a);
            }
        }
        if (best < 0) throw std::logic_error("greedy_cover: uncoverable element");
        if (int64_t(picks.size()) + 1 > budget) return std::nullopt;
        picks.push_back(best);
        ncov = 0;
        for (size_t w = 0; w < words; ++w) {
            covered[w] |= masks[best][w];
            ncov += __builtin_popcountll(covered[w]);
        }
    }
    return picks;
}

LocalApprox local_dudley_box(const BodyOracle& K, const Box& cell, double eps) {
    int d = K.poly.dim;
    double side = cell.side(0);
    Vec ctr = cell.center();
    double lambda = unit_box_side(d) / side;
    double eps_std = lambda * eps;

    std::vector<Vec> verts_std;
    verts_std.reserve(K.verts.pts.size());
    for (const auto& v : K.verts.pts) verts_std.push_back(scale(sub(v, ctr), lambda));
    VertexSet vs{verts_std};

    Ball sphere{Vec(d, 0.0), 3.0};
    double spacing = std::min(3.0, std::sqrt(eps_std) / 4.0);
    auto pts = sphere_sample(sphere, spacing);

    // Project a coarse net of the cell onto the body. A point of the cell is
    // separated, when it needs to be, by a support whose contact lies within
    // one sample spacing of its own projection, and projection is 1-Lipschitz,
    // so the anchors below mark every contact a query in this cell can need.
    Box q0 = unit_box(d);
    int64_t mn = std::max(int64_t(1),
                          int64_t(std::ceil(q0.side(0) / std::sqrt(eps_std))));
    double net_pitch = q0.side(0) / double(mn);
    std::vector<Vec> anchors;
    {
        std::vector<int64_t> odo(d, 0);
        Vec g(d), w;
        for (;;) {
            for (int i = 0; i < d; ++i) g[i] = q0.lo[i] + odo[i] * net_pitch;
            nearest_point(vs, g, &w);
            anchors.push_back(w);
            int i = 0;
            while (i < d && ++odo[i] > mn) odo[i++] = 0;
            if (i == d) break;
        }
    }
    double margin = spacing + net_pitch * std::sqrt(double(d)) / 2.0 + 1e-9;
    auto anchor_dist = [&](const Vec& x) {
        double best = 1e300;
        for (const auto& a : anchors) best = std::min(best, dist(x, a));
        return best;
    };

    std::vector<Halfspace> planes;
    for (const auto& x : pts) {
        double nearest_v = 1e300;
        for (const auto& v : verts_std) nearest_v = std::min(nearest_v, dist(x, v));
        if (anchor_dist(x) - nearest_v > margin) continue;  // contact provably far

        Vec contact;
        nearest_point(vs, x, &contact);
        if (anchor_dist(contact) > margin) continue;

        Vec n = sub(x, contact);
        Halfspace h(n, 0.0);
        h.offset = dot(h.normal, contact) / lambda + dot(h.normal, ctr);
        planes.push_back(std::move(h));
    }
    dedup_planes(planes);

    LocalApprox A;
    A.method = LocalMethod::LocalDudley;
    A.planes = std::move(planes);
    return A;
}

LocalApprox local_dudley(const BodyOracle& K, const QuadtreeCell& cell, double eps) {
    LocalApprox A = local_dudley_box(K, cell.box(), eps);
    A.cell = cell;
    return A;
}

VerifyReport verify_local_approx(const BodyOracle& K, const LocalApprox& A,
                                 double eps, int samples, uint64_t seed) {
    VerifyReport rep;
    rep.samples = samples;
    Rng rng(seed);
    Box cb = A.cell.box();
    int d = cb.dim();
    uint64_t quads = uint64_t(1) << d;
    for (int s = 0; s < samples; ++s) {
        // stratify over the cell's children round-robin
        uint64_t mask = uint64_t(s) & (quads - 1);
        Box sub = cb;
        for (int i = 0; i < d; ++i) {
            double mid = 0.5 * (cb.lo[i] + cb.hi[i]);
            if (mask & (uint64_t(1) << i))
                sub.lo[i] = mid;
            else
                sub.hi[i] = mid;
        }
        Vec q = rng.point_in_box(sub);
        if (exact_membership(K.poly, q)) {
            ++rep.inside_checked;
            if (!A.accepts(q)) ++rep.inside_violations;
        } else if (distance_to_polytope(K, q) > eps) {
            ++rep.far_checked;
            if (A.accepts(q)) ++rep.far_violations;
        }
    }
    return rep;
}

void write_local_approx(std::ostream& os, const LocalApprox& A) {
    os << A.cell.level;
    for (auto i : A.cell.idx) os << " " << i;
    os << " " << (A.method == LocalMethod::SetCover ? "cover" : "dudley");
    os << " " << A.planes.size() << "\n";
    os.precision(17);
    if (A.method == LocalMethod::SetCover) {
        for (size_t i = 0; i < A.input_ids.size(); ++i)
            os << A.input_ids[i] << (i + 1 < A.input_ids.size() ? " " : "");
        os << "\n";
    } else {
        for (const auto& h : A.planes) {
            for (double v : h.normal) os << v << " ";
            os << h.offset << "\n";
        }
    }
}

LocalApprox read_local_approx(std::istream& is, const Polytope& body) {
    LocalApprox A;
    if (!(is >> A.cell.level)) throw std::runtime_error("truncated local approx");
    A.cell.idx.resize(body.dim);
    for (auto& i : A.cell.idx) is >> i;
    std::string tag;
    size_t count;
    if (!(is >> tag >> count)) throw std::runtime_error("truncated local approx");
    if (tag == "cover") {
        A.method = LocalMethod::SetCover;
        A.input_ids.resize(count);
        for (auto& id : A.input_ids) {
            is >> id;
            if (id < 0 || id >= body.size())
                throw std::runtime_error("local approx references unknown halfspace");
            A.planes.push_back(body.halfspaces[id]);
        }
    } else {
        A.method = LocalMethod::LocalDudley;
        for (size_t i = 0; i < count; ++i) {
            Vec n(body.dim);
            double b;
            for (auto& v : n) is >> v;
            if (!(is >> b)) throw std::runtime_error("truncated local approx");
            A.planes.emplace_back(n, b);
        }
    }
    return A;
}

}  // namespace polymem
