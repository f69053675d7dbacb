#include "polymem/ann.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "binio.hpp"
#include "polymem/lp.hpp"

namespace polymem {

namespace {

constexpr uint32_t kAnnMagic = 0x31494e41;  // "ANI1"

// vertical extent of the query box: deep enough that the envelope of any
// annulus site stays strictly above the bottom over every query column
double envelope_depth() { return 4.0 * kAnnCq * kAnnCq + 2.0 * kAnnCq + 1.0; }

}  // namespace

double lifted_height(const Vec& p, const Vec& x) {
    return 2.0 * dot(p, x) - dot(p, p);
}

Halfspace lift(const Vec& p) {
    Vec n(p.size() + 1);
    for (size_t i = 0; i < p.size(); ++i) n[i] = 2.0 * p[i];
    n[p.size()] = -1.0;
    return Halfspace(std::move(n), dot(p, p));
}

Envelope build_envelope(const std::vector<Vec>& sites) {
    if (sites.empty()) throw std::invalid_argument("build_envelope: no sites");
    int d = int(sites[0].size());
    double V = envelope_depth();

    Envelope E;
    E.site_planes = int(sites.size());
    E.domain.lo.assign(d + 1, -0.5);
    E.domain.hi.assign(d + 1, 0.5);
    E.domain.lo[d] = -V;
    E.domain.hi[d] = 0.0;

    std::vector<Halfspace> hs;
    hs.reserve(sites.size() + 2 * (d + 1));
    for (const auto& p : sites) {
        if (int(p.size()) != d) throw std::invalid_argument("build_envelope: mixed dims");
        double r = norm(p);
        if (r <= 1.5 || r > 2.0 * kAnnCq + 1e-9)
            throw std::invalid_argument("build_envelope: site outside the annulus");
        hs.push_back(lift(p));
    }
    for (auto& h : box_halfspaces(E.domain)) hs.push_back(h);
    E.body = Polytope(d + 1, std::move(hs));
    return E;
}

namespace {

/* Envelope tree construction. Everything below runs in the standardized
 * frame: a diagonal map squeezes the query box onto the reference box, so
 * its side faces coincide with the domain boundary and never enter bundles.
 * The map is axis aligned with positive diagonal, so heights keep their
 * order across planes.
 *
 * A cell whose locally maximal planes fit the budget gets them verbatim.
 * Otherwise a greedy cover picks at most t planes that track the upper
 * envelope to within eps_v from below, so rejections stay exact while
 * acceptances may reach eps_v under the true surface. Near-cocircular
 * sites make the exact set quadratic in the site count around their
 * equidistant column; the cover keeps those cells bounded. */
struct EnvBuilder {
    const Polytope& body;  // standardized
    int site_planes;
    int t;
    double eps_v;      // one-sided vertical slack, standardized units
    double stop_diam;  // normalized cell diameter that ends subdivision
    int d1;
    SplitReduceTree& T;

    // boundary height of plane i at a corner of the cell's horizontal box
    double height_at(int i, const Box& b, uint32_t mask) const {
        const Halfspace& h = body.halfspaces[i];
        double num = h.offset;
        for (int k = 0; k < d1 - 1; ++k)
            num -= h.normal[k] * ((mask >> k) & 1 ? b.hi[k] : b.lo[k]);
        return num / h.normal[d1 - 1];
    }

    /* Greedy eps_v-cover of the envelope over the footprint. Columns form a
     * grid sized so that at least half of eps_v survives the off-grid
     * deficit variation; when even the densest grid cannot leave any slack
     * the cell is too coarse and falls back to splitting. */
    bool cover(const Box& b, const std::vector<int>& act, int budget,
               std::vector<int>& S) const {
        if (budget <= 0) return false;
        int dh = d1 - 1;
        double lip = 0.0;
        for (int id : act) {
            double nv = body.halfspaces[id].normal[dh];
            lip = std::max(lip, std::sqrt(std::max(0.0, 1.0 - nv * nv)) / std::abs(nv));
        }
        double w = b.hi[0] - b.lo[0];
        double var = 2.0 * lip * w * std::sqrt(double(dh));  // deficit change per grid step
        int g = 3;
        while (g < 5 && var / double(g - 1) > eps_v) ++g;
        double need = eps_v - var / (2.0 * double(g - 1));
        if (need <= 0.0) return false;

        int cols = 1;
        for (int i = 0; i < dh; ++i) cols *= g;
        std::vector<double> h(act.size() * cols);
        std::vector<double> env(cols, -1e300);
        for (size_t a = 0; a < act.size(); ++a) {
            const Halfspace& hs = body.halfspaces[act[a]];
            double nv = hs.normal[dh];
            for (int c = 0; c < cols; ++c) {
                double num = hs.offset;
                int r = c;
                for (int i = 0; i < dh; ++i) {
                    num -= hs.normal[i] *
                           (b.lo[i] + (b.hi[i] - b.lo[i]) * double(r % g) / double(g - 1));
                    r /= g;
                }
                h[a * cols + c] = num / nv;
                env[c] = std::max(env[c], h[a * cols + c]);
            }
        }

        std::vector<char> covered(cols, 0);
        int left = cols;
        while (left > 0) {
            if (int(S.size()) == budget) return false;
            size_t best = 0;
            int best_gain = -1;
            for (size_t a = 0; a < act.size(); ++a) {
                int gain = 0;
                for (int c = 0; c < cols; ++c)
                    if (!covered[c] && h[a * cols + c] >= env[c] - need) ++gain;
                if (gain > best_gain) {
                    best_gain = gain;
                    best = a;
                }
            }
            if (best_gain <= 0) return false;
            S.push_back(act[best]);
            for (int c = 0; c < cols; ++c)
                if (!covered[c] && h[best * cols + c] >= env[c] - need) {
                    covered[c] = 1;
                    --left;
                }
        }
        return true;
    }

    int64_t bundle_of(const QuadtreeCell& cell, std::vector<int> ids) {
        LocalApprox A;
        A.cell = cell;
        A.method = LocalMethod::SetCover;
        for (int id : ids) A.planes.push_back(body.halfspaces[id]);
        A.input_ids = std::move(ids);
        T.bundles.push_back(std::move(A));
        return int64_t(T.bundles.size()) - 1;
    }

    void at(int64_t slot, const QuadtreeCell& cell) {
        T.depth = std::max(T.depth, cell.level);
        if (!feasible(body, cell)) {
            T.nodes[slot] = {SrNode::Kind::Outside, -1};
            return;
        }
        Box b = cell.box();
        bool corners_in = true;
        for (uint64_t m = 0; m < b.corner_count() && corners_in; ++m)
            corners_in = exact_membership(body, b.corner(m));
        if (corners_in) {
            T.nodes[slot] = {SrNode::Kind::Inside, -1};
            return;
        }

        /* Keep a plane only if it reaches the top plane somewhere over the
         * footprint. Heights are linear, so a plane under the top plane at
         * every corner is under it on the whole cell and never attains the
         * envelope there; the survivors reproduce the envelope exactly. */
        int dh = d1 - 1;
        uint32_t corners = uint32_t(1) << dh;
        std::vector<double> H(size_t(site_planes) * corners);
        int top = 0;
        double best_lo = -1e300;
        for (int i = 0; i < site_planes; ++i) {
            double lo = 1e300;
            for (uint32_t m = 0; m < corners; ++m) {
                double z = height_at(i, b, m);
                H[size_t(i) * corners + m] = z;
                lo = std::min(lo, z);
            }
            if (lo > best_lo) {
                best_lo = lo;
                top = i;
            }
        }
        std::vector<int> act;
        for (int i = 0; i < site_planes; ++i) {
            bool keep = false;
            for (uint32_t m = 0; m < corners && !keep; ++m)
                keep = H[size_t(i) * corners + m] >=
                       H[size_t(top) * corners + m] - 1e-9;
            if (keep) act.push_back(i);
        }
        std::vector<int> crossing;
        for (int j = site_planes; j < body.size(); ++j) {
            const Halfspace& h = body.halfspaces[j];
            double mx = -h.offset;  // box-max of eval: the face crosses the cell
            for (int k = 0; k < d1; ++k)
                mx += h.normal[k] * (h.normal[k] > 0 ? b.hi[k] : b.lo[k]);
            if (mx > kTol.membership) crossing.push_back(j);
        }

        std::vector<int> ids;
        bool take = false;
        if (int(act.size() + crossing.size()) <= t || cell.diameter() <= stop_diam) {
            ids = act;
            take = true;
        } else if (cover(b, act, t - int(crossing.size()), ids)) {
            take = true;
        }
        if (take) {
            ids.insert(ids.end(), crossing.begin(), crossing.end());
            T.nodes[slot] = {SrNode::Kind::Bundle, bundle_of(cell, std::move(ids))};
            return;
        }
        int64_t base = int64_t(T.nodes.size());
        T.nodes.resize(T.nodes.size() + cell.child_count());
        T.nodes[slot] = {SrNode::Kind::Internal, base};
        for (uint64_t m = 0; m < cell.child_count(); ++m)
            at(base + int64_t(m), cell.child(m));
    }
};

}  // namespace

SplitReduceTree build_envelope_tree(const Envelope& E, double eps, int t) {
    if (t < 1) throw std::invalid_argument("build_envelope_tree: t >= 1");
    if (!(eps > 0.0)) throw std::invalid_argument("build_envelope_tree: eps > 0");
    int d1 = E.body.dim;
    double V = envelope_depth();
    double s = unit_box_side(d1);

    SplitReduceTree T;
    T.t = t;
    T.strict_inside = true;

    AffineMap map = AffineMap::scaling(d1, s);
    map.M[size_t(d1) * d1 - 1] = s / V;  // vertical extent V onto side s
    map.Minv[size_t(d1) * d1 - 1] = V / s;
    map.shift[d1 - 1] = s / 2.0;  // box center (0,..,0,-V/2) -> origin
    T.form.map = map;
    T.form.gamma = 0.0;
    T.form.eps_abs = (s / V) * eps;
    T.form.source_ids.resize(E.body.size());
    for (int i = 0; i < E.body.size(); ++i) T.form.source_ids[i] = i;

    std::vector<Halfspace> hs;
    hs.reserve(E.body.size());
    for (const auto& h : E.body.halfspaces) hs.push_back(map.apply(h));
    T.form.body = Polytope(d1, std::move(hs));

    T.nodes.resize(1);
    EnvBuilder B{T.form.body, E.site_planes, t, T.form.eps_abs, eps / V, d1, T};
    B.at(0, QuadtreeCell::root(d1));
    return T;
}

namespace {

// descend to the leaf containing y, tracking the integer cell
int64_t walk_leaf(const SplitReduceTree& T, const Vec& y, QuadtreeCell& cell) {
    int d = T.form.body.dim;
    double side = unit_box_side(d);
    Vec ctr(d, 0.0);
    int64_t node = 0;
    cell = QuadtreeCell::root(d);
    while (T.nodes[node].kind == SrNode::Kind::Internal) {
        side /= 2.0;
        uint64_t mask = 0;
        for (int i = 0; i < d; ++i) {
            if (y[i] >= ctr[i]) {
                mask |= uint64_t(1) << i;
                ctr[i] += side / 2.0;
            } else {
                ctr[i] -= side / 2.0;
            }
        }
        node = T.nodes[node].payload + int64_t(mask);
        cell = cell.child(mask);
    }
    return node;
}

}  // namespace

RayShot ray_shoot(const SplitReduceTree& T, int site_planes, const Vec& q) {
    int d1 = T.form.body.dim;
    int d = d1 - 1;
    if (int(q.size()) != d) throw std::invalid_argument("ray_shoot: query dimension");
    const AffineMap& map = T.form.map;
    double lam_v = map.M[size_t(d1) * d1 - 1];
    double vshift = map.shift[d];
    double V = 2.0 * vshift / lam_v;

    Vec y(d1);
    for (int i = 0; i < d; ++i) y[i] = map.M[size_t(i) * d1 + i] * q[i] + map.shift[i];
    auto at_height = [&](double z) -> const Vec& {
        y[d] = lam_v * z + vshift;
        return y;
    };

    double hi = 0.0, lo = -V;
    if (!query(T, at_height(hi)).inside || query(T, at_height(lo)).inside)
        throw std::runtime_error("ray_shoot: endpoint sandwich failed");

    double eps_prime = T.form.eps_abs / lam_v;
    RayShot out;
    while (hi - lo > eps_prime) {
        double mid = 0.5 * (hi + lo);
        ++out.iterations;
        if (query(T, at_height(mid)).inside) hi = mid;
        else lo = mid;
    }

    // cells stabbed by the final segment, top down
    std::vector<int> cand;
    double z = hi;
    for (int guard = 0; guard < 256 && z >= lo - 1e-12 * V; ++guard) {
        QuadtreeCell cell;
        int64_t node = walk_leaf(T, at_height(z), cell);
        if (T.nodes[node].kind == SrNode::Kind::Bundle) {
            const LocalApprox& A = T.bundles[T.nodes[node].payload];
            for (int id : A.input_ids)
                if (id < site_planes) cand.push_back(id);
        }
        double bottom = cell.box().lo[d];               // standardized
        z = (bottom - vshift) / lam_v - 1e-6 * eps_prime;  // step strictly below
    }
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    if (cand.empty()) throw std::runtime_error("ray_shoot: no facet met the segment");

    double best = -1e300;
    for (int id : cand) {  // ascending, so strict improvement keeps lowest id
        const Halfspace& h = T.form.body.halfspaces[id];
        double num = h.offset;
        for (int k = 0; k < d; ++k) num -= h.normal[k] * y[k];
        double zstar = (num / h.normal[d] - vshift) / lam_v;
        if (zstar > best) {
            best = zstar;
            out.site = id;
        }
    }
    out.height = best;
    return out;
}

namespace {

Box cell_box_in(const Box& domain, const QuadtreeCell& cell) {
    int d = domain.dim();
    double side = domain.side(0) / double(int64_t(1) << cell.level);
    Box b;
    b.lo.resize(d);
    b.hi.resize(d);
    for (int i = 0; i < d; ++i) {
        b.lo[i] = domain.lo[i] + side * double(cell.idx[i]);
        b.hi[i] = b.lo[i] + side;
    }
    return b;
}

struct AnnBuilder {
    const std::vector<Vec>& X;
    const AnnParams& P;
    AnnIndex& I;
    int d;
    int far_min;  // far-set size that justifies an envelope tree

    void at(int64_t slot, const QuadtreeCell& cell, const std::vector<int32_t>& parent_reps) {
        I.depth = std::max(I.depth, cell.level);
        Box b = cell_box_in(I.domain, cell);
        Vec c = b.center();
        double diam = b.side(0) * std::sqrt(double(d));

        double rstar = 1e300;
        for (int32_t id : parent_reps) rstar = std::min(rstar, dist(c, X[id]));
        double rho = (1.0 + P.eps) * (rstar + diam) + 1e-12;

        std::vector<int32_t> keep;  // stays ascending, like parent_reps
        int near_n = 0;
        double maxfar = 0.0;
        for (int32_t id : parent_reps) {
            double dd = dist(c, X[id]);
            if (dd > rho) continue;
            keep.push_back(id);
            if (dd <= 2.0 * diam) ++near_n;
            else maxfar = std::max(maxfar, dd);
        }
        bool annulus_ok = maxfar <= 2.0 * kAnnCq * diam * (1.0 + 1e-12);

        bool split = cell.level < P.depth_cap &&
                     (near_n > P.near_cap ||
                      (int(keep.size()) > P.rep_threshold && !annulus_ok &&
                       cell.level < P.rep_depth_cap));
        if (split) {
            int64_t base = int64_t(I.nodes.size());
            I.nodes.resize(I.nodes.size() + cell.child_count());
            I.nodes[slot] = {false, base};
            for (uint64_t m = 0; m < cell.child_count(); ++m)
                at(base + int64_t(m), cell.child(m), keep);
            return;
        }

        AnnCellRec rec;
        rec.cell = cell;
        for (int32_t id : keep) {
            if (dist(c, X[id]) <= 2.0 * diam) rec.near_ids.push_back(id);
            else rec.far_ids.push_back(id);
        }
        if (int(rec.far_ids.size()) > far_min && annulus_ok) {
            double kappa = unit_box_side(d) / b.side(0);
            std::vector<Vec> sites;
            sites.reserve(rec.far_ids.size());
            for (int32_t id : rec.far_ids) sites.push_back(scale(sub(X[id], c), kappa));
            FarTree ft;
            ft.tree = build_envelope_tree(build_envelope(sites),
                                          P.eps / (6.0 * kAnnCq), std::max(P.t, d + 2));
            ft.site_planes = int(sites.size());
            ft.center = c;
            ft.side = b.side(0);
            rec.far_tree = int32_t(I.far.size());
            I.far.push_back(std::move(ft));
        }
        I.nodes[slot] = {true, int64_t(I.cells.size())};
        I.cells.push_back(std::move(rec));
    }
};

}  // namespace

AnnIndex build_ann(const std::vector<Vec>& X, const AnnParams& P) {
    if (X.empty()) throw std::invalid_argument("build_ann: no sites");
    if (!(P.eps > 0.0 && P.eps <= 0.5))
        throw std::invalid_argument("build_ann: eps must be in (0, 1/2]");
    if (P.t < 1) throw std::invalid_argument("build_ann: t >= 1");
    int d = int(X[0].size());
    for (const auto& p : X)
        if (int(p.size()) != d) throw std::invalid_argument("build_ann: mixed dims");

    AnnIndex I;
    I.dim = d;
    I.params = P;
    I.pts = X;

    Vec lo = X[0], hi = X[0];
    for (const auto& p : X)
        for (int i = 0; i < d; ++i) {
            lo[i] = std::min(lo[i], p[i]);
            hi[i] = std::max(hi[i], p[i]);
        }
    double ext = 0.0;
    for (int i = 0; i < d; ++i) ext = std::max(ext, hi[i] - lo[i]);
    double side = 1.5 * ext;
    if (side <= 0.0) side = 1.0;
    I.domain.lo.resize(d);
    I.domain.hi.resize(d);
    for (int i = 0; i < d; ++i) {
        double c = 0.5 * (lo[i] + hi[i]);
        I.domain.lo[i] = c - side / 2.0;
        I.domain.hi[i] = c + side / 2.0;
    }

    I.nodes.resize(1);
    std::vector<int32_t> all(X.size());
    for (size_t i = 0; i < X.size(); ++i) all[i] = int32_t(i);
    int lg = int(std::ceil(std::log2(1.0 / P.eps)));
    AnnBuilder B{X, P, I, d, 4 * P.t * std::max(lg, 1)};
    B.at(0, QuadtreeCell::root(d), all);
    return I;
}

AnnIndex build_ann(const std::vector<Vec>& X, double eps, int t) {
    AnnParams P;
    P.eps = eps;
    P.t = t;
    return build_ann(X, P);
}

namespace {

const AnnCellRec& locate_impl(const AnnIndex& I, const Vec& q, int* levels) {
    Vec p = q;
    for (int i = 0; i < I.dim; ++i)
        p[i] = std::min(std::max(p[i], I.domain.lo[i]), I.domain.hi[i]);
    int64_t node = 0;
    QuadtreeCell cell = QuadtreeCell::root(I.dim);
    int steps = 0;
    while (!I.nodes[node].leaf) {
        Box b = cell_box_in(I.domain, cell);
        Vec ctr = b.center();
        uint64_t mask = 0;
        for (int i = 0; i < I.dim; ++i)
            if (p[i] >= ctr[i]) mask |= uint64_t(1) << i;
        node = I.nodes[node].payload + int64_t(mask);
        cell = cell.child(mask);
        ++steps;
    }
    if (levels) *levels = steps;
    return I.cells[I.nodes[node].payload];
}

}  // namespace

const AnnCellRec& locate_ann_cell(const AnnIndex& I, const Vec& q) {
    return locate_impl(I, q, nullptr);
}

AnnAnswer ann_query(const AnnIndex& I, const Vec& q) {
    if (int(q.size()) != I.dim) throw std::invalid_argument("ann_query: dimension");
    AnnAnswer out;
    const AnnCellRec& L = locate_impl(I, q, &out.levels);

    double best = 1e300;
    for (int32_t id : L.near_ids) {
        ++out.scanned;
        double dd = dist(q, I.pts[id]);
        if (dd < best) {
            best = dd;
            out.site = id;
        }
    }
    if (L.far_tree >= 0) {
        const FarTree& ft = I.far[L.far_tree];
        Vec p = q;  // ray shooting needs the in-cell position
        Box b = cell_box_in(I.domain, L.cell);
        for (int i = 0; i < I.dim; ++i)
            p[i] = std::min(std::max(p[i], b.lo[i]), b.hi[i]);
        double kappa = unit_box_side(I.dim) / ft.side;
        RayShot r = ray_shoot(ft.tree, ft.site_planes, scale(sub(p, ft.center), kappa));
        out.ray_iters = r.iterations;
        int32_t id = L.far_ids[r.site];
        double dd = dist(q, I.pts[id]);
        if (dd < best) {
            best = dd;
            out.site = id;
        }
    } else {
        for (int32_t id : L.far_ids) {
            ++out.scanned;
            double dd = dist(q, I.pts[id]);
            if (dd < best) {
                best = dd;
                out.site = id;
            }
        }
    }
    out.dist = out.site >= 0 ? best : 0.0;
    return out;
}

void write_ann(std::ostream& os, const AnnIndex& I) {
    using detail::put;
    put<uint32_t>(os, kAnnMagic);
    put<int32_t>(os, I.dim);
    put<double>(os, I.params.eps);
    put<int32_t>(os, I.params.t);
    put<int32_t>(os, I.params.near_cap);
    put<int32_t>(os, I.params.rep_threshold);
    put<int32_t>(os, I.params.rep_depth_cap);
    put<int32_t>(os, I.params.depth_cap);
    for (int i = 0; i < I.dim; ++i) put<double>(os, I.domain.lo[i]);
    for (int i = 0; i < I.dim; ++i) put<double>(os, I.domain.hi[i]);
    put<int64_t>(os, int64_t(I.pts.size()));
    for (const auto& p : I.pts)
        for (double v : p) put<double>(os, v);
    put<int64_t>(os, int64_t(I.nodes.size()));
    for (const auto& n : I.nodes) {
        put<uint8_t>(os, n.leaf ? 1 : 0);
        put<int64_t>(os, n.payload);
    }
    put<int64_t>(os, int64_t(I.cells.size()));
    for (const auto& c : I.cells) {
        put<int32_t>(os, c.cell.level);
        for (int64_t v : c.cell.idx) put<int64_t>(os, v);
        put<int32_t>(os, int32_t(c.near_ids.size()));
        for (int32_t v : c.near_ids) put<int32_t>(os, v);
        put<int32_t>(os, int32_t(c.far_ids.size()));
        for (int32_t v : c.far_ids) put<int32_t>(os, v);
        put<int32_t>(os, c.far_tree);
    }
    put<int64_t>(os, int64_t(I.far.size()));
    for (const auto& ft : I.far) {
        put<int32_t>(os, ft.site_planes);
        put<double>(os, ft.side);
        for (double v : ft.center) put<double>(os, v);
        write_tree(os, ft.tree);
    }
    put<int32_t>(os, I.depth);
}

AnnIndex read_ann(std::istream& is) {
    using detail::get;
    if (get<uint32_t>(is) != kAnnMagic) throw std::runtime_error("read_ann: bad magic");
    AnnIndex I;
    I.dim = get<int32_t>(is);
    if (I.dim < 1 || I.dim > 15) throw std::runtime_error("read_ann: bad dimension");
    I.params.eps = get<double>(is);
    I.params.t = get<int32_t>(is);
    I.params.near_cap = get<int32_t>(is);
    I.params.rep_threshold = get<int32_t>(is);
    I.params.rep_depth_cap = get<int32_t>(is);
    I.params.depth_cap = get<int32_t>(is);
    I.domain.lo.resize(I.dim);
    I.domain.hi.resize(I.dim);
    for (int i = 0; i < I.dim; ++i) I.domain.lo[i] = get<double>(is);
    for (int i = 0; i < I.dim; ++i) I.domain.hi[i] = get<double>(is);
    int64_t n = get<int64_t>(is);
    I.pts.resize(n, Vec(I.dim));
    for (auto& p : I.pts)
        for (double& v : p) v = get<double>(is);
    int64_t nn = get<int64_t>(is);
    I.nodes.resize(nn);
    for (auto& nd : I.nodes) {
        nd.leaf = get<uint8_t>(is) != 0;
        nd.payload = get<int64_t>(is);
    }
    int64_t nc = get<int64_t>(is);
    I.cells.resize(nc);
    for (auto& c : I.cells) {
        c.cell.level = get<int32_t>(is);
        c.cell.idx.resize(I.dim);
        for (int64_t& v : c.cell.idx) v = get<int64_t>(is);
        c.near_ids.resize(get<int32_t>(is));
        for (int32_t& v : c.near_ids) v = get<int32_t>(is);
        c.far_ids.resize(get<int32_t>(is));
        for (int32_t& v : c.far_ids) v = get<int32_t>(is);
        c.far_tree = get<int32_t>(is);
    }
    int64_t nf = get<int64_t>(is);
    I.far.resize(nf);
    for (auto& ft : I.far) {
        ft.site_planes = get<int32_t>(is);
        ft.side = get<double>(is);
        ft.center.resize(I.dim);
        for (double& v : ft.center) v = get<double>(is);
        ft.tree = read_tree(is);
    }
    I.depth = get<int32_t>(is);
    return I;
}

void save_ann(const std::string& path, const AnnIndex& I) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_ann: cannot open " + path);
    write_ann(os, I);
}

AnnIndex load_ann(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_ann: cannot open " + path);
    return read_ann(is);
}

}  // namespace polymem
