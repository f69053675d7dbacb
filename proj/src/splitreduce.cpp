#include "polymem/splitreduce.hpp"

#include <cmath>
#include <memory>
#include <fstream>
#include <sstream>

#include "binio.hpp"
#include "polymem/lp.hpp"

namespace polymem {

namespace {

constexpr uint32_t kTreeMagic = 0x31545253;  // "SRT1"

// Sphere sample count the local dudley construction would draw for this
// cell, mirroring the sampler's grid arithmetic. Used to skip fallbacks
// that would be both expensive and far over budget anyway.
int64_t dudley_sample_count(int d, double cell_side, double eps) {
    double eps_std = (unit_box_side(d) / cell_side) * eps;
    double spacing = std::min(3.0, std::sqrt(eps_std) / 4.0);
    double pitch = spacing / std::sqrt(double(d));
    int64_t m = std::max(int64_t(1), int64_t(std::ceil(6.0 / pitch)));
    double per_facet = std::pow(double(m), d - 1);
    return int64_t(2 * d * per_facet);
}

struct Builder {
    const CanonicalForm& form;
    std::unique_ptr<BodyOracle> oracle;  // absent for bodies too faceted to enumerate
    int t;
    bool strict;
    double eps;
    int d;
    SplitReduceTree& T;

    Builder(const CanonicalForm& K, int t_, bool strict_, SplitReduceTree& out)
        : form(K), t(t_), strict(strict_), eps(K.eps_abs), d(K.body.dim), T(out) {
        try {
            oracle = std::make_unique<BodyOracle>(K.body);
        } catch (const std::runtime_error&) {
            oracle.reset();
        }
    }

    // Without a vertex oracle the corner test falls back to membership in the
    // uniformly grown body, which certifies distance at most eps but misses
    // some corners in the band. That only splits a few more cells.
    bool corner_near(const Vec& c) const {
        if (strict) return exact_membership(form.body, c);
        if (oracle) return distance_to_polytope(*oracle, c) <= eps;
        double grow = 1.0 + 2.0 * std::sqrt(double(d)) * eps;
        for (const auto& h : form.body.halfspaces)
            if (dot(h.normal, c) > grow * h.offset + kTol.membership) return false;
        return true;
    }

    void at(int64_t slot, const QuadtreeCell& cell) {
        T.depth = std::max(T.depth, cell.level);
        Box cb = cell.box();

        if (!feasible(form.body, cb)) {
            T.nodes[slot] = {SrNode::Kind::Outside, -1};
            return;
        }

        bool corners_in = true;
        for (int mask = 0; corners_in && mask < int(cb.corner_count()); ++mask)
            corners_in = corner_near(cb.corner(mask));
        if (corners_in) {
            T.nodes[slot] = {SrNode::Kind::Inside, -1};
            return;
        }

        // Cells this small sit inside the band outright; either label is
        // sound for plain membership, but strict acceptance needs the body
        // to contain the cell, so there the call goes the other way.
        if (cell.diameter() <= eps) {
            T.nodes[slot] = {strict ? SrNode::Kind::Outside : SrNode::Kind::Inside, -1};
            return;
        }

        SetCoverOutcome sc = set_cover_local(form.body, cell, eps, t);
        if (sc.status == SetCoverOutcome::Status::Ok) {
            T.nodes[slot] = {SrNode::Kind::Bundle, int64_t(T.bundles.size())};
            T.bundles.push_back(std::move(sc.approx));
            return;
        }
        if (sc.status == SetCoverOutcome::Status::GridCap && oracle &&
            dudley_sample_count(d, cb.side(0), eps) <= 100000) {
            LocalApprox ld = local_dudley(*oracle, cell, eps);
            if (int64_t(ld.planes.size()) <= t) {
                T.nodes[slot] = {SrNode::Kind::Bundle, int64_t(T.bundles.size())};
                T.bundles.push_back(std::move(ld));
                return;
            }
        }

        int64_t base = int64_t(T.nodes.size());
        T.nodes.resize(T.nodes.size() + cb.corner_count());
        T.nodes[slot] = {SrNode::Kind::Internal, base};
        for (int mask = 0; mask < int(cb.corner_count()); ++mask)
            at(base + mask, cell.child(mask));
    }
};

// Most violated input halfspace; the argmax is safe even when violations
// are marginal, and any outside point violates at least one.
int resolve_witness(const Polytope& K, const Vec& q) {
    int best = -1;
    double worst = -1e300;
    for (int j = 0; j < K.size(); ++j) {
        double v = K.halfspaces[j].eval(q);
        if (v > worst) {
            worst = v;
            best = j;
        }
    }
    return best;
}

}  // namespace

SplitReduceTree build(const CanonicalForm& K, int t, bool strict_inside) {
    if (t < 1) throw std::invalid_argument("build: t must be at least 1");
    if (!(K.eps_abs > 0.0 && K.eps_abs <= 1.0))
        throw std::invalid_argument("build: eps_abs must be in (0, 1]");
    SplitReduceTree T;
    T.form = K;
    T.t = t;
    T.strict_inside = strict_inside;
    T.nodes.resize(1);
    Builder b(K, t, strict_inside, T);
    b.at(0, QuadtreeCell::root(K.body.dim));
    return T;
}

SrQuery query(const SplitReduceTree& T, const Vec& q) {
    SrQuery res;
    int d = T.form.body.dim;
    double side = unit_box_side(d);
    for (int i = 0; i < d; ++i)
        if (std::abs(q[i]) > side / 2 + 1e-12) {
            res.witness = resolve_witness(T.form.body, q);
            return res;
        }

    Vec ctr(d, 0.0);
    int64_t node = 0;
    while (T.nodes[node].kind == SrNode::Kind::Internal) {
        side /= 2;
        int mask = 0;
        for (int i = 0; i < d; ++i) {
            if (q[i] >= ctr[i]) {
                mask |= 1 << i;
                ctr[i] += side / 2;
            } else {
                ctr[i] -= side / 2;
            }
        }
        node = T.nodes[node].payload + mask;
        ++res.levels;
    }

    switch (T.nodes[node].kind) {
        case SrNode::Kind::Inside:
            res.inside = true;
            return res;
        case SrNode::Kind::Outside:
            res.witness = resolve_witness(T.form.body, q);
            return res;
        default: {
            const LocalApprox& A = T.bundles[T.nodes[node].payload];
            for (size_t j = 0; j < A.planes.size(); ++j) {
                ++res.tested;
                if (A.planes[j].eval(q) > kTol.membership) {
                    res.witness = A.method == LocalMethod::SetCover
                                      ? A.input_ids[j]
                                      : resolve_witness(T.form.body, q);
                    return res;
                }
            }
            res.inside = true;
            return res;
        }
    }
}

SpaceReport space_report(const SplitReduceTree& T) {
    SpaceReport r;
    r.nodes = int64_t(T.nodes.size());
    r.depth = T.depth;
    for (const auto& n : T.nodes) {
        switch (n.kind) {
            case SrNode::Kind::Inside: ++r.inside_leaves; break;
            case SrNode::Kind::Outside: ++r.outside_leaves; break;
            case SrNode::Kind::Bundle: ++r.bundle_leaves; break;
            case SrNode::Kind::Internal: ++r.internal_nodes; break;
        }
    }
    for (const auto& b : T.bundles) {
        r.sum_tq += int64_t(b.planes.size());
        r.max_bundle = std::max(r.max_bundle, int64_t(b.planes.size()));
    }
    return r;
}

namespace {

using detail::get;
using detail::put;

void write_node(std::ostream& os, const SplitReduceTree& T, int64_t idx) {
    const SrNode& n = T.nodes[idx];
    put<uint8_t>(os, uint8_t(n.kind));
    if (n.kind == SrNode::Kind::Internal) {
        int children = 1 << T.form.body.dim;
        for (int mask = 0; mask < children; ++mask)
            write_node(os, T, n.payload + mask);
        return;
    }
    if (n.kind != SrNode::Kind::Bundle) return;

    const LocalApprox& A = T.bundles[n.payload];
    int d = T.form.body.dim;
    put<uint8_t>(os, A.method == LocalMethod::SetCover ? 0 : 1);
    put<int32_t>(os, A.cell.level);
    for (int i = 0; i < d; ++i) put<int64_t>(os, A.cell.idx[i]);
    if (A.method == LocalMethod::SetCover) {
        put<int32_t>(os, int32_t(A.input_ids.size()));
        for (int id : A.input_ids) put<int32_t>(os, id);
    } else {
        put<int32_t>(os, int32_t(A.planes.size()));
        for (const auto& h : A.planes) {
            for (int i = 0; i < d; ++i) put<double>(os, h.normal[i]);
            put<double>(os, h.offset);
        }
    }
}

void read_node(std::istream& is, SplitReduceTree& T, int64_t slot, int level) {
    auto kind = SrNode::Kind(get<uint8_t>(is));
    int d = T.form.body.dim;
    T.depth = std::max(T.depth, level);
    if (kind == SrNode::Kind::Internal) {
        int64_t base = int64_t(T.nodes.size());
        int children = 1 << d;
        T.nodes.resize(T.nodes.size() + children);
        T.nodes[slot] = {kind, base};
        for (int mask = 0; mask < children; ++mask) read_node(is, T, base + mask, level + 1);
        return;
    }
    if (kind != SrNode::Kind::Bundle) {
        T.nodes[slot] = {kind, -1};
        return;
    }

    LocalApprox A;
    uint8_t method = get<uint8_t>(is);
    A.method = method == 0 ? LocalMethod::SetCover : LocalMethod::LocalDudley;
    A.cell.level = get<int32_t>(is);
    A.cell.idx.resize(d);
    for (int i = 0; i < d; ++i) A.cell.idx[i] = get<int64_t>(is);
    int32_t count = get<int32_t>(is);
    if (A.method == LocalMethod::SetCover) {
        for (int32_t k = 0; k < count; ++k) {
            int32_t id = get<int32_t>(is);
            if (id < 0 || id >= T.form.body.size())
                throw std::runtime_error("tree stream: bundle id out of range");
            A.input_ids.push_back(id);
            A.planes.push_back(T.form.body.halfspaces[id]);
        }
    } else {
        for (int32_t k = 0; k < count; ++k) {
            Halfspace h;  // normals were stored normalized
            h.normal.resize(d);
            for (int i = 0; i < d; ++i) h.normal[i] = get<double>(is);
            h.offset = get<double>(is);
            A.planes.push_back(std::move(h));
        }
    }
    T.nodes[slot] = {kind, int64_t(T.bundles.size())};
    T.bundles.push_back(std::move(A));
}

}  // namespace

void write_tree(std::ostream& os, const SplitReduceTree& T) {
    int d = T.form.body.dim;
    put<uint32_t>(os, kTreeMagic);
    put<int32_t>(os, d);
    put<double>(os, T.form.eps_abs);
    put<int32_t>(os, T.t);
    put<uint8_t>(os, T.strict_inside ? 1 : 0);
    put<double>(os, T.form.gamma);
    for (double v : T.form.map.M) put<double>(os, v);
    for (double v : T.form.map.shift) put<double>(os, v);
    put<int32_t>(os, T.form.body.size());
    for (const auto& h : T.form.body.halfspaces) {
        for (int i = 0; i < d; ++i) put<double>(os, h.normal[i]);
        put<double>(os, h.offset);
    }
    for (int id : T.form.source_ids) put<int32_t>(os, id);
    put<int64_t>(os, int64_t(T.nodes.size()));
    put<int64_t>(os, int64_t(T.bundles.size()));
    write_node(os, T, 0);
}

SplitReduceTree read_tree(std::istream& is) {
    if (get<uint32_t>(is) != kTreeMagic)
        throw std::runtime_error("tree stream: bad magic");
    SplitReduceTree T;
    int d = get<int32_t>(is);
    if (d < 1 || d > 16) throw std::runtime_error("tree stream: bad dimension");
    T.form.eps_abs = get<double>(is);
    T.t = get<int32_t>(is);
    T.strict_inside = get<uint8_t>(is) != 0;
    T.form.gamma = get<double>(is);

    std::vector<double> M(size_t(d) * d);
    for (auto& v : M) v = get<double>(is);
    Vec shift(d);
    for (auto& v : shift) v = get<double>(is);
    {
        std::stringstream tmp;
        tmp.precision(17);
        for (double v : M) tmp << v << " ";
        for (double v : shift) tmp << v << " ";
        T.form.map = read_affine(tmp, d);
    }

    int32_t n = get<int32_t>(is);
    std::vector<Halfspace> hs;
    hs.reserve(n);
    for (int32_t j = 0; j < n; ++j) {
        Halfspace h;
        h.normal.resize(d);
        for (int i = 0; i < d; ++i) h.normal[i] = get<double>(is);
        h.offset = get<double>(is);
        hs.push_back(std::move(h));
    }
    T.form.body = Polytope(d, std::move(hs));
    T.form.source_ids.resize(n);
    for (auto& id : T.form.source_ids) id = get<int32_t>(is);

    int64_t node_count = get<int64_t>(is);
    int64_t bundle_count = get<int64_t>(is);
    T.nodes.resize(1);
    read_node(is, T, 0, 0);
    if (int64_t(T.nodes.size()) != node_count || int64_t(T.bundles.size()) != bundle_count)
        throw std::runtime_error("tree stream: count mismatch");
    return T;
}

void save_tree(const std::string& path, const SplitReduceTree& T) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path);
    write_tree(os, T);
}

SplitReduceTree load_tree(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    return read_tree(is);
}

}  // namespace polymem
