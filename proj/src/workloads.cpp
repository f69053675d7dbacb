#include "polymem/workloads.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "polymem/lp.hpp"

namespace polymem {

Polytope tangent_polytope(int d, const std::vector<Vec>& dirs, double r, bool clip_to_box) {
    if (!(r > 0.0)) throw std::invalid_argument("tangent_polytope: r > 0");
    std::vector<Halfspace> hs;
    hs.reserve(dirs.size() + (clip_to_box ? 2 * d : 0));
    for (const auto& u : dirs) {
        if (int(u.size()) != d) throw std::invalid_argument("tangent_polytope: direction dim");
        hs.emplace_back(u, r);
    }
    if (clip_to_box)
        for (auto& h : box_halfspaces(unit_box(d))) hs.push_back(std::move(h));
    return Polytope(d, std::move(hs));
}

Polytope gen_random_tangent(int d, int n, uint64_t seed) {
    if (d < 1) throw std::invalid_argument("gen_random_tangent: d >= 1");
    if (n < d + 1) throw std::invalid_argument("gen_random_tangent: n >= d+1");
    Rng rng(seed);
    std::vector<Vec> dirs;
    dirs.reserve(n);
    for (int i = 0; i < n; ++i) dirs.push_back(rng.unit_vector(d));
    return tangent_polytope(d, dirs, inscribed_radius(d) / 2.0, true);
}

Polytope gen_ball_polytope(int d, double diam, double facet_eps) {
    if (!(diam > 0.0)) throw std::invalid_argument("gen_ball_polytope: diam > 0");
    if (!(facet_eps > 0.0) || facet_eps > diam / 4.0)
        throw std::invalid_argument("gen_ball_polytope: 0 < facet_eps <= diam/4");
    Ball unit{Vec(d, 0.0), 1.0};
    auto dirs = sphere_sample(unit, std::sqrt(diam * facet_eps));
    return tangent_polytope(d, dirs, diam / 4.0, false);
}

Hypercylinder gen_hypercylinder(int d, double alpha, double eps, bool clamp) {
    if (d < 2) throw std::invalid_argument("gen_hypercylinder: d >= 2");
    if (!(alpha >= 4.0)) throw std::invalid_argument("gen_hypercylinder: alpha >= 4");
    if (!(eps > 0.0)) throw std::invalid_argument("gen_hypercylinder: eps > 0");

    const double cb = 1.0;  // calibration constant, frozen from ball-family measurements
    double kappa = double(d - 1) * std::sqrt(2.0 / alpha);
    int k = int(std::ceil(kappa));

    Hypercylinder H;
    H.k = k;
    H.t = int(std::ceil(std::pow(1.0 / eps, double(d - 1) / alpha)));
    H.delta = eps * std::pow((std::pow(2.0, d) + 1.0) * double(H.t) / cb, 2.0 / double(k));
    double cap = 1.0 / std::sqrt(double(d));
    if (H.delta > cap) {
        if (!clamp)
            throw std::invalid_argument(
                "gen_hypercylinder: eps too large, cross-section would not fit the box");
        H.delta = cap;
        H.clamped = true;
    }

    // cross-section in the first k+1 coordinates, flat along the rest
    int dc = k + 1;
    Ball unit{Vec(dc, 0.0), 1.0};
    double facet_eps = std::min(eps, H.delta / 4.0);
    auto dirs = sphere_sample(unit, std::sqrt(H.delta * facet_eps));
    std::vector<Halfspace> hs;
    hs.reserve(dirs.size() + 2 * d);
    for (const auto& u : dirs) {
        Vec n(d, 0.0);
        for (int i = 0; i < dc; ++i) n[i] = u[i];
        hs.emplace_back(std::move(n), H.delta / 4.0);
    }
    for (auto& h : box_halfspaces(unit_box(d))) hs.push_back(std::move(h));
    H.body = Polytope(d, std::move(hs));
    return H;
}

namespace {

/* Exit point of the ray anchor + s u through the body and the index of the
 * halfspace it exits through. The anchor must be strictly interior. */
double ray_exit(const Polytope& K, const Vec& anchor, const Vec& u, int& face) {
    double s = 1e300;
    face = -1;
    for (int j = 0; j < K.size(); ++j) {
        double den = dot(K.halfspaces[j].normal, u);
        if (den <= 1e-12) continue;
        double cand = (K.halfspaces[j].offset - dot(K.halfspaces[j].normal, anchor)) / den;
        if (cand < s) {
            s = cand;
            face = j;
        }
    }
    return s;
}

}  // namespace

std::vector<LabeledQuery> gen_queries(const BodyOracle& K, double eps,
                                      QueryCounts counts, uint64_t seed) {
    if (!(eps > 0.0)) throw std::invalid_argument("gen_queries: eps > 0");
    if (K.verts.empty()) throw std::invalid_argument("gen_queries: body has no vertices");
    int d = K.dim();
    Rng rng(seed);
    std::vector<LabeledQuery> out;
    out.reserve(size_t(counts.inside) + counts.band + counts.far);

    Vec anchor(d, 0.0);
    for (const auto& v : K.verts.pts) anchor = add(anchor, v);
    anchor = scale(anchor, 1.0 / double(K.verts.size()));

    Box domain = unit_box(d);
    long guard = 1000l * (counts.inside + counts.band + counts.far + 1);

    for (int got = 0; got < counts.inside;) {
        if (--guard < 0) throw std::runtime_error("gen_queries: sampling stalled");
        Vec q(d, 0.0);
        double wsum = 0.0;
        for (const auto& v : K.verts.pts) {
            double w = -std::log(1.0 - rng.uniform());
            q = add(q, scale(v, w));
            wsum += w;
        }
        q = scale(q, 1.0 / wsum);
        if (!exact_membership(K.poly, q)) continue;
        out.push_back({std::move(q), QueryLabel::Inside, 0.0});
        ++got;
    }

    auto exterior = [&](QueryLabel label, double lo, double hi, int want) {
        for (int got = 0; got < want;) {
            if (--guard < 0) throw std::runtime_error("gen_queries: sampling stalled");
            Vec u = rng.unit_vector(d);
            int face;
            double s = ray_exit(K.poly, anchor, u, face);
            if (face < 0) throw std::logic_error("gen_queries: unbounded ray");
            Vec p = add(anchor, scale(u, s));
            double delta = rng.uniform(lo, hi);
            Vec q = add(p, scale(K.poly.halfspaces[face].normal, delta));
            if (!domain.contains(q)) continue;
            /* p is a boundary point of the supporting face, so the separation
             * along its normal and the distance through p agree at delta. The
             * oracle recheck guards the arithmetic. */
            double cert = distance_to_polytope(K, q);
            if (std::abs(cert - delta) > 1e-9) continue;
            out.push_back({std::move(q), label, delta});
            ++got;
        }
    };
    exterior(QueryLabel::BandExterior, 1.06 * eps, 2.0 * eps, counts.band);
    exterior(QueryLabel::FarExterior, 2.2 * eps, 8.0 * eps, counts.far);
    return out;
}

std::vector<Vec> gen_points(int d, int n, PointDist dist, uint64_t seed) {
    if (d < 1) throw std::invalid_argument("gen_points: d >= 1");
    if (n < 0) throw std::invalid_argument("gen_points: n >= 0");
    Rng rng(seed);
    std::vector<Vec> pts;
    pts.reserve(n);
    switch (dist) {
        case PointDist::Uniform: {
            for (int i = 0; i < n; ++i) {
                Vec p(d);
                for (int j = 0; j < d; ++j) p[j] = rng.uniform();
                pts.push_back(std::move(p));
            }
            break;
        }
        case PointDist::Clusters:
            return gen_clusters(d, n, 2, 0.5, 0.02, seed);
        case PointDist::Sphere: {
            for (int i = 0; i < n; ++i) pts.push_back(rng.unit_vector(d));
            break;
        }
    }
    return pts;
}

std::vector<Vec> gen_clusters(int d, int n, int k, double gap, double sigma,
                              uint64_t seed) {
    if (d < 1 || k < 1) throw std::invalid_argument("gen_clusters: d >= 1, k >= 1");
    if (!(gap >= 0.0) || !(sigma > 0.0))
        throw std::invalid_argument("gen_clusters: gap >= 0, sigma > 0");
    Rng rng(seed);
    double sep = gap + 6.0 * sigma;
    std::vector<Vec> centers;
    long guard = 100000;
    while (int(centers.size()) < k) {
        if (--guard < 0)
            throw std::runtime_error("gen_clusters: centers do not fit at this separation");
        Vec c(d);
        for (int j = 0; j < d; ++j) c[j] = rng.uniform(0.0, double(k) * sep);
        bool ok = true;
        for (const auto& o : centers) ok = ok && norm(sub(c, o)) >= sep;
        if (ok) centers.push_back(std::move(c));
    }
    std::vector<Vec> pts;
    pts.reserve(n);
    for (int i = 0; i < n; ++i) {
        const Vec& c = centers[size_t(i) % k];
        for (;;) {
            Vec p(d);
            double r2 = 0.0;
            for (int j = 0; j < d; ++j) {
                double g = rng.normal() * sigma;
                p[j] = c[j] + g;
                r2 += g * g;
            }
            if (r2 <= 9.0 * sigma * sigma) {  // truncate so clusters never bleed
                pts.push_back(std::move(p));
                break;
            }
        }
    }
    return pts;
}

double inscribed_ball(const Polytope& K, Vec* center) {
    int d = K.dim;
    Vec c(d + 1, 0.0);
    c[d] = -1.0;  // maximize the radius coordinate
    std::vector<Halfspace> lifted;
    lifted.reserve(K.size());
    for (const auto& h : K.halfspaces) {
        Vec n(d + 1);
        for (int i = 0; i < d; ++i) n[i] = h.normal[i];
        n[d] = 1.0;  // unit normals make the margin coefficient exactly 1
        lifted.emplace_back(std::move(n), h.offset);
    }
    Box bounds;
    bounds.lo = Vec(d + 1, -1.0);
    bounds.hi = Vec(d + 1, 1.0);
    bounds.lo[d] = 0.0;
    auto r = lp_minimize(c, lifted, bounds);
    if (r.status != LpStatus::Optimal)
        throw std::invalid_argument("inscribed_ball: empty body");
    if (center) {
        center->assign(r.x.begin(), r.x.begin() + d);
    }
    return r.x[d];
}

namespace {

void put_row(std::ostream& os, const Vec& p, bool lead_comma) {
    char buf[32];
    for (size_t i = 0; i < p.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", p[i]);
        if (i || lead_comma) os << ',';
        os << buf;
    }
    os << '\n';
}

std::vector<double> parse_row(const std::string& line) {
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    return vals;
}

}  // namespace

void write_points_csv(std::ostream& os, const std::vector<Vec>& pts) {
    if (pts.empty()) throw std::invalid_argument("write_points_csv: empty set has no width");
    int d = int(pts[0].size());
    for (int i = 0; i < d; ++i) os << (i ? "," : "") << 'x' << i;
    os << '\n';
    for (const auto& p : pts) put_row(os, p, false);
}

std::vector<Vec> read_points_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("read_points_csv: missing header");
    std::vector<Vec> pts;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        pts.push_back(parse_row(line));
    }
    return pts;
}

namespace {

const char* label_name(QueryLabel l) {
    switch (l) {
        case QueryLabel::Inside: return "inside";
        case QueryLabel::BandExterior: return "band";
        case QueryLabel::FarExterior: return "far";
    }
    return "?";
}

QueryLabel label_of(const std::string& s) {
    if (s == "inside") return QueryLabel::Inside;
    if (s == "band") return QueryLabel::BandExterior;
    if (s == "far") return QueryLabel::FarExterior;
    throw std::runtime_error("read_queries_csv: unknown label " + s);
}

}  // namespace

void write_queries_csv(std::ostream& os, const std::vector<LabeledQuery>& qs) {
    if (qs.empty()) throw std::invalid_argument("write_queries_csv: empty list has no width");
    int d = int(qs[0].q.size());
    os << "label,dist";
    for (int i = 0; i < d; ++i) os << ",x" << i;
    os << '\n';
    char buf[32];
    for (const auto& lq : qs) {
        std::snprintf(buf, sizeof buf, "%.17g", lq.dist);
        os << label_name(lq.label) << ',' << buf;
        put_row(os, lq.q, true);
    }
}

std::vector<LabeledQuery> read_queries_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("read_queries_csv: missing header");
    std::vector<LabeledQuery> qs;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) throw std::runtime_error("read_queries_csv: bad row");
        LabeledQuery lq;
        lq.label = label_of(line.substr(0, comma));
        auto vals = parse_row(line.substr(comma + 1));
        if (vals.size() < 2) throw std::runtime_error("read_queries_csv: bad row");
        lq.dist = vals[0];
        lq.q.assign(vals.begin() + 1, vals.end());
        qs.push_back(std::move(lq));
    }
    return qs;
}

}  // namespace polymem
