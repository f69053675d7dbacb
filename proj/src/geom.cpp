#include "polymem/geom.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace polymem {

double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

double dist(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        double t = a[i] - b[i];
        s += t * t;
    }
    return std::sqrt(s);
}

Vec sub(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

Vec add(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

Vec scale(const Vec& a, double s) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] * s;
    return r;
}

Halfspace::Halfspace(Vec n, double b) {
    double len = norm(n);
    if (!(len > 0.0)) throw std::invalid_argument("halfspace: zero normal");
    normal = scale(n, 1.0 / len);
    offset = b / len;
}

bool Polytope::contains(const Vec& x, double tol) const {
    for (const auto& h : halfspaces)
        if (h.eval(x) > tol) return false;
    return true;
}

bool exact_membership(const Polytope& K, const Vec& q, double tol) {
    if (int(q.size()) != K.dim) throw std::invalid_argument("exact_membership: dimension mismatch");
    return K.contains(q, tol);
}

void write_polytope(std::ostream& os, const Polytope& K) {
    os.precision(17);
    os << K.dim << " " << K.size() << "\n";
    for (const auto& h : K.halfspaces) {
        for (int i = 0; i < K.dim; ++i) os << h.normal[i] << " ";
        os << h.offset << "\n";
    }
}

namespace {

// Tokenizes on whitespace and commas so both plain and CSV-ish files load.
std::vector<double> read_reals(std::istream& is, size_t n, const char* what) {
    std::vector<double> out;
    out.reserve(n);
    while (out.size() < n) {
        int c = is.peek();
        if (c == EOF) throw std::runtime_error(std::string("truncated ") + what);
        if (c == ',' || std::isspace(c)) {
            is.get();
            continue;
        }
        double v;
        if (!(is >> v)) throw std::runtime_error(std::string("bad number in ") + what);
        out.push_back(v);
    }
    return out;
}

}  // namespace

Polytope read_polytope(std::istream& is) {
    auto hdr = read_reals(is, 2, "polytope header");
    int d = int(hdr[0]), n = int(hdr[1]);
    if (d < 1 || n < 0) throw std::runtime_error("bad polytope header");
    std::vector<Halfspace> hs;
    hs.reserve(n);
    for (int r = 0; r < n; ++r) {
        auto row = read_reals(is, size_t(d) + 1, "polytope row");
        Vec nrm(row.begin(), row.begin() + d);
        hs.emplace_back(nrm, row[d]);
    }
    return Polytope(d, std::move(hs));
}

void save_polytope(const std::string& path, const Polytope& K) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    write_polytope(os, K);
}

Polytope load_polytope(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    return read_polytope(is);
}

void write_points(std::ostream& os, const std::vector<Vec>& pts) {
    os.precision(17);
    int d = pts.empty() ? 0 : int(pts[0].size());
    os << d << " " << pts.size() << "\n";
    for (const auto& p : pts) {
        for (size_t i = 0; i < p.size(); ++i) os << p[i] << (i + 1 < p.size() ? " " : "");
        os << "\n";
    }
}

std::vector<Vec> read_points(std::istream& is) {
    auto hdr = read_reals(is, 2, "point header");
    int d = int(hdr[0]);
    size_t m = size_t(hdr[1]);
    if (d < 1) throw std::runtime_error("bad point header");
    std::vector<Vec> pts;
    pts.reserve(m);
    for (size_t r = 0; r < m; ++r) pts.push_back(read_reals(is, size_t(d), "point row"));
    return pts;
}

void save_points(const std::string& path, const std::vector<Vec>& pts) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    write_points(os, pts);
}

std::vector<Vec> load_points(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    return read_points(is);
}

double Box::diameter() const {
    double s = 0.0;
    for (int i = 0; i < dim(); ++i) s += side(i) * side(i);
    return std::sqrt(s);
}

Vec Box::center() const {
    Vec c(lo.size());
    for (size_t i = 0; i < lo.size(); ++i) c[i] = 0.5 * (lo[i] + hi[i]);
    return c;
}

Vec Box::corner(uint64_t mask) const {
    Vec c(lo.size());
    for (size_t i = 0; i < lo.size(); ++i) c[i] = (mask >> i) & 1 ? hi[i] : lo[i];
    return c;
}

bool Box::contains(const Vec& q, double tol) const {
    for (size_t i = 0; i < lo.size(); ++i)
        if (q[i] < lo[i] - tol || q[i] > hi[i] + tol) return false;
    return true;
}

double Box::dist_to(const Vec& q) const {
    double s = 0.0;
    for (size_t i = 0; i < lo.size(); ++i) {
        double t = std::max({lo[i] - q[i], q[i] - hi[i], 0.0});
        s += t * t;
    }
    return std::sqrt(s);
}

std::vector<Halfspace> box_halfspaces(const Box& b) {
    std::vector<Halfspace> hs;
    int d = b.dim();
    hs.reserve(2 * d);
    for (int i = 0; i < d; ++i) {
        Vec n(d, 0.0);
        n[i] = 1.0;
        hs.emplace_back(n, b.hi[i]);
        n[i] = -1.0;
        hs.emplace_back(n, -b.lo[i]);
    }
    return hs;
}

Box unit_box(int d) {
    double h = 0.5 * unit_box_side(d);
    return Box{Vec(d, -h), Vec(d, h)};
}

Box QuadtreeCell::box() const {
    int d = dim();
    double s = unit_box_side(d);
    double inv = std::ldexp(1.0, -level);
    Box b;
    b.lo.resize(d);
    b.hi.resize(d);
    for (int i = 0; i < d; ++i) {
        b.lo[i] = (double(idx[i]) * inv - 0.5) * s;
        b.hi[i] = (double(idx[i] + 1) * inv - 0.5) * s;
    }
    return b;
}

QuadtreeCell QuadtreeCell::child(uint64_t mask) const {
    QuadtreeCell c;
    c.level = level + 1;
    c.idx.resize(idx.size());
    for (size_t i = 0; i < idx.size(); ++i) c.idx[i] = 2 * idx[i] + ((mask >> i) & 1);
    return c;
}

QuadtreeCell locate_cell(int d, int level, const Vec& q) {
    if (int(q.size()) != d) throw std::invalid_argument("locate_cell: dimension mismatch");
    double s = unit_box_side(d);
    int64_t cells = int64_t(1) << level;
    QuadtreeCell c;
    c.level = level;
    c.idx.resize(d);
    for (int i = 0; i < d; ++i) {
        if (std::abs(q[i]) > 0.5 * s + 1e-12)
            throw std::domain_error("locate_cell: point outside the reference domain");
        double u = (q[i] / s + 0.5) * double(cells);
        int64_t k = int64_t(std::floor(u));
        c.idx[i] = std::clamp(k, int64_t(0), cells - 1);
    }
    return c;
}

uint64_t Rng::next() {
    // splitmix64
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double Rng::uniform() { return std::ldexp(double(next() >> 11), -53); }

double Rng::uniform(double a, double b) { return a + (b - a) * uniform(); }

double Rng::normal() {
    // Box-Muller; draws until the log argument is nonzero.
    double u1;
    do {
        u1 = uniform();
    } while (u1 <= 0.0);
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

Vec Rng::unit_vector(int d) {
    Vec v(d);
    double len;
    do {
        for (int i = 0; i < d; ++i) v[i] = normal();
        len = norm(v);
    } while (len < 1e-12);
    return scale(v, 1.0 / len);
}

Vec Rng::point_in_box(const Box& b) {
    Vec p(b.dim());
    for (int i = 0; i < b.dim(); ++i) p[i] = uniform(b.lo[i], b.hi[i]);
    return p;
}

size_t Rng::index(size_t n) { return n ? size_t(next() % n) : 0; }

}  // namespace polymem
