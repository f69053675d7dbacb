#include "polymem/precondition.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <istream>
#include <stdexcept>

#include "smallmat.hpp"

namespace polymem {

Vec AffineMap::apply(const Vec& x) const {
    Vec y(dim);
    for (int r = 0; r < dim; ++r) {
        double s = shift[r];
        for (int c = 0; c < dim; ++c) s += M[r * dim + c] * x[c];
        y[r] = s;
    }
    return y;
}

Vec AffineMap::apply_inverse(const Vec& y) const {
    Vec x(dim);
    for (int r = 0; r < dim; ++r) {
        double s = 0.0;
        for (int c = 0; c < dim; ++c) s += Minv[r * dim + c] * (y[c] - shift[c]);
        x[r] = s;
    }
    return x;
}

Halfspace AffineMap::apply(const Halfspace& h) const {
    // {<n,x> <= b} maps to {<Minv^T n, y> <= b + <Minv^T n, shift>}
    Vec n2(dim, 0.0);
    for (int c = 0; c < dim; ++c)
        for (int r = 0; r < dim; ++r) n2[c] += Minv[r * dim + c] * h.normal[r];
    return Halfspace(n2, h.offset + dot(n2, shift));
}

AffineMap AffineMap::identity(int d) {
    AffineMap T;
    T.dim = d;
    T.M.assign(size_t(d) * d, 0.0);
    T.Minv.assign(size_t(d) * d, 0.0);
    T.shift.assign(d, 0.0);
    for (int i = 0; i < d; ++i) T.M[i * d + i] = T.Minv[i * d + i] = 1.0;
    return T;
}

AffineMap AffineMap::scaling(int d, double s) {
    AffineMap T = identity(d);
    for (int i = 0; i < d; ++i) {
        T.M[i * d + i] = s;
        T.Minv[i * d + i] = 1.0 / s;
    }
    return T;
}

AffineMap AffineMap::composed_with(const AffineMap& inner) const {
    AffineMap T;
    int d = dim;
    T.dim = d;
    T.M.assign(size_t(d) * d, 0.0);
    T.Minv.assign(size_t(d) * d, 0.0);
    T.shift.assign(d, 0.0);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) {
            double m = 0.0, mi = 0.0;
            for (int k = 0; k < d; ++k) {
                m += M[r * d + k] * inner.M[k * d + c];
                mi += inner.Minv[r * d + k] * Minv[k * d + c];
            }
            T.M[r * d + c] = m;
            T.Minv[r * d + c] = mi;
        }
    for (int r = 0; r < d; ++r) {
        double s = shift[r];
        for (int k = 0; k < d; ++k) s += M[r * d + k] * inner.shift[k];
        T.shift[r] = s;
    }
    return T;
}

void write_affine(std::ostream& os, const AffineMap& T) {
    os.precision(17);
    for (int i = 0; i < T.dim * T.dim; ++i) os << T.M[i] << (i + 1 < T.dim * T.dim ? " " : "\n");
    for (int i = 0; i < T.dim; ++i) os << T.shift[i] << (i + 1 < T.dim ? " " : "\n");
}

AffineMap read_affine(std::istream& is, int d) {
    AffineMap T;
    T.dim = d;
    T.M.resize(size_t(d) * d);
    T.shift.resize(d);
    for (auto& v : T.M)
        if (!(is >> v)) throw std::runtime_error("truncated affine map");
    for (auto& v : T.shift)
        if (!(is >> v)) throw std::runtime_error("truncated affine map");
    detail::Mat inv;
    if (!detail::invert(T.M, inv, d)) throw std::runtime_error("singular affine map");
    T.Minv = std::move(inv);
    return T;
}

void write_canonical(std::ostream& os, const CanonicalForm& cf) {
    os << cf.map.dim << "\n";
    write_affine(os, cf.map);
    os.precision(17);
    os << cf.gamma << " " << cf.eps_abs << "\n";
    write_polytope(os, cf.body);
}

CanonicalForm read_canonical(std::istream& is) {
    int d;
    if (!(is >> d) || d < 1) throw std::runtime_error("bad canonical header");
    CanonicalForm cf;
    cf.map = read_affine(is, d);
    if (!(is >> cf.gamma >> cf.eps_abs)) throw std::runtime_error("truncated canonical form");
    cf.body = read_polytope(is);
    cf.source_ids.resize(cf.body.size());
    for (int i = 0; i < cf.body.size(); ++i) cf.source_ids[i] = i;
    return cf;
}

Ellipsoid mvee(const std::vector<Vec>& pts, double rel_tol, int max_iter) {
    size_t m = pts.size();
    if (m == 0) throw std::invalid_argument("mvee: empty point set");
    int d = int(pts[0].size());
    int k = d + 1;

    // Khachiyan's barycentric iteration with drop steps on lifted points.
    std::vector<double> u(m, 1.0 / double(m));
    std::vector<Vec> q(m);
    for (size_t i = 0; i < m; ++i) {
        q[i] = pts[i];
        q[i].push_back(1.0);
    }

    detail::Mat X(size_t(k) * k), Xinv;
    std::vector<double> kappa(m);
    for (int iter = 0; iter < max_iter; ++iter) {
        std::fill(X.begin(), X.end(), 0.0);
        for (size_t i = 0; i < m; ++i) {
            if (u[i] <= 0.0) continue;
            for (int r = 0; r < k; ++r)
                for (int c = 0; c < k; ++c) X[r * k + c] += u[i] * q[i][r] * q[i][c];
        }
        if (!detail::invert(X, Xinv, k)) throw std::runtime_error("mvee: degenerate point set");
        size_t jmax = 0, jmin = 0;
        double kmax = -1.0, kmin = 1e300;
        for (size_t i = 0; i < m; ++i) {
            double s = 0.0;
            for (int r = 0; r < k; ++r) {
                double t = 0.0;
                for (int c = 0; c < k; ++c) t += Xinv[r * k + c] * q[i][c];
                s += q[i][r] * t;
            }
            kappa[i] = s;
            if (s > kmax) {
                kmax = s;
                jmax = i;
            }
            if (u[i] > 0.0 && s < kmin) {
                kmin = s;
                jmin = i;
            }
        }
        double eps_up = kmax / double(k) - 1.0;
        double eps_dn = 1.0 - kmin / double(k);
        if (std::max(eps_up, eps_dn) < rel_tol) break;

        size_t j;
        double step;
        if (eps_up >= eps_dn) {
            j = jmax;
            step = (kmax - k) / (double(k) * (kmax - 1.0));
        } else {
            j = jmin;
            step = (kmin - k) / (double(k) * (kmin - 1.0));
            step = std::max(step, -u[j] / (1.0 - u[j]));
        }
        for (size_t i = 0; i < m; ++i) u[i] *= (1.0 - step);
        u[j] += step;
    }

    Ellipsoid E;
    E.center.assign(d, 0.0);
    for (size_t i = 0; i < m; ++i)
        for (int r = 0; r < d; ++r) E.center[r] += u[i] * pts[i][r];
    detail::Mat S(size_t(d) * d, 0.0);
    for (size_t i = 0; i < m; ++i) {
        if (u[i] <= 0.0) continue;
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) S[r * d + c] += u[i] * pts[i][r] * pts[i][c];
    }
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) S[r * d + c] -= E.center[r] * E.center[c];
    detail::Mat Sinv;
    if (!detail::invert(S, Sinv, d)) throw std::runtime_error("mvee: flat point set");
    E.shape.resize(size_t(d) * d);
    for (int i = 0; i < d * d; ++i) E.shape[i] = Sinv[i] / double(d);
    return E;
}

namespace {

// lower Cholesky of an SPD matrix
detail::Mat cholesky(const detail::Mat& A, int d) {
    detail::Mat L(size_t(d) * d, 0.0);
    for (int r = 0; r < d; ++r) {
        for (int c = 0; c <= r; ++c) {
            double s = A[r * d + c];
            for (int k = 0; k < c; ++k) s -= L[r * d + k] * L[c * d + k];
            if (r == c) {
                if (s <= 0.0) throw std::runtime_error("cholesky: not positive definite");
                L[r * d + r] = std::sqrt(s);
            } else {
                L[r * d + c] = s / L[c * d + c];
            }
        }
    }
    return L;
}

}  // namespace

CanonicalForm canonicalize(const Polytope& K, double eps_rel, size_t budget) {
    int d = K.dim;
    VertexSet V = enumerate_vertices(K, budget);
    Ellipsoid E = mvee(V.pts);

    // y = r0 * L^T (x - c) sends the enclosing ellipsoid to the ball of
    // radius r0; the factor-d inner ellipsoid becomes ball(0, r0/d).
    double r0 = inscribed_radius(d);
    detail::Mat L = cholesky(E.shape, d);

    AffineMap T;
    T.dim = d;
    T.M.assign(size_t(d) * d, 0.0);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) T.M[r * d + c] = r0 * L[c * d + r];
    detail::Mat Minv;
    if (!detail::invert(T.M, Minv, d)) throw std::runtime_error("canonicalize: singular map");
    T.Minv = std::move(Minv);
    T.shift.assign(d, 0.0);
    Vec mc(d, 0.0);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) mc[r] += T.M[r * d + c] * E.center[c];
    for (int r = 0; r < d; ++r) T.shift[r] = -mc[r];

    CanonicalForm cf;
    cf.map = T;
    std::vector<Halfspace> hs;
    hs.reserve(K.size());
    for (const auto& h : K.halfspaces) hs.push_back(T.apply(h));
    cf.body = Polytope(d, std::move(hs));
    cf.source_ids.resize(K.size());
    for (int i = 0; i < K.size(); ++i) cf.source_ids[i] = i;

    double bmin = 1e300;
    for (const auto& h : cf.body.halfspaces) bmin = std::min(bmin, h.offset);
    cf.gamma = bmin / r0;
    cf.eps_abs = eps_rel / (double(d) * std::sqrt(double(d)));
    return cf;
}

CanonicalForm assume_canonical(const Polytope& K, double eps_abs) {
    CanonicalForm cf;
    cf.map = AffineMap::identity(K.dim);
    cf.body = K;
    cf.source_ids.resize(K.size());
    for (int i = 0; i < K.size(); ++i) cf.source_ids[i] = i;
    double bmin = 1e300;
    for (const auto& h : K.halfspaces) bmin = std::min(bmin, h.offset);
    cf.gamma = bmin / inscribed_radius(K.dim);
    if (!(cf.gamma > 0.0))
        throw std::invalid_argument("assume_canonical: origin not interior");
    cf.eps_abs = eps_abs;
    return cf;
}

std::vector<Vec> polar_points(const Polytope& K) {
    std::vector<Vec> S;
    S.reserve(K.size());
    for (const auto& h : K.halfspaces) {
        if (h.offset <= 1e-12)
            throw std::invalid_argument("polar_points: origin not interior");
        S.push_back(scale(h.normal, 1.0 / h.offset));
    }
    return S;
}

std::vector<int> epsilon_kernel(const std::vector<Vec>& S, double eps) {
    if (S.empty()) throw std::invalid_argument("epsilon_kernel: empty set");
    int d = int(S[0].size());
    if (!(eps > 0.0)) throw std::invalid_argument("epsilon_kernel: eps must be positive");

    // Keeping the extremes over a direction net of chord spacing 2*sqrt(eps)
    // loses at most a theta^2/4 ~ eps fraction of any width for fat inputs.
    // A finer net would only blow up the output size, which must stay
    // O(1/eps^{(d-1)/2}) independent of |S|.
    Ball sphere{Vec(d, 0.0), 1.0};
    auto dirs = sphere_sample(sphere, 2.0 * std::sqrt(eps));
    std::vector<char> keep(S.size(), 0);
    for (const auto& u : dirs) {
        size_t lo = 0, hi = 0;
        double vlo = 1e300, vhi = -1e300;
        for (size_t i = 0; i < S.size(); ++i) {
            double v = dot(u, S[i]);
            if (v > vhi) {
                vhi = v;
                hi = i;
            }
            if (v < vlo) {
                vlo = v;
                lo = i;
            }
        }
        keep[hi] = keep[lo] = 1;
    }
    std::vector<int> idx;
    for (size_t i = 0; i < S.size(); ++i)
        if (keep[i]) idx.push_back(int(i));
    return idx;
}

CanonicalForm reduce_halfspaces(const Polytope& K, double eps_rel, size_t budget) {
    int d = K.dim;
    if (!(eps_rel > 0.0 && eps_rel <= 1.0))
        throw std::invalid_argument("reduce_halfspaces: eps_rel in (0,1] required");
    CanonicalForm base = canonicalize(K, eps_rel, budget);

    // Uniform halving leaves room for the outer approximation to stay inside
    // the reference box; fatness drops to gamma/2.
    AffineMap T = AffineMap::scaling(d, 0.5).composed_with(base.map);
    std::vector<Halfspace> hs;
    hs.reserve(base.body.size());
    for (const auto& h : base.body.halfspaces) hs.emplace_back(h.normal, h.offset * 0.5);

    std::vector<Vec> S = polar_points(Polytope(d, hs));
    double eps_kernel_param = eps_rel / (8.0 * double(d) * double(d));
    std::vector<int> kept = epsilon_kernel(S, eps_kernel_param);

    CanonicalForm cf;
    cf.map = T;
    std::vector<Halfspace> red;
    red.reserve(kept.size());
    for (int i : kept) red.push_back(hs[i]);
    cf.body = Polytope(d, std::move(red));
    cf.source_ids = kept;

    double r0 = inscribed_radius(d);
    double bmin = 1e300;
    for (const auto& h : cf.body.halfspaces) bmin = std::min(bmin, h.offset);
    cf.gamma = bmin / r0;
    cf.eps_abs = eps_rel / (4.0 * double(d) * std::sqrt(double(d)));
    return cf;
}

}  // namespace polymem
