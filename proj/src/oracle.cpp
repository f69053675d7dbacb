#include "polymem/oracle.hpp"

#include <algorithm>
#include <stdexcept>

#include "smallmat.hpp"

namespace polymem {

namespace {

uint64_t combinations(int n, int d, uint64_t cap) {
    uint64_t c = 1;
    for (int i = 0; i < d; ++i) {
        c = c * uint64_t(n - i) / uint64_t(i + 1);
        if (c > cap) return cap + 1;
    }
    return c;
}

void check_bounded(const Polytope& K) {
    Box big{Vec(K.dim, -1e8), Vec(K.dim, 1e8)};
    Vec c(K.dim, 0.0);
    for (int i = 0; i < K.dim; ++i) {
        for (double sgn : {1.0, -1.0}) {
            c[i] = sgn;
            LpResult r = lp_minimize(c, K.halfspaces, big);
            if (r.status != LpStatus::Optimal)
                throw std::runtime_error("enumerate_vertices: empty body");
            if (std::abs(r.x[i]) > 1e7)
                throw std::runtime_error("enumerate_vertices: unbounded body");
        }
        c[i] = 0.0;
    }
}

}  // namespace

VertexSet enumerate_vertices(const Polytope& K, size_t budget) {
    int d = K.dim, n = K.size();
    if (n < d) throw std::runtime_error("enumerate_vertices: too few halfspaces");
    if (combinations(n, d, budget) > budget)
        throw std::runtime_error("enumerate_vertices: combination budget exceeded");
    check_bounded(K);

    VertexSet V;
    std::vector<int> comb(d);
    for (int i = 0; i < d; ++i) comb[i] = i;
    detail::Mat A(d * d);
    std::vector<double> b(d), x;

    while (true) {
        for (int r = 0; r < d; ++r) {
            const Halfspace& h = K.halfspaces[comb[r]];
            for (int j = 0; j < d; ++j) A[r * d + j] = h.normal[j];
            b[r] = h.offset;
        }
        if (detail::solve_linear(A, b, x, d, 1e-10)) {
            bool ok = true;
            for (const auto& h : K.halfspaces)
                if (h.eval(x) > kTol.dedup) {
                    ok = false;
                    break;
                }
            if (ok) {
                bool dup = false;
                for (const auto& v : V.pts)
                    if (dist(v, x) <= kTol.dedup) {
                        dup = true;
                        break;
                    }
                if (!dup) V.pts.push_back(x);
            }
        }
        // next combination
        int i = d - 1;
        while (i >= 0 && comb[i] == n - d + i) --i;
        if (i < 0) break;
        ++comb[i];
        for (int j = i + 1; j < d; ++j) comb[j] = comb[j - 1] + 1;
    }
    if (V.empty()) throw std::runtime_error("enumerate_vertices: no vertices found");
    return V;
}

BodyOracle::BodyOracle(Polytope K, size_t budget)
    : poly(std::move(K)), verts(enumerate_vertices(poly, budget)) {}

double nearest_point(const VertexSet& V, const Vec& q, Vec* witness) {
    if (V.empty()) throw std::invalid_argument("nearest_point: empty hull");
    int d = int(q.size());

    // Wolfe's nearest-point algorithm on the translated points V - q.
    std::vector<Vec> P;
    P.reserve(V.size());
    for (const auto& v : V.pts) P.push_back(sub(v, q));

    int start = 0;
    double best = dot(P[0], P[0]);
    for (int i = 1; i < V.size(); ++i) {
        double n2 = dot(P[i], P[i]);
        if (n2 < best) {
            best = n2;
            start = i;
        }
    }

    std::vector<int> S{start};
    std::vector<double> lam{1.0};
    Vec x = P[start];

    auto recompute = [&] {
        x.assign(d, 0.0);
        for (size_t i = 0; i < S.size(); ++i)
            for (int j = 0; j < d; ++j) x[j] += lam[i] * P[S[i]][j];
    };

    for (int major = 0; major < 1000; ++major) {
        double xx = dot(x, x);
        int j = 0;
        double m = dot(x, P[0]);
        for (int i = 1; i < V.size(); ++i) {
            double v = dot(x, P[i]);
            if (v < m) {
                m = v;
                j = i;
            }
        }
        if (m >= xx - 1e-14 * std::max(xx, 1e-30) - 1e-300) break;
        if (std::find(S.begin(), S.end(), j) != S.end()) break;
        S.push_back(j);
        lam.push_back(0.0);

        for (int minor = 0; minor < 200; ++minor) {
            // affine minimizer over S: KKT system on the Gram matrix
            int k = int(S.size());
            detail::Mat M((k + 1) * (k + 1), 0.0);
            std::vector<double> rhs(k + 1, 0.0), alpha;
            for (int a = 0; a < k; ++a) {
                for (int b2 = 0; b2 < k; ++b2) M[a * (k + 1) + b2] = dot(P[S[a]], P[S[b2]]);
                M[a * (k + 1) + a] += 1e-14;
                M[a * (k + 1) + k] = 1.0;
                M[k * (k + 1) + a] = 1.0;
            }
            rhs[k] = 1.0;
            if (!detail::solve_linear(M, rhs, alpha, k + 1)) {
                S.pop_back();
                lam.pop_back();
                recompute();
                break;
            }
            alpha.resize(k);

            bool interior = true;
            for (double a : alpha)
                if (a < -1e-12) {
                    interior = false;
                    break;
                }
            if (interior) {
                lam = alpha;
                recompute();
                break;
            }
            double theta = 1.0;
            for (int i = 0; i < k; ++i)
                if (alpha[i] < lam[i])
                    theta = std::min(theta, lam[i] / (lam[i] - alpha[i]));
            for (int i = 0; i < k; ++i) lam[i] = (1.0 - theta) * lam[i] + theta * alpha[i];
            for (int i = k - 1; i >= 0; --i)
                if (lam[i] <= 1e-12) {
                    S.erase(S.begin() + i);
                    lam.erase(lam.begin() + i);
                }
            double tot = 0.0;
            for (double l : lam) tot += l;
            for (double& l : lam) l /= tot;
            recompute();
        }
    }

    if (witness) *witness = add(x, q);
    return norm(x);
}

double distance_to_polytope(const BodyOracle& K, const Vec& q, Vec* witness) {
    if (K.poly.contains(q)) {
        if (witness) *witness = q;
        return 0.0;
    }
    return nearest_point(K.verts, q, witness);
}

double hausdorff_outer(const BodyOracle& P, const BodyOracle& K) {
    for (const auto& v : K.verts.pts)
        if (!P.poly.contains(v, kTol.dedup))
            throw std::invalid_argument("hausdorff_outer: K not contained in P");
    double h = 0.0;
    for (const auto& v : P.verts.pts) h = std::max(h, distance_to_polytope(K, v));
    return h;
}

double support(const VertexSet& V, const Vec& u, int* arg) {
    if (V.empty()) throw std::invalid_argument("support: empty set");
    double best = dot(u, V.pts[0]);
    int bi = 0;
    for (int i = 1; i < V.size(); ++i) {
        double v = dot(u, V.pts[i]);
        if (v > best) {
            best = v;
            bi = i;
        }
    }
    if (arg) *arg = bi;
    return best;
}

std::vector<Vec> sphere_sample(const Ball& S, double spacing) {
    int d = int(S.center.size());
    if (!(spacing > 0.0)) throw std::invalid_argument("sphere_sample: spacing must be positive");
    double r = S.radius;
    double pitch = spacing / std::sqrt(double(d));
    int m = std::max(1, int(std::ceil(2.0 * r / pitch)));

    uint64_t per_facet = 1;
    for (int i = 0; i + 1 < d; ++i) {
        per_facet *= uint64_t(m);
        if (per_facet > 50'000'000ull / uint64_t(2 * d))
            throw std::runtime_error("sphere_sample: sample budget exceeded");
    }

    std::vector<Vec> out;
    out.reserve(size_t(2 * d) * per_facet);
    double step = 2.0 * r / double(m);
    std::vector<int> g(std::max(d - 1, 1), 0);
    for (int axis = 0; axis < d; ++axis) {
        for (double sgn : {-1.0, 1.0}) {
            std::fill(g.begin(), g.end(), 0);
            while (true) {
                Vec x(d);
                x[axis] = sgn * r;
                int gi = 0;
                for (int j = 0; j < d; ++j)
                    if (j != axis) x[j] = -r + (double(g[gi++]) + 0.5) * step;
                double len = norm(x);
                Vec p(d);
                for (int j = 0; j < d; ++j) p[j] = S.center[j] + r * x[j] / len;
                out.push_back(std::move(p));
                if (d == 1) break;
                int c = 0;
                while (c < d - 1 && ++g[c] == m) g[c++] = 0;
                if (c == d - 1) break;
            }
        }
    }
    return out;
}

}  // namespace polymem
