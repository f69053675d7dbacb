#include "polymem/lp.hpp"

#include <algorithm>
#include <stdexcept>

namespace polymem {

namespace {

struct Row {
    Vec a;
    double b;
};

// Seidel's algorithm, recursing on the boundary of each violated constraint.
// Box bounds keep every level bounded, so the recursion needs no rays.
struct Seidel {
    double tol;

    LpResult solve(std::vector<Row> rows, Vec c, Vec lo, Vec hi, Rng& rng) {
        int d = int(c.size());
        if (d == 1) return solve1(rows, c[0], lo[0], hi[0]);

        // deterministic shuffle
        for (size_t i = rows.size(); i > 1; --i) std::swap(rows[i - 1], rows[rng.index(i)]);

        Vec x(d);
        for (int j = 0; j < d; ++j) x[j] = c[j] > 0.0 ? lo[j] : hi[j];

        for (size_t i = 0; i < rows.size(); ++i) {
            const Row& r = rows[i];
            if (dot(r.a, x) <= r.b + tol) continue;

            // optimum of the first i+1 constraints lies on <a, x> = b
            int piv = 0;
            for (int j = 1; j < d; ++j)
                if (std::abs(r.a[j]) > std::abs(r.a[piv])) piv = j;
            if (std::abs(r.a[piv]) < 1e-13) {
                if (r.b < -tol) return {LpStatus::Infeasible, {}, 0.0};
                continue;
            }
            double inv = 1.0 / r.a[piv];

            auto project_row = [&](const Vec& a, double b) {
                Row out;
                out.a.reserve(d - 1);
                double f = a[piv] * inv;
                for (int j = 0; j < d; ++j)
                    if (j != piv) out.a.push_back(a[j] - f * r.a[j]);
                out.b = b - f * r.b;
                return out;
            };

            std::vector<Row> sub;
            sub.reserve(i + 2);
            for (size_t k = 0; k < i; ++k) sub.push_back(project_row(rows[k].a, rows[k].b));
            {
                // the eliminated variable's own bounds become constraints
                Vec e(d, 0.0);
                e[piv] = 1.0;
                sub.push_back(project_row(e, hi[piv]));
                e[piv] = -1.0;
                sub.push_back(project_row(e, -lo[piv]));
            }

            Vec c2, lo2, hi2;
            c2.reserve(d - 1);
            double fc = c[piv] * inv;
            for (int j = 0; j < d; ++j)
                if (j != piv) {
                    c2.push_back(c[j] - fc * r.a[j]);
                    lo2.push_back(lo[j]);
                    hi2.push_back(hi[j]);
                }

            LpResult rec = solve(std::move(sub), c2, lo2, hi2, rng);
            if (rec.status == LpStatus::Infeasible) return rec;

            double acc = r.b;
            int k = 0;
            for (int j = 0; j < d; ++j)
                if (j != piv) {
                    x[j] = rec.x[k++];
                    acc -= r.a[j] * x[j];
                }
            x[piv] = acc * inv;
        }
        return {LpStatus::Optimal, x, 0.0};
    }

    LpResult solve1(const std::vector<Row>& rows, double c, double lo, double hi) {
        for (const Row& r : rows) {
            if (std::abs(r.a[0]) < 1e-13) {
                if (r.b < -tol) return {LpStatus::Infeasible, {}, 0.0};
                continue;
            }
            double v = r.b / r.a[0];
            if (r.a[0] > 0.0)
                hi = std::min(hi, v);
            else
                lo = std::max(lo, v);
        }
        if (lo > hi + tol) return {LpStatus::Infeasible, {}, 0.0};
        double x = c > 0.0 ? lo : hi;
        x = std::clamp(x, std::min(lo, hi), std::max(lo, hi));
        return {LpStatus::Optimal, {x}, 0.0};
    }
};

}  // namespace

LpResult lp_minimize(const Vec& c, const std::vector<Halfspace>& hs, const Box& bounds) {
    int d = int(c.size());
    if (bounds.dim() != d) throw std::invalid_argument("lp_minimize: dimension mismatch");
    std::vector<Row> rows;
    rows.reserve(hs.size());
    for (const auto& h : hs) rows.push_back({h.normal, h.offset});
    Rng rng(0x5eed11u ^ (uint64_t(rows.size()) << 20));
    Seidel s{kTol.lp};
    LpResult res = s.solve(std::move(rows), c, bounds.lo, bounds.hi, rng);
    if (res.status == LpStatus::Optimal) res.value = dot(c, res.x);
    return res;
}

bool lp_feasible(const std::vector<Halfspace>& hs, const Box& bounds) {
    // phase-1 form: minimize the worst violation s over the box
    int d = bounds.dim();
    Vec center = bounds.center();
    double s0 = 1.0;
    for (const auto& h : hs) s0 = std::max(s0, h.eval(center) + 1.0);

    std::vector<Halfspace> aug;
    aug.reserve(hs.size());
    for (const auto& h : hs) {
        Vec a(d + 1);
        for (int i = 0; i < d; ++i) a[i] = h.normal[i];
        a[d] = -1.0;
        aug.emplace_back(a, h.offset);
    }
    Box b;
    b.lo = bounds.lo;
    b.hi = bounds.hi;
    b.lo.push_back(-1.0);
    b.hi.push_back(s0);
    Vec c(d + 1, 0.0);
    c[d] = 1.0;
    LpResult res = lp_minimize(c, aug, b);
    if (res.status != LpStatus::Optimal) return false;
    return res.x[d] <= kTol.lp;
}

bool feasible(const Polytope& K, const Box& cell) {
    if (K.dim != cell.dim()) throw std::invalid_argument("feasible: dimension mismatch");
    return lp_feasible(K.halfspaces, cell);
}

}  // namespace polymem
