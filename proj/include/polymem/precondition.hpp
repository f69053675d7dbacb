#pragma once

#include "polymem/oracle.hpp"

namespace polymem {

/* y = M x + shift, with the inverse kept alongside. */
struct AffineMap {
    int dim = 0;
    std::vector<double> M;     // dim*dim row major
    std::vector<double> Minv;  // dim*dim row major
    Vec shift;

    Vec apply(const Vec& x) const;
    Vec apply_inverse(const Vec& y) const;
    Halfspace apply(const Halfspace& h) const;  // image halfspace of {<n,x> <= b}
    static AffineMap identity(int d);
    static AffineMap scaling(int d, double s);
    AffineMap composed_with(const AffineMap& inner) const;  // applies inner first
};

void write_affine(std::ostream& os, const AffineMap& T);
AffineMap read_affine(std::istream& is, int d);

/* Body brought to canonical position inside the reference box: the map, the
 * transformed body, the achieved fatness (ball(0, gamma*r0) fits inside), and
 * the absolute epsilon a relative-eps query on the original body becomes. */
struct CanonicalForm {
    AffineMap map;  // original -> canonical coordinates
    Polytope body;
    double gamma = 0.0;
    double eps_abs = 0.0;

    // indices into the original halfspace list for each halfspace of `body`
    // (identity is preserved through reduction; canonicalize keeps 1:1).
    std::vector<int> source_ids;
};

void write_canonical(std::ostream& os, const CanonicalForm& cf);
CanonicalForm read_canonical(std::istream& is);

// Minimum-volume enclosing ellipsoid of a point set (Khachiyan's iteration,
// relative tolerance kTol.mvee_rel, hard cap 1e5 rounds).
struct Ellipsoid {
    Vec center;
    std::vector<double> shape;  // A, row major: (x-c)^T A (x-c) <= 1
};
Ellipsoid mvee(const std::vector<Vec>& pts, double rel_tol = kTol.mvee_rel,
               int max_iter = 100000);

// Map K so its enclosing ellipsoid becomes the inscribed ball of the
// reference box; the inner ball of radius r0/d comes with it. eps_rel scales
// to eps_rel / (d*sqrt(d)) absolute.
CanonicalForm canonicalize(const Polytope& K, double eps_rel, size_t budget = 2'000'000);

// Wrap a body that is already in canonical position (fat around the origin,
// inside the reference box) with an identity map and the given absolute eps.
// Fatness is certified from the offsets; containment is the caller's promise.
CanonicalForm assume_canonical(const Polytope& K, double eps_abs);

// Dual points n_i / b_i of a body with the origin interior (all offsets > 0).
std::vector<Vec> polar_points(const Polytope& K);

// Indices of a subset S' of S with every directional width preserved up to
// (1 - eps): direction net of density sqrt(eps)/4, both extremes kept per
// direction. S must be a fat point set (canonical-style position).
std::vector<int> epsilon_kernel(const std::vector<Vec>& S, double eps);

// Halfspace-count reduction: canonicalize, halve, reduce via the polar-set
// kernel at eps' = eps_rel / (8 d^2). Output halfspaces are a sublist of the
// input's images; eps_abs = eps_rel / (4 d sqrt(d)).
CanonicalForm reduce_halfspaces(const Polytope& K, double eps_rel,
                                size_t budget = 2'000'000);

}  // namespace polymem
