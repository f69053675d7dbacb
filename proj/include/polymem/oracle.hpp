#pragma once

#include "polymem/geom.hpp"
#include "polymem/lp.hpp"

namespace polymem {

struct VertexSet {
    std::vector<Vec> pts;

    int size() const { return int(pts.size()); }
    bool empty() const { return pts.empty(); }
};

// All vertices of a bounded polytope: each is the solution of d active
// constraints, kept when it satisfies every halfspace to tolerance and
// deduplicated at kTol.dedup. The combination count C(n, d) must stay within
// budget; unbounded bodies and blown budgets raise.
VertexSet enumerate_vertices(const Polytope& K, size_t budget = 2'000'000);

/* Polytope plus its vertex set; the distance routines need both views. */
struct BodyOracle {
    Polytope poly;
    VertexSet verts;

    explicit BodyOracle(Polytope K, size_t budget = 2'000'000);
    int dim() const { return poly.dim; }
};

// Euclidean distance from q to conv(pts) and the nearest point itself
// (Wolfe's nearest-point algorithm). Zero when q is inside.
double nearest_point(const VertexSet& V, const Vec& q, Vec* witness = nullptr);

// Distance from q to the body (0 inside). Uses the vertex hull.
double distance_to_polytope(const BodyOracle& K, const Vec& q, Vec* witness = nullptr);

// max over x in P of dist(x, K), for K contained in P (checked: every vertex
// of K must satisfy P). Attained at a vertex of P.
double hausdorff_outer(const BodyOracle& P, const BodyOracle& K);

// Support function h_S(u) = max over the point set of <u, x>.
double support(const VertexSet& V, const Vec& u, int* arg = nullptr);

// Deterministic sample on the sphere: grid of pitch spacing/sqrt(d) on each
// facet of the circumscribing cube, centrally projected. Every point of the
// sphere lies within `spacing` of the sample.
std::vector<Vec> sphere_sample(const Ball& S, double spacing);

}  // namespace polymem
