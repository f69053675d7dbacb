#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "polymem/geom.hpp"
#include "polymem/oracle.hpp"

namespace polymem {

/* Test body generators, labeled query strata, and ANN point clouds. All of
 * them are pure functions of their arguments; the same seed reproduces the
 * same output bit for bit. */

// Intersection of halfspaces tangent to ball(0, r) at the given unit
// directions, optionally clipped to the reference box.
Polytope tangent_polytope(int d, const std::vector<Vec>& dirs, double r, bool clip_to_box);

// n tangents to the ball of radius r0/2 at uniformly random directions,
// clipped to the reference box. Contains ball(0, r0/2) and sits inside the
// box, so it is at least 1/(2 sqrt(d))-fat. Requires n >= d+1.
Polytope gen_random_tangent(int d, int n, uint64_t seed);

// Outer facet_eps-approximation of the ball of diameter diam: tangents at a
// sqrt(diam * facet_eps)-dense direction sample. The classic hard instance
// for facet counting. Requires facet_eps <= diam/4.
Polytope gen_ball_polytope(int d, double diam, double facet_eps);

/* Cylinder-style hard instance: a fine ball polytope of diameter delta in the
 * first k+1 coordinates, extended flat along the rest and truncated by the
 * reference box. k and delta come from the query budget t, which is derived
 * from (alpha, eps). */
struct Hypercylinder {
    Polytope body;
    int k = 0;           // curved dimensions minus one (cross-section is k+1 dimensional)
    double delta = 0.0;  // cross-section diameter actually built
    int t = 0;           // query budget the instance is sized against
    bool clamped = false;  // delta exceeded the box and was capped
};

// The budget is t = ceil(1/eps^{(d-1)/alpha}) and the cross-section diameter
// delta = eps ((2^d+1) t / c_b)^{2/k} with the frozen calibration constant
// c_b = 1. delta must fit the reference box (delta <= 1/sqrt(d)); out of the
// box the call throws, unless clamp is set, which caps delta and marks the
// record. Requires d >= 2 and alpha >= 4.
Hypercylinder gen_hypercylinder(int d, double alpha, double eps, bool clamp = false);

enum class QueryLabel : uint8_t { Inside, BandExterior, FarExterior };

struct LabeledQuery {
    Vec q;
    QueryLabel label = QueryLabel::Inside;
    double dist = 0.0;  // certified distance to the body (0 for Inside)
};

struct QueryCounts {
    int inside = 0;
    int band = 0;
    int far = 0;
};

// Labeled queries against an oracle-ready body. Inside points are convex
// combinations of vertices; exterior points sit at an exactly known offset
// along a supporting normal, band in (1.05 eps, 2 eps], far in (2.2 eps,
// 8 eps]. Every point is checked against the distance oracle at 1e-9 before
// it is emitted.
std::vector<LabeledQuery> gen_queries(const BodyOracle& K, double eps,
                                      QueryCounts counts, uint64_t seed);

enum class PointDist : uint8_t { Uniform, Clusters, Sphere };

// ANN data sets: uniform in [0,1]^d, Gaussian clusters, or on the unit
// sphere. Clusters delegates to gen_clusters with two centers.
std::vector<Vec> gen_points(int d, int n, PointDist dist, uint64_t seed);

// k cluster centers at pairwise distance >= gap + 6 sigma, each point within
// 3 sigma of its center (truncated Gaussian), so points of different clusters
// stay at least gap apart.
std::vector<Vec> gen_clusters(int d, int n, int k, double gap, double sigma,
                              uint64_t seed);

// Largest r such that ball(c, r) fits in K for some center c, over the
// inscribed-ball LP. Paired with the circumradius bound from the vertex set
// this certifies fatness.
double inscribed_ball(const Polytope& K, Vec* center = nullptr);

/* Text round trip for point and query files: points are one comma-separated
 * row per point with an x0,..,x{d-1} header; queries prepend label and
 * certified distance columns. */
void write_points_csv(std::ostream& os, const std::vector<Vec>& pts);
std::vector<Vec> read_points_csv(std::istream& is);
void write_queries_csv(std::ostream& os, const std::vector<LabeledQuery>& qs);
std::vector<LabeledQuery> read_queries_csv(std::istream& is);

}  // namespace polymem
