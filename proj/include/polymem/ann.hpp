#pragma once

#include "polymem/splitreduce.hpp"

namespace polymem {

/* Nearest-neighbor search by lifting: sites become tangent planes of the
 * paraboloid one dimension up, and the vertical gap between a lifted query
 * and a site's plane equals the squared distance. Queries reduce to vertical
 * ray shooting on the planes' upper envelope. */

// Far representatives of a cell live between 2 and 2*kAnnCq cell diameters
// from its center once the cell is normalized to the reference box.
inline constexpr double kAnnCq = 4.0;

double lifted_height(const Vec& p, const Vec& x);  // 2<p,x> - |p|^2
Halfspace lift(const Vec& p);  // upper halfspace x_{d+1} >= lifted_height

/* Upper envelope of the lifted sites clipped to a fixed query box. Halfspace
 * i < site_planes is the lifted plane of sites[i]; the box faces follow. */
struct Envelope {
    Polytope body;  // d+1 dims
    int site_planes = 0;
    Box domain;
};

// Sites must be in the normalized frame: the annulus between the cell ball
// and 2*kAnnCq (distances from the origin in (1.5, 2*kAnnCq]). Throws on an
// empty list or an annulus violation.
Envelope build_envelope(const std::vector<Vec>& sites);

/* Membership tree over an envelope. Disjoint cells -> Outside, cells whose
 * corners all lie in the body -> Inside; bundle cells hold the locally
 * maximal planes when those fit the budget, and otherwise at most t planes
 * greedily chosen to track the upper envelope to within eps from below.
 * Rejections are exact; acceptances may reach eps under the true surface,
 * so a segment stabbing the boundary always meets a plane within eps of the
 * facet realizing it. eps is in the normalized frame; t caps bundle size
 * except at the diameter stop, where the eligible set is emitted whole. */
SplitReduceTree build_envelope_tree(const Envelope& E, double eps, int t);

struct RayShot {
    int site = -1;        // envelope plane / site index
    double height = 0.0;  // topmost intersection, normalized frame
    int iterations = 0;   // membership queries spent by the bisection
};

// Vertical ray from above the envelope at q (normalized cell coordinates,
// |q| <= 1/2): bisect the segment through the query box down to the tree's
// eps, then return the topmost plane met by the final segment's cells.
// Throws if the segment endpoints fail the inside/outside sandwich.
RayShot ray_shoot(const SplitReduceTree& T, int site_planes, const Vec& q);

struct AnnParams {
    double eps = 0.1;  // relative error bound, in (0, 1/2]
    int t = 4;         // bundle budget for far-set envelope trees
    int near_cap = 16;
    int rep_threshold = 64;
    int rep_depth_cap = 12;  // depth limit for splits driven by rep count
    int depth_cap = 24;      // hard depth limit
};

struct AnnCellRec {
    QuadtreeCell cell;  // over the index's domain cube
    std::vector<int32_t> near_ids;  // scanned exactly
    std::vector<int32_t> far_ids;   // scanned or ray-shot
    int32_t far_tree = -1;          // index into AnnIndex::far, -1 = brute
};

struct FarTree {
    SplitReduceTree tree;  // strict envelope tree for the cell's far sites
    int site_planes = 0;
    Vec center;            // normalization frame: y = (x - center) / (side*sqrt(d))
    double side = 0.0;
};

struct AnnNode {
    bool leaf = true;
    int64_t payload = -1;  // cell index, or first child of a contiguous 2^d block
};

struct AnnIndex {
    int dim = 0;
    AnnParams params;
    Box domain;  // cube containing the sites, padded
    std::vector<Vec> pts;
    std::vector<AnnNode> nodes;  // nodes[0] is the root
    std::vector<AnnCellRec> cells;
    std::vector<FarTree> far;
    int depth = 0;
};

/* Quadtree over the padded bounding cube. Per cell, representatives are the
 * sites within (1+eps)*(r* + diam) of the center (r* = exact distance to the
 * nearest site), which contains an exact nearest neighbor of every point in
 * the cell. Cells split while the near set overflows, or while the rep set
 * overflows and the far set violates the annulus. Leaves whose far set
 * exceeds t*lg(1/eps) and fits the annulus get an envelope tree. */
AnnIndex build_ann(const std::vector<Vec>& X, double eps, int t);
AnnIndex build_ann(const std::vector<Vec>& X, const AnnParams& P);

struct AnnAnswer {
    int site = -1;
    double dist = 0.0;
    int levels = 0;     // descent steps to the leaf
    int scanned = 0;    // candidates evaluated by direct distance
    int ray_iters = 0;  // bisection steps, 0 when no far tree was used
};

// Locate the leaf, scan its near set, then either ray-shoot the far tree or
// scan the far set. Never worse than (1+eps) times the exact distance.
AnnAnswer ann_query(const AnnIndex& I, const Vec& q);

const AnnCellRec& locate_ann_cell(const AnnIndex& I, const Vec& q);

void write_ann(std::ostream& os, const AnnIndex& I);
AnnIndex read_ann(std::istream& is);
void save_ann(const std::string& path, const AnnIndex& I);
AnnIndex load_ann(const std::string& path);

}  // namespace polymem
