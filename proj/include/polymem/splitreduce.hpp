#pragma once

#include "polymem/approx.hpp"
#include "polymem/precondition.hpp"

namespace polymem {

/* One quadtree node. Internal nodes keep their 2^d children in one
 * contiguous block starting at `payload`, ordered by corner mask; Bundle
 * leaves use `payload` as an index into the tree's bundle list. */
struct SrNode {
    enum class Kind : uint8_t { Inside, Outside, Bundle, Internal };
    Kind kind = Kind::Inside;
    int64_t payload = -1;
};

struct SplitReduceTree {
    CanonicalForm form;  // the body answered for, with its map and eps
    int t = 1;
    bool strict_inside = false;
    int depth = 0;
    std::vector<SrNode> nodes;  // nodes[0] is the root
    std::vector<LocalApprox> bundles;
};

struct SrQuery {
    bool inside = false;
    int levels = 0;   // descent steps taken
    int tested = 0;   // bundle halfspaces evaluated
    int witness = -1; // index into form.body.halfspaces when outside
};

struct SpaceReport {
    int64_t nodes = 0;
    int64_t internal_nodes = 0;
    int64_t inside_leaves = 0;
    int64_t outside_leaves = 0;
    int64_t bundle_leaves = 0;
    int64_t sum_tq = 0;     // total halfspaces across bundles
    int64_t max_bundle = 0; // largest single bundle
    int depth = 0;
};

/* Recursive construction over the reference box. Per cell: disjoint from the
 * body -> Outside; every corner within eps of the body (inside it, under
 * strict_inside) -> Inside; cell diameter at most eps -> Inside (Outside
 * under strict_inside, which may only accept cells the body contains); a
 * local approximation of at most t halfspaces -> Bundle; otherwise split. */
SplitReduceTree build(const CanonicalForm& K, int t, bool strict_inside = false);

/* Point location plus a scan of the leaf bundle. Queries are in canonical
 * coordinates; points outside the reference box answer Outside directly.
 * Outside answers carry a violated input halfspace as witness. */
SrQuery query(const SplitReduceTree& T, const Vec& q);

SpaceReport space_report(const SplitReduceTree& T);

void write_tree(std::ostream& os, const SplitReduceTree& T);
SplitReduceTree read_tree(std::istream& is);
void save_tree(const std::string& path, const SplitReduceTree& T);
SplitReduceTree load_tree(const std::string& path);

}  // namespace polymem
