#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <vector>

#include "polymem/geom.hpp"
#include "polymem/oracle.hpp"

namespace polymem {

/* Global approximators (Dudley, Bentley columns, the grid hybrid between
 * them) and the per-cell local approximators backing the quadtree. */

struct DudleySample {
    Vec sphere_point;
    Vec contact;        // nearest boundary point of the body
    Halfspace support;  // through contact, normal toward sphere_point
};

// Supporting halfspaces for a sqrt(eps)/4-dense sample of the radius-3
// sphere, deduplicated. Outer eps-approximation of a body inside the
// reference domain.
std::vector<DudleySample> dudley_samples(const BodyOracle& K, double eps);
Polytope dudley_approx(const BodyOracle& K, double eps);

/* Column table: a (d-1)-dimensional grid of pitch eps over the reference
 * box; per column the exact vertical extent of the body, or empty. */
struct ColumnTable {
    int d = 0;
    double pitch = 0.0;
    int cols_per_axis = 0;
    // flat row-major index over the first d-1 axes; empty marked lo > hi
    std::vector<std::pair<double, double>> range;

    int64_t column_of(const Vec& q) const;  // -1 when outside the grid
    bool query(const Vec& q) const;
    int64_t nonempty_count() const;
};

ColumnTable bentley_columns(const Polytope& K, double eps);

enum class LocalMethod : uint8_t { SetCover, LocalDudley };

/* Halfspaces approximating the body within one cell. Set-cover outputs carry
 * the originating indices into the input halfspace list; local Dudley
 * fabricates fresh supporting planes. */
struct LocalApprox {
    QuadtreeCell cell;
    LocalMethod method = LocalMethod::LocalDudley;
    std::vector<Halfspace> planes;
    std::vector<int> input_ids;  // set cover only, parallel to planes

    bool accepts(const Vec& q, double tol = kTol.membership) const;
};

/* Uniform grid over the reference domain at pitch eps^{1-2/alpha}, snapped to
 * the nearest dyadic level so cells are quadtree cells. Interior and exterior
 * cells are labeled; boundary cells carry local approximations. */
struct HybridGrid {
    enum class CellKind : uint8_t { Inside, Outside, Boundary };

    int d = 0;
    int level = 0;
    double eps = 0.0;
    std::vector<CellKind> kind;                 // flat row-major over the grid
    std::vector<std::vector<Halfspace>> planes;  // boundary cells only

    bool query(const Vec& q) const;
    size_t total_halfspaces() const;
    size_t boundary_cells() const;
};

HybridGrid hybrid_tradeoff(const BodyOracle& K, double eps, double alpha);

// Uniform growth (1 + 2 sqrt(d) eps) of a fat origin-centered body: nested
// between K grown by gamma*eps and by eps.
Polytope scaled_body(const Polytope& K, double eps);

/* Greedy set cover over the cell's grid of witness points. Budget overruns
 * are a normal outcome that tells the caller to split the cell; grids past
 * the cap (in points, or in points times active planes at 128x the cap) tell
 * it the cell is cheaper to split or to approximate another way. */
struct SetCoverOutcome {
    enum class Status : uint8_t { Ok, TooLarge, GridCap };
    Status status = Status::Ok;
    LocalApprox approx;
};

SetCoverOutcome set_cover_local(const Polytope& K, const QuadtreeCell& cell,
                                double eps, int64_t budget,
                                int64_t grid_cap = 1500000);

// Greedy cover of n_elems ground elements by bitmask sets (element i lives in
// word i>>6, bit i&63). Picks the largest marginal gain, lowest index on
// ties, and returns the chosen set indices in pick order; empty optional when
// more than budget sets would be needed. Throws when some element is in no
// set at all.
std::optional<std::vector<int>> greedy_cover(
    size_t n_elems, const std::vector<std::vector<uint64_t>>& masks,
    int64_t budget = std::numeric_limits<int64_t>::max());

LocalApprox local_dudley(const BodyOracle& K, const QuadtreeCell& cell, double eps);
LocalApprox local_dudley_box(const BodyOracle& K, const Box& cell, double eps);

/* Sampled soundness check of a local approximation: points of the body inside
 * the cell must be accepted, points farther than eps from the body rejected. */
struct VerifyReport {
    int samples = 0;
    int inside_checked = 0;
    int far_checked = 0;
    int inside_violations = 0;
    int far_violations = 0;

    bool ok() const { return inside_violations == 0 && far_violations == 0; }
};

VerifyReport verify_local_approx(const BodyOracle& K, const LocalApprox& A,
                                 double eps, int samples, uint64_t seed);

void write_local_approx(std::ostream& os, const LocalApprox& A);
LocalApprox read_local_approx(std::istream& is, const Polytope& body);

}  // namespace polymem
