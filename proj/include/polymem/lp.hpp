#pragma once

#include "polymem/geom.hpp"

namespace polymem {

/* Small dense linear programs. Dimensions here are tiny (<= 7) while
 * constraint counts run to a few hundred, which is the regime Seidel's
 * randomized incremental algorithm handles well. */

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    Vec x;
    double value = 0.0;  // objective at x when Optimal
};

// minimize <c, x> subject to <a_i, x> <= b_i for the given halfspaces and
// lo <= x <= hi componentwise. The box keeps every subproblem bounded;
// callers pass the natural domain (a cell, the reference box, ...).
LpResult lp_minimize(const Vec& c, const std::vector<Halfspace>& hs, const Box& bounds);

// Feasibility of {halfspaces} within bounds, honoring closed boundaries up to
// the shared LP tolerance: minimizes the max constraint violation and accepts
// when it is <= kTol.lp.
bool lp_feasible(const std::vector<Halfspace>& hs, const Box& bounds);

// Convenience: polytope intersected with a box or quadtree cell nonempty?
bool feasible(const Polytope& K, const Box& cell);
inline bool feasible(const Polytope& K, const QuadtreeCell& cell) {
    return feasible(K, cell.box());
}

}  // namespace polymem
