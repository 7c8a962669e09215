#ifndef NETGAMES_QP_HPP
#define NETGAMES_QP_HPP

#include "netgames/network.hpp"

namespace netgames {

/// Result of a small dense convex QP solve.
struct QpResult {
    Vector x;
    Vector lambda;    ///< multipliers of the inequality rows, >= 0, inactive rows zero
    Vector mu;        ///< multipliers of the equality rows
    bool feasible = false;
    double objective = 0.0;
};

/// Solves  min_y 1/2 y'Qy - c'y  s.t.  B y <= b,  H y = h  exactly for small
/// problems by enumerating candidate active sets in order of increasing size
/// (KKT consistency is sufficient for optimality since Q > 0). Intended for
/// per-agent subproblems with a handful of rows; cost grows as 2^rows(B).
/// feasible == false when no candidate satisfies primal feasibility.
QpResult solve_small_qp(const Matrix& Q, const Vector& c,
                        const Matrix& B, const Vector& b,
                        const Matrix& H, const Vector& h);

/// Projected gradient with backtracking for the same problem when the row
/// count makes enumeration unattractive. Projection onto the feasible set is
/// delegated to a Euclidean solve_small_qp; used only for wide boxes.
QpResult solve_qp_projected_gradient(const Matrix& Q, const Vector& c,
                                     const Matrix& B, const Vector& b,
                                     const Matrix& H, const Vector& h,
                                     double tol, int max_iters);

}  // namespace netgames

#endif
