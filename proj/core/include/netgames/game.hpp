#ifndef NETGAMES_GAME_HPP
#define NETGAMES_GAME_HPP

#include "netgames/network.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

namespace netgames {

enum class ConstraintKind { Unconstrained, NonNegOrthant, Box, Polyhedron };

/// Closed convex per-agent strategy set. Box bounds may be infinite.
class ConstraintSet {
public:
    static ConstraintSet unconstrained(int dim);
    static ConstraintSet nonneg(int dim);
    static ConstraintSet box(Vector lower, Vector upper);
    static ConstraintSet polyhedron(Matrix B, Vector b, Matrix H = Matrix(0, 0), Vector h = Vector(0));

    ConstraintKind kind() const { return kind_; }
    int dim() const { return dim_; }
    const Vector& lower() const { return lower_; }
    const Vector& upper() const { return upper_; }

    bool contains(const Vector& x, double tol = 1e-12) const;
    bool is_bounded() const;

    /// Euclidean projection onto the set.
    Vector project(const Vector& x) const;

    /// Projection in the ||.||_Q norm, argmin_y ||y - x||_Q over the set.
    Vector project_weighted(const Vector& x, const Matrix& Q) const;

    /// min_y 1/2 y'Qy - c'y over the set (the best-response subproblem).
    Vector minimize_quadratic(const Matrix& Q, const Vector& c) const;

    /// Canonical inequality description rows/rhs (box and orthant expanded,
    /// infinite bounds dropped). Empty for unconstrained sets.
    std::pair<Matrix, Vector> inequality_rows() const;
    std::pair<Matrix, Vector> equality_rows() const;

    /// A point satisfying all inequalities strictly (Slater), if one exists.
    std::optional<Vector> strictly_feasible_point(double margin = 1e-9) const;

    /// max ||x||_2 over the set; throws for unbounded sets. Boxes are exact,
    /// polyhedra with dim <= 4 use vertex enumeration.
    double max_norm() const;

private:
    ConstraintKind kind_ = ConstraintKind::Unconstrained;
    int dim_ = 0;
    Vector lower_, upper_;  // box data
    Matrix B_;
    Vector b_;
    Matrix H_;
    Vector h_;
};

/// Linear quadratic family: J^i(x^i, z^i) = 1/2 x^i'Q^i x^i + (K^i z^i - a^i)'x^i,
/// so F^i = Q^i x^i + K^i z^i - a^i and the best response is the Q^i-weighted
/// projection of (Q^i)^{-1}(a^i - K^i z^i).
struct LinearQuadraticFamily {
    std::vector<Matrix> Q;  ///< per agent, symmetric positive definite
    std::vector<Matrix> K;
    std::vector<Vector> a;
};

/// Scalar race: J^i(x, z) = 1/2 x^2 - (a^i + phi_i(z)) x over [a^i, b^i].
/// The built-in variant uses phi(z) = gamma z (b - z) with homogeneous bounds.
struct RacesFamily {
    Vector lower;  ///< a^i, 0 < a^i < b^i
    Vector upper;  ///< b^i
    double gamma = 0.0;
    std::function<double(int, double)> phi;    ///< custom phi_i(z), optional
    std::function<double(int, double)> dphi;   ///< derivative of custom phi_i
    std::optional<double> kappa2_bound;        ///< user bound max |phi'| for custom phi

    bool builtin() const { return !phi; }
    double phi_value(int agent, double z) const;
    double phi_derivative(int agent, double z) const;
};

/// Two interdependent activities per agent, quadratic payoff of Example-3 type:
/// Q^i = [[1, beta^i], [beta^i, 1]], K^i = -[[delta, mu], [mu, delta]],
/// standalone benefits a^i = [a_A^i; a_B^i].
struct MultiActivityFamily {
    Vector a_A, a_B;
    Vector beta;    ///< in (-1, 1) per agent
    double delta = 0.0;
    double mu = 0.0;
};

/// User-supplied game: per-agent cost gradient and Hessian blocks.
struct CustomFamily {
    int strategy_dim = 1;
    std::function<Vector(int, const Vector&, const Vector&)> grad;           ///< grad_{x^i} J^i(x^i, z^i)
    std::function<Matrix(int, const Vector&, const Vector&)> own_hessian;    ///< D^i(x^i, z^i)
    std::function<Matrix(int, const Vector&, const Vector&)> cross_hessian;  ///< K^i(x^i, z^i)
    std::optional<Vector> kappa1;  ///< per-agent curvature lower bounds
    std::optional<Vector> kappa2;  ///< per-agent cross-derivative norm bounds
};

using Family = std::variant<LinearQuadraticFamily, RacesFamily, MultiActivityFamily, CustomFamily>;

/// Immutable description of a network game: network, cost family and
/// per-agent constraint sets. Evaluation operations are pure.
class GameSpec {
public:
    GameSpec(Network network, Family family, std::vector<ConstraintSet> constraints);

    int n_agents() const { return network_.n_agents(); }
    int strategy_dim() const { return strategy_dim_; }
    int profile_dim() const { return n_agents() * strategy_dim_; }

    const Network& network() const { return network_; }
    const Family& family() const { return family_; }
    const ConstraintSet& constraints(int agent) const { return constraints_[agent]; }

    const LinearQuadraticFamily* lq() const { return std::get_if<LinearQuadraticFamily>(&family_); }
    const RacesFamily* races() const { return std::get_if<RacesFamily>(&family_); }
    const MultiActivityFamily* multi_activity() const { return std::get_if<MultiActivityFamily>(&family_); }
    const CustomFamily* custom() const { return std::get_if<CustomFamily>(&family_); }

    /// True when the cost has the quadratic-plus-aggregate form with block Q,
    /// for which the best response is a weighted projection and the descent
    /// value function is available (all built-in families).
    bool has_projection_form() const { return custom() == nullptr; }

    /// Block Q^i of the projection-form cost.
    Matrix own_quadratic(int agent) const;

    /// Agent block of a stacked profile.
    Eigen::VectorBlock<const Vector> agent_block(const Vector& x, int agent) const;

    bool feasible(const Vector& x, double tol = 1e-9) const;
    Vector project_profile(const Vector& x) const;

private:
    Network network_;
    Family family_;
    std::vector<ConstraintSet> constraints_;
    int strategy_dim_;
};

/// Stacked operator value and block-structured gradient at a profile.
struct JacobianEval {
    Vector F;                       ///< stacked grad_{x^i} J^i, dimension N*n
    Matrix gradF;                   ///< blkdiag(D) + blkdiag(K) (G (x) I_n)
    std::vector<Matrix> D_blocks;   ///< symmetric own-Hessian blocks
    std::vector<Matrix> K_blocks;   ///< cross-Hessian blocks
};

enum class KappaExactness { Exact, UserSupplied, Sampled };

/// Uniform curvature/cross-derivative bounds: kappa1 = min_i min_x lambda_min(D^i),
/// kappa2 = max_i max_x ||K^i||_2.
struct KappaBounds {
    Vector kappa1_per_agent;
    Vector kappa2_per_agent;
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    KappaExactness exactness = KappaExactness::Exact;
};

/// Stacked neighbour aggregates z^i = sum_j G_ij x^j.
Vector neighbor_aggregate(const GameSpec& spec, const Vector& x);

/// Operator value only (cheap path for solvers).
Vector game_operator(const GameSpec& spec, const Vector& x);

JacobianEval evaluate_jacobian(const GameSpec& spec, const Vector& x);

/// Unique minimizer of J^i(., z_i) over the agent's constraint set.
Vector best_response(const GameSpec& spec, int agent, const Vector& z_i, double br_tol = 1e-10);

/// All best responses against the aggregates of profile x.
Vector best_response_profile(const GameSpec& spec, const Vector& x, double br_tol = 1e-10);

/// Cost J^i(x_i, z_i) of one agent; available for the built-in families.
double agent_cost(const GameSpec& spec, int agent, const Vector& x_i, const Vector& z_i);

/// kappa bounds; closed form for the built-in families, user-supplied or
/// low-discrepancy sampled (10^4 points, never certifying) for custom games.
KappaBounds kappa_bounds(const GameSpec& spec,
                         const std::optional<ConstraintSet>& strategy_box = std::nullopt,
                         std::uint64_t seed = 0);

/// Deterministic Halton sequence point in [0,1)^dim, index-shifted by seed.
Vector halton_point(std::uint64_t index, int dim, std::uint64_t seed = 0);

}  // namespace netgames

#endif
