#ifndef NETGAMES_SENSITIVITY_HPP
#define NETGAMES_SENSITIVITY_HPP

#include "netgames/game.hpp"

#include <string>
#include <vector>

namespace netgames {

/// Active rows of the stacked constraint description at an equilibrium:
/// A = [B0; H] keeps every equality row and the inequality rows tight within
/// activity_tol.
struct ActiveSetData {
    Matrix A;
    Vector a;
    std::vector<std::pair<int, int>> active_indices;  ///< (agent, local inequality row)
    int inequality_count = 0;                         ///< leading rows of A that are inequalities
    double activity_tol = 0.0;
};

struct KktResult {
    Vector lambda;  ///< one multiplier per active inequality row, >= 0
    Vector mu;      ///< equality multipliers
    ActiveSetData active;
    double stationarity_residual = 0.0;
};

/// Multipliers of F(x*) + B0' lambda + H' mu = 0 on the active rows (least
/// squares; A may carry redundant user rows before the rank check). For
/// scalar non-negativity constraints this reduces to lambda^i = F^i(x*).
/// Throws when the stationarity residual exceeds 100 * activity_tol.
KktResult kkt_multipliers(const GameSpec& spec, const Vector& xstar, double activity_tol = 1e-8);

struct RegularityFlags {
    bool second_order = false;           ///< gradF + gradF' > 0 at x*
    bool full_rank = false;              ///< A has full row rank
    bool strict_complementarity = false; ///< every active multiplier strictly positive
    double second_order_margin = 0.0;
    double rank_margin = 0.0;            ///< smallest singular value of A
    double complementarity_margin = 0.0; ///< smallest active multiplier
    std::string failure_detail;

    bool all() const { return second_order && full_rank && strict_complementarity; }
};

RegularityFlags check_regularity(const GameSpec& spec, const Vector& xstar, const KktResult& kkt,
                                 double strict_tol = 1e-6);

/// Which cost parameters the sensitivity differentiates against.
struct ParamSelector {
    enum Kind {
        LqOffsets,   ///< y = stacked a^i of the linear quadratic family
        RacesGamma,  ///< y = the scalar network-effect weight of the race
        EdgeWeight,  ///< y = one entry of the adjacency matrix
    } kind = LqOffsets;
    int edge_row = 0;
    int edge_col = 0;
};

/// grad_y F(x, y) at the equilibrium, closed form per family.
Matrix parametric_gradient(const GameSpec& spec, const Vector& xstar, const ParamSelector& sel);

struct SensitivityResult {
    Matrix grad_y_xstar;  ///< (N n) x d equilibrium Jacobian
    Matrix M;             ///< L - L A' (A L A')^{-1} A L
    Matrix L;             ///< [grad_x F]^{-1}
    RegularityFlags regularity;
    KktResult kkt;
};

/// Primal sensitivity formula grad_y x* = -M grad_y F. Throws a
/// regularity-violation error when grad_x F or A L A' is singular or a
/// regularity flag fails.
SensitivityResult equilibrium_sensitivity(const GameSpec& spec, const Vector& xstar,
                                          const ParamSelector& sel, double activity_tol = 1e-8,
                                          double strict_tol = 1e-6);

/// Evaluable perturbation bounds under a uniform block P-function constant.
struct LipschitzBound {
    double eta_bar = 0.0;
    double L_const = 0.0;
    std::optional<double> delta_max;  ///< max ||x||_2 over X, bounded sets only

    /// ||x*(y) - x*(ybar)|| <= (L / eta_bar) ||y - ybar||.
    double bound_parameter(double dy_norm) const;

    /// Bounded-X form covering network perturbations:
    /// ||dx*||^2 <= (L/eta_bar)^2 (||dG||_2^2 delta^2 + ||dy||^2).
    double bound_network(double dG_norm, double dy_norm) const;
};

/// eta_bar comes from a diagnostics certificate or the caller; L_const has a
/// closed form for linear quadratic games and must be supplied otherwise.
/// need_network_bound additionally computes delta_max (bounded sets only).
LipschitzBound lipschitz_bound(const GameSpec& spec, double eta_bar,
                               std::optional<double> L_const = std::nullopt,
                               bool need_network_bound = false);

/// max_i of the blockwise Lipschitz constant ||[Q^i K^i -I]||_2 of the
/// linear quadratic operator in (x^i, z^i, a^i).
double lq_gradient_lipschitz(const GameSpec& spec);

/// max ||x||_2 over the full strategy space; throws for unbounded sets.
double max_feasible_norm(const GameSpec& spec);

}  // namespace netgames

#endif
