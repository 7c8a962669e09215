#ifndef NETGAMES_TESTS_SUPPORT_HPP
#define NETGAMES_TESTS_SUPPORT_HPP

#include "netgames/game.hpp"
#include "netgames/network.hpp"

#include <random>

namespace netgames::testing {

/// Scalar linear quadratic game with homogeneous or per-agent weights,
/// non-negative orthant strategies unless told otherwise.
inline GameSpec lq_scalar(Network net, const Vector& k, const Vector& a,
                          std::vector<ConstraintSet> sets = {}) {
    const int N = net.n_agents();
    LinearQuadraticFamily fam;
    for (int i = 0; i < N; ++i) {
        fam.Q.push_back(Matrix::Identity(1, 1));
        fam.K.push_back(Matrix::Constant(1, 1, k(i)));
        fam.a.push_back(Vector::Constant(1, a(i)));
    }
    if (sets.empty()) sets.push_back(ConstraintSet::nonneg(1));
    return GameSpec(std::move(net), std::move(fam), std::move(sets));
}

inline GameSpec lq_scalar_homogeneous(Network net, double k, double a,
                                      std::vector<ConstraintSet> sets = {}) {
    const int N = net.n_agents();
    return lq_scalar(std::move(net), Vector::Constant(N, k), Vector::Constant(N, a), std::move(sets));
}

inline GameSpec races_builtin(Network net, double gamma, double a, double b) {
    const int N = net.n_agents();
    RacesFamily fam;
    fam.lower = Vector::Constant(N, a);
    fam.upper = Vector::Constant(N, b);
    fam.gamma = gamma;
    return GameSpec(std::move(net), std::move(fam), {ConstraintSet::box(Vector::Constant(1, a), Vector::Constant(1, b))});
}

/// Multi-activity game; per-agent box [0, cap]^2 plus total budget [0, btot].
inline GameSpec multi_activity(Network net, Vector a_A, Vector a_B, Vector beta, double delta,
                               double mu, double cap, double btot) {
    MultiActivityFamily fam;
    fam.a_A = std::move(a_A);
    fam.a_B = std::move(a_B);
    fam.beta = std::move(beta);
    fam.delta = delta;
    fam.mu = mu;
    Matrix B(6, 2);
    Vector b(6);
    B << -1, 0, 0, -1, 1, 0, 0, 1, 1, 1, -1, -1;
    b << 0, 0, cap, cap, btot, 0;
    return GameSpec(std::move(net), std::move(fam),
                    {ConstraintSet::polyhedron(B, b)});
}

/// Central-difference Jacobian of the game operator, column by column.
inline Matrix fd_jacobian(const GameSpec& spec, const Vector& x, double step = 1e-6) {
    const int D = spec.profile_dim();
    Matrix jac(D, D);
    for (int j = 0; j < D; ++j) {
        Vector hi = x, lo = x;
        hi(j) += step;
        lo(j) -= step;
        jac.col(j) = (game_operator(spec, hi) - game_operator(spec, lo)) / (2.0 * step);
    }
    return jac;
}

/// Deterministic feasible profile inside per-agent boxes.
inline Vector random_box_profile(std::mt19937_64& rng, const Vector& lo, const Vector& hi) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vector x(lo.size());
    for (int k = 0; k < lo.size(); ++k) x(k) = lo(k) + unit(rng) * (hi(k) - lo(k));
    return x;
}

/// Brute-force grid minimizer of one agent's cost over a 1-d interval.
inline double grid_minimize_cost(const GameSpec& spec, int agent, double z, double lo, double hi,
                                 int points) {
    double best_x = lo;
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < points; ++k) {
        const double x = lo + (hi - lo) * k / (points - 1);
        const double c = agent_cost(spec, agent, Vector::Constant(1, x), Vector::Constant(1, z));
        if (c < best) {
            best = c;
            best_x = x;
        }
    }
    return best_x;
}

}  // namespace netgames::testing

#endif
