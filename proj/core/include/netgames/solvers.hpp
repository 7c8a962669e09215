#ifndef NETGAMES_SOLVERS_HPP
#define NETGAMES_SOLVERS_HPP

#include "netgames/game.hpp"

#include <string>
#include <vector>

namespace netgames {

enum class DynamicsMode {
    DiscreteSimultaneous,
    DiscreteSequential,
    DiscreteRelaxed,
    ContinuousRk4,
    Projection,
};

std::string to_string(DynamicsMode mode);

struct DynamicsConfig {
    DynamicsMode mode = DynamicsMode::DiscreteSimultaneous;
    int max_iters = 10000;
    double residual_tol = 1e-9;
    int record_every = 1;
    double relaxation = 1.0;       ///< tau in (0, 1] for DiscreteRelaxed
    double step = 0.05;            ///< RK4 step h
    double time_horizon = 1e3;     ///< RK4 time budget
    double projection_step = 0.5;  ///< tau_p for Projection
    double oscillation_tol = 1e-9;
    int oscillation_max_period = 8;
    double br_tol = 1e-10;
};

enum class Terminal { Converged, MaxIters, OscillationDetected };

std::string to_string(Terminal t);

struct TrajectorySample {
    double time = 0.0;  ///< iteration count or continuous time
    Vector x;
    double residual = 0.0;  ///< fixed-point gap ||x - Pi_X[x - F(x)]||_2
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    Terminal terminal = Terminal::MaxIters;
    Vector final_x;
    double final_residual = 0.0;
    int iterations = 0;
    std::string diagnostic;  ///< e.g. step-too-large or step adaptation notes
};

/// ||x - Pi_X[x - F(x)]||_2, the natural fixed-point residual.
double natural_residual(const GameSpec& spec, const Vector& x);

/// Simultaneous / sequential / relaxed discrete best-response iterations.
/// Stops on the residual tolerance, the iteration cap, or a detected cycle of
/// period 2..oscillation_max_period (compared at schedule-aligned instants).
Trajectory discrete_br(const GameSpec& spec, const Vector& x0, const DynamicsConfig& cfg);

/// Classical RK4 integration of dx/dt = B(x) - x at fixed step. For
/// projection-form costs a persistent increase of the descent value function
/// raises a step-too-large diagnostic.
Trajectory continuous_br(const GameSpec& spec, const Vector& x0, const DynamicsConfig& cfg);

/// x_{k+1} = Pi_X[x_k - tau_p F(x_k)], halving tau_p on sustained residual
/// growth (the adaptation is recorded in the diagnostic string).
Trajectory projection_method(const GameSpec& spec, const Vector& x0, const DynamicsConfig& cfg);

struct ResidualReport {
    double residual = 0.0;       ///< natural residual
    Vector per_agent_gaps;       ///< ||x^i - B^i(z^i)||_2
    bool is_epsilon_equilibrium = false;
    double eps = 0.0;
};

ResidualReport verify_equilibrium(const GameSpec& spec, const Vector& x, double eps);

struct BruteForceResult {
    std::vector<Vector> equilibria;   ///< polished, deduplicated
    std::vector<Vector> unpolished;   ///< grid survivors whose polish failed
    double grid_eps = 0.0;
};

/// Grid enumeration oracle over box strategy sets: keeps profiles whose
/// grid-restricted cost is within a grid-induced epsilon of the best grid
/// response for every agent, polishes survivors (sequential best response,
/// with a local Newton fall-back for best-response-unstable equilibria) and
/// deduplicates within 1e-6. Requires grid_resolution^(N n) <= 1e8.
BruteForceResult brute_force_nash(const GameSpec& spec, int grid_resolution,
                                  const std::optional<std::vector<ConstraintSet>>& box_override =
                                      std::nullopt);

/// Descent value function of projection-form games:
/// F(x)'(x - B(x)) - 1/2 ||x - B(x)||_Q^2; non-negative, decreasing along
/// continuous best-response trajectories of strongly monotone games.
double descent_value(const GameSpec& spec, const Vector& x);

/// Five deterministic feasible starting profiles (projections of fixed
/// ambient patterns) used by the dynamics reproductions.
std::vector<Vector> default_initial_conditions(const GameSpec& spec);

}  // namespace netgames

#endif
