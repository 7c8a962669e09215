#include "netgames/solvers.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace netgames {

std::string to_string(DynamicsMode mode) {
    switch (mode) {
        case DynamicsMode::DiscreteSimultaneous: return "simultaneous";
        case DynamicsMode::DiscreteSequential: return "sequential";
        case DynamicsMode::DiscreteRelaxed: return "relaxed";
        case DynamicsMode::ContinuousRk4: return "continuous";
        case DynamicsMode::Projection: return "projection";
    }
    return "?";
}

std::string to_string(Terminal t) {
    switch (t) {
        case Terminal::Converged: return "converged";
        case Terminal::MaxIters: return "max_iters";
        case Terminal::OscillationDetected: return "oscillation_detected";
    }
    return "?";
}

double natural_residual(const GameSpec& spec, const Vector& x) {
    const Vector f = game_operator(spec, x);
    return (x - spec.project_profile(x - f)).norm();
}

namespace {

void require_feasible(const GameSpec& spec, const Vector& x0) {
    if (!spec.feasible(x0, 1e-9)) throw std::invalid_argument("infeasible initial profile");
}

/// Ring buffer cycle detector over schedule-aligned profiles. A period-p
/// match only counts as a cycle when the iterate is still moving; otherwise
/// slow convergence toward a fixed point would masquerade as period 2.
class CycleDetector {
public:
    CycleDetector(int max_period, double tol) : max_period_(max_period), tol_(tol) {}

    /// Returns the detected period, or 0.
    int push(const Vector& x) {
        const bool moving =
            history_.empty() || (x - history_.back()).cwiseAbs().maxCoeff() > 100.0 * tol_;
        if (moving) {
            for (int p = 2; p <= static_cast<int>(history_.size()); ++p) {
                if (p > max_period_) break;
                if ((x - history_[history_.size() - p]).cwiseAbs().maxCoeff() <= tol_) return p;
            }
        }
        history_.push_back(x);
        if (static_cast<int>(history_.size()) > max_period_ + 1) history_.pop_front();
        return 0;
    }

private:
    int max_period_;
    double tol_;
    std::deque<Vector> history_;
};

void finish(Trajectory& traj, const Vector& x, double residual, Terminal terminal, int iterations) {
    traj.final_x = x;
    traj.final_residual = residual;
    traj.terminal = terminal;
    traj.iterations = iterations;
}

}  // namespace

Trajectory discrete_br(const GameSpec& spec, const Vector& x0, const DynamicsConfig& cfg) {
    require_feasible(spec, x0);
    const int N = spec.n_agents();
    const int n = spec.strategy_dim();
    const bool sequential = cfg.mode == DynamicsMode::DiscreteSequential;
    const double tau = cfg.mode == DynamicsMode::DiscreteRelaxed ? cfg.relaxation : 1.0;
    if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("relaxation must lie in (0, 1]");

    Trajectory traj;
    Vector x = x0;
    double res = natural_residual(spec, x);
    traj.samples.push_back({0.0, x, res});
    if (res <= cfg.residual_tol) {
        finish(traj, x, res, Terminal::Converged, 0);
        return traj;
    }

    CycleDetector cycles(cfg.oscillation_max_period, cfg.oscillation_tol);
    cycles.push(x);
    int aligned = 0;

    for (int k = 0; k < cfg.max_iters; ++k) {
        if (sequential) {
            const int i = k % N;
            const Vector z = neighbor_aggregate(spec, x);
            x.segment(i * n, n) = best_response(spec, i, z.segment(i * n, n), cfg.br_tol);
        } else {
            const Vector br = best_response_profile(spec, x, cfg.br_tol);
            if (tau == 1.0) {
                x = br;
            } else {
                x = (1.0 - tau) * x + tau * br;
            }
        }
        res = natural_residual(spec, x);
        const bool aligned_instant = !sequential || ((k + 1) % N == 0);
        if (aligned_instant) {
            ++aligned;
            if (aligned % std::max(1, cfg.record_every) == 0) {
                traj.samples.push_back({static_cast<double>(k + 1), x, res});
            }
        }
        if (res <= cfg.residual_tol) {
            if (traj.samples.back().time != k + 1) traj.samples.push_back({static_cast<double>(k + 1), x, res});
            finish(traj, x, res, Terminal::Converged, k + 1);
            return traj;
        }
        if (aligned_instant && cycles.push(x) > 0) {
            if (traj.samples.back().time != k + 1) traj.samples.push_back({static_cast<double>(k + 1), x, res});
            finish(traj, x, res, Terminal::OscillationDetected, k + 1);
            return traj;
        }
    }
    if (!traj.samples.empty() && traj.samples.back().time != cfg.max_iters) {
        traj.samples.push_back({static_cast<double>(cfg.max_iters), x, res});
    }
    finish(traj, x, res, Terminal::MaxIters, cfg.max_iters);
    return traj;
}

Trajectory continuous_br(const GameSpec& spec, const Vector& x0, const DynamicsConfig& cfg) {
    require_feasible(spec, x0);
    if (!(cfg.step > 0.0)) throw std::invalid_argument("RK4 step must be positive");

    Trajectory traj;
    Vector x = x0;
    const bool track_descent = spec.has_projection_form();
    double last_descent = track_descent ? descent_value(spec, x) : 0.0;
    int rising = 0;
    const double rise_slack = 10.0 * std::pow(cfg.step, 4);

    auto field = [&](const Vector& y) -> Vector { return best_response_profile(spec, y, cfg.br_tol) - y; };

    double t = 0.0;
    int step_index = 0;
    double res = natural_residual(spec, x);
    double gap = field(x).norm();
    traj.samples.push_back({0.0, x, res});

    while (true) {
        if (gap <= cfg.residual_tol && res <= cfg.residual_tol) {
            finish(traj, x, res, Terminal::Converged, step_index);
            return traj;
        }
        if (t >= cfg.time_horizon) break;

        const Vector k1 = field(x);
        const Vector k2 = field(x + 0.5 * cfg.step * k1);
        const Vector k3 = field(x + 0.5 * cfg.step * k2);
        const Vector k4 = field(x + cfg.step * k3);
        x += cfg.step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += cfg.step;
        ++step_index;

        res = natural_residual(spec, x);
        gap = field(x).norm();
        if (step_index % std::max(1, cfg.record_every) == 0) traj.samples.push_back({t, x, res});

        if (track_descent) {
            const double value = descent_value(spec, x);
            rising = value > last_descent + rise_slack ? rising + 1 : 0;
            last_descent = value;
            if (rising >= 25) {
                traj.diagnostic = "step too large: descent value increased persistently, reduce the RK4 step";
                break;
            }
        }
    }
    if (traj.samples.back().time != t) traj.samples.push_back({t, x, res});
    finish(traj, x, res, res <= cfg.residual_tol ? Terminal::Converged : Terminal::MaxIters, step_index);
    return traj;
}

Trajectory projection_method(const GameSpec& spec, const Vector& x0, const DynamicsConfig& cfg) {
    require_feasible(spec, x0);
    if (!(cfg.projection_step > 0.0)) throw std::invalid_argument("projection step must be positive");

    Trajectory traj;
    Vector x = x0;
    double tau = cfg.projection_step;
    double res = natural_residual(spec, x);
    traj.samples.push_back({0.0, x, res});
    if (res <= cfg.residual_tol) {
        finish(traj, x, res, Terminal::Converged, 0);
        return traj;
    }

    CycleDetector cycles(cfg.oscillation_max_period, cfg.oscillation_tol);
    cycles.push(x);
    double best = res;
    int worse = 0;
    int halvings = 0;

    for (int k = 0; k < cfg.max_iters; ++k) {
        x = spec.project_profile(x - tau * game_operator(spec, x));
        res = natural_residual(spec, x);
        if ((k + 1) % std::max(1, cfg.record_every) == 0) {
            traj.samples.push_back({static_cast<double>(k + 1), x, res});
        }
        if (res <= cfg.residual_tol) {
            if (traj.samples.back().time != k + 1) traj.samples.push_back({static_cast<double>(k + 1), x, res});
            finish(traj, x, res, Terminal::Converged, k + 1);
            if (halvings > 0) {
                traj.diagnostic = "projection step halved " + std::to_string(halvings) +
                                  " times, final tau_p = " + std::to_string(tau);
            }
            return traj;
        }
        if (cycles.push(x) > 0) {
            finish(traj, x, res, Terminal::OscillationDetected, k + 1);
            return traj;
        }
        if (res < best) {
            best = res;
            worse = 0;
        } else if (res > best * (1.0 + 1e-12)) {
            if (++worse >= 20) {
                tau *= 0.5;
                ++halvings;
                worse = 0;
                best = res;
            }
        }
    }
    finish(traj, x, res, Terminal::MaxIters, cfg.max_iters);
    if (halvings > 0) {
        traj.diagnostic = "projection step halved " + std::to_string(halvings) +
                          " times, final tau_p = " + std::to_string(tau);
    }
    return traj;
}

ResidualReport verify_equilibrium(const GameSpec& spec, const Vector& x, double eps) {
    const int N = spec.n_agents();
    const int n = spec.strategy_dim();
    ResidualReport rep;
    rep.eps = eps;
    rep.residual = natural_residual(spec, x);
    rep.per_agent_gaps.resize(N);
    const Vector z = neighbor_aggregate(spec, x);
    bool ok = true;
    for (int i = 0; i < N; ++i) {
        const Vector br = best_response(spec, i, z.segment(i * n, n));
        rep.per_agent_gaps(i) = (x.segment(i * n, n) - br).norm();
        ok = ok && rep.per_agent_gaps(i) <= eps;
    }
    rep.is_epsilon_equilibrium = ok;
    return rep;
}

double descent_value(const GameSpec& spec, const Vector& x) {
    if (!spec.has_projection_form()) {
        throw std::runtime_error("descent_value: needs projection-form costs");
    }
    const Vector br = best_response_profile(spec, x);
    const Vector d = x - br;
    const Vector f = game_operator(spec, x);
    double quad = 0.0;
    const int n = spec.strategy_dim();
    for (int i = 0; i < spec.n_agents(); ++i) {
        const Vector di = d.segment(i * n, n);
        quad += di.dot(spec.own_quadratic(i) * di);
    }
    return f.dot(d) - 0.5 * quad;
}

std::vector<Vector> default_initial_conditions(const GameSpec& spec) {
    const int N = spec.n_agents();
    const int n = spec.strategy_dim();
    const int D = N * n;
    std::vector<Vector> raw;
    raw.push_back(Vector::Zero(D));
    raw.push_back(Vector::Ones(D));
    raw.push_back(3.0 * Vector::Ones(D));
    Vector ramp(D);
    for (int i = 0; i < N; ++i) {
        ramp.segment(i * n, n).setConstant(static_cast<double>(i + 1) / N);
    }
    raw.push_back(ramp);
    Vector alt(D);
    for (int i = 0; i < N; ++i) alt.segment(i * n, n).setConstant(i % 2 == 0 ? 0.0 : 1.0);
    raw.push_back(alt);

    std::vector<Vector> out;
    out.reserve(raw.size());
    for (const Vector& v : raw) out.push_back(spec.project_profile(v));
    return out;
}

// ---------------------------------------------------------------------------
// Brute-force oracle

namespace {

struct GridAxes {
    Vector lower, upper;   // per global coordinate
    int resolution = 0;
    double max_spacing = 0.0;

    double value(int coord, int tick) const {
        if (resolution == 1) return lower(coord);
        return lower(coord) + (upper(coord) - lower(coord)) * tick / (resolution - 1);
    }
};

/// Own-curvature upper bound per agent, used to size the grid epsilon.
double own_curvature_bound(const GameSpec& spec, int agent) {
    if (const auto* l = spec.lq()) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(l->Q[agent], Eigen::EigenvaluesOnly);
        return es.eigenvalues().cwiseAbs().maxCoeff();
    }
    if (spec.races()) return 1.0;
    if (const auto* m = spec.multi_activity()) return 1.0 + std::abs(m->beta(agent));
    return 1.0;
}

/// Sequential best-response polish; empty when it fails to settle.
std::optional<Vector> polish_by_br(const GameSpec& spec, const Vector& start, int cap, double tol) {
    const int N = spec.n_agents();
    const int n = spec.strategy_dim();
    Vector x = start;
    for (int k = 0; k < cap; ++k) {
        const int i = k % N;
        const Vector z = neighbor_aggregate(spec, x);
        x.segment(i * n, n) = best_response(spec, i, z.segment(i * n, n));
        if ((k + 1) % N == 0 && natural_residual(spec, x) <= tol) return x;
    }
    return std::nullopt;
}

/// Damped active-set Newton on the fixed-point system; rescues equilibria
/// that repel the best-response iteration (they exist past bifurcations).
std::optional<Vector> polish_by_newton(const GameSpec& spec, const Vector& start,
                                       const GridAxes& axes, double tol) {
    const int D = spec.profile_dim();
    // Clamp a coordinate only when the operator pushes outward decisively;
    // a hair-trigger sign test flip-flops near equilibria whose active
    // multiplier is tiny, and the interior Newton handles those fine.
    const double clamp_eps = 1e-6;
    Vector x = start;
    for (int it = 0; it < 60; ++it) {
        const JacobianEval eval = evaluate_jacobian(spec, x);
        std::vector<int> free_set;
        for (int k = 0; k < D; ++k) {
            const double near = 2.0 * axes.max_spacing + 1e-12;
            const bool at_lower = x(k) <= axes.lower(k) + near && eval.F(k) > clamp_eps;
            const bool at_upper = x(k) >= axes.upper(k) - near && eval.F(k) < -clamp_eps;
            if (at_lower) {
                x(k) = axes.lower(k);
            } else if (at_upper) {
                x(k) = axes.upper(k);
            } else {
                free_set.push_back(k);
            }
        }
        if (free_set.empty()) break;
        Matrix J(free_set.size(), free_set.size());
        Vector r(free_set.size());
        for (std::size_t a = 0; a < free_set.size(); ++a) {
            r(a) = eval.F(free_set[a]);
            for (std::size_t b = 0; b < free_set.size(); ++b) J(a, b) = eval.gradF(free_set[a], free_set[b]);
        }
        Eigen::FullPivLU<Matrix> lu(J);
        if (!lu.isInvertible()) return std::nullopt;
        const Vector dx = lu.solve(r);
        for (std::size_t a = 0; a < free_set.size(); ++a) {
            const int k = free_set[a];
            x(k) = std::min(std::max(x(k) - dx(a), axes.lower(k)), axes.upper(k));
        }
        if (r.norm() <= tol) break;
    }
    if (natural_residual(spec, x) <= 10.0 * tol) return x;
    return std::nullopt;
}

}  // namespace

BruteForceResult brute_force_nash(const GameSpec& spec, int grid_resolution,
                                  const std::optional<std::vector<ConstraintSet>>& box_override) {
    const int N = spec.n_agents();
    const int n = spec.strategy_dim();
    const int D = N * n;
    if (grid_resolution < 2) throw std::invalid_argument("brute_force_nash: need grid_resolution >= 2");
    const double profiles_est = std::pow(static_cast<double>(grid_resolution), D);
    if (profiles_est > 1e8) throw std::invalid_argument("brute_force_nash: grid too large");

    GridAxes axes;
    axes.resolution = grid_resolution;
    axes.lower.resize(D);
    axes.upper.resize(D);
    for (int i = 0; i < N; ++i) {
        const ConstraintSet& set =
            box_override ? box_override->at(static_cast<std::size_t>(i)) : spec.constraints(i);
        if (set.kind() != ConstraintKind::Box || !set.is_bounded()) {
            throw std::invalid_argument(
                "brute_force_nash: needs bounded box strategy sets (supply a box override)");
        }
        axes.lower.segment(i * n, n) = set.lower();
        axes.upper.segment(i * n, n) = set.upper();
    }
    for (int k = 0; k < D; ++k) {
        axes.max_spacing =
            std::max(axes.max_spacing, (axes.upper(k) - axes.lower(k)) / (grid_resolution - 1));
    }

    const KappaBounds kb = kappa_bounds(spec);
    const SpectralMeasures sm = spectral_measures(spec.network());
    const std::int64_t total = static_cast<std::int64_t>(std::llround(profiles_est));

    // Grid epsilon: worst-case cost gap between the best grid point and the
    // true best response, inflated by the best-response drift across one cell.
    const double drift = 1.0 + (kb.kappa2 / std::max(kb.kappa1, 1e-12)) * sm.infinity_norm;
    BruteForceResult result;
    std::vector<double> eps_agent(N);
    double eps_max = 0.0;
    for (int i = 0; i < N; ++i) {
        const double reach = 0.5 * axes.max_spacing * std::sqrt(static_cast<double>(n)) * drift;
        eps_agent[i] = 2.0 * own_curvature_bound(spec, i) * reach * reach + 1e-12;
        eps_max = std::max(eps_max, eps_agent[i]);
    }
    result.grid_eps = eps_max;

    std::vector<bool> keep(static_cast<std::size_t>(total), true);

    // Strides of the mixed-radix profile index, coordinate 0 fastest.
    std::vector<std::int64_t> stride(D);
    stride[0] = 1;
    for (int k = 1; k < D; ++k) stride[k] = stride[k - 1] * grid_resolution;
    const std::int64_t inner = stride[n];  // combinations of one agent's coords

    std::vector<double> line_cost(static_cast<std::size_t>(inner));
    Vector others(D);

    for (int agent = 0; agent < N; ++agent) {
        const std::int64_t groups = total / inner;
        std::vector<int> outer_digits(D - n, 0);
        // Coordinates outside this agent's block, in increasing global order.
        std::vector<int> outer_coords;
        for (int k = 0; k < D; ++k) {
            if (k < agent * n || k >= (agent + 1) * n) outer_coords.push_back(k);
        }
        for (std::int64_t g = 0; g < groups; ++g) {
            std::int64_t base = 0;
            for (std::size_t q = 0; q < outer_coords.size(); ++q) {
                base += stride[outer_coords[q]] * outer_digits[q];
                others(outer_coords[q]) = axes.value(outer_coords[q], outer_digits[q]);
            }
            // Aggregate of this agent depends only on the other agents.
            Vector z_i = Vector::Zero(n);
            for (int j = 0; j < N; ++j) {
                if (j == agent) continue;
                const double w = spec.network().weights()(agent, j);
                if (w != 0.0) z_i += w * others.segment(j * n, n);
            }
            double line_min = std::numeric_limits<double>::infinity();
            Vector xi(n);
            for (std::int64_t s = 0; s < inner; ++s) {
                std::int64_t rem = s;
                for (int k = 0; k < n; ++k) {
                    xi(k) = axes.value(agent * n + k, static_cast<int>(rem % grid_resolution));
                    rem /= grid_resolution;
                }
                const double cost = agent_cost(spec, agent, xi, z_i);
                line_cost[static_cast<std::size_t>(s)] = cost;
                line_min = std::min(line_min, cost);
            }
            for (std::int64_t s = 0; s < inner; ++s) {
                if (line_cost[static_cast<std::size_t>(s)] > line_min + eps_agent[agent]) {
                    std::int64_t rem = s;
                    std::int64_t offset = 0;
                    for (int k = 0; k < n; ++k) {
                        offset += stride[agent * n + k] * (rem % grid_resolution);
                        rem /= grid_resolution;
                    }
                    keep[static_cast<std::size_t>(base + offset)] = false;
                }
            }
            // Advance the outer odometer.
            for (std::size_t q = 0; q < outer_coords.size(); ++q) {
                if (++outer_digits[q] < grid_resolution) break;
                outer_digits[q] = 0;
            }
        }
    }

    const double polish_tol = 1e-11;
    const double attach = 8.0 * axes.max_spacing;
    for (std::int64_t p = 0; p < total; ++p) {
        if (!keep[static_cast<std::size_t>(p)]) continue;
        Vector x0(D);
        std::int64_t rem = p;
        for (int k = 0; k < D; ++k) {
            x0(k) = axes.value(k, static_cast<int>(rem % grid_resolution));
            rem /= grid_resolution;
        }
        std::optional<Vector> polished = polish_by_br(spec, x0, 500, polish_tol);
        if (polished && (*polished - x0).cwiseAbs().maxCoeff() > attach) polished.reset();
        if (!polished) polished = polish_by_newton(spec, x0, axes, polish_tol);
        if (polished && (*polished - x0).cwiseAbs().maxCoeff() <= attach) {
            const Vector& x = *polished;
            bool dup = false;
            for (const Vector& e : result.equilibria) {
                if ((e - x).cwiseAbs().maxCoeff() <= 1e-6) {
                    dup = true;
                    break;
                }
            }
            if (!dup) result.equilibria.push_back(x);
        } else {
            bool dup = false;
            for (const Vector& e : result.unpolished) {
                if ((e - x0).cwiseAbs().maxCoeff() <= 2.0 * axes.max_spacing) {
                    dup = true;
                    break;
                }
            }
            if (!dup) result.unpolished.push_back(x0);
        }
    }

    std::sort(result.equilibria.begin(), result.equilibria.end(), [](const Vector& a, const Vector& b) {
        for (int k = 0; k < a.size(); ++k) {
            if (a(k) != b(k)) return a(k) < b(k);
        }
        return false;
    });
    return result;
}

}  // namespace netgames
