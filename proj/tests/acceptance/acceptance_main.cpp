// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion pins its tolerances in code.

#include "commands.hpp"

#include "netgames/diagnostics.hpp"
#include "netgames/sensitivity.hpp"
#include "netgames/solvers.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

using namespace netgames;
using Clock = std::chrono::steady_clock;

namespace {

struct Criterion {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

GameSpec lq_scalar(Network net, const Vector& k, const Vector& a,
                   std::vector<ConstraintSet> sets = {ConstraintSet::nonneg(1)}) {
    const int N = net.n_agents();
    LinearQuadraticFamily fam;
    for (int i = 0; i < N; ++i) {
        fam.Q.push_back(Matrix::Identity(1, 1));
        fam.K.push_back(Matrix::Constant(1, 1, k(i)));
        fam.a.push_back(Vector::Constant(1, a(i)));
    }
    return GameSpec(std::move(net), std::move(fam), std::move(sets));
}

GameSpec races2(double gamma) {
    RacesFamily fam;
    fam.lower = Vector::Constant(2, 1.0);
    fam.upper = Vector::Constant(2, 5.0);
    fam.gamma = gamma;
    return GameSpec(Network::complete(2), std::move(fam),
                    {ConstraintSet::box(Vector::Constant(1, 1.0), Vector::Constant(1, 5.0))});
}

// ---------------------------------------------------------------------------

Criterion criterion_spectral_table() {
    Criterion c;
    const auto start = Clock::now();
    struct Row {
        Network net;
        double s2, sinf;
        std::optional<double> lmin_abs;
    };
    const std::vector<Row> rows = {
        {Network::complete(4), 3.0, 3.0, 1.0},
        {Network::bipartite_complete(2, 2), 2.0, 2.0, 2.0},
        {Network::directed_regular(4, 2), 2.2882, 2.0, std::nullopt},
        {Network::asymmetric_star(4), std::sqrt(3.0), 1.0, std::nullopt},
    };
    int idx = 0;
    for (const Row& row : rows) {
        ++idx;
        const SpectralMeasures m = spectral_measures(row.net);
        c.require(std::abs(m.spectral_norm - row.s2) <= 1e-3,
                  "network " + std::to_string(idx) + " spectral norm");
        c.require(std::abs(m.infinity_norm - row.sinf) <= 1e-3,
                  "network " + std::to_string(idx) + " infinity norm");
        if (row.lmin_abs) {
            c.require(m.min_eigenvalue.has_value() &&
                          std::abs(std::abs(*m.min_eigenvalue) - *row.lmin_abs) <= 1e-3,
                      "network " + std::to_string(idx) + " minimum eigenvalue");
        } else {
            c.require(!m.min_eigenvalue.has_value(),
                      "network " + std::to_string(idx) + " should have no eigenvalue measure");
        }
    }
    c.require(seconds_since(start) < 1.0, "runtime exceeded 1 s");
    return c;
}

Criterion criterion_trend_setter() {
    Criterion c;
    const Network net = Network::trend_setter();
    c.require(std::abs(spectral_norm(net) - 1.7437) <= 1e-3, "spectral norm 1.7437");
    c.require(std::abs(infinity_norm(net) - 1.2) <= 1e-14, "infinity norm 1.2");

    auto analyze = [](double delta) {
        cli::json doc;
        doc["game"] = {{"family", "linear_quadratic"},
                       {"network", {{"kind", "trend_setter"}, {"n", 4}}},
                       {"k", -delta},
                       {"a", 1.0},
                       {"constraints", {{"kind", "nonneg"}}}};
        cli::CommandOptions opt;
        opt.quiet = true;
        opt.out_dir = (std::filesystem::temp_directory_path() / "netgames_acc_trend").string();
        std::ostringstream log;
        return cli::run_analyze(cli::parse_config(doc), opt, log);
    };

    const CertificateReport strong = analyze(0.80);
    c.require(strong.margins.alpha_inf > 0.0, "alpha_inf positive at delta = 0.80");
    c.require(strong.p_upsilon.certified() &&
                  strong.p_upsilon.route == GuaranteeTag::InfinityMarginPUpsilon,
              "uniqueness via the infinity margin at delta = 0.80");
    c.require(strong.has(GuaranteeTag::UniqueViaBlockPFunction), "uniqueness guarantee emitted");

    const CertificateReport weak = analyze(0.60);
    c.require(weak.margins.alpha_2 < 0.0, "alpha_2 negative at delta = 0.60");
    c.require(weak.strong_monotone.route != GuaranteeTag::SpectralMarginMonotonicity &&
                  weak.p_upsilon.route != GuaranteeTag::SpectralMarginPUpsilon,
              "no alpha_2 certificate at delta = 0.60");
    return c;
}

Criterion criterion_counterexamples() {
    Criterion c;
    const auto start = Clock::now();

    // Complements ray: infinitely many equilibria, residual stays at zero.
    for (int N : {3, 10}) {
        GameSpec spec = lq_scalar(Network::complete(N), Vector::Constant(N, -1.0 / (N - 1)),
                                  Vector::Zero(N));
        for (double beta : {0.0, 0.5, 1.0, 3.0}) {
            const ResidualReport rep = verify_equilibrium(spec, Vector::Constant(N, beta), 1e-12);
            c.require(rep.residual <= 1e-12,
                      "complements ray residual at N=" + std::to_string(N));
        }
        const CertificateReport cert = certify(spec);
        c.require(!cert.has(GuaranteeTag::UniqueViaStrongMonotonicity) &&
                      !cert.has(GuaranteeTag::UniqueViaBlockPFunction) &&
                      !cert.has(GuaranteeTag::UniqueViaUniformPFunction),
                  "complements ray must not certify uniqueness");
    }

    // Homogeneous substitutes on the complete network: monotone, not P_Upsilon.
    {
        GameSpec spec = lq_scalar(Network::complete(10), Vector::Constant(10, 0.5),
                                  Vector::Ones(10));
        const CertificateReport cert = certify(spec);
        c.require(cert.strong_monotone.certified(), "homogeneous substitutes strongly monotone");
        c.require(cert.p_upsilon.refuted(), "homogeneous substitutes P_Upsilon refuted");
    }

    // Heterogeneous substitutes: monotonicity refuted with an eigenvector
    // witness, uniform P certified through the inverse-weight scaling.
    {
        Vector k = Vector::Constant(10, 0.1);
        k(9) = 0.9;
        GameSpec spec = lq_scalar(Network::complete(10), k, Vector::Zero(10));
        const CertificateReport cert = certify(spec);
        c.require(cert.strong_monotone.refuted(), "heterogeneous substitutes monotonicity refuted");
        if (cert.strong_monotone.witness && cert.strong_monotone.witness_point) {
            const JacobianEval eval = evaluate_jacobian(spec, *cert.strong_monotone.witness_point);
            const Vector& w = *cert.strong_monotone.witness;
            c.require(w.dot((eval.gradF + eval.gradF.transpose()) * w) < 0.0,
                      "monotonicity witness reproduces negative curvature");
        } else {
            c.require(false, "monotonicity refutation carries a witness");
        }
        c.require(cert.uniform_p.outcome == Outcome::Certified, "uniform P certified");
        bool inverse_scaling = cert.uniform_p.scaling.has_value();
        if (inverse_scaling) {
            const Vector& h = *cert.uniform_p.scaling;
            for (int i = 0; i < 10 && inverse_scaling; ++i) {
                const double expected = (1.0 / k(i)) / (1.0 / k(0));
                inverse_scaling = std::abs(h(i) / h(0) - expected) <= 1e-9;
            }
        }
        c.require(inverse_scaling, "uniform P scaling proportional to the inverse weights");
    }

    // Asymmetric star with strong complements: P_Upsilon certified while
    // monotonicity fails.
    {
        GameSpec spec = lq_scalar(Network::asymmetric_star(6), Vector::Constant(6, 0.9),
                                  Vector::Ones(6));
        const CertificateReport cert = certify(spec);
        c.require(cert.p_upsilon.certified(), "star P_Upsilon certified");
        c.require(cert.strong_monotone.refuted(), "star monotonicity refuted");
    }

    c.require(seconds_since(start) < 5.0, "runtime exceeded 5 s");
    return c;
}

Criterion criterion_race_sweep() {
    Criterion c;
    const auto start = Clock::now();

    cli::json doc;
    doc["game"] = {{"family", "races"},
                   {"network", {{"kind", "complete"}, {"n", 2}}},
                   {"a", 1.0},
                   {"b", 5.0},
                   {"gamma", 0.3}};
    doc["sweep"] = {{"parameter", "gamma"}, {"from", 0.05}, {"to", 1.2}, {"steps", 60},
                    {"grid_resolution", 400}};
    cli::CommandOptions opt;
    opt.quiet = true;
    opt.out_dir = (std::filesystem::temp_directory_path() / "netgames_acc_sweep").string();
    std::ostringstream log;
    cli::run_sweep(cli::parse_config(doc), opt, log);

    struct Row {
        double gamma, x1, x2, total;
        int stable;
    };
    std::vector<Row> rows;
    {
        std::ifstream in(std::filesystem::path(opt.out_dir) / "sweep.csv");
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            Row r{};
            int idx = 0;
            double residual = 0.0;
            std::sscanf(line.c_str(), "%lf,%d,%lf,%lf,%lf,%d,%lf", &r.gamma, &idx, &r.x1, &r.x2,
                        &r.total, &r.stable, &residual);
            rows.push_back(r);
        }
    }

    // Count equilibria per gamma and track the branches.
    std::vector<double> gammas;
    std::vector<int> counts;
    std::vector<double> symmetric_total, symmetric_gamma;
    std::vector<double> asym_total, asym_gamma;
    std::vector<int> symmetric_stable;
    for (const Row& r : rows) {
        if (gammas.empty() || std::abs(gammas.back() - r.gamma) > 1e-12) {
            gammas.push_back(r.gamma);
            counts.push_back(0);
        }
        ++counts.back();
        if (std::abs(r.x1 - r.x2) < 1e-6) {
            symmetric_total.push_back(r.total);
            symmetric_gamma.push_back(r.gamma);
            symmetric_stable.push_back(r.stable);
        } else if (r.x1 < r.x2) {  // one representative of the asymmetric pair
            asym_total.push_back(r.total);
            asym_gamma.push_back(r.gamma);
            if (std::abs(r.gamma - 1.2) < 1e-9) {
                c.require(std::abs(r.x1 - 1.0) <= 1e-3 && std::abs(r.x2 - 5.0) <= 1e-3,
                          "asymmetric branch reaches {1, 5} at gamma = 1.2");
            }
        }
    }
    for (std::size_t g = 0; g < gammas.size(); ++g) {
        if (gammas[g] <= 0.45) c.require(counts[g] == 1, "single equilibrium below 0.45");
        if (gammas[g] >= 0.55) c.require(counts[g] == 3, "three equilibria above 0.55");
    }
    c.require(symmetric_total.size() == gammas.size(), "symmetric branch present everywhere");

    // Branch monotonicity. The asymmetric pair saturates at exactly {1, 5}
    // once gamma reaches 1/a, so the total is strictly decreasing until the
    // branch hits the corner and equals a + b = 6 afterwards.
    for (std::size_t s = 1; s < symmetric_total.size(); ++s) {
        c.require(symmetric_total[s] > symmetric_total[s - 1],
                  "symmetric total effort strictly increasing");
    }
    for (std::size_t s = 1; s < asym_total.size(); ++s) {
        const bool saturated = std::abs(asym_total[s] - 6.0) <= 1e-9;
        if (saturated) {
            c.require(asym_total[s] <= asym_total[s - 1] + 1e-12,
                      "asymmetric total effort non-increasing at saturation");
        } else {
            c.require(asym_total[s] < asym_total[s - 1],
                      "asymmetric total effort strictly decreasing");
        }
    }
    c.require(!asym_total.empty(), "asymmetric branch found");

    // Stability flips at the bifurcation for the symmetric branch.
    bool flipped = true;
    bool seen_unstable = false;
    for (std::size_t s = 0; s < symmetric_stable.size(); ++s) {
        if (symmetric_gamma[s] < 0.45 && symmetric_stable[s] != 1) flipped = false;
        if (symmetric_gamma[s] > 0.55) {
            if (symmetric_stable[s] != 0) flipped = false;
            seen_unstable = true;
        }
    }
    c.require(flipped && seen_unstable, "symmetric stability flips at the bifurcation");

    // Bisection on the equilibrium count brackets the bifurcation.
    double lo = 0.45, hi = 0.55;
    auto count_at = [](double gamma) {
        return static_cast<int>(brute_force_nash(races2(gamma), 400).equilibria.size());
    };
    c.require(count_at(lo) == 1 && count_at(hi) == 3, "bisection endpoints");
    for (int it = 0; it < 6; ++it) {
        const double mid = 0.5 * (lo + hi);
        (count_at(mid) == 1 ? lo : hi) = mid;
    }
    c.require(lo > 0.47 && hi < 0.51, "bifurcation bracket inside (0.47, 0.51)");
    c.require(lo < 0.4866 && 0.4866 < hi, "bracket contains 0.4866");

    c.require(seconds_since(start) < 60.0, "runtime exceeded 60 s");
    return c;
}

Criterion criterion_dynamics() {
    Criterion c;
    const auto start = Clock::now();

    DynamicsConfig base;
    base.residual_tol = 1e-9;
    base.max_iters = 6000;

    // Homogeneous potential game.
    {
        GameSpec spec = lq_scalar(Network::complete(4), Vector::Constant(4, 0.5), Vector::Ones(4));
        for (const Vector& x0 : default_initial_conditions(spec)) {
            DynamicsConfig cfg = base;
            cfg.mode = DynamicsMode::ContinuousRk4;
            c.require(continuous_br(spec, x0, cfg).terminal == Terminal::Converged,
                      "potential game continuous converges");
            cfg.mode = DynamicsMode::DiscreteSequential;
            cfg.max_iters = 24000;
            const Trajectory seq = discrete_br(spec, x0, cfg);
            c.require(seq.terminal == Terminal::Converged && seq.final_residual <= 1e-9,
                      "potential game sequential converges");
            cfg.mode = DynamicsMode::DiscreteSimultaneous;
            c.require(discrete_br(spec, x0, cfg).terminal == Terminal::OscillationDetected,
                      "potential game simultaneous oscillates");
        }
    }
    // Flipped-weight game: strongly monotone but not potential.
    {
        Vector k(4);
        k << -1.5, 0.5, 0.5, 0.5;
        GameSpec spec = lq_scalar(Network::complete(4), k, Vector::Ones(4));
        for (const Vector& x0 : default_initial_conditions(spec)) {
            DynamicsConfig cfg = base;
            cfg.mode = DynamicsMode::DiscreteSimultaneous;
            c.require(discrete_br(spec, x0, cfg).terminal != Terminal::Converged,
                      "flipped game simultaneous fails");
            cfg.mode = DynamicsMode::DiscreteSequential;
            cfg.max_iters = 24000;
            c.require(discrete_br(spec, x0, cfg).terminal != Terminal::Converged,
                      "flipped game sequential fails");
            cfg.mode = DynamicsMode::ContinuousRk4;
            const Trajectory cont = continuous_br(spec, x0, cfg);
            c.require(cont.terminal == Terminal::Converged && cont.final_residual <= 1e-9,
                      "flipped game continuous converges");
        }
    }
    c.require(seconds_since(start) < 30.0, "runtime exceeded 30 s");
    return c;
}

Vector solve_tight(const GameSpec& spec, double tol) {
    DynamicsConfig cfg;
    cfg.residual_tol = tol;
    cfg.mode = DynamicsMode::Projection;
    cfg.max_iters = 400000;
    cfg.projection_step = 0.3;
    const Trajectory t =
        projection_method(spec, spec.project_profile(Vector::Zero(spec.profile_dim())), cfg);
    if (t.terminal != Terminal::Converged) throw std::runtime_error("tight solve failed");
    return t.final_x;
}

Criterion criterion_sensitivity_fd() {
    Criterion c;
    std::mt19937_64 rng(20260801);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    int validated = 0;
    int attempts = 0;
    while (validated < 20 && attempts < 200) {
        ++attempts;
        const int N = 2 + static_cast<int>(rng() % 5);  // up to 6 agents
        const int n = 1 + static_cast<int>(rng() % 2);  // up to 2 activities
        Matrix g = Matrix::Zero(N, N);
        for (int i = 0; i < N; ++i) {
            for (int j = 0; j < N; ++j) {
                if (i != j && unit(rng) < 0.7) g(i, j) = 0.5 * unit(rng);
            }
        }
        LinearQuadraticFamily fam;
        for (int i = 0; i < N; ++i) {
            Matrix m = Matrix::Zero(n, n);
            for (int r = 0; r < n; ++r) {
                for (int col = 0; col < n; ++col) m(r, col) = unit(rng) - 0.5;
            }
            fam.Q.push_back(m * m.transpose() + (1.0 + unit(rng)) * Matrix::Identity(n, n));
            Matrix kk(n, n);
            for (int r = 0; r < n; ++r) {
                for (int col = 0; col < n; ++col) kk(r, col) = 0.35 * (unit(rng) - 0.5);
            }
            fam.K.push_back(kk);
            Vector a(n);
            for (int r = 0; r < n; ++r) a(r) = 0.4 + 1.2 * unit(rng);
            fam.a.push_back(a);
        }
        // Mixed constraints: boxes and budget polyhedra.
        std::vector<ConstraintSet> sets;
        for (int i = 0; i < N; ++i) {
            if (n == 2 && unit(rng) < 0.5) {
                Matrix B(5, 2);
                Vector b(5);
                B << -1, 0, 0, -1, 1, 0, 0, 1, 1, 1;
                b << 0, 0, 2.0, 2.0, 2.0 + 1.5 * unit(rng);
                sets.push_back(ConstraintSet::polyhedron(B, b));
            } else {
                sets.push_back(ConstraintSet::box(Vector::Zero(n), Vector::Constant(n, 2.0)));
            }
        }
        GameSpec spec(Network::from_weights(g), fam, std::move(sets));
        const CertificateReport cert = certify(spec);
        if (!cert.strong_monotone.certified()) continue;

        Vector xstar;
        try {
            xstar = solve_tight(spec, 1e-12);
        } catch (const std::exception&) {
            continue;
        }
        KktResult kkt;
        try {
            kkt = kkt_multipliers(spec, xstar, 1e-8);
        } catch (const std::exception&) {
            continue;
        }
        const RegularityFlags flags = check_regularity(spec, xstar, kkt);
        if (!flags.all() || flags.complementarity_margin < 1e-3) continue;

        ParamSelector sel;
        sel.kind = ParamSelector::LqOffsets;
        const SensitivityResult res = equilibrium_sensitivity(spec, xstar, sel);

        const double eps = 1e-5;
        bool instance_ok = true;
        for (int col = 0; col < N * n && instance_ok; ++col) {
            LinearQuadraticFamily up = fam, down = fam;
            up.a[col / n](col % n) += eps;
            down.a[col / n](col % n) -= eps;
            std::vector<ConstraintSet> sets_copy;
            for (int i = 0; i < N; ++i) sets_copy.push_back(spec.constraints(i));
            GameSpec sup(Network::from_weights(g), up, sets_copy);
            GameSpec sdown(Network::from_weights(g), down, std::move(sets_copy));
            const Vector fd = (solve_tight(sup, 1e-12) - solve_tight(sdown, 1e-12)) / (2.0 * eps);
            for (int r = 0; r < N * n; ++r) {
                const double err = std::abs(fd(r) - res.grad_y_xstar(r, col));
                if (err > 1e-5 + 1e-3 * std::abs(res.grad_y_xstar(r, col))) instance_ok = false;
            }
        }
        c.require(instance_ok, "finite differences at instance " + std::to_string(validated + 1));
        ++validated;
    }
    c.require(validated == 20,
              "collected 20 regular instances (got " + std::to_string(validated) + ")");

    // Race gamma sensitivity against the closed form.
    {
        const double gamma = 0.15, a = 1.0, b = 5.0;
        GameSpec spec = races2(gamma);
        const double disc = std::sqrt((1.0 - gamma * b) * (1.0 - gamma * b) + 4.0 * gamma * a);
        const double xbar = (-(1.0 - gamma * b) + disc) / (2.0 * gamma);
        ParamSelector sel;
        sel.kind = ParamSelector::RacesGamma;
        const SensitivityResult res =
            equilibrium_sensitivity(spec, Vector::Constant(2, xbar), sel);
        const double eps_gamma = gamma * (b - 2.0 * xbar);
        const double closed = xbar * (b - xbar) / (1.0 - eps_gamma);
        c.require(std::abs(res.grad_y_xstar(0, 0) - closed) <= 1e-8 &&
                      std::abs(res.grad_y_xstar(1, 0) - closed) <= 1e-8,
                  "race gamma sensitivity closed form");
    }
    return c;
}

Criterion criterion_lipschitz() {
    Criterion c;
    std::mt19937_64 rng(7771);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // Game 1: linear quadratic pair with boxes (certified via alpha_2).
    {
        std::vector<ConstraintSet> box(2,
                                       ConstraintSet::box(Vector::Zero(1), Vector::Constant(1, 3.0)));
        Matrix g(2, 2);
        g << 0, 1, 1, 0;
        GameSpec base = lq_scalar(Network::from_weights(g), Vector::Constant(2, 0.5),
                                  Vector::Ones(2), box);
        const CertificateReport cert = certify(base);
        c.require(cert.block_p_constant.has_value(), "linear quadratic eta_bar available");
        const LipschitzBound bound =
            lipschitz_bound(base, *cert.block_p_constant, std::nullopt, true);
        const Vector x0 = solve_tight(base, 1e-12);
        for (int trial = 0; trial < 50; ++trial) {
            Vector da(2);
            da << 0.4 * (unit(rng) - 0.5), 0.4 * (unit(rng) - 0.5);
            GameSpec moved = lq_scalar(Network::from_weights(g), Vector::Constant(2, 0.5),
                                       Vector::Ones(2) + da, box);
            const double measured = (solve_tight(moved, 1e-12) - x0).norm();
            c.require(measured <= bound.bound_parameter(da.norm()) + 1e-9,
                      "parameter bound dominates (lq trial " + std::to_string(trial) + ")");

            // Network perturbation on the bounded game.
            Matrix g2 = g;
            g2(0, 1) += 0.1 * unit(rng);
            g2(1, 0) += 0.1 * unit(rng);
            GameSpec net_moved = lq_scalar(Network::from_weights(g2), Vector::Constant(2, 0.5),
                                           Vector::Ones(2), box);
            const double shift = (solve_tight(net_moved, 1e-12) - x0).norm();
            Eigen::JacobiSVD<Matrix> svd(g2 - g);
            c.require(shift <= bound.bound_network(svd.singularValues()(0), 0.0) + 1e-9,
                      "network bound dominates (lq trial " + std::to_string(trial) + ")");
        }
    }

    // Game 2: race below the uniqueness threshold (bounded strategy boxes).
    {
        const double gamma = 0.15, b_up = 5.0;
        GameSpec base = races2(gamma);
        const CertificateReport cert = certify(base);
        c.require(cert.block_p_constant.has_value(), "race eta_bar available");
        const double L = b_up * b_up / 4.0;  // covers both gamma and aggregate directions
        const LipschitzBound bound = lipschitz_bound(base, *cert.block_p_constant, L, true);
        DynamicsConfig cfg;
        cfg.mode = DynamicsMode::ContinuousRk4;
        cfg.residual_tol = 1e-11;
        const Vector x0 = continuous_br(base, base.project_profile(Vector::Zero(2)), cfg).final_x;
        for (int trial = 0; trial < 50; ++trial) {
            const double dg = 0.02 * (unit(rng) - 0.5);
            GameSpec moved = races2(gamma + dg);
            const Vector x1 =
                continuous_br(moved, moved.project_profile(Vector::Zero(2)), cfg).final_x;
            // Stacked parameter shift: gamma enters every agent's cost.
            c.require((x1 - x0).norm() <=
                          bound.bound_parameter(std::sqrt(2.0) * std::abs(dg)) + 1e-9,
                      "parameter bound dominates (race trial " + std::to_string(trial) + ")");

            Matrix g2 = Matrix::Zero(2, 2);
            g2(0, 1) = 1.0 + 0.05 * (unit(rng) - 0.5);
            g2(1, 0) = 1.0 + 0.05 * (unit(rng) - 0.5);
            RacesFamily fam;
            fam.lower = Vector::Constant(2, 1.0);
            fam.upper = Vector::Constant(2, 5.0);
            fam.gamma = gamma;
            GameSpec net_moved(Network::from_weights(g2), fam,
                               {ConstraintSet::box(Vector::Constant(1, 1.0),
                                                   Vector::Constant(1, 5.0))});
            const Vector x2 =
                continuous_br(net_moved, net_moved.project_profile(Vector::Zero(2)), cfg).final_x;
            Eigen::JacobiSVD<Matrix> svd(g2 - Network::complete(2).weights());
            c.require((x2 - x0).norm() <= bound.bound_network(svd.singularValues()(0), 0.0) + 1e-9,
                      "network bound dominates (race trial " + std::to_string(trial) + ")");
        }
    }
    return c;
}

Criterion criterion_oracle_equivalence() {
    Criterion c;
    std::mt19937_64 rng(5150);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    int instances = 0;
    int attempts = 0;
    while (instances < 25 && attempts < 120) {
        ++attempts;
        GameSpec spec = [&]() -> GameSpec {
            if (attempts % 2 == 0) {
                return races2(0.05 + 0.13 * unit(rng));  // certified below 0.19
            }
            const int N = 2 + static_cast<int>(rng() % 2);
            Matrix g = Matrix::Zero(N, N);
            for (int i = 0; i < N; ++i) {
                for (int j = 0; j < N; ++j) {
                    if (i != j) g(i, j) = unit(rng);
                }
            }
            // Normalize rows so the infinity norm certificate applies.
            for (int i = 0; i < N; ++i) g.row(i) /= std::max(g.row(i).sum(), 1e-9);
            Vector k(N), a(N);
            for (int i = 0; i < N; ++i) {
                k(i) = 0.8 * (unit(rng) - 0.5);
                a(i) = 0.5 + unit(rng);
            }
            std::vector<ConstraintSet> box(
                N, ConstraintSet::box(Vector::Zero(1), Vector::Constant(1, 3.0)));
            return lq_scalar(Network::from_weights(g), k, a, box);
        }();

        const CertificateReport cert = certify(spec);
        if (!cert.has(GuaranteeTag::UniqueViaBlockPFunction) &&
            !cert.has(GuaranteeTag::UniqueViaStrongMonotonicity)) {
            continue;
        }
        ++instances;

        const int res = spec.n_agents() == 2 ? 300 : 90;
        const BruteForceResult oracle = brute_force_nash(spec, res);
        c.require(oracle.equilibria.size() == 1,
                  "certified instance has a unique oracle equilibrium");
        if (oracle.equilibria.size() != 1) continue;
        const Vector& reference = oracle.equilibria.front();

        std::vector<Trajectory> runs;
        DynamicsConfig cfg;
        cfg.residual_tol = 1e-10;
        const Vector x0 = spec.project_profile(Vector::Zero(spec.profile_dim()));
        if (cert.p_upsilon.certified()) {
            cfg.mode = DynamicsMode::DiscreteSequential;
            cfg.max_iters = 60000;
            runs.push_back(discrete_br(spec, x0, cfg));
            cfg.mode = DynamicsMode::DiscreteSimultaneous;
            runs.push_back(discrete_br(spec, x0, cfg));
        }
        if (cert.strong_monotone.certified()) {
            cfg.mode = DynamicsMode::ContinuousRk4;
            runs.push_back(continuous_br(spec, x0, cfg));
        }
        cfg.mode = DynamicsMode::Projection;
        cfg.max_iters = 200000;
        cfg.projection_step = 0.3;
        runs.push_back(projection_method(spec, x0, cfg));

        for (const Trajectory& t : runs) {
            if (t.terminal != Terminal::Converged) continue;  // only converging solvers compared
            c.require((t.final_x - reference).cwiseAbs().maxCoeff() <= 1e-5,
                      "solver agrees with the oracle at instance " + std::to_string(instances));
        }
    }
    c.require(instances == 25,
              "built 25 certified instances (got " + std::to_string(instances) + ")");
    return c;
}

Criterion criterion_property_suites() {
    Criterion c;
    std::mt19937_64 rng(909);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // Margin nesting on 100 random symmetric networks.
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 3 + static_cast<int>(rng() % 7);
        Matrix w = Matrix::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                const double v = unit(rng) < 0.35 ? 0.0 : unit(rng);
                w(i, j) = w(j, i) = v;
            }
        }
        const SpectralMeasures sm = spectral_measures(Network::from_weights(w));
        KappaBounds kb;
        kb.kappa1_per_agent = Vector::Ones(n);
        kb.kappa2_per_agent = Vector::Constant(n, 0.8);
        kb.kappa1 = 1.0;
        kb.kappa2 = 0.8;
        const AlphaMargins m = alpha_margins(kb, sm);
        c.require(m.alpha_min.has_value() && *m.alpha_min >= m.alpha_2 - 1e-9 &&
                      m.alpha_2 >= m.alpha_inf - 1e-9,
                  "margin nesting at trial " + std::to_string(trial));
    }

    // Block contraction under every P_Upsilon certificate, 100 point pairs.
    {
        std::vector<GameSpec> certified;
        certified.push_back(lq_scalar(Network::asymmetric_star(6), Vector::Constant(6, 0.9),
                                      Vector::Ones(6)));
        certified.push_back(races2(0.15));
        for (const GameSpec& spec : certified) {
            const CertificateReport cert = certify(spec);
            c.require(cert.p_upsilon.certified() && cert.contraction.has_value(),
                      "P_Upsilon certificate with contraction weights");
            if (!cert.contraction) continue;
            const Vector& cw = cert.contraction->weights;
            const int D = spec.profile_dim();
            Vector lo(D), hi(D);
            for (int i = 0; i < spec.n_agents(); ++i) {
                const ConstraintSet& set = spec.constraints(i);
                const bool box = set.kind() == ConstraintKind::Box;
                lo(i) = box ? set.lower()(0) : 0.0;
                hi(i) = box ? set.upper()(0) : 3.0;
            }
            for (int pair = 0; pair < 100; ++pair) {
                Vector x(D), y(D);
                for (int k = 0; k < D; ++k) {
                    x(k) = lo(k) + unit(rng) * (hi(k) - lo(k));
                    y(k) = lo(k) + unit(rng) * (hi(k) - lo(k));
                }
                const Vector bx = best_response_profile(spec, x);
                const Vector by = best_response_profile(spec, y);
                double lhs = 0.0, rhs = 0.0;
                for (int i = 0; i < spec.n_agents(); ++i) {
                    lhs = std::max(lhs, std::abs(bx(i) - by(i)) / cw(i));
                    rhs = std::max(rhs, std::abs(x(i) - y(i)) / cw(i));
                }
                c.require(lhs <= cert.contraction->delta * rhs + 1e-12,
                          "block contraction pair " + std::to_string(pair));
            }
        }
    }

    // Descent value monotone along the continuous flow of a strongly
    // monotone projection-form game.
    {
        Vector k(4);
        k << -1.5, 0.5, 0.5, 0.5;
        GameSpec spec = lq_scalar(Network::complete(4), k, Vector::Ones(4));
        DynamicsConfig cfg;
        cfg.mode = DynamicsMode::ContinuousRk4;
        cfg.record_every = 1;
        const Trajectory t = continuous_br(spec, Vector::Ones(4), cfg);
        c.require(t.terminal == Terminal::Converged, "descent-value run converges");
        double prev = std::numeric_limits<double>::infinity();
        const double slack = 10.0 * std::pow(cfg.step, 4);
        for (const TrajectorySample& s : t.samples) {
            const double value = descent_value(spec, s.x);
            c.require(value >= -1e-12 && value <= prev + slack, "descent value monotone");
            prev = value;
        }
    }

    // Path independence of exact potential games.
    {
        GameSpec spec = lq_scalar(Network::complete(4), Vector::Constant(4, 0.5), Vector::Ones(4));
        c.require(check_potential(spec).kind == PotentialVerdict::Exact, "potential detected");
        for (int trial = 0; trial < 25; ++trial) {
            std::vector<Vector> loop;
            for (int v = 0; v < 6; ++v) {
                Vector p(4);
                for (int k2 = 0; k2 < 4; ++k2) p(k2) = 3.0 * unit(rng);
                loop.push_back(p);
            }
            loop.push_back(loop.front());
            double integral = 0.0;
            for (std::size_t s = 0; s + 1 < loop.size(); ++s) {
                integral += 0.5 * (game_operator(spec, loop[s]) + game_operator(spec, loop[s + 1]))
                                      .dot(loop[s + 1] - loop[s]);
            }
            c.require(std::abs(integral) < 1e-8, "loop integral vanishes");
        }
    }
    return c;
}

}  // namespace

int main() {
    struct Entry {
        const char* name;
        Criterion (*run)();
    };
    const std::vector<Entry> entries = {
        {"spectral table of the four reference networks", criterion_spectral_table},
        {"trend-setter thresholds", criterion_trend_setter},
        {"counterexample suite", criterion_counterexamples},
        {"race sweep and bifurcation", criterion_race_sweep},
        {"dynamics qualitative reproduction", criterion_dynamics},
        {"sensitivity finite-difference validation", criterion_sensitivity_fd},
        {"perturbation bounds dominate measurements", criterion_lipschitz},
        {"oracle equivalence of converging solvers", criterion_oracle_equivalence},
        {"property suites", criterion_property_suites},
    };

    int failures = 0;
    for (std::size_t k = 0; k < entries.size(); ++k) {
        const auto start = Clock::now();
        Criterion result;
        try {
            result = entries[k].run();
        } catch (const std::exception& e) {
            result.pass = false;
            result.detail = std::string("exception: ") + e.what();
        }
        const double elapsed = seconds_since(start);
        std::printf("[%s] criterion %zu: %s (%.2f s)%s%s\n", result.pass ? "PASS" : "FAIL", k + 1,
                    entries[k].name, elapsed, result.detail.empty() ? "" : " - ",
                    result.detail.c_str());
        std::fflush(stdout);
        if (!result.pass) ++failures;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(entries.size()) - failures,
                entries.size());
    return failures == 0 ? 0 : 1;
}
