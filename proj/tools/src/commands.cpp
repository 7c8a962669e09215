#include "commands.hpp"

#include <Eigen/Eigenvalues>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <ostream>
#include <thread>

namespace netgames::cli {

namespace {

namespace fs = std::filesystem;

void ensure_dir(const std::string& dir) { fs::create_directories(dir); }

std::ofstream open_out(const std::string& dir, const std::string& name) {
    ensure_dir(dir);
    std::ofstream out(fs::path(dir) / name);
    if (!out) throw std::runtime_error("cannot write output file '" + name + "' in '" + dir + "'");
    return out;
}

void write_json(const std::string& dir, const std::string& name, const json& doc) {
    std::ofstream out = open_out(dir, name);
    out << doc.dump(2) << "\n";
}

json verdict_to_json(const Verdict& v) {
    json j;
    j["outcome"] = to_string(v.outcome);
    j["route"] = to_string(v.route);
    if (v.constant) j["constant"] = *v.constant;
    if (!v.detail.empty()) j["detail"] = v.detail;
    if (v.witness) {
        json w = json::array();
        for (int k = 0; k < v.witness->size(); ++k) w.push_back((*v.witness)(k));
        j["witness"] = w;
    }
    return j;
}

const char* exactness_name(KappaExactness e) {
    switch (e) {
        case KappaExactness::Exact: return "exact";
        case KappaExactness::UserSupplied: return "user_supplied";
        case KappaExactness::Sampled: return "sampled";
    }
    return "?";
}

DynamicsConfig tuned(const DynamicsSection& section, DynamicsMode mode,
                     const CommandOptions& opt) {
    DynamicsConfig cfg = section.base;
    cfg.mode = mode;
    if (opt.tol_override) cfg.residual_tol = *opt.tol_override;
    return cfg;
}

Vector starting_point(const GameSpec& spec, const DynamicsSection& section) {
    if (section.x0) {
        if (!spec.feasible(*section.x0, 1e-9)) {
            throw std::invalid_argument("configured x0 is infeasible");
        }
        return *section.x0;
    }
    return spec.project_profile(Vector::Zero(spec.profile_dim()));
}

Trajectory run_mode(const GameSpec& spec, DynamicsMode mode, const Vector& x0,
                    const DynamicsConfig& cfg) {
    switch (mode) {
        case DynamicsMode::ContinuousRk4:
            return continuous_br(spec, x0, cfg);
        case DynamicsMode::Projection:
            return projection_method(spec, x0, cfg);
        default:
            return discrete_br(spec, x0, cfg);
    }
}

/// Solver choice backed by the certificate: block contraction first, then the
/// continuous flow for monotone projection-form games, projection otherwise.
Trajectory solve_auto(const GameSpec& spec, const CertificateReport& cert, double tol) {
    DynamicsConfig cfg;
    cfg.residual_tol = tol;
    const Vector x0 = spec.project_profile(Vector::Zero(spec.profile_dim()));
    if (cert.p_upsilon.certified()) {
        cfg.mode = DynamicsMode::DiscreteSequential;
        cfg.max_iters = 200000;
        return discrete_br(spec, x0, cfg);
    }
    if (cert.strong_monotone.certified() && spec.has_projection_form()) {
        cfg.mode = DynamicsMode::ContinuousRk4;
        cfg.time_horizon = 2e3;
        return continuous_br(spec, x0, cfg);
    }
    cfg.mode = DynamicsMode::Projection;
    cfg.max_iters = 500000;
    cfg.projection_step = 0.25;
    return projection_method(spec, x0, cfg);
}

std::string csv_header(const GameSpec& spec, const std::string& lead) {
    std::string header = lead;
    for (int i = 0; i < spec.n_agents(); ++i) {
        for (int k = 0; k < spec.strategy_dim(); ++k) {
            header += ",x_" + std::to_string(i + 1) + "_" + std::to_string(k + 1);
        }
    }
    header += ",residual";
    return header;
}

/// Local stability of the continuous best-response flow at an equilibrium:
/// the free-coordinate block of grad F must have eigenvalues with positive
/// real part. Strictly clamped coordinates stabilize themselves.
int stability_tag(const GameSpec& spec, const Vector& x, double tol = 1e-7) {
    const JacobianEval eval = evaluate_jacobian(spec, x);
    std::vector<int> free_set;
    const int n = spec.strategy_dim();
    for (int i = 0; i < spec.n_agents(); ++i) {
        const ConstraintSet& set = spec.constraints(i);
        for (int k = 0; k < n; ++k) {
            const int coord = i * n + k;
            bool clamped = false;
            if (set.kind() == ConstraintKind::Box || set.kind() == ConstraintKind::NonNegOrthant) {
                const bool at_lower =
                    x(coord) <= set.lower()(k) + tol && eval.F(coord) > tol;
                const bool at_upper =
                    x(coord) >= set.upper()(k) - tol && eval.F(coord) < -tol;
                clamped = at_lower || at_upper;
            }
            if (!clamped) free_set.push_back(coord);
        }
    }
    if (free_set.empty()) return 1;
    Matrix block(free_set.size(), free_set.size());
    for (std::size_t r = 0; r < free_set.size(); ++r) {
        for (std::size_t c = 0; c < free_set.size(); ++c) {
            block(r, c) = eval.gradF(free_set[r], free_set[c]);
        }
    }
    Eigen::EigenSolver<Matrix> es(block);
    return es.eigenvalues().real().minCoeff() > 1e-9 ? 1 : 0;
}

struct SweepTarget {
    enum Kind { RacesGamma, LqWeight, MultiDelta, MultiMu, Edge } kind = RacesGamma;
    int edge_row = 0, edge_col = 0;
};

SweepTarget parse_sweep_target(const RunConfig& cfg, const json& sec) {
    if (!sec.contains("parameter")) {
        throw std::invalid_argument("config field 'sweep.parameter': missing");
    }
    const json& p = sec["parameter"];
    SweepTarget t;
    if (p.is_string()) {
        const std::string name = p.get<std::string>();
        if (name == "gamma" && cfg.family == "races") {
            t.kind = SweepTarget::RacesGamma;
        } else if (name == "k" && cfg.family == "linear_quadratic") {
            t.kind = SweepTarget::LqWeight;
        } else if (name == "delta" && cfg.family == "multi_activity") {
            t.kind = SweepTarget::MultiDelta;
        } else if (name == "mu" && cfg.family == "multi_activity") {
            t.kind = SweepTarget::MultiMu;
        } else {
            throw std::invalid_argument("config field 'sweep.parameter': '" + name +
                                        "' is not a scalar parameter of family " + cfg.family);
        }
        return t;
    }
    if (p.is_object() && p.contains("edge")) {
        t.kind = SweepTarget::Edge;
        t.edge_row = p["edge"][0].get<int>() - 1;
        t.edge_col = p["edge"][1].get<int>() - 1;
        return t;
    }
    throw std::invalid_argument("config field 'sweep.parameter': expected a name or {\"edge\":[i,j]}");
}

GameSpec sweep_instance(const RunConfig& cfg, const SweepTarget& target, double value) {
    RunConfig local = cfg;
    switch (target.kind) {
        case SweepTarget::RacesGamma:
            local.game_params["gamma"] = value;
            break;
        case SweepTarget::LqWeight:
            local.game_params["k"] = value;
            break;
        case SweepTarget::MultiDelta:
            local.game_params["delta"] = value;
            break;
        case SweepTarget::MultiMu:
            local.game_params["mu"] = value;
            break;
        case SweepTarget::Edge: {
            Matrix w = make_network(local.network).weights();
            if (target.edge_row < 0 || target.edge_row >= w.rows() || target.edge_col < 0 ||
                target.edge_col >= w.cols()) {
                throw std::invalid_argument("sweep edge index out of range");
            }
            w(target.edge_row, target.edge_col) = value;
            local.network = NetworkSpec{};
            local.network.kind = "explicit";
            local.network.explicit_weights = w;
            break;
        }
    }
    return local.build_game();
}

}  // namespace

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string csv_row(const Vector& v) {
    std::string row;
    for (int k = 0; k < v.size(); ++k) {
        if (k > 0) row += ",";
        row += format_number(v(k));
    }
    return row;
}

json report_to_json(const CertificateReport& rep) {
    json j;
    j["spectral"] = {{"spectral_norm", rep.spectral.spectral_norm},
                     {"infinity_norm", rep.spectral.infinity_norm},
                     {"is_symmetric", rep.spectral.is_symmetric}};
    if (rep.spectral.min_eigenvalue) j["spectral"]["min_eigenvalue"] = *rep.spectral.min_eigenvalue;

    json kb;
    kb["kappa1"] = rep.kappas.kappa1;
    kb["kappa2"] = rep.kappas.kappa2;
    kb["exactness"] = exactness_name(rep.kappas.exactness);
    json k1 = json::array(), k2 = json::array();
    for (int i = 0; i < rep.kappas.kappa1_per_agent.size(); ++i) {
        k1.push_back(rep.kappas.kappa1_per_agent(i));
        k2.push_back(rep.kappas.kappa2_per_agent(i));
    }
    kb["kappa1_per_agent"] = k1;
    kb["kappa2_per_agent"] = k2;
    j["kappa"] = kb;

    json m;
    m["alpha_2"] = rep.margins.alpha_2;
    m["alpha_inf"] = rep.margins.alpha_inf;
    if (rep.margins.alpha_min) m["alpha_min"] = *rep.margins.alpha_min;
    m["uncertainty"] = rep.margins.uncertainty;
    j["margins"] = m;

    j["strong_monotone"] = verdict_to_json(rep.strong_monotone);
    j["p_upsilon"] = verdict_to_json(rep.p_upsilon);
    j["scalar_substitutes"] = verdict_to_json(rep.scalar_substitutes);

    json up;
    up["outcome"] = to_string(rep.uniform_p.outcome);
    up["method"] = rep.uniform_p.method;
    if (rep.uniform_p.outcome == Outcome::Certified) {
        up["eta"] = rep.uniform_p.eta;
        up["h_max"] = rep.uniform_p.h_max;
    }
    j["uniform_p"] = up;

    json pot;
    switch (rep.potential.kind) {
        case PotentialVerdict::Exact: pot["kind"] = "exact"; break;
        case PotentialVerdict::Rescalable: pot["kind"] = "rescalable"; break;
        case PotentialVerdict::None: pot["kind"] = "none"; break;
        case PotentialVerdict::NotApplicable: pot["kind"] = "not_applicable"; break;
    }
    if (rep.potential.beta) {
        json beta = json::array();
        for (int i = 0; i < rep.potential.beta->size(); ++i) beta.push_back((*rep.potential.beta)(i));
        pot["beta"] = beta;
    }
    j["potential"] = pot;

    if (rep.block_p_constant) j["eta_bar"] = *rep.block_p_constant;
    if (rep.contraction) {
        json c;
        c["delta"] = rep.contraction->delta;
        json w = json::array();
        for (int i = 0; i < rep.contraction->weights.size(); ++i) w.push_back(rep.contraction->weights(i));
        c["weights"] = w;
        j["block_contraction"] = c;
    }

    json gs = json::array();
    for (const Guarantee& g : rep.guarantees) {
        gs.push_back({{"tag", to_string(g.tag)}, {"conclusion", g.conclusion}});
    }
    j["guarantees"] = gs;
    return j;
}

CertificateReport run_analyze(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log) {
    const GameSpec spec = cfg.build_game();
    const CertificateReport rep = certify(spec, opt.seed);
    write_json(opt.out_dir, "report.json", report_to_json(rep));
    if (!opt.quiet) {
        log << "spectral norm " << format_number(rep.spectral.spectral_norm) << ", infinity norm "
            << format_number(rep.spectral.infinity_norm);
        if (rep.spectral.min_eigenvalue) {
            log << ", min eigenvalue " << format_number(*rep.spectral.min_eigenvalue);
        }
        log << "\n";
        log << "alpha_2 = " << format_number(rep.margins.alpha_2)
            << ", alpha_inf = " << format_number(rep.margins.alpha_inf);
        if (rep.margins.alpha_min) log << ", alpha_min = " << format_number(*rep.margins.alpha_min);
        log << " (uncertainty " << format_number(rep.margins.uncertainty) << ")\n";
        log << "strong monotonicity: " << to_string(rep.strong_monotone.outcome) << "\n";
        log << "P-Upsilon condition: " << to_string(rep.p_upsilon.outcome) << "\n";
        log << "uniform P condition: " << to_string(rep.uniform_p.outcome) << "\n";
        if (rep.guarantees.empty()) {
            log << "no equilibrium guarantee certified (all checks inconclusive or refuted)\n";
        }
        for (const Guarantee& g : rep.guarantees) {
            log << "guarantee [" << to_string(g.tag) << "]: " << g.conclusion << "\n";
        }
    }
    return rep;
}

bool run_solve(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log) {
    const GameSpec spec = cfg.build_game();
    const CertificateReport cert = certify(spec, opt.seed);
    const double tol = opt.tol_override.value_or(1e-9);
    const Trajectory traj = solve_auto(spec, cert, tol);

    json j;
    j["terminal"] = to_string(traj.terminal);
    j["iterations"] = traj.iterations;
    j["residual"] = traj.final_residual;
    if (!traj.diagnostic.empty()) j["diagnostic"] = traj.diagnostic;

    if (traj.terminal == Terminal::Converged) {
        const ResidualReport check = verify_equilibrium(spec, traj.final_x, 10.0 * tol);
        j["verified"] = check.is_epsilon_equilibrium;
        std::ofstream csv = open_out(opt.out_dir, "solution.csv");
        csv << csv_header(spec, "index") << "\n";
        csv << "0," << csv_row(traj.final_x) << "," << format_number(check.residual) << "\n";
    }
    write_json(opt.out_dir, "solution.json", j);
    if (!opt.quiet) {
        log << "solver terminal: " << to_string(traj.terminal) << ", residual "
            << format_number(traj.final_residual) << "\n";
        if (traj.terminal == Terminal::Converged) log << "x* = " << csv_row(traj.final_x) << "\n";
    }
    return traj.terminal == Terminal::Converged;
}

void run_dynamics(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log) {
    const GameSpec spec = cfg.build_game();
    const DynamicsSection section = parse_dynamics_section(cfg, spec);
    const Vector x0 = starting_point(spec, section);

    for (const DynamicsMode mode : section.modes) {
        const DynamicsConfig dcfg = tuned(section, mode, opt);
        const Trajectory traj = run_mode(spec, mode, x0, dcfg);
        const std::string name = to_string(mode);

        std::ofstream csv = open_out(opt.out_dir, "dynamics_" + name + ".csv");
        csv << csv_header(spec, "step_or_time") << "\n";
        for (const TrajectorySample& s : traj.samples) {
            csv << format_number(s.time) << "," << csv_row(s.x) << "," << format_number(s.residual)
                << "\n";
        }

        json side;
        side["mode"] = name;
        side["terminal"] = to_string(traj.terminal);
        side["iterations"] = traj.iterations;
        side["final_residual"] = traj.final_residual;
        if (!traj.diagnostic.empty()) side["diagnostic"] = traj.diagnostic;
        write_json(opt.out_dir, "dynamics_" + name + ".json", side);

        if (!opt.quiet) {
            log << name << ": " << to_string(traj.terminal) << " after " << traj.iterations
                << " iterations, residual " << format_number(traj.final_residual) << "\n";
        }
    }
}

void run_sweep(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log) {
    const json& sec = cfg.sections.contains("sweep") ? cfg.sections["sweep"] : json::object();
    const SweepTarget target = parse_sweep_target(cfg, sec);
    if (!sec.contains("from") || !sec.contains("to")) {
        throw std::invalid_argument("config field 'sweep': needs 'from' and 'to'");
    }
    const double from = sec["from"].get<double>();
    const double to = sec["to"].get<double>();
    const int steps = sec.value("steps", 25);
    const int grid = sec.value("grid_resolution", 400);
    if (steps < 2) throw std::invalid_argument("config field 'sweep.steps': need at least 2");

    struct Point {
        double value = 0.0;
        std::vector<Vector> equilibria;
        std::vector<double> residuals;
        std::vector<int> stable;
    };
    std::vector<Point> points(steps);

    const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::future<void>> jobs;
    std::atomic<int> next{0};
    for (unsigned w = 0; w < workers; ++w) {
        jobs.push_back(std::async(std::launch::async, [&]() {
            while (true) {
                const int idx = next.fetch_add(1);
                if (idx >= steps) return;
                const double value = from + (to - from) * idx / (steps - 1);
                const GameSpec inst = sweep_instance(cfg, target, value);
                const BruteForceResult res = brute_force_nash(inst, grid);
                Point p;
                p.value = value;
                for (const Vector& e : res.equilibria) {
                    p.equilibria.push_back(e);
                    p.residuals.push_back(natural_residual(inst, e));
                    p.stable.push_back(stability_tag(inst, e));
                }
                points[idx] = std::move(p);
            }
        }));
    }
    for (auto& j : jobs) j.get();

    const GameSpec base = cfg.build_game();
    std::ofstream csv = open_out(opt.out_dir, "sweep.csv");
    std::string header = "sweep_value,eq_index";
    for (int i = 0; i < base.n_agents(); ++i) {
        for (int k = 0; k < base.strategy_dim(); ++k) {
            header += ",x_" + std::to_string(i + 1) + "_" + std::to_string(k + 1);
        }
    }
    csv << header << ",total_effort,stable,residual\n";
    for (const Point& p : points) {
        for (std::size_t e = 0; e < p.equilibria.size(); ++e) {
            csv << format_number(p.value) << "," << e << "," << csv_row(p.equilibria[e]) << ","
                << format_number(p.equilibria[e].sum()) << "," << p.stable[e] << ","
                << format_number(p.residuals[e]) << "\n";
        }
    }
    if (!opt.quiet) {
        log << "swept " << steps << " points; equilibrium counts:";
        for (const Point& p : points) log << " " << p.equilibria.size();
        log << "\n";
    }
}

void run_sensitivity(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log) {
    const GameSpec spec = cfg.build_game();
    const json& sec = cfg.sections.contains("sensitivity") ? cfg.sections["sensitivity"] : json::object();

    ParamSelector sel;
    const std::string pname = sec.value("parameter", cfg.family == "races" ? "gamma" : "a");
    if (pname == "a") {
        sel.kind = ParamSelector::LqOffsets;
    } else if (pname == "gamma") {
        sel.kind = ParamSelector::RacesGamma;
    } else if (pname == "edge") {
        sel.kind = ParamSelector::EdgeWeight;
        sel.edge_row = sec["edge"][0].get<int>() - 1;
        sel.edge_col = sec["edge"][1].get<int>() - 1;
    } else {
        throw std::invalid_argument("config field 'sensitivity.parameter': unknown '" + pname + "'");
    }

    const CertificateReport cert = certify(spec, opt.seed);
    const double tol = opt.tol_override.value_or(1e-11);
    const Trajectory traj = solve_auto(spec, cert, tol);
    if (traj.terminal != Terminal::Converged) {
        throw std::runtime_error("sensitivity: equilibrium solve did not converge");
    }
    const Vector xstar = traj.final_x;

    const double activity_tol = sec.value("activity_tol", 1e-8);
    const double strict_tol = sec.value("strict_tol", 1e-6);
    const SensitivityResult res = equilibrium_sensitivity(spec, xstar, sel, activity_tol, strict_tol);

    std::ofstream csv = open_out(opt.out_dir, "grad_y_xstar.csv");
    std::string header = "row";
    for (int c = 0; c < res.grad_y_xstar.cols(); ++c) header += ",dy_" + std::to_string(c + 1);
    csv << header << "\n";
    for (int r = 0; r < res.grad_y_xstar.rows(); ++r) {
        csv << (r + 1);
        for (int c = 0; c < res.grad_y_xstar.cols(); ++c) {
            csv << "," << format_number(res.grad_y_xstar(r, c));
        }
        csv << "\n";
    }

    json j;
    j["parameter"] = pname;
    j["equilibrium_residual"] = natural_residual(spec, xstar);
    j["regularity"] = {{"second_order", res.regularity.second_order},
                       {"full_rank", res.regularity.full_rank},
                       {"strict_complementarity", res.regularity.strict_complementarity},
                       {"second_order_margin", res.regularity.second_order_margin},
                       {"complementarity_margin",
                        std::isfinite(res.regularity.complementarity_margin)
                            ? res.regularity.complementarity_margin
                            : -1.0}};

    // Finite-difference validation: re-solve at y +- eps per column.
    if (sec.value("fd_check", true)) {
        const double eps = sec.value("fd_step", 1e-5);
        double worst = 0.0;
        const int cols = static_cast<int>(res.grad_y_xstar.cols());
        for (int c = 0; c < cols; ++c) {
            RunConfig up = cfg, down = cfg;
            if (sel.kind == ParamSelector::RacesGamma) {
                up.game_params["gamma"] = up.game_params["gamma"].get<double>() + eps;
                down.game_params["gamma"] = down.game_params["gamma"].get<double>() - eps;
            } else if (sel.kind == ParamSelector::LqOffsets) {
                const GameSpec probe = cfg.build_game();
                const auto* lq = probe.lq();
                if (lq == nullptr) throw std::runtime_error("sensitivity: 'a' needs a quadratic family");
                json a_up = json::array(), a_down = json::array();
                const int n = probe.strategy_dim();
                for (int i = 0; i < probe.n_agents(); ++i) {
                    json vu = json::array(), vd = json::array();
                    for (int k = 0; k < n; ++k) {
                        const double base = lq->a[i](k);
                        const bool hit = i * n + k == c;
                        vu.push_back(base + (hit ? eps : 0.0));
                        vd.push_back(base - (hit ? eps : 0.0));
                    }
                    a_up.push_back(vu);
                    a_down.push_back(vd);
                }
                up.game_params["a"] = a_up;
                down.game_params["a"] = a_down;
            } else {
                break;  // edge-weight validation needs a bounded re-solve story; skip
            }
            const GameSpec su = up.build_game(), sd = down.build_game();
            const Trajectory tu = solve_auto(su, certify(su, opt.seed), tol);
            const Trajectory td = solve_auto(sd, certify(sd, opt.seed), tol);
            if (tu.terminal != Terminal::Converged || td.terminal != Terminal::Converged) {
                throw std::runtime_error("sensitivity: perturbed solve did not converge");
            }
            const Vector fd = (tu.final_x - td.final_x) / (2.0 * eps);
            worst = std::max(worst, (fd - res.grad_y_xstar.col(c)).cwiseAbs().maxCoeff());
        }
        j["fd_validation_error"] = worst;
    }

    if (cert.block_p_constant && spec.lq() != nullptr) {
        const LipschitzBound bound = lipschitz_bound(spec, *cert.block_p_constant);
        j["lipschitz"] = {{"eta_bar", bound.eta_bar}, {"L", bound.L_const}};
    }
    write_json(opt.out_dir, "sensitivity.json", j);
    if (!opt.quiet) {
        log << "sensitivity computed for parameter '" << pname << "', "
            << res.grad_y_xstar.rows() << "x" << res.grad_y_xstar.cols() << " Jacobian";
        if (j.contains("fd_validation_error")) {
            log << ", fd validation error " << format_number(j["fd_validation_error"].get<double>());
        }
        log << "\n";
    }
}

}  // namespace netgames::cli
