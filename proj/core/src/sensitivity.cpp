#include "netgames/sensitivity.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace netgames {

namespace {

/// Stacked inequality/equality rows of all agents in profile coordinates.
struct StackedConstraints {
    Matrix B;
    Vector b;
    Matrix H;
    Vector h;
    std::vector<std::pair<int, int>> row_owner;  ///< (agent, local row) per B row
};

StackedConstraints stack_constraints(const GameSpec& spec) {
    const int N = spec.n_agents();
    const int n = spec.strategy_dim();
    StackedConstraints s;
    std::vector<Matrix> Bs(N), Hs(N);
    std::vector<Vector> bs(N), hs(N);
    int m = 0, p = 0;
    for (int i = 0; i < N; ++i) {
        std::tie(Bs[i], bs[i]) = spec.constraints(i).inequality_rows();
        std::tie(Hs[i], hs[i]) = spec.constraints(i).equality_rows();
        m += static_cast<int>(Bs[i].rows());
        p += static_cast<int>(Hs[i].rows());
    }
    s.B = Matrix::Zero(m, N * n);
    s.b.resize(m);
    s.H = Matrix::Zero(p, N * n);
    s.h.resize(p);
    int mr = 0, pr = 0;
    for (int i = 0; i < N; ++i) {
        for (int r = 0; r < Bs[i].rows(); ++r) {
            s.B.block(mr, i * n, 1, n) = Bs[i].row(r);
            s.b(mr) = bs[i](r);
            s.row_owner.emplace_back(i, r);
            ++mr;
        }
        for (int r = 0; r < Hs[i].rows(); ++r) {
            s.H.block(pr, i * n, 1, n) = Hs[i].row(r);
            s.h(pr) = hs[i](r);
            ++pr;
        }
    }
    return s;
}

}  // namespace

KktResult kkt_multipliers(const GameSpec& spec, const Vector& xstar, double activity_tol) {
    const StackedConstraints sc = stack_constraints(spec);
    const Vector f = game_operator(spec, xstar);

    KktResult res;
    res.active.activity_tol = activity_tol;

    std::vector<int> active_rows;
    for (int r = 0; r < sc.B.rows(); ++r) {
        if (std::abs(sc.B.row(r).dot(xstar) - sc.b(r)) <= activity_tol) {
            active_rows.push_back(r);
            res.active.active_indices.push_back(sc.row_owner[static_cast<std::size_t>(r)]);
        }
    }
    const int ma = static_cast<int>(active_rows.size());
    const int p = static_cast<int>(sc.H.rows());
    res.active.inequality_count = ma;
    res.active.A = Matrix::Zero(ma + p, spec.profile_dim());
    res.active.a.resize(ma + p);
    for (int k = 0; k < ma; ++k) {
        res.active.A.row(k) = sc.B.row(active_rows[k]);
        res.active.a(k) = sc.b(active_rows[k]);
    }
    if (p > 0) {
        res.active.A.bottomRows(p) = sc.H;
        res.active.a.tail(p) = sc.h;
    }

    if (ma + p == 0) {
        res.lambda.resize(0);
        res.mu.resize(0);
        res.stationarity_residual = f.norm();
    } else {
        // Least squares on F + A' [lambda; mu] = 0 over the active rows.
        const Matrix At = res.active.A.transpose();
        const Vector sol = At.colPivHouseholderQr().solve(-f);
        res.lambda = sol.head(ma).cwiseMax(0.0);
        res.mu = sol.tail(p);
        res.stationarity_residual = (f + At * (Vector(ma + p) << res.lambda, res.mu).finished()).norm();
    }
    if (res.stationarity_residual > 100.0 * activity_tol) {
        throw std::runtime_error("kkt_multipliers: not a KKT point (stationarity residual " +
                                 std::to_string(res.stationarity_residual) + ")");
    }
    return res;
}

RegularityFlags check_regularity(const GameSpec& spec, const Vector& xstar, const KktResult& kkt,
                                 double strict_tol) {
    RegularityFlags flags;

    const JacobianEval eval = evaluate_jacobian(spec, xstar);
    Eigen::SelfAdjointEigenSolver<Matrix> es(eval.gradF + eval.gradF.transpose(),
                                             Eigen::EigenvaluesOnly);
    flags.second_order_margin = es.eigenvalues()(0);
    flags.second_order = flags.second_order_margin > kEigTol * std::max(1.0, eval.gradF.norm());
    if (!flags.second_order) flags.failure_detail = "symmetrized gradient not positive definite at x*";

    if (kkt.active.A.rows() == 0) {
        flags.full_rank = true;
        flags.rank_margin = std::numeric_limits<double>::infinity();
    } else {
        Eigen::JacobiSVD<Matrix> svd(kkt.active.A);
        flags.rank_margin = svd.singularValues()(svd.singularValues().size() - 1);
        flags.full_rank = flags.rank_margin > 1e-10 * std::max(1.0, svd.singularValues()(0));
        if (!flags.full_rank) {
            if (!flags.failure_detail.empty()) flags.failure_detail += "; ";
            flags.failure_detail += "active constraint rows are rank deficient";
        }
    }

    flags.complementarity_margin = std::numeric_limits<double>::infinity();
    flags.strict_complementarity = true;
    for (int k = 0; k < kkt.active.inequality_count; ++k) {
        flags.complementarity_margin = std::min(flags.complementarity_margin, kkt.lambda(k));
        if (kkt.lambda(k) <= strict_tol) {
            flags.strict_complementarity = false;
            if (!flags.failure_detail.empty()) flags.failure_detail += "; ";
            flags.failure_detail += "strict complementarity fails for agent " +
                                    std::to_string(kkt.active.active_indices[k].first + 1) +
                                    " (active row with multiplier " + std::to_string(kkt.lambda(k)) + ")";
        }
    }
    return flags;
}

Matrix parametric_gradient(const GameSpec& spec, const Vector& xstar, const ParamSelector& sel) {
    const int D = spec.profile_dim();
    switch (sel.kind) {
        case ParamSelector::LqOffsets: {
            if (spec.lq() == nullptr && spec.multi_activity() == nullptr) {
                throw std::invalid_argument("parametric_gradient: offset parameter needs a quadratic family");
            }
            // F^i = Q^i x^i + K^i z^i - a^i, so dF/da = -I.
            return -Matrix::Identity(D, D);
        }
        case ParamSelector::RacesGamma: {
            const auto* r = spec.races();
            if (r == nullptr || !r->builtin()) {
                throw std::invalid_argument("parametric_gradient: gamma parameter needs the built-in race");
            }
            const Vector z = neighbor_aggregate(spec, xstar);
            Matrix g(D, 1);
            for (int i = 0; i < D; ++i) g(i, 0) = -z(i) * (r->upper(i) - z(i));
            return g;
        }
        case ParamSelector::EdgeWeight: {
            const JacobianEval eval = evaluate_jacobian(spec, xstar);
            const int n = spec.strategy_dim();
            Matrix g = Matrix::Zero(D, 1);
            // z^p gains x^q, so block p of F moves by K^p x^q.
            g.block(sel.edge_row * n, 0, n, 1) =
                eval.K_blocks[sel.edge_row] * xstar.segment(sel.edge_col * n, n);
            return g;
        }
    }
    throw std::logic_error("unreachable");
}

SensitivityResult equilibrium_sensitivity(const GameSpec& spec, const Vector& xstar,
                                          const ParamSelector& sel, double activity_tol,
                                          double strict_tol) {
    SensitivityResult out;
    out.kkt = kkt_multipliers(spec, xstar, activity_tol);
    out.regularity = check_regularity(spec, xstar, out.kkt, strict_tol);
    if (!out.regularity.all()) {
        throw std::runtime_error("equilibrium_sensitivity: regularity assumption fails: " +
                                 out.regularity.failure_detail);
    }

    const JacobianEval eval = evaluate_jacobian(spec, xstar);
    Eigen::FullPivLU<Matrix> lu(eval.gradF);
    if (!lu.isInvertible()) {
        throw std::runtime_error("equilibrium_sensitivity: grad_x F is singular at the equilibrium");
    }
    const int D = spec.profile_dim();
    out.L = lu.solve(Matrix::Identity(D, D));

    const Matrix& A = out.kkt.active.A;
    if (A.rows() == 0) {
        out.M = out.L;
    } else {
        const Matrix ALAt = A * out.L * A.transpose();
        Eigen::FullPivLU<Matrix> lu2(ALAt);
        if (!lu2.isInvertible()) {
            throw std::runtime_error("equilibrium_sensitivity: A L A' is singular (regularity violation)");
        }
        out.M = out.L - out.L * A.transpose() * lu2.solve(A * out.L);
    }
    out.grad_y_xstar = -out.M * parametric_gradient(spec, xstar, sel);
    return out;
}

double LipschitzBound::bound_parameter(double dy_norm) const {
    return L_const / eta_bar * dy_norm;
}

double LipschitzBound::bound_network(double dG_norm, double dy_norm) const {
    if (!delta_max) throw std::runtime_error("network perturbation bound needs a bounded strategy space");
    const double ratio = L_const / eta_bar;
    return std::sqrt(ratio * ratio * (dG_norm * dG_norm * (*delta_max) * (*delta_max) + dy_norm * dy_norm));
}

double lq_gradient_lipschitz(const GameSpec& spec) {
    const auto* l = spec.lq();
    if (l == nullptr) {
        throw std::invalid_argument("lq_gradient_lipschitz: closed form exists for linear quadratic games only");
    }
    const int n = spec.strategy_dim();
    double worst = 0.0;
    for (int i = 0; i < spec.n_agents(); ++i) {
        Matrix block(n, 3 * n);
        block << l->Q[i], l->K[i], -Matrix::Identity(n, n);
        Eigen::JacobiSVD<Matrix> svd(block);
        worst = std::max(worst, svd.singularValues()(0));
    }
    return worst;
}

double max_feasible_norm(const GameSpec& spec) {
    double sq = 0.0;
    for (int i = 0; i < spec.n_agents(); ++i) {
        const double m = spec.constraints(i).max_norm();
        sq += m * m;
    }
    return std::sqrt(sq);
}

LipschitzBound lipschitz_bound(const GameSpec& spec, double eta_bar, std::optional<double> L_const,
                               bool need_network_bound) {
    if (!(eta_bar > 0.0)) throw std::invalid_argument("lipschitz_bound: eta_bar must be positive");
    LipschitzBound b;
    b.eta_bar = eta_bar;
    if (L_const) {
        b.L_const = *L_const;
    } else {
        b.L_const = lq_gradient_lipschitz(spec);  // throws for other families
    }
    if (need_network_bound) b.delta_max = max_feasible_norm(spec);
    return b;
}

}  // namespace netgames
