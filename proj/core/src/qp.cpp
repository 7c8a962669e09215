#include "netgames/qp.hpp"

#include <Eigen/Dense>

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace netgames {

namespace {

constexpr double kFeasTol = 1e-9;
constexpr double kDualTol = 1e-9;

double objective_value(const Matrix& Q, const Vector& c, const Vector& y) {
    return 0.5 * y.dot(Q * y) - c.dot(y);
}

}  // namespace

QpResult solve_small_qp(const Matrix& Q, const Vector& c,
                        const Matrix& B, const Vector& b,
                        const Matrix& H, const Vector& h) {
    const int n = static_cast<int>(Q.rows());
    const int m = static_cast<int>(B.rows());
    const int p = static_cast<int>(H.rows());
    if (m > 24) throw std::invalid_argument("solve_small_qp: too many inequality rows");

    const double scale = std::max(1.0, b.size() ? b.cwiseAbs().maxCoeff() : 0.0);
    QpResult best;
    best.feasible = false;

    std::vector<int> rows;
    rows.reserve(m);
    const std::uint32_t total = 1u << m;

    // Subsets ordered by size so the first KKT-consistent candidate tends to
    // be found after a few solves (empty set first).
    std::vector<std::uint32_t> masks(total);
    for (std::uint32_t s = 0; s < total; ++s) masks[s] = s;
    std::stable_sort(masks.begin(), masks.end(), [](std::uint32_t a, std::uint32_t c2) {
        return std::popcount(a) < std::popcount(c2);
    });

    for (const std::uint32_t mask : masks) {
        rows.clear();
        for (int k = 0; k < m; ++k) {
            if (mask & (1u << k)) rows.push_back(k);
        }
        const int ma = static_cast<int>(rows.size());
        const int dim = n + ma + p;

        Matrix kkt = Matrix::Zero(dim, dim);
        Vector rhs = Vector::Zero(dim);
        kkt.topLeftCorner(n, n) = Q;
        rhs.head(n) = c;
        for (int k = 0; k < ma; ++k) {
            kkt.block(n + k, 0, 1, n) = B.row(rows[k]);
            kkt.block(0, n + k, n, 1) = B.row(rows[k]).transpose();
            rhs(n + k) = b(rows[k]);
        }
        if (p > 0) {
            kkt.block(n + ma, 0, p, n) = H;
            kkt.block(0, n + ma, n, p) = H.transpose();
            rhs.tail(p) = h;
        }

        Eigen::FullPivLU<Matrix> lu(kkt);
        if (!lu.isInvertible()) continue;
        const Vector sol = lu.solve(rhs);
        const Vector y = sol.head(n);

        bool ok = true;
        for (int k = 0; k < m && ok; ++k) {
            if (B.row(k).dot(y) > b(k) + kFeasTol * scale) ok = false;
        }
        if (p > 0 && ok) {
            if ((H * y - h).cwiseAbs().maxCoeff() > kFeasTol * scale) ok = false;
        }
        for (int k = 0; k < ma && ok; ++k) {
            if (sol(n + k) < -kDualTol) ok = false;
        }
        if (!ok) continue;

        QpResult res;
        res.x = y;
        res.lambda = Vector::Zero(m);
        for (int k = 0; k < ma; ++k) res.lambda(rows[k]) = std::max(0.0, sol(n + k));
        res.mu = p > 0 ? Vector(sol.tail(p)) : Vector(0);
        res.feasible = true;
        res.objective = objective_value(Q, c, y);
        return res;
    }
    return best;
}

QpResult solve_qp_projected_gradient(const Matrix& Q, const Vector& c,
                                     const Matrix& B, const Vector& b,
                                     const Matrix& H, const Vector& h,
                                     double tol, int max_iters) {
    const int n = static_cast<int>(Q.rows());
    const Matrix identity = Matrix::Identity(n, n);
    auto project = [&](const Vector& v) {
        const QpResult proj = solve_small_qp(identity, v, B, b, H, h);
        if (!proj.feasible) throw std::runtime_error("projected gradient: infeasible constraint set");
        return proj.x;
    };

    Vector y = project(Vector::Zero(n));
    const double lip = Q.operatorNorm();
    double step = lip > 0 ? 1.0 / lip : 1.0;
    for (int it = 0; it < max_iters; ++it) {
        const Vector grad = Q * y - c;
        Vector trial = project(y - step * grad);
        // Backtrack until sufficient decrease.
        double f0 = objective_value(Q, c, y);
        int guard = 0;
        while (objective_value(Q, c, trial) > f0 + grad.dot(trial - y) +
                                                  0.5 / step * (trial - y).squaredNorm() + 1e-14 &&
               guard++ < 60) {
            step *= 0.5;
            trial = project(y - step * grad);
        }
        const double move = (trial - y).norm();
        y = trial;
        if (move <= tol) {
            QpResult res;
            res.x = y;
            res.lambda = Vector::Zero(B.rows());
            res.mu = Vector::Zero(H.rows());
            res.feasible = true;
            res.objective = objective_value(Q, c, y);
            return res;
        }
    }
    throw std::runtime_error("projected gradient QP failed to converge within iteration cap");
}

}  // namespace netgames
