#include "netgames/game.hpp"

#include "netgames/qp.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace netgames {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int first_primes[8] = {2, 3, 5, 7, 11, 13, 17, 19};

double radical_inverse(std::uint64_t index, int base) {
    double result = 0.0;
    double f = 1.0 / base;
    while (index > 0) {
        result += f * static_cast<double>(index % base);
        index /= base;
        f /= base;
    }
    return result;
}

}  // namespace

Vector halton_point(std::uint64_t index, int dim, std::uint64_t seed) {
    if (dim > 8) throw std::invalid_argument("halton_point: dimension cap is 8");
    Vector p(dim);
    const std::uint64_t shifted = index + 1 + seed * 7919;
    for (int d = 0; d < dim; ++d) p(d) = radical_inverse(shifted, first_primes[d]);
    return p;
}

// ---------------------------------------------------------------------------
// ConstraintSet

ConstraintSet ConstraintSet::unconstrained(int dim) {
    ConstraintSet c;
    c.kind_ = ConstraintKind::Unconstrained;
    c.dim_ = dim;
    return c;
}

ConstraintSet ConstraintSet::nonneg(int dim) {
    ConstraintSet c;
    c.kind_ = ConstraintKind::NonNegOrthant;
    c.dim_ = dim;
    c.lower_ = Vector::Zero(dim);
    c.upper_ = Vector::Constant(dim, kInf);
    return c;
}

ConstraintSet ConstraintSet::box(Vector lower, Vector upper) {
    if (lower.size() != upper.size()) throw std::invalid_argument("box: bound dimensions differ");
    for (int k = 0; k < lower.size(); ++k) {
        if (lower(k) > upper(k)) {
            throw std::invalid_argument("box: lower bound exceeds upper bound in component " +
                                        std::to_string(k + 1));
        }
    }
    ConstraintSet c;
    c.kind_ = ConstraintKind::Box;
    c.dim_ = static_cast<int>(lower.size());
    c.lower_ = std::move(lower);
    c.upper_ = std::move(upper);
    return c;
}

ConstraintSet ConstraintSet::polyhedron(Matrix B, Vector b, Matrix H, Vector h) {
    if (B.rows() != b.size()) throw std::invalid_argument("polyhedron: B/b row mismatch");
    if (H.rows() != h.size()) throw std::invalid_argument("polyhedron: H/h row mismatch");
    if (H.rows() > 0 && H.cols() != B.cols()) {
        throw std::invalid_argument("polyhedron: B/H column mismatch");
    }
    ConstraintSet c;
    c.kind_ = ConstraintKind::Polyhedron;
    c.dim_ = static_cast<int>(B.cols());
    c.B_ = std::move(B);
    c.b_ = std::move(b);
    c.H_ = std::move(H);
    c.h_ = std::move(h);
    return c;
}

bool ConstraintSet::contains(const Vector& x, double tol) const {
    if (x.size() != dim_) return false;
    switch (kind_) {
        case ConstraintKind::Unconstrained:
            return true;
        case ConstraintKind::NonNegOrthant:
        case ConstraintKind::Box:
            for (int k = 0; k < dim_; ++k) {
                if (x(k) < lower_(k) - tol || x(k) > upper_(k) + tol) return false;
            }
            return true;
        case ConstraintKind::Polyhedron: {
            if (((B_ * x) - b_).maxCoeff() > tol) return false;
            if (h_.size() > 0 && (H_ * x - h_).cwiseAbs().maxCoeff() > tol) return false;
            return true;
        }
    }
    return false;
}

bool ConstraintSet::is_bounded() const {
    switch (kind_) {
        case ConstraintKind::Unconstrained:
            return dim_ == 0;
        case ConstraintKind::NonNegOrthant:
            return false;
        case ConstraintKind::Box:
            for (int k = 0; k < dim_; ++k) {
                if (!std::isfinite(lower_(k)) || !std::isfinite(upper_(k))) return false;
            }
            return true;
        case ConstraintKind::Polyhedron: {
            // Bounded iff max e_k'y and min e_k'y are finite for all k; probe
            // with the max_norm vertex enumeration.
            try {
                (void)max_norm();
                return true;
            } catch (const std::exception&) {
                return false;
            }
        }
    }
    return false;
}

Vector ConstraintSet::project(const Vector& x) const {
    switch (kind_) {
        case ConstraintKind::Unconstrained:
            return x;
        case ConstraintKind::NonNegOrthant:
            return x.cwiseMax(0.0);
        case ConstraintKind::Box:
            return x.cwiseMax(lower_).cwiseMin(upper_);
        case ConstraintKind::Polyhedron: {
            const Matrix identity = Matrix::Identity(dim_, dim_);
            const QpResult res = solve_small_qp(identity, x, B_, b_, H_, h_);
            if (!res.feasible) throw std::runtime_error("projection onto infeasible polyhedron");
            return res.x;
        }
    }
    throw std::logic_error("unreachable");
}

Vector ConstraintSet::project_weighted(const Vector& x, const Matrix& Q) const {
    if (kind_ == ConstraintKind::Unconstrained) return x;
    return minimize_quadratic(Q, Q * x);
}

Vector ConstraintSet::minimize_quadratic(const Matrix& Q, const Vector& c) const {
    switch (kind_) {
        case ConstraintKind::Unconstrained:
            return Q.ldlt().solve(c);
        case ConstraintKind::NonNegOrthant:
        case ConstraintKind::Box: {
            // Diagonal Q over a box separates into coordinate clamps.
            bool diagonal = true;
            for (int i = 0; i < Q.rows() && diagonal; ++i) {
                for (int j = 0; j < Q.cols(); ++j) {
                    if (i != j && Q(i, j) != 0.0) {
                        diagonal = false;
                        break;
                    }
                }
            }
            if (diagonal) {
                Vector y(dim_);
                for (int k = 0; k < dim_; ++k) {
                    y(k) = std::min(std::max(c(k) / Q(k, k), lower_(k)), upper_(k));
                }
                return y;
            }
            auto [rows, rhs] = inequality_rows();
            const QpResult res = solve_small_qp(Q, c, rows, rhs, Matrix(0, dim_), Vector(0));
            if (!res.feasible) throw std::runtime_error("box subproblem infeasible");
            return res.x;
        }
        case ConstraintKind::Polyhedron: {
            if (B_.rows() <= 16 || dim_ <= 4) {
                const QpResult res = solve_small_qp(Q, c, B_, b_, H_, h_);
                if (!res.feasible) throw std::runtime_error("infeasible constraint set");
                return res.x;
            }
            const QpResult res = solve_qp_projected_gradient(Q, c, B_, b_, H_, h_, 1e-12, 20000);
            return res.x;
        }
    }
    throw std::logic_error("unreachable");
}

std::pair<Matrix, Vector> ConstraintSet::inequality_rows() const {
    switch (kind_) {
        case ConstraintKind::Unconstrained:
            return {Matrix(0, dim_), Vector(0)};
        case ConstraintKind::NonNegOrthant:
        case ConstraintKind::Box: {
            std::vector<std::pair<Vector, double>> rows;
            for (int k = 0; k < dim_; ++k) {
                if (std::isfinite(lower_(k))) {
                    Vector r = Vector::Zero(dim_);
                    r(k) = -1.0;
                    rows.emplace_back(r, -lower_(k));
                }
                if (std::isfinite(upper_(k))) {
                    Vector r = Vector::Zero(dim_);
                    r(k) = 1.0;
                    rows.emplace_back(r, upper_(k));
                }
            }
            Matrix B(rows.size(), dim_);
            Vector b(rows.size());
            for (std::size_t k = 0; k < rows.size(); ++k) {
                B.row(static_cast<int>(k)) = rows[k].first.transpose();
                b(static_cast<int>(k)) = rows[k].second;
            }
            return {B, b};
        }
        case ConstraintKind::Polyhedron:
            return {B_, b_};
    }
    throw std::logic_error("unreachable");
}

std::pair<Matrix, Vector> ConstraintSet::equality_rows() const {
    if (kind_ == ConstraintKind::Polyhedron && H_.rows() > 0) return {H_, h_};
    return {Matrix(0, dim_), Vector(0)};
}

std::optional<Vector> ConstraintSet::strictly_feasible_point(double margin) const {
    if (kind_ == ConstraintKind::Unconstrained) return Vector::Zero(dim_);
    auto [B, b] = inequality_rows();
    auto [H, h] = equality_rows();
    const Matrix identity = Matrix::Identity(dim_, dim_);
    const QpResult res = solve_small_qp(identity, Vector::Zero(dim_), B, b - Vector::Constant(b.size(), margin), H, h);
    if (!res.feasible) return std::nullopt;
    if (B.rows() > 0 && ((B * res.x) - b).maxCoeff() > -margin / 2) return std::nullopt;
    return res.x;
}

double ConstraintSet::max_norm() const {
    switch (kind_) {
        case ConstraintKind::Unconstrained:
        case ConstraintKind::NonNegOrthant:
            throw std::runtime_error("max_norm: constraint set is unbounded");
        case ConstraintKind::Box: {
            double sq = 0.0;
            for (int k = 0; k < dim_; ++k) {
                if (!std::isfinite(lower_(k)) || !std::isfinite(upper_(k))) {
                    throw std::runtime_error("max_norm: box has an infinite bound");
                }
                sq += std::max(lower_(k) * lower_(k), upper_(k) * upper_(k));
            }
            return std::sqrt(sq);
        }
        case ConstraintKind::Polyhedron: {
            if (dim_ > 4) throw std::runtime_error("max_norm: vertex enumeration limited to dim <= 4");
            // Vertices are intersections of dim_ rows from [B; H].
            Matrix all_rows(B_.rows() + H_.rows(), dim_);
            Vector all_rhs(B_.rows() + H_.rows());
            all_rows.topRows(B_.rows()) = B_;
            all_rhs.head(B_.rows()) = b_;
            if (H_.rows() > 0) {
                all_rows.bottomRows(H_.rows()) = H_;
                all_rhs.tail(H_.rows()) = h_;
            }
            const int m = static_cast<int>(all_rows.rows());
            if (m < dim_) throw std::runtime_error("max_norm: polyhedron is unbounded");
            double best = -1.0;
            std::vector<int> pick(dim_);
            std::function<void(int, int)> rec = [&](int start, int chosen) {
                if (chosen == dim_) {
                    Matrix A(dim_, dim_);
                    Vector rhs(dim_);
                    for (int k = 0; k < dim_; ++k) {
                        A.row(k) = all_rows.row(pick[k]);
                        rhs(k) = all_rhs(pick[k]);
                    }
                    Eigen::FullPivLU<Matrix> lu(A);
                    if (!lu.isInvertible()) return;
                    const Vector v = lu.solve(rhs);
                    if (contains(v, 1e-8)) best = std::max(best, v.norm());
                    return;
                }
                for (int k = start; k < m; ++k) {
                    pick[chosen] = k;
                    rec(k + 1, chosen + 1);
                }
            };
            rec(0, 0);
            if (best < 0.0) throw std::runtime_error("max_norm: no vertex found, polyhedron unbounded or empty");
            return best;
        }
    }
    throw std::logic_error("unreachable");
}

// ---------------------------------------------------------------------------
// Families

double RacesFamily::phi_value(int agent, double z) const {
    if (phi) return phi(agent, z);
    return gamma * z * (upper(agent) - z);
}

double RacesFamily::phi_derivative(int agent, double z) const {
    if (dphi) return dphi(agent, z);
    if (phi) throw std::runtime_error("races: custom phi supplied without derivative");
    return gamma * (upper(agent) - 2.0 * z);
}

// ---------------------------------------------------------------------------
// GameSpec

namespace {

int family_dim(const Family& family) {
    if (std::holds_alternative<LinearQuadraticFamily>(family)) {
        const auto& lq = std::get<LinearQuadraticFamily>(family);
        if (lq.Q.empty()) throw std::invalid_argument("linear quadratic family: no agents");
        return static_cast<int>(lq.Q.front().rows());
    }
    if (std::holds_alternative<RacesFamily>(family)) return 1;
    if (std::holds_alternative<MultiActivityFamily>(family)) return 2;
    return std::get<CustomFamily>(family).strategy_dim;
}

void validate_family(const Network& net, const Family& family, int n) {
    const int N = net.n_agents();
    if (const auto* lq = std::get_if<LinearQuadraticFamily>(&family)) {
        if (static_cast<int>(lq->Q.size()) != N || static_cast<int>(lq->K.size()) != N ||
            static_cast<int>(lq->a.size()) != N) {
            throw std::invalid_argument("linear quadratic family: need Q, K, a for every agent");
        }
        for (int i = 0; i < N; ++i) {
            if (lq->Q[i].rows() != n || lq->Q[i].cols() != n || lq->K[i].rows() != n ||
                lq->K[i].cols() != n || lq->a[i].size() != n) {
                throw std::invalid_argument("linear quadratic family: block dimension mismatch at agent " +
                                            std::to_string(i + 1));
            }
            if ((lq->Q[i] - lq->Q[i].transpose()).cwiseAbs().maxCoeff() > 1e-12) {
                throw std::invalid_argument("Q block of agent " + std::to_string(i + 1) + " is not symmetric");
            }
            Eigen::SelfAdjointEigenSolver<Matrix> es(lq->Q[i], Eigen::EigenvaluesOnly);
            if (es.eigenvalues()(0) <= 0.0) {
                throw std::invalid_argument("Q block of agent " + std::to_string(i + 1) +
                                            " is not positive definite");
            }
        }
    } else if (const auto* rc = std::get_if<RacesFamily>(&family)) {
        if (rc->lower.size() != N || rc->upper.size() != N) {
            throw std::invalid_argument("races family: need bounds for every agent");
        }
        for (int i = 0; i < N; ++i) {
            if (!(0.0 < rc->lower(i) && rc->lower(i) < rc->upper(i))) {
                throw std::invalid_argument("races family: need 0 < a^i < b^i for agent " +
                                            std::to_string(i + 1));
            }
        }
        if (rc->builtin()) {
            if (rc->gamma <= 0.0) throw std::invalid_argument("races family: built-in phi needs gamma > 0");
            const double b0 = rc->upper(0);
            if ((rc->upper.array() - b0).abs().maxCoeff() > 0.0) {
                throw std::invalid_argument("races family: built-in phi requires homogeneous upper bounds");
            }
        }
    } else if (const auto* ma = std::get_if<MultiActivityFamily>(&family)) {
        if (ma->a_A.size() != N || ma->a_B.size() != N || ma->beta.size() != N) {
            throw std::invalid_argument("multi-activity family: per-agent parameter size mismatch");
        }
        for (int i = 0; i < N; ++i) {
            if (std::abs(ma->beta(i)) >= 1.0) {
                throw std::invalid_argument("multi-activity family: need |beta| < 1 for agent " +
                                            std::to_string(i + 1));
            }
        }
    } else {
        const auto& cu = std::get<CustomFamily>(family);
        if (!cu.grad || !cu.own_hessian || !cu.cross_hessian) {
            throw std::invalid_argument("custom family: gradient, own and cross Hessian callbacks required");
        }
    }
}

}  // namespace

GameSpec::GameSpec(Network network, Family family, std::vector<ConstraintSet> constraints)
    : network_(std::move(network)), family_(std::move(family)), constraints_(std::move(constraints)) {
    strategy_dim_ = family_dim(family_);
    validate_family(network_, family_, strategy_dim_);
    const int N = network_.n_agents();
    if (static_cast<int>(constraints_.size()) == 1 && N > 1) {
        constraints_.resize(N, constraints_.front());
    }
    if (static_cast<int>(constraints_.size()) != N) {
        throw std::invalid_argument("need one constraint set per agent");
    }
    for (const auto& c : constraints_) {
        if (c.dim() != strategy_dim_) {
            throw std::invalid_argument("constraint set dimension does not match strategy dimension");
        }
    }
    // Races strategies live in the boxes [a^i, b^i] by construction.
    if (const auto* rc = races()) {
        for (int i = 0; i < N; ++i) {
            constraints_[i] = ConstraintSet::box(Vector::Constant(1, rc->lower(i)),
                                                 Vector::Constant(1, rc->upper(i)));
        }
    }
}

Matrix GameSpec::own_quadratic(int agent) const {
    if (const auto* l = lq()) return l->Q[agent];
    if (races()) return Matrix::Identity(1, 1);
    if (const auto* m = multi_activity()) {
        Matrix q(2, 2);
        q << 1.0, m->beta(agent), m->beta(agent), 1.0;
        return q;
    }
    throw std::runtime_error("own_quadratic: custom family has no closed quadratic block");
}

Eigen::VectorBlock<const Vector> GameSpec::agent_block(const Vector& x, int agent) const {
    return x.segment(agent * strategy_dim_, strategy_dim_);
}

bool GameSpec::feasible(const Vector& x, double tol) const {
    if (x.size() != profile_dim()) return false;
    for (int i = 0; i < n_agents(); ++i) {
        if (!constraints_[i].contains(x.segment(i * strategy_dim_, strategy_dim_), tol)) return false;
    }
    return true;
}

Vector GameSpec::project_profile(const Vector& x) const {
    Vector y(profile_dim());
    for (int i = 0; i < n_agents(); ++i) {
        y.segment(i * strategy_dim_, strategy_dim_) =
            constraints_[i].project(x.segment(i * strategy_dim_, strategy_dim_));
    }
    return y;
}

// ---------------------------------------------------------------------------
// Operations

Vector neighbor_aggregate(const GameSpec& spec, const Vector& x) {
    if (x.size() != spec.profile_dim()) {
        throw std::invalid_argument("neighbor_aggregate: profile has dimension " +
                                    std::to_string(x.size()) + ", expected " +
                                    std::to_string(spec.profile_dim()));
    }
    const int N = spec.n_agents();
    const int n = spec.strategy_dim();
    const Matrix& G = spec.network().weights();
    Vector z = Vector::Zero(N * n);
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) {
            if (G(i, j) != 0.0) z.segment(i * n, n) += G(i, j) * x.segment(j * n, n);
        }
    }
    return z;
}

namespace {

Vector operator_block(const GameSpec& spec, int i, const Vector& xi, const Vector& zi) {
    if (const auto* l = spec.lq()) return l->Q[i] * xi + l->K[i] * zi - l->a[i];
    if (const auto* r = spec.races()) {
        return Vector::Constant(1, xi(0) - r->lower(i) - r->phi_value(i, zi(0)));
    }
    if (const auto* m = spec.multi_activity()) {
        Matrix Q(2, 2), K(2, 2);
        Q << 1.0, m->beta(i), m->beta(i), 1.0;
        K << -m->delta, -m->mu, -m->mu, -m->delta;
        Vector a(2);
        a << m->a_A(i), m->a_B(i);
        return Q * xi + K * zi - a;
    }
    const auto& cu = *spec.custom();
    Vector g = cu.grad(i, xi, zi);
    if (g.size() != spec.strategy_dim()) {
        throw std::runtime_error("custom gradient returned wrong dimension for agent " +
                                 std::to_string(i + 1));
    }
    return g;
}

}  // namespace

Vector game_operator(const GameSpec& spec, const Vector& x) {
    const int N = spec.n_agents();
    const int n = spec.strategy_dim();
    const Vector z = neighbor_aggregate(spec, x);
    Vector f(N * n);
    for (int i = 0; i < N; ++i) {
        f.segment(i * n, n) = operator_block(spec, i, x.segment(i * n, n), z.segment(i * n, n));
    }
    return f;
}

JacobianEval evaluate_jacobian(const GameSpec& spec, const Vector& x) {
    const int N = spec.n_agents();
    const int n = spec.strategy_dim();
    const Matrix& G = spec.network().weights();
    const Vector z = neighbor_aggregate(spec, x);

    JacobianEval eval;
    eval.F.resize(N * n);
    eval.D_blocks.resize(N);
    eval.K_blocks.resize(N);

    for (int i = 0; i < N; ++i) {
        const Vector xi = x.segment(i * n, n);
        const Vector zi = z.segment(i * n, n);
        eval.F.segment(i * n, n) = operator_block(spec, i, xi, zi);
        if (const auto* l = spec.lq()) {
            eval.D_blocks[i] = l->Q[i];
            eval.K_blocks[i] = l->K[i];
        } else if (const auto* r = spec.races()) {
            eval.D_blocks[i] = Matrix::Identity(1, 1);
            eval.K_blocks[i] = Matrix::Constant(1, 1, -r->phi_derivative(i, zi(0)));
        } else if (const auto* m = spec.multi_activity()) {
            Matrix Q(2, 2), K(2, 2);
            Q << 1.0, m->beta(i), m->beta(i), 1.0;
            K << -m->delta, -m->mu, -m->mu, -m->delta;
            eval.D_blocks[i] = Q;
            eval.K_blocks[i] = K;
        } else {
            const auto& cu = *spec.custom();
            eval.D_blocks[i] = cu.own_hessian(i, xi, zi);
            eval.K_blocks[i] = cu.cross_hessian(i, xi, zi);
            if (eval.D_blocks[i].rows() != n || eval.D_blocks[i].cols() != n ||
                eval.K_blocks[i].rows() != n || eval.K_blocks[i].cols() != n) {
                throw std::runtime_error("custom Hessian callback returned wrong dimensions for agent " +
                                         std::to_string(i + 1));
            }
        }
    }

    eval.gradF = Matrix::Zero(N * n, N * n);
    for (int i = 0; i < N; ++i) {
        eval.gradF.block(i * n, i * n, n, n) = eval.D_blocks[i];
        for (int j = 0; j < N; ++j) {
            if (G(i, j) != 0.0) {
                eval.gradF.block(i * n, j * n, n, n) += G(i, j) * eval.K_blocks[i];
            }
        }
    }
    return eval;
}

Vector best_response(const GameSpec& spec, int agent, const Vector& z_i, double br_tol) {
    const int n = spec.strategy_dim();
    if (z_i.size() != n) throw std::invalid_argument("best_response: aggregate dimension mismatch");

    if (const auto* r = spec.races()) {
        const double target = r->lower(agent) + r->phi_value(agent, z_i(0));
        return Vector::Constant(1, std::min(std::max(target, r->lower(agent)), r->upper(agent)));
    }
    if (spec.has_projection_form()) {
        // min 1/2 y'Qy + (Kz - a)'y over X^i, i.e. solve with c = a - Kz.
        Matrix Q;
        Vector c;
        if (const auto* l = spec.lq()) {
            Q = l->Q[agent];
            c = l->a[agent] - l->K[agent] * z_i;
        } else {
            const auto* m = spec.multi_activity();
            Q.resize(2, 2);
            Q << 1.0, m->beta(agent), m->beta(agent), 1.0;
            Matrix K(2, 2);
            K << -m->delta, -m->mu, -m->mu, -m->delta;
            Vector a(2);
            a << m->a_A(agent), m->a_B(agent);
            c = a - K * z_i;
        }
        return spec.constraints(agent).minimize_quadratic(Q, c);
    }

    // Custom family: projected gradient with a curvature-scaled step.
    const auto& cu = *spec.custom();
    const ConstraintSet& set = spec.constraints(agent);
    Vector y = set.project(Vector::Zero(n));
    for (int it = 0; it < 20000; ++it) {
        const Vector grad = cu.grad(agent, y, z_i);
        Eigen::SelfAdjointEigenSolver<Matrix> es(cu.own_hessian(agent, y, z_i), Eigen::EigenvaluesOnly);
        const double lip = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-8);
        const Vector next = set.project(y - grad / lip);
        const double move = (next - y).norm();
        y = next;
        if (move <= br_tol) return y;
    }
    throw std::runtime_error("best_response: projected gradient did not converge for agent " +
                             std::to_string(agent + 1));
}

Vector best_response_profile(const GameSpec& spec, const Vector& x, double br_tol) {
    const int N = spec.n_agents();
    const int n = spec.strategy_dim();
    const Vector z = neighbor_aggregate(spec, x);
    Vector out(N * n);
    for (int i = 0; i < N; ++i) {
        out.segment(i * n, n) = best_response(spec, i, z.segment(i * n, n), br_tol);
    }
    return out;
}

double agent_cost(const GameSpec& spec, int agent, const Vector& x_i, const Vector& z_i) {
    if (const auto* l = spec.lq()) {
        return 0.5 * x_i.dot(l->Q[agent] * x_i) + (l->K[agent] * z_i - l->a[agent]).dot(x_i);
    }
    if (const auto* r = spec.races()) {
        return 0.5 * x_i(0) * x_i(0) - (r->lower(agent) + r->phi_value(agent, z_i(0))) * x_i(0);
    }
    if (const auto* m = spec.multi_activity()) {
        Matrix Q(2, 2), K(2, 2);
        Q << 1.0, m->beta(agent), m->beta(agent), 1.0;
        K << -m->delta, -m->mu, -m->mu, -m->delta;
        Vector a(2);
        a << m->a_A(agent), m->a_B(agent);
        return 0.5 * x_i.dot(Q * x_i) + (K * z_i - a).dot(x_i);
    }
    throw std::runtime_error("agent_cost: not available for custom families");
}

namespace {

double spectral_norm_of(const Matrix& A) {
    if (A.rows() == 1 && A.cols() == 1) return std::abs(A(0, 0));
    Eigen::JacobiSVD<Matrix> svd(A);
    return svd.singularValues()(0);
}

std::pair<double, double> races_aggregate_range(const GameSpec& spec, int agent) {
    const auto* r = spec.races();
    const Vector& row = spec.network().weights().row(agent);
    double lo = 0.0, hi = 0.0;
    for (int j = 0; j < row.size(); ++j) {
        lo += row(j) * r->lower(j);
        hi += row(j) * r->upper(j);
    }
    return {lo, hi};
}

}  // namespace

KappaBounds kappa_bounds(const GameSpec& spec, const std::optional<ConstraintSet>& strategy_box,
                         std::uint64_t seed) {
    const int N = spec.n_agents();
    KappaBounds kb;
    kb.kappa1_per_agent.resize(N);
    kb.kappa2_per_agent.resize(N);

    if (const auto* l = spec.lq()) {
        for (int i = 0; i < N; ++i) {
            Eigen::SelfAdjointEigenSolver<Matrix> es(l->Q[i], Eigen::EigenvaluesOnly);
            kb.kappa1_per_agent(i) = es.eigenvalues()(0);
            kb.kappa2_per_agent(i) = spectral_norm_of(l->K[i]);
        }
        kb.exactness = KappaExactness::Exact;
    } else if (const auto* r = spec.races()) {
        for (int i = 0; i < N; ++i) {
            kb.kappa1_per_agent(i) = 1.0;
            auto [zlo, zhi] = races_aggregate_range(spec, i);
            if (r->builtin()) {
                const double b = r->upper(i);
                kb.kappa2_per_agent(i) =
                    r->gamma * std::max(std::abs(b - 2.0 * zlo), std::abs(b - 2.0 * zhi));
            } else if (r->kappa2_bound) {
                kb.kappa2_per_agent(i) = *r->kappa2_bound;
            } else {
                // Deterministic 1-d probe of |phi'| over the reachable aggregate range.
                double worst = 0.0;
                for (int s = 0; s < 10000; ++s) {
                    const double z = zlo + (zhi - zlo) * halton_point(s, 1, seed)(0);
                    worst = std::max(worst, std::abs(r->phi_derivative(i, z)));
                }
                kb.kappa2_per_agent(i) = worst;
            }
        }
        kb.exactness = (r->builtin() ? KappaExactness::Exact
                                     : (r->kappa2_bound ? KappaExactness::UserSupplied
                                                        : KappaExactness::Sampled));
    } else if (const auto* m = spec.multi_activity()) {
        for (int i = 0; i < N; ++i) {
            kb.kappa1_per_agent(i) = 1.0 - std::abs(m->beta(i));
            kb.kappa2_per_agent(i) = std::abs(m->delta) + std::abs(m->mu);
        }
        kb.exactness = KappaExactness::Exact;
    } else {
        const auto& cu = *spec.custom();
        if (cu.kappa1 && cu.kappa2) {
            kb.kappa1_per_agent = *cu.kappa1;
            kb.kappa2_per_agent = *cu.kappa2;
            kb.exactness = KappaExactness::UserSupplied;
        } else {
            // Sample profiles in a bounding box and take empirical extrema.
            const int n = spec.strategy_dim();
            Vector lo(N * n), hi(N * n);
            for (int i = 0; i < N; ++i) {
                const ConstraintSet& set = strategy_box ? *strategy_box : spec.constraints(i);
                if (set.kind() != ConstraintKind::Box || !set.is_bounded()) {
                    throw std::invalid_argument(
                        "kappa_bounds: custom family needs user bounds or a bounding box");
                }
                lo.segment(i * n, n) = set.lower();
                hi.segment(i * n, n) = set.upper();
            }
            kb.kappa1_per_agent.setConstant(std::numeric_limits<double>::infinity());
            kb.kappa2_per_agent.setZero();
            const int dim = std::min<int>(N * n, 8);
            for (int s = 0; s < 10000; ++s) {
                Vector u = halton_point(s, dim, seed);
                Vector x(N * n);
                for (int k = 0; k < N * n; ++k) {
                    const double t = u(k % dim);
                    x(k) = lo(k) + t * (hi(k) - lo(k));
                }
                const Vector z = neighbor_aggregate(spec, x);
                for (int i = 0; i < N; ++i) {
                    const Matrix D = cu.own_hessian(i, x.segment(i * n, n), z.segment(i * n, n));
                    const Matrix K = cu.cross_hessian(i, x.segment(i * n, n), z.segment(i * n, n));
                    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (D + D.transpose()),
                                                             Eigen::EigenvaluesOnly);
                    kb.kappa1_per_agent(i) = std::min(kb.kappa1_per_agent(i), es.eigenvalues()(0));
                    kb.kappa2_per_agent(i) = std::max(kb.kappa2_per_agent(i), spectral_norm_of(K));
                }
            }
            kb.exactness = KappaExactness::Sampled;
        }
    }

    kb.kappa1 = kb.kappa1_per_agent.minCoeff();
    kb.kappa2 = kb.kappa2_per_agent.maxCoeff();
    return kb;
}

}  // namespace netgames
