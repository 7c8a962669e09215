#include "netgames/game.hpp"

#include "doctest.h"
#include "support.hpp"

#include <random>

using namespace netgames;
using namespace netgames::testing;

namespace {

Network two_agent_swap() {
    Matrix g(2, 2);
    g << 0, 1, 1, 0;
    return Network::from_weights(g);
}

}  // namespace

TEST_CASE("neighbor aggregate") {
    SUBCASE("complete N=3 row sums") {
        GameSpec spec = lq_scalar_homogeneous(Network::complete(3), 0.0, 0.0);
        Vector x(3);
        x << 1, 2, 3;
        const Vector z = neighbor_aggregate(spec, x);
        CHECK(z(0) == 5.0);
        CHECK(z(1) == 4.0);
        CHECK(z(2) == 3.0);
    }
    SUBCASE("zero profile gives zero aggregate") {
        GameSpec spec = lq_scalar_homogeneous(Network::complete(4), 0.5, 1.0);
        CHECK(neighbor_aggregate(spec, Vector::Zero(4)).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("two-agent swap") {
        GameSpec spec = lq_scalar_homogeneous(two_agent_swap(), 0.5, 1.0);
        Vector x(2);
        x << 3, 7;
        const Vector z = neighbor_aggregate(spec, x);
        CHECK(z(0) == 7.0);
        CHECK(z(1) == 3.0);
    }
    SUBCASE("dimension mismatch throws") {
        GameSpec spec = lq_scalar_homogeneous(Network::complete(3), 0.0, 0.0);
        CHECK_THROWS_AS(neighbor_aggregate(spec, Vector::Zero(4)), std::invalid_argument);
    }
}

TEST_CASE("jacobian of the two-agent scalar game") {
    GameSpec spec = lq_scalar_homogeneous(two_agent_swap(), 0.5, 0.0);
    Vector x(2);
    x << 1, 1;
    const JacobianEval eval = evaluate_jacobian(spec, x);
    CHECK(eval.F(0) == doctest::Approx(1.5));
    CHECK(eval.F(1) == doctest::Approx(1.5));
    Matrix expected(2, 2);
    expected << 1, 0.5, 0.5, 1;
    CHECK((eval.gradF - expected).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((fd_jacobian(spec, x) - eval.gradF).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("gradF reconstructs as blkdiag(D) + blkdiag(K) (G kron I)") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int N = 3, n = 2;
    Matrix g = Matrix::Zero(N, N);
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) {
            if (i != j) g(i, j) = unit(rng);
        }
    }
    LinearQuadraticFamily fam;
    for (int i = 0; i < N; ++i) {
        Matrix m = Matrix::Random(n, n);
        fam.Q.push_back(m * m.transpose() + 2.0 * Matrix::Identity(n, n));
        fam.K.push_back(Matrix::Random(n, n));
        fam.a.push_back(Vector::Random(n));
    }
    GameSpec spec(Network::from_weights(g), fam, {ConstraintSet::unconstrained(n)});
    const Vector x = Vector::Random(N * n);
    const JacobianEval eval = evaluate_jacobian(spec, x);

    Matrix blkD = Matrix::Zero(N * n, N * n), blkK = Matrix::Zero(N * n, N * n);
    for (int i = 0; i < N; ++i) {
        blkD.block(i * n, i * n, n, n) = eval.D_blocks[i];
        blkK.block(i * n, i * n, n, n) = eval.K_blocks[i];
    }
    const Matrix rebuilt = blkD + blkK * spec.network().influence_operator(n);
    CHECK((eval.gradF - rebuilt).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("finite differences validate gradF for every family") {
    std::mt19937_64 rng(99);

    SUBCASE("races") {
        GameSpec spec = races_builtin(Network::complete(3), 0.4, 1.0, 5.0);
        for (int t = 0; t < 5; ++t) {
            const Vector x = random_box_profile(rng, Vector::Constant(3, 1.0), Vector::Constant(3, 5.0));
            const JacobianEval eval = evaluate_jacobian(spec, x);
            const Matrix fd = fd_jacobian(spec, x);
            CHECK((fd - eval.gradF).cwiseAbs().maxCoeff() <
                  1e-4 * std::max(1.0, eval.gradF.norm()));
        }
    }
    SUBCASE("multi-activity") {
        GameSpec spec = multi_activity(Network::complete(3), Vector::Constant(3, 1.0),
                                       Vector::Constant(3, 0.8), Vector::Constant(3, 0.2), 0.15, 0.05,
                                       2.0, 3.0);
        for (int t = 0; t < 5; ++t) {
            const Vector x = random_box_profile(rng, Vector::Zero(6), Vector::Constant(6, 1.2));
            const JacobianEval eval = evaluate_jacobian(spec, x);
            CHECK((fd_jacobian(spec, x) - eval.gradF).cwiseAbs().maxCoeff() < 1e-4);
        }
    }
    SUBCASE("custom") {
        CustomFamily fam;
        fam.strategy_dim = 1;
        fam.grad = [](int, const Vector& xi, const Vector& zi) {
            return Vector::Constant(1, 2.0 * xi(0) + std::sin(zi(0)));
        };
        fam.own_hessian = [](int, const Vector&, const Vector&) { return Matrix::Constant(1, 1, 2.0); };
        fam.cross_hessian = [](int, const Vector&, const Vector& zi) {
            return Matrix::Constant(1, 1, std::cos(zi(0)));
        };
        GameSpec spec(Network::complete(3, 0.5), fam, {ConstraintSet::nonneg(1)});
        const Vector x = random_box_profile(rng, Vector::Zero(3), Vector::Constant(3, 2.0));
        const JacobianEval eval = evaluate_jacobian(spec, x);
        CHECK((fd_jacobian(spec, x) - eval.gradF).cwiseAbs().maxCoeff() < 1e-4);
    }
}

TEST_CASE("races cross blocks at a symmetric interior profile") {
    // Row-stochastic network: all K blocks equal -gamma (b - 2 xbar).
    const double gamma = 0.3, a = 1.0, b = 5.0;
    GameSpec spec = races_builtin(two_agent_swap(), gamma, a, b);
    const double xbar = 2.5;
    const Vector x = Vector::Constant(2, xbar);
    const JacobianEval eval = evaluate_jacobian(spec, x);
    for (const Matrix& K : eval.K_blocks) {
        CHECK(K(0, 0) == doctest::Approx(-gamma * (b - 2.0 * xbar)).epsilon(1e-12));
    }
}

TEST_CASE("best responses") {
    SUBCASE("linear quadratic boundary clamp") {
        GameSpec spec = lq_scalar_homogeneous(two_agent_swap(), 0.5, 1.0);
        const Vector br = best_response(spec, 0, Vector::Constant(1, 2.0));
        CHECK(br(0) == 0.0);  // max(0, 1 - 0.5*2)
    }
    SUBCASE("races closed form") {
        GameSpec spec = races_builtin(two_agent_swap(), 0.4, 1.0, 5.0);
        const Vector br = best_response(spec, 0, Vector::Constant(1, 2.5));
        CHECK(br(0) == doctest::Approx(3.5).epsilon(1e-12));
        // Cross-check against grid minimization of the cost.
        const double grid = grid_minimize_cost(spec, 0, 2.5, 1.0, 5.0, 40001);
        CHECK(br(0) == doctest::Approx(grid).epsilon(1e-3));
    }
    SUBCASE("races upper clamp") {
        GameSpec spec = races_builtin(two_agent_swap(), 1.0, 1.0, 5.0);
        const Vector br = best_response(spec, 0, Vector::Constant(1, 2.5));
        CHECK(br(0) == 5.0);  // 1 + 1*2.5*2.5 = 7.25, clipped at b
    }
    SUBCASE("multi-activity with an active budget face") {
        GameSpec spec = multi_activity(two_agent_swap(), Vector::Constant(2, 2.0),
                                       Vector::Constant(2, 2.0), Vector::Constant(2, 0.1), 0.2, 0.0,
                                       2.0, 1.5);
        const Vector z = Vector::Constant(2, 0.5);
        const Vector br = best_response(spec, 0, z);
        CHECK(br(0) + br(1) == doctest::Approx(1.5).epsilon(1e-9));

        // Oracle: enumerate active-set candidates of the 2-d program directly.
        const Matrix Q = spec.own_quadratic(0);
        Matrix K(2, 2);
        K << -0.2, 0.0, 0.0, -0.2;
        Vector a(2);
        a << 2.0, 2.0;
        const Vector c = a - K * z;
        double best_cost = std::numeric_limits<double>::infinity();
        Vector best(2);
        const int steps = 1501;
        for (int i = 0; i < steps; ++i) {
            for (int j = 0; j < steps; ++j) {
                Vector y(2);
                y << 2.0 * i / (steps - 1), 2.0 * j / (steps - 1);
                if (y.sum() > 1.5) continue;
                const double cost = 0.5 * y.dot(Q * y) - c.dot(y);
                if (cost < best_cost) {
                    best_cost = cost;
                    best = y;
                }
            }
        }
        CHECK((br - best).cwiseAbs().maxCoeff() < 2e-3);
    }
}

TEST_CASE("best response satisfies the minimum principle") {
    std::mt19937_64 rng(123);
    GameSpec spec = multi_activity(Network::complete(3), Vector::Constant(3, 1.5),
                                   Vector::Constant(3, 1.0), Vector::Constant(3, -0.3), 0.2, 0.1, 2.0,
                                   3.0);
    for (int trial = 0; trial < 10; ++trial) {
        const Vector z = random_box_profile(rng, Vector::Zero(2), Vector::Constant(2, 3.0));
        const Vector br = best_response(spec, 0, z);
        REQUIRE(spec.constraints(0).contains(br, 1e-8));
        // F^i at the best response must not decrease toward any feasible point.
        Matrix K(2, 2);
        K << -0.2, -0.1, -0.1, -0.2;
        Vector a(2);
        a << 1.5, 1.0;
        const Vector f = spec.own_quadratic(0) * br + K * z - a;
        for (int s = 0; s < 30; ++s) {
            Vector y = random_box_profile(rng, Vector::Zero(2), Vector::Constant(2, 1.6));
            if (!spec.constraints(0).contains(y, 0.0)) continue;
            CHECK(f.dot(y - br) >= -1e-8);
        }
    }
}

TEST_CASE("best response equals the weighted projection formula") {
    std::mt19937_64 rng(77);
    const int N = 3, n = 2;
    LinearQuadraticFamily fam;
    for (int i = 0; i < N; ++i) {
        Matrix m = Matrix::Random(n, n);
        fam.Q.push_back(m * m.transpose() + 1.5 * Matrix::Identity(n, n));
        fam.K.push_back(0.3 * Matrix::Random(n, n));
        fam.a.push_back(Vector::Random(n));
    }
    GameSpec spec(Network::complete(N), fam,
                  {ConstraintSet::box(Vector::Zero(n), Vector::Constant(n, 1.0))});
    for (int trial = 0; trial < 10; ++trial) {
        const Vector x = random_box_profile(rng, Vector::Zero(N * n), Vector::Ones(N * n));
        const Vector z = neighbor_aggregate(spec, x);
        for (int i = 0; i < N; ++i) {
            const Vector zi = z.segment(i * n, n);
            const Vector xi = x.segment(i * n, n);
            const Vector fi = fam.Q[i] * xi + fam.K[i] * zi - fam.a[i];
            const Vector proj = spec.constraints(i).project_weighted(
                xi - fam.Q[i].ldlt().solve(fi), fam.Q[i]);
            const Vector br = best_response(spec, i, zi);
            CHECK((proj - br).cwiseAbs().maxCoeff() < 1e-9);
        }
    }
}

TEST_CASE("D blocks are symmetric for the built-in families") {
    GameSpec lq = lq_scalar_homogeneous(Network::complete(4), 0.5, 1.0);
    GameSpec rc = races_builtin(Network::complete(4, 1.0 / 3.0), 0.4, 1.0, 5.0);
    GameSpec ma = multi_activity(Network::complete(4), Vector::Constant(4, 1.0),
                                 Vector::Constant(4, 1.0), Vector::Constant(4, 0.4), 0.1, 0.05, 2.0,
                                 3.0);
    for (const GameSpec* spec : {&lq, &rc, &ma}) {
        const Vector x = spec->project_profile(Vector::Ones(spec->profile_dim()));
        const JacobianEval eval = evaluate_jacobian(*spec, x);
        for (const Matrix& D : eval.D_blocks) {
            CHECK((D - D.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }
}

TEST_CASE("kappa bounds") {
    SUBCASE("multi-activity closed form") {
        GameSpec spec = multi_activity(Network::complete(3), Vector::Constant(3, 1.0),
                                       Vector::Constant(3, 1.0), Vector::Constant(3, 0.2), 0.3, 0.1,
                                       2.0, 3.0);
        const KappaBounds kb = kappa_bounds(spec);
        CHECK(kb.kappa1 == doctest::Approx(0.8).epsilon(1e-12));
        CHECK(kb.kappa2 == doctest::Approx(0.4).epsilon(1e-12));
        CHECK(kb.exactness == KappaExactness::Exact);
    }
    SUBCASE("homogeneous scalar linear quadratic") {
        GameSpec spec = lq_scalar_homogeneous(Network::complete(4), 0.5, 1.0);
        const KappaBounds kb = kappa_bounds(spec);
        CHECK(kb.kappa1 == doctest::Approx(1.0));
        CHECK(kb.kappa2 == doctest::Approx(0.5));
    }
    SUBCASE("races built-in quadratic interaction") {
        GameSpec spec = races_builtin(two_agent_swap(), 0.2, 1.0, 5.0);
        const KappaBounds kb = kappa_bounds(spec);
        CHECK(kb.kappa2 == doctest::Approx(1.0).epsilon(1e-12));  // gamma * b
        CHECK(kb.kappa1 == 1.0);
    }
    SUBCASE("custom family needs bounds or a box") {
        CustomFamily fam;
        fam.strategy_dim = 1;
        fam.grad = [](int, const Vector& xi, const Vector&) { return xi; };
        fam.own_hessian = [](int, const Vector&, const Vector&) { return Matrix::Identity(1, 1); };
        fam.cross_hessian = [](int, const Vector&, const Vector&) { return Matrix::Zero(1, 1); };
        GameSpec spec(Network::complete(2), fam, {ConstraintSet::nonneg(1)});
        CHECK_THROWS_AS(kappa_bounds(spec), std::invalid_argument);
        const KappaBounds kb = kappa_bounds(
            spec, ConstraintSet::box(Vector::Zero(1), Vector::Ones(1)));
        CHECK(kb.exactness == KappaExactness::Sampled);
        CHECK(kb.kappa1 == doctest::Approx(1.0));
    }
}

TEST_CASE("races family rejects bad bounds and enforces boxes") {
    RacesFamily fam;
    fam.lower = Vector::Constant(2, 2.0);
    fam.upper = Vector::Constant(2, 1.0);
    fam.gamma = 0.5;
    CHECK_THROWS_AS(GameSpec(two_agent_swap(), fam, {ConstraintSet::nonneg(1)}),
                    std::invalid_argument);

    GameSpec spec = races_builtin(two_agent_swap(), 0.5, 1.0, 5.0);
    CHECK(spec.constraints(0).kind() == ConstraintKind::Box);
    CHECK(spec.constraints(0).lower()(0) == 1.0);
    CHECK(spec.constraints(0).upper()(0) == 5.0);
}
