#include "netgames/diagnostics.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace netgames {

namespace {

double margin_uncertainty(const KappaBounds& kb, const SpectralMeasures& sm) {
    const double scale = std::max({1.0, std::abs(kb.kappa1), kb.kappa2 * sm.infinity_norm});
    return kEigTol * scale;
}

Eigen::SelfAdjointEigenSolver<Matrix> sym_eigs(const Matrix& A) {
    return Eigen::SelfAdjointEigenSolver<Matrix>(0.5 * (A + A.transpose()));
}

/// Interior profile used to evaluate constant gradients and as the anchor of
/// sampled probes: projection of zero, nudged off the boundary.
Vector probe_point(const GameSpec& spec) {
    Vector x = spec.project_profile(Vector::Zero(spec.profile_dim()));
    return x;
}

bool kappas_certifying(const KappaBounds& kb) { return kb.exactness != KappaExactness::Sampled; }

bool affine_gradient(const GameSpec& spec) { return spec.lq() != nullptr || spec.multi_activity() != nullptr; }

/// Per-profile sampling box for games without bounded sets: box constraints
/// are used directly, unbounded coordinates are clamped to [lo, lo + 10].
std::pair<Vector, Vector> sampling_box(const GameSpec& spec) {
    const int N = spec.n_agents();
    const int n = spec.strategy_dim();
    Vector lo(N * n), hi(N * n);
    for (int i = 0; i < N; ++i) {
        const ConstraintSet& set = spec.constraints(i);
        for (int k = 0; k < n; ++k) {
            double l = 0.0, u = 10.0;
            if (set.kind() == ConstraintKind::Box || set.kind() == ConstraintKind::NonNegOrthant) {
                l = set.lower()(k);
                u = set.upper()(k);
            } else if (set.kind() == ConstraintKind::Unconstrained) {
                l = -10.0;
            }
            if (!std::isfinite(l)) l = -10.0;
            if (!std::isfinite(u)) u = l + 10.0;
            lo(i * n + k) = l;
            hi(i * n + k) = u;
        }
    }
    return {lo, hi};
}

}  // namespace

AlphaMargins alpha_margins(const KappaBounds& kb, const SpectralMeasures& sm) {
    AlphaMargins m;
    m.alpha_2 = kb.kappa1 - kb.kappa2 * sm.spectral_norm;
    m.alpha_inf = kb.kappa1 - kb.kappa2 * sm.infinity_norm;
    if (sm.min_eigenvalue) m.alpha_min = kb.kappa1 - kb.kappa2 * std::abs(*sm.min_eigenvalue);
    m.uncertainty = margin_uncertainty(kb, sm);
    return m;
}

std::string to_string(Outcome o) {
    switch (o) {
        case Outcome::Certified: return "certified";
        case Outcome::Refuted: return "refuted";
        case Outcome::Inconclusive: return "inconclusive";
        case Outcome::NotApplicable: return "not applicable";
    }
    return "?";
}

std::string to_string(GuaranteeTag tag) {
    switch (tag) {
        case GuaranteeTag::SpectralMarginMonotonicity: return "spectral-margin-monotonicity";
        case GuaranteeTag::MinEigenMarginMonotonicity: return "min-eigenvalue-margin-monotonicity";
        case GuaranteeTag::AffineExactMonotonicity: return "affine-exact-monotonicity";
        case GuaranteeTag::SampledMonotonicityProbe: return "sampled-monotonicity-probe";
        case GuaranteeTag::SpectralMarginPUpsilon: return "spectral-margin-p-upsilon";
        case GuaranteeTag::InfinityMarginPUpsilon: return "infinity-margin-p-upsilon";
        case GuaranteeTag::UpsilonPrincipalMinors: return "upsilon-principal-minors";
        case GuaranteeTag::ScalarSubstitutesUniformP: return "scalar-substitutes-uniform-p";
        case GuaranteeTag::ScalarSubstitutesPFunction: return "scalar-substitutes-p-function";
        case GuaranteeTag::DiagonalScalingUniformP: return "diagonal-scaling-uniform-p";
        case GuaranteeTag::UniqueViaStrongMonotonicity: return "unique-via-strong-monotonicity";
        case GuaranteeTag::UniqueViaBlockPFunction: return "unique-via-block-p-function";
        case GuaranteeTag::UniqueViaUniformPFunction: return "unique-via-uniform-p-function";
        case GuaranteeTag::ContinuousBrStrongMonotonicity: return "continuous-br-strong-monotonicity";
        case GuaranteeTag::ContinuousBrBlockContraction: return "continuous-br-block-contraction";
        case GuaranteeTag::SequentialBrExactPotential: return "sequential-br-exact-potential";
        case GuaranteeTag::DiscreteBrBlockContraction: return "discrete-br-block-contraction";
        case GuaranteeTag::LipschitzBlockPFunction: return "lipschitz-block-p-function";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// P-matrix test

namespace {

/// det of the principal submatrix indexed by rows, with a Hadamard-scaled
/// positivity threshold so near-singular minors count as failures.
std::pair<double, double> principal_minor(const Matrix& A, const std::vector<int>& rows) {
    const int k = static_cast<int>(rows.size());
    Matrix S(k, k);
    for (int r = 0; r < k; ++r) {
        for (int c = 0; c < k; ++c) S(r, c) = A(rows[r], rows[c]);
    }
    double hadamard = 1.0;
    for (int r = 0; r < k; ++r) hadamard *= std::max(S.row(r).norm(), 1e-300);
    const double det = k == 1 ? S(0, 0) : Eigen::PartialPivLU<Matrix>(S).determinant();
    return {det, 1e-13 * std::max(hadamard, 1.0)};
}

bool is_z_matrix(const Matrix& A) {
    for (int i = 0; i < A.rows(); ++i) {
        for (int j = 0; j < A.cols(); ++j) {
            if (i != j && A(i, j) > 1e-14) return false;
        }
    }
    return true;
}

}  // namespace

PMatrixVerdict is_p_matrix(const Matrix& A) {
    if (A.rows() != A.cols()) throw std::invalid_argument("is_p_matrix: matrix must be square");
    const int d = static_cast<int>(A.rows());
    PMatrixVerdict v;

    if (d <= kPMatrixExactDim) {
        // Exact enumeration of all 2^d - 1 principal minors, smallest first.
        for (int size = 1; size <= d; ++size) {
            std::vector<int> idx(size);
            for (int k = 0; k < size; ++k) idx[k] = k;
            while (true) {
                auto [det, tol] = principal_minor(A, idx);
                if (det <= tol) {
                    v.outcome = Outcome::Refuted;
                    v.exact = true;
                    v.failing_minor = idx;
                    v.failing_det = det;
                    v.method = "principal minor enumeration";
                    return v;
                }
                int k = size - 1;
                while (k >= 0 && idx[k] == d - size + k) --k;
                if (k < 0) break;
                ++idx[k];
                for (int m = k + 1; m < size; ++m) idx[m] = idx[m - 1] + 1;
            }
        }
        v.outcome = Outcome::Certified;
        v.exact = true;
        v.method = "principal minor enumeration";
        return v;
    }

    // Z-matrices: P-matrix iff M-matrix iff all leading principal minors positive.
    if (is_z_matrix(A)) {
        std::vector<int> idx;
        for (int k = 0; k < d; ++k) {
            idx.push_back(k);
            auto [det, tol] = principal_minor(A, idx);
            if (det <= tol) {
                v.outcome = Outcome::Refuted;
                v.exact = true;
                v.failing_minor = idx;
                v.failing_det = det;
                v.method = "Z-matrix leading minors";
                return v;
            }
        }
        v.outcome = Outcome::Certified;
        v.exact = true;
        v.method = "Z-matrix leading minors";
        return v;
    }

    // Positive definite symmetric part is sufficient.
    Eigen::SelfAdjointEigenSolver<Matrix> es = sym_eigs(A);
    if (es.eigenvalues()(0) > kEigTol * std::max(1.0, A.norm())) {
        v.outcome = Outcome::Certified;
        v.exact = false;
        v.method = "positive definite symmetric part";
        return v;
    }

    // Sampled refutation: deterministic sweep over random-ish index subsets.
    std::uint64_t state = 0x9e3779b97f4a7c15ull;
    auto next = [&state]() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return state;
    };
    for (int trial = 0; trial < 4096; ++trial) {
        std::vector<int> idx;
        for (int k = 0; k < d; ++k) {
            if (next() & 1u) idx.push_back(k);
        }
        if (idx.empty()) continue;
        auto [det, tol] = principal_minor(A, idx);
        if (det <= tol) {
            v.outcome = Outcome::Refuted;
            v.exact = false;
            v.failing_minor = idx;
            v.failing_det = det;
            v.method = "sampled principal minors";
            return v;
        }
    }
    v.outcome = Outcome::Inconclusive;
    v.method = "dimension above exact enumeration cap";
    return v;
}

// ---------------------------------------------------------------------------
// Upsilon and the P_Upsilon condition

Matrix build_upsilon(const GameSpec& spec, const KappaBounds& kb) {
    const int N = spec.n_agents();
    const Matrix& G = spec.network().weights();
    Matrix u(N, N);
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) {
            u(i, j) = (i == j) ? kb.kappa1_per_agent(i) : -kb.kappa2_per_agent(i) * G(i, j);
        }
    }
    return u;
}

Verdict check_p_upsilon(const GameSpec& spec, const KappaBounds& kb, const SpectralMeasures& sm) {
    Verdict v;
    if (!kappas_certifying(kb)) {
        v.outcome = Outcome::Inconclusive;
        v.detail = "kappa bounds are sampled, verdict would not certify";
        return v;
    }
    // Diagonal blocks must be symmetric positive definite; built-in families
    // guarantee this through their invariants, custom games are probed once.
    if (spec.custom() != nullptr) {
        const JacobianEval eval = evaluate_jacobian(spec, probe_point(spec));
        for (const Matrix& D : eval.D_blocks) {
            Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (D + D.transpose()), Eigen::EigenvaluesOnly);
            if (es.eigenvalues()(0) <= 0.0) {
                v.outcome = Outcome::NotApplicable;
                v.detail = "own-Hessian block not positive definite at probe point";
                return v;
            }
        }
    }

    const AlphaMargins m = alpha_margins(kb, sm);
    if (m.alpha_2 > m.uncertainty) {
        v.outcome = Outcome::Certified;
        v.route = GuaranteeTag::SpectralMarginPUpsilon;
        v.constant = m.alpha_2;
        v.detail = "alpha_2 > 0";
        return v;
    }
    if (m.alpha_inf > m.uncertainty) {
        v.outcome = Outcome::Certified;
        v.route = GuaranteeTag::InfinityMarginPUpsilon;
        v.constant = m.alpha_inf;
        v.detail = "alpha_inf > 0";
        return v;
    }

    const PMatrixVerdict pm = is_p_matrix(build_upsilon(spec, kb));
    v.route = GuaranteeTag::UpsilonPrincipalMinors;
    if (pm.outcome == Outcome::Certified) {
        v.outcome = Outcome::Certified;
        v.detail = "Upsilon is a P-matrix (" + pm.method + ")";
    } else if (pm.outcome == Outcome::Refuted) {
        v.outcome = Outcome::Refuted;
        Vector w = Vector::Zero(spec.n_agents());
        for (int k : pm.failing_minor) w(k) = 1.0;
        v.witness = w;
        v.detail = "Upsilon principal minor is non-positive (det " + std::to_string(pm.failing_det) + ")";
    } else {
        v.outcome = Outcome::Inconclusive;
        v.detail = pm.method;
    }
    return v;
}

// ---------------------------------------------------------------------------
// Strong monotonicity

Verdict check_strong_monotonicity(const GameSpec& spec, const SpectralMeasures& sm,
                                  const KappaBounds& kb, std::uint64_t seed) {
    Verdict v;
    const AlphaMargins m = alpha_margins(kb, sm);

    if (kappas_certifying(kb) && m.alpha_2 > m.uncertainty) {
        v.outcome = Outcome::Certified;
        v.route = GuaranteeTag::SpectralMarginMonotonicity;
        v.constant = m.alpha_2;
        v.detail = "alpha_2 > 0";
        return v;
    }

    // Symmetric network with a common positive semidefinite cross block:
    // alpha_min is a valid monotonicity constant. Decidable exactly for the
    // affine families, where the cross blocks are constant matrices.
    if (kappas_certifying(kb) && sm.is_symmetric && m.alpha_min && *m.alpha_min > m.uncertainty &&
        affine_gradient(spec)) {
        const JacobianEval eval = evaluate_jacobian(spec, probe_point(spec));
        bool common = true;
        for (int i = 1; i < spec.n_agents() && common; ++i) {
            if ((eval.K_blocks[i] - eval.K_blocks[0]).cwiseAbs().maxCoeff() > 1e-12) common = false;
        }
        if (common) {
            Eigen::SelfAdjointEigenSolver<Matrix> es = sym_eigs(eval.K_blocks[0]);
            if (es.eigenvalues()(0) >= -kEigTol * std::max(1.0, eval.K_blocks[0].norm())) {
                v.outcome = Outcome::Certified;
                v.route = GuaranteeTag::MinEigenMarginMonotonicity;
                v.constant = *m.alpha_min;
                v.detail = "symmetric network, homogeneous PSD cross blocks, alpha_min > 0";
                return v;
            }
        }
    }

    if (affine_gradient(spec)) {
        // Constant gradient: the minimum eigenvalue of the symmetrized
        // gradient decides exactly.
        const JacobianEval eval = evaluate_jacobian(spec, probe_point(spec));
        Eigen::SelfAdjointEigenSolver<Matrix> es = sym_eigs(eval.gradF);
        const double lmin = es.eigenvalues()(0);
        const double tol = kEigTol * std::max(1.0, eval.gradF.norm());
        v.route = GuaranteeTag::AffineExactMonotonicity;
        if (lmin > tol) {
            v.outcome = Outcome::Certified;
            v.constant = lmin;
            v.detail = "lambda_min of symmetrized gradient is positive";
        } else if (lmin < -tol) {
            v.outcome = Outcome::Refuted;
            v.constant = lmin;
            v.witness = es.eigenvectors().col(0);
            v.witness_point = probe_point(spec);
            v.detail = "symmetrized gradient has a negative eigenvalue";
        } else {
            v.outcome = Outcome::Inconclusive;
            v.detail = "minimum eigenvalue within tolerance of zero";
        }
        return v;
    }

    // Nonlinear families: sampled interior probe, refutations only.
    auto [lo, hi] = sampling_box(spec);
    const Vector mid = 0.5 * (lo + hi);
    const int dim = std::min<int>(spec.profile_dim(), 8);
    v.route = GuaranteeTag::SampledMonotonicityProbe;
    for (int s = 0; s < 200; ++s) {
        const Vector u = halton_point(s, dim, seed);
        Vector x(spec.profile_dim());
        for (int k = 0; k < x.size(); ++k) {
            const double t = 0.01 + 0.98 * u(k % dim);  // keep strictly interior
            x(k) = lo(k) + t * (hi(k) - lo(k));
        }
        const JacobianEval eval = evaluate_jacobian(spec, x);
        Eigen::SelfAdjointEigenSolver<Matrix> es = sym_eigs(eval.gradF);
        const double lmin = es.eigenvalues()(0);
        if (lmin < -kEigTol * std::max(1.0, eval.gradF.norm())) {
            v.outcome = Outcome::Refuted;
            v.constant = lmin;
            v.witness = es.eigenvectors().col(0);
            v.witness_point = x;
            v.detail = "negative curvature at sampled interior profile";
            return v;
        }
    }
    (void)mid;
    v.outcome = Outcome::Inconclusive;
    v.detail = "no negative curvature found at 200 sampled profiles";
    return v;
}

// ---------------------------------------------------------------------------
// Affine uniform P-matrix condition

namespace {

double scaled_min_eigenvalue(const Matrix& A, const Vector& hdiag) {
    const Matrix HA = hdiag.asDiagonal() * A;
    Eigen::SelfAdjointEigenSolver<Matrix> es(HA + HA.transpose(), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

}  // namespace

UniformPVerdict check_uniform_p_affine(const Matrix& A, const std::optional<Vector>& diagonal_hint) {
    if (A.rows() != A.cols()) throw std::invalid_argument("check_uniform_p_affine: matrix must be square");
    const int d = static_cast<int>(A.rows());
    const double tol = kEigTol * std::max(1.0, A.norm());
    UniformPVerdict v;

    const PMatrixVerdict pm = is_p_matrix(A);
    if (pm.outcome == Outcome::Refuted) {
        v.outcome = Outcome::Refuted;
        v.method = "not a P-matrix (necessary condition fails)";
        return v;
    }

    auto accept = [&](const Vector& hdiag, double lmin, const char* how) {
        v.outcome = Outcome::Certified;
        v.scaling = hdiag;
        v.eta = 0.5 * lmin;
        v.h_max = hdiag.maxCoeff();
        v.method = how;
    };

    Vector h = Vector::Ones(d);
    double lmin = scaled_min_eigenvalue(A, h);
    if (lmin > tol) {
        accept(h, lmin, "identity scaling");
        return v;
    }

    Vector best = h;
    double best_lmin = lmin;
    if (diagonal_hint && diagonal_hint->size() == d && diagonal_hint->minCoeff() > 0.0) {
        const Vector inv = diagonal_hint->cwiseInverse();
        const double l2 = scaled_min_eigenvalue(A, inv);
        if (l2 > tol) {
            accept(inv, l2, "inverse cross-weight scaling");
            return v;
        }
        if (l2 > best_lmin) {
            best = inv;
            best_lmin = l2;
        }
    }
    if (A.diagonal().minCoeff() > 0.0) {
        const Vector diag_inv = A.diagonal().cwiseInverse();
        const double l3 = scaled_min_eigenvalue(A, diag_inv);
        if (l3 > tol) {
            accept(diag_inv, l3, "inverse diagonal scaling");
            return v;
        }
        if (l3 > best_lmin) {
            best = diag_inv;
            best_lmin = l3;
        }
    }

    // Bounded coordinatewise multiplicative refinement on a log grid.
    int budget = 200;
    h = best;
    bool improved = true;
    while (improved && budget > 0) {
        improved = false;
        for (int k = 0; k < d && budget > 0; ++k) {
            for (const double factor : {2.0, 0.5}) {
                Vector trial = h;
                trial(k) *= factor;
                const double lt = scaled_min_eigenvalue(A, trial);
                --budget;
                if (lt > best_lmin) {
                    best_lmin = lt;
                    h = trial;
                    improved = true;
                }
                if (best_lmin > tol) {
                    accept(h / h.maxCoeff(), scaled_min_eigenvalue(A, h / h.maxCoeff()), "coordinate log-grid search");
                    return v;
                }
            }
        }
    }

    v.outcome = Outcome::Inconclusive;
    v.method = "diagonal scaling search exhausted (search is incomplete)";
    return v;
}

// ---------------------------------------------------------------------------
// Scalar games of strategic substitutes

Verdict check_scalar_substitutes(const GameSpec& spec, const SpectralMeasures& sm,
                                 const KappaBounds& kb) {
    Verdict v;
    if (spec.strategy_dim() != 1 || !sm.is_symmetric) {
        v.outcome = Outcome::NotApplicable;
        v.detail = "needs scalar strategies and a symmetric network";
        return v;
    }
    const AlphaMargins m = alpha_margins(kb, sm);
    const int N = spec.n_agents();

    // nu = uniform lower bound on the scalar cross weights K^i(x).
    std::optional<double> nu;
    bool positive = false;
    if (const auto* l = spec.lq()) {
        double lowest = l->K[0](0, 0);
        for (int i = 1; i < N; ++i) lowest = std::min(lowest, l->K[i](0, 0));
        nu = lowest;
        positive = lowest > 0.0;
        if (lowest < 0.0) {
            v.outcome = Outcome::NotApplicable;
            v.detail = "negative cross weight, not a game of strategic substitutes";
            return v;
        }
    } else if (const auto* r = spec.races()) {
        // K^i(x) = -phi'(z^i); built-in phi gives the exact range over the
        // reachable aggregate interval.
        if (!r->builtin()) {
            v.outcome = Outcome::Inconclusive;
            v.detail = "custom phi, cross-weight range not certified";
            return v;
        }
        double lowest = std::numeric_limits<double>::infinity();
        for (int i = 0; i < N; ++i) {
            const double zlo = spec.network().weights().row(i).dot(r->lower);
            lowest = std::min(lowest, r->gamma * (2.0 * zlo - r->upper(i)));
        }
        nu = lowest;
        positive = lowest > 0.0;
        if (!positive) {
            v.outcome = Outcome::NotApplicable;
            v.detail = "best response is not decreasing over the whole strategy set";
            return v;
        }
    } else {
        v.outcome = Outcome::Inconclusive;
        v.detail = "cross-weight positivity not decidable for this family";
        return v;
    }

    if (!m.alpha_min || !(*m.alpha_min > m.uncertainty) || !kappas_certifying(kb)) {
        v.outcome = Outcome::Inconclusive;
        v.detail = "alpha_min margin not positive";
        return v;
    }
    if (nu && *nu > kEigTol) {
        // Uniform P-function constant from the diagonal scaling H = K^{-1}:
        // eta = alpha_min / kappa2, lambda_max(H) <= 1/nu.
        v.outcome = Outcome::Certified;
        v.route = GuaranteeTag::ScalarSubstitutesUniformP;
        v.constant = (*m.alpha_min / kb.kappa2) * (*nu) / static_cast<double>(N);
        v.detail = "K^i >= " + std::to_string(*nu) + " and alpha_min = " + std::to_string(*m.alpha_min);
        return v;
    }
    if (positive) {
        v.outcome = Outcome::Certified;
        v.route = GuaranteeTag::ScalarSubstitutesPFunction;
        v.detail = "cross weights positive but not uniformly bounded away from zero";
        return v;
    }
    v.outcome = Outcome::Inconclusive;
    v.detail = "cross weights vanish somewhere (nu must be > 0)";
    return v;
}

// ---------------------------------------------------------------------------
// Potential structure

PotentialVerdict check_potential(const GameSpec& spec) {
    PotentialVerdict v;
    const auto* l = spec.lq();
    if (l == nullptr || spec.strategy_dim() != 1) {
        v.kind = PotentialVerdict::NotApplicable;
        v.detail = "potential analysis covers scalar linear quadratic games";
        return v;
    }
    const int N = spec.n_agents();
    const Matrix& G = spec.network().weights();
    auto cross = [&](int i, int j) { return l->K[i](0, 0) * G(i, j); };

    double scale = 0.0;
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) scale = std::max(scale, std::abs(cross(i, j)));
    }
    const double tol = 1e-10 * std::max(1.0, scale);

    bool exact = true;
    for (int i = 0; i < N && exact; ++i) {
        for (int j = i + 1; j < N; ++j) {
            if (std::abs(cross(i, j) - cross(j, i)) > tol) {
                exact = false;
                break;
            }
        }
    }
    if (exact) {
        v.kind = PotentialVerdict::Exact;
        return v;
    }

    // Rescaling: beta > 0 with (K^i/beta_i) G_ij = (K^j/beta_j) G_ji. The
    // ratios fix log beta differences along edges; a spanning forest assigns
    // them and closure edges must be consistent.
    Vector logbeta = Vector::Zero(N);
    std::vector<bool> assigned(N, false);
    for (int root = 0; root < N; ++root) {
        if (assigned[root]) continue;
        assigned[root] = true;
        logbeta(root) = 0.0;
        std::queue<int> queue;
        queue.push(root);
        while (!queue.empty()) {
            const int i = queue.front();
            queue.pop();
            for (int j = 0; j < N; ++j) {
                if (j == i) continue;
                const double cij = cross(i, j);
                const double cji = cross(j, i);
                if (std::abs(cij) <= tol && std::abs(cji) <= tol) continue;
                if (std::abs(cij) <= tol || std::abs(cji) <= tol || cij * cji < 0.0) {
                    v.kind = PotentialVerdict::None;
                    v.detail = "one-sided or sign-mismatched cross effect between agents " +
                               std::to_string(i + 1) + " and " + std::to_string(j + 1);
                    return v;
                }
                const double diff = std::log(cji / cij);  // log beta_j - log beta_i
                if (!assigned[j]) {
                    assigned[j] = true;
                    logbeta(j) = logbeta(i) + diff;
                    queue.push(j);
                } else if (std::abs(logbeta(j) - logbeta(i) - diff) > 1e-8) {
                    v.kind = PotentialVerdict::None;
                    v.detail = "cycle inconsistency between agents " + std::to_string(i + 1) +
                               " and " + std::to_string(j + 1);
                    return v;
                }
            }
        }
    }

    Vector beta = logbeta.array().exp();
    for (int i = 0; i < N; ++i) {
        for (int j = i + 1; j < N; ++j) {
            if (std::abs(cross(i, j) / beta(i) - cross(j, i) / beta(j)) > 1e-8 * std::max(1.0, scale)) {
                v.kind = PotentialVerdict::None;
                v.detail = "rescaled symmetry check failed";
                return v;
            }
        }
    }
    v.kind = PotentialVerdict::Rescalable;
    v.beta = beta;
    v.detail = "positive rescaling found (unique up to a positive factor)";
    return v;
}

// ---------------------------------------------------------------------------
// Certificate aggregation

bool CertificateReport::has(GuaranteeTag tag) const {
    return std::any_of(guarantees.begin(), guarantees.end(),
                       [tag](const Guarantee& g) { return g.tag == tag; });
}

namespace {

bool rectangular_strategy_space(const GameSpec& spec) {
    for (int i = 0; i < spec.n_agents(); ++i) {
        const ConstraintKind k = spec.constraints(i).kind();
        if (k == ConstraintKind::Polyhedron) return false;
    }
    return true;
}

std::optional<BlockContraction> block_contraction(const GameSpec& spec, const KappaBounds& kb) {
    const Matrix upsilon = build_upsilon(spec, kb);
    Eigen::FullPivLU<Matrix> lu(upsilon);
    if (!lu.isInvertible()) return std::nullopt;
    const Vector c = lu.solve(Vector::Ones(spec.n_agents()));
    if (c.minCoeff() <= 0.0) return std::nullopt;
    double delta = 0.0;
    const Matrix& G = spec.network().weights();
    for (int i = 0; i < spec.n_agents(); ++i) {
        const double coupling = kb.kappa2_per_agent(i) * G.row(i).dot(c);
        delta = std::max(delta, coupling / (kb.kappa1_per_agent(i) * c(i)));
    }
    if (!(delta < 1.0)) return std::nullopt;
    return BlockContraction{c, delta};
}

}  // namespace

CertificateReport certify(const GameSpec& spec, std::uint64_t seed) {
    CertificateReport rep;
    rep.spectral = spectral_measures(spec.network());
    rep.kappas = kappa_bounds(spec, std::nullopt, seed);
    rep.margins = alpha_margins(rep.kappas, rep.spectral);
    rep.strong_monotone = check_strong_monotonicity(spec, rep.spectral, rep.kappas, seed);
    rep.p_upsilon = check_p_upsilon(spec, rep.kappas, rep.spectral);
    rep.scalar_substitutes = check_scalar_substitutes(spec, rep.spectral, rep.kappas);
    rep.potential = check_potential(spec);

    if (affine_gradient(spec)) {
        const JacobianEval eval = evaluate_jacobian(spec, spec.project_profile(Vector::Zero(spec.profile_dim())));
        std::optional<Vector> hint;
        if (spec.strategy_dim() == 1) {
            Vector k(spec.n_agents());
            bool positive = true;
            for (int i = 0; i < spec.n_agents(); ++i) {
                k(i) = eval.K_blocks[i](0, 0);
                positive = positive && k(i) > 0.0;
            }
            if (positive) hint = k;
        }
        rep.uniform_p = check_uniform_p_affine(eval.gradF, hint);
    } else if (rep.scalar_substitutes.certified() &&
               rep.scalar_substitutes.route == GuaranteeTag::ScalarSubstitutesUniformP) {
        rep.uniform_p.outcome = Outcome::Certified;
        rep.uniform_p.method = "scalar substitutes certificate";
        rep.uniform_p.eta = *rep.scalar_substitutes.constant;
        rep.uniform_p.h_max = 1.0;
    } else {
        rep.uniform_p.outcome = Outcome::Inconclusive;
        rep.uniform_p.method = "non-affine gradient, general condition not decided";
    }

    if (rep.p_upsilon.certified() && kappas_certifying(rep.kappas)) {
        rep.contraction = block_contraction(spec, rep.kappas);
    }

    // eta_bar for Lipschitz bounds: a strong monotonicity constant serves
    // directly; otherwise the uniform P-function constant eta/(d h_max).
    if (rep.strong_monotone.certified() && rep.strong_monotone.constant) {
        rep.block_p_constant = *rep.strong_monotone.constant;
    } else if (rep.scalar_substitutes.certified() &&
               rep.scalar_substitutes.route == GuaranteeTag::ScalarSubstitutesUniformP) {
        rep.block_p_constant = *rep.scalar_substitutes.constant;
    } else if (rep.uniform_p.outcome == Outcome::Certified && rep.uniform_p.h_max > 0.0 &&
               rep.uniform_p.eta > 0.0) {
        rep.block_p_constant =
            rep.uniform_p.eta / (static_cast<double>(spec.profile_dim()) * rep.uniform_p.h_max);
    }

    auto add = [&rep](GuaranteeTag tag, std::string text) {
        rep.guarantees.push_back({tag, std::move(text)});
    };

    if (rep.strong_monotone.certified()) {
        add(GuaranteeTag::UniqueViaStrongMonotonicity,
            "a unique Nash equilibrium exists: the game operator is strongly monotone with constant " +
                std::to_string(*rep.strong_monotone.constant));
    }
    if (rep.p_upsilon.certified()) {
        add(GuaranteeTag::UniqueViaBlockPFunction,
            "a unique Nash equilibrium exists: the gradient satisfies the P-Upsilon condition");
        add(GuaranteeTag::DiscreteBrBlockContraction,
            "discrete best-response dynamics (simultaneous and sequential) converge globally");
        add(GuaranteeTag::ContinuousBrBlockContraction,
            "continuous best-response dynamics converge globally");
    }
    const bool uniform_scalar = rep.scalar_substitutes.certified() &&
                                rep.scalar_substitutes.route == GuaranteeTag::ScalarSubstitutesUniformP;
    if ((uniform_scalar || rep.uniform_p.outcome == Outcome::Certified) &&
        rectangular_strategy_space(spec)) {
        add(GuaranteeTag::UniqueViaUniformPFunction,
            "a unique Nash equilibrium exists: uniform P-function over a rectangular strategy space");
    }
    if (rep.strong_monotone.certified() && spec.has_projection_form()) {
        add(GuaranteeTag::ContinuousBrStrongMonotonicity,
            "continuous best-response dynamics converge globally (strongly monotone, projection-form costs)");
    }
    if (rep.potential.kind == PotentialVerdict::Exact && rep.strong_monotone.certified()) {
        add(GuaranteeTag::SequentialBrExactPotential,
            "sequential discrete best-response dynamics converge (strongly convex exact potential)");
    }
    if (rep.block_p_constant) {
        add(GuaranteeTag::LipschitzBlockPFunction,
            "the equilibrium is Lipschitz in cost parameters with modulus L / " +
                std::to_string(*rep.block_p_constant));
    }
    return rep;
}

}  // namespace netgames
