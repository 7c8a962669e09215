#ifndef NETGAMES_DIAGNOSTICS_HPP
#define NETGAMES_DIAGNOSTICS_HPP

#include "netgames/game.hpp"

#include <string>
#include <vector>

namespace netgames {

/// The three certificate margins kappa1 - kappa2 * w(G). alpha_min is absent
/// for asymmetric networks. A margin within +-uncertainty of zero is treated
/// as a non-call by every checker.
struct AlphaMargins {
    double alpha_2 = 0.0;
    double alpha_inf = 0.0;
    std::optional<double> alpha_min;
    double uncertainty = 0.0;
};

AlphaMargins alpha_margins(const KappaBounds& kb, const SpectralMeasures& sm);

enum class Outcome { Certified, Refuted, Inconclusive, NotApplicable };

std::string to_string(Outcome o);

/// Named routes behind every certified guarantee. The names describe the
/// mathematical mechanism, and reports print them verbatim.
enum class GuaranteeTag {
    SpectralMarginMonotonicity,    ///< alpha_2 > 0 forces a positive definite symmetrized gradient
    MinEigenMarginMonotonicity,    ///< symmetric net, homogeneous PSD cross blocks, alpha_min > 0
    AffineExactMonotonicity,       ///< constant gradient, exact minimum eigenvalue decision
    SampledMonotonicityProbe,      ///< sampled symmetrized-gradient eigenvalues (refutations only)
    SpectralMarginPUpsilon,        ///< alpha_2 > 0 makes Upsilon a P-matrix
    InfinityMarginPUpsilon,        ///< alpha_inf > 0, Gershgorin route
    UpsilonPrincipalMinors,        ///< direct principal-minor decision on Upsilon
    ScalarSubstitutesUniformP,     ///< n = 1, K^i >= nu > 0, alpha_min > 0
    ScalarSubstitutesPFunction,    ///< n = 1, K^i > 0, alpha_min > 0 (non-uniform)
    DiagonalScalingUniformP,       ///< affine gradient, diagonal H with HA + A'H > 0
    UniqueViaStrongMonotonicity,
    UniqueViaBlockPFunction,
    UniqueViaUniformPFunction,
    ContinuousBrStrongMonotonicity,
    ContinuousBrBlockContraction,
    SequentialBrExactPotential,
    DiscreteBrBlockContraction,
    LipschitzBlockPFunction,
};

std::string to_string(GuaranteeTag tag);

/// Verdict of a condition checker. Certified verdicts carry the constant the
/// theorem provides (monotonicity modulus, uniform-P modulus, ...); refuted
/// verdicts carry a concrete witness reproducing the violation.
struct Verdict {
    Outcome outcome = Outcome::Inconclusive;
    GuaranteeTag route = GuaranteeTag::SampledMonotonicityProbe;
    std::optional<double> constant;
    std::optional<Vector> witness;        ///< direction w with w'(gradF + gradF')w < 0
    std::optional<Vector> witness_point;  ///< profile at which the witness was found
    std::string detail;

    bool certified() const { return outcome == Outcome::Certified; }
    bool refuted() const { return outcome == Outcome::Refuted; }
};

/// P-matrix decision. Exact principal-minor enumeration up to dimension 16;
/// larger matrices fall back to sufficient conditions (positive definite
/// symmetric part, or Z-matrix with positive leading minors) and sampled
/// refutation, never a silent approximation.
struct PMatrixVerdict {
    Outcome outcome = Outcome::Inconclusive;
    bool exact = false;
    std::vector<int> failing_minor;  ///< index set (0-based) of a non-positive minor
    double failing_det = 0.0;
    std::string method;
};

PMatrixVerdict is_p_matrix(const Matrix& A);

/// Exact-enumeration cap: 2^16 - 1 principal minors.
inline constexpr int kPMatrixExactDim = 16;

/// Upsilon_{ii} = kappa1^i, Upsilon_{ij} = -kappa2^i G_{ij}. Sign information
/// of the cross blocks is lost by construction.
Matrix build_upsilon(const GameSpec& spec, const KappaBounds& kb);

Verdict check_p_upsilon(const GameSpec& spec, const KappaBounds& kb, const SpectralMeasures& sm);

Verdict check_strong_monotonicity(const GameSpec& spec, const SpectralMeasures& sm,
                                  const KappaBounds& kb, std::uint64_t seed = 0);

/// Diagonal-scaling certificate for the affine uniform P-matrix condition:
/// certified when some diagonal H > 0 gives HA + A'H > 0. Search order:
/// H = I, H = hint^{-1}, then a bounded coordinatewise log-grid refinement.
/// Refuted when A is not a P-matrix. The search is documented as incomplete.
struct UniformPVerdict {
    Outcome outcome = Outcome::Inconclusive;
    std::optional<Vector> scaling;  ///< diagonal of H
    double eta = 0.0;               ///< 1/2 lambda_min(HA + A'H)
    double h_max = 0.0;             ///< lambda_max(H), enters the uniform-P constant
    std::string method;
};

UniformPVerdict check_uniform_p_affine(const Matrix& A,
                                       const std::optional<Vector>& diagonal_hint = std::nullopt);

/// Scalar games of strategic substitutes on symmetric networks:
/// uniform P-function when K^i(x) >= nu > 0 and alpha_min > 0, plain
/// P-function when only positivity holds. NotApplicable for n > 1 or
/// asymmetric networks.
Verdict check_scalar_substitutes(const GameSpec& spec, const SpectralMeasures& sm,
                                 const KappaBounds& kb);

/// Potential structure of scalar linear quadratic games.
struct PotentialVerdict {
    enum Kind { Exact, Rescalable, None, NotApplicable } kind = NotApplicable;
    std::optional<Vector> beta;  ///< positive rescaling weights, Rescalable case
    std::string detail;
};

PotentialVerdict check_potential(const GameSpec& spec);

/// Weights of the best-response block contraction induced by a P-matrix
/// Upsilon: c = Upsilon^{-1} 1 > 0 and modulus delta < 1.
struct BlockContraction {
    Vector weights;
    double delta = 0.0;
};

struct Guarantee {
    GuaranteeTag tag;
    std::string conclusion;
};

/// Aggregate of every checker plus the equilibrium guarantees they imply.
struct CertificateReport {
    SpectralMeasures spectral;
    KappaBounds kappas;
    AlphaMargins margins;
    Verdict strong_monotone;
    Verdict p_upsilon;
    Verdict scalar_substitutes;
    UniformPVerdict uniform_p;
    PotentialVerdict potential;
    std::optional<BlockContraction> contraction;
    std::optional<double> block_p_constant;  ///< eta_bar usable in Lipschitz bounds
    std::vector<Guarantee> guarantees;

    bool has(GuaranteeTag tag) const;
};

CertificateReport certify(const GameSpec& spec, std::uint64_t seed = 0);

}  // namespace netgames

#endif
