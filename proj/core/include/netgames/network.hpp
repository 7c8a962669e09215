#ifndef NETGAMES_NETWORK_HPP
#define NETGAMES_NETWORK_HPP

#include <Eigen/Dense>

#include <optional>
#include <string>

namespace netgames {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Default absolute tolerance for deciding whether a network is symmetric.
/// Generators produce exact symmetry; user matrices may carry parsing roundoff.
inline constexpr double kDefaultSymTol = 1e-12;

/// Relative accuracy target of the dense eigenvalue/singular value routines.
/// Certificate margins are reported with this uncertainty attached.
inline constexpr double kEigTol = 1e-10;

/// Weighted directed influence network: entry (i, j) is the influence of
/// agent j on agent i. Entries are non-negative, the diagonal is zero.
/// Immutable after construction; all queries are pure.
class Network {
public:
    /// Validates and takes ownership of an explicit weight matrix.
    /// Throws std::invalid_argument naming the offending entry on a
    /// non-square matrix, a negative entry or a nonzero diagonal entry.
    static Network from_weights(Matrix weights);

    /// Complete graph on n agents: all off-diagonal entries equal `weight`.
    static Network complete(int n_agents, double weight = 1.0);

    /// Undirected cycle: agent i is influenced by its two ring neighbours.
    static Network undirected_ring(int n_agents, double weight = 1.0);

    /// Complete bipartite network with `left` + `right` agents.
    static Network bipartite_complete(int left, int right, double weight = 1.0);

    /// Asymmetric directed network where every agent has exactly `degree`
    /// in-neighbours. Agents 1..degree act as mutually connected hubs that
    /// influence everybody; hub k additionally listens to peripheral agent
    /// degree + k. Requires n_agents >= 2 * degree. For (4, 2) the spectral
    /// norm is sqrt(3 + sqrt 5) ~ 2.2882 while the infinity norm stays at 2.
    static Network directed_regular(int n_agents, int degree, double weight = 1.0);

    /// Star directed out of agent 1: every other agent is influenced by
    /// agent 1, agent 1 is influenced by nobody.
    static Network asymmetric_star(int n_agents, double weight = 1.0);

    /// One dominant agent (weight `strong` on the first column) and weak
    /// mutual influence `weak` everywhere else off the diagonal.
    static Network trend_setter(int n_agents = 4, double strong = 1.0, double weak = 0.1);

    int n_agents() const { return static_cast<int>(weights_.rows()); }
    const Matrix& weights() const { return weights_; }

    /// Entrywise max |G - G^T|; zero for symmetric networks.
    double asymmetry() const;
    bool is_symmetric(double tol = kDefaultSymTol) const { return asymmetry() <= tol; }

    /// Kronecker lift G (x) I_n acting on stacked n-dimensional strategies.
    Matrix influence_operator(int strategy_dim) const;

private:
    explicit Network(Matrix weights) : weights_(std::move(weights)) {}
    Matrix weights_;
};

/// The three network measures driving every certificate, cached together.
struct SpectralMeasures {
    double spectral_norm = 0.0;                ///< ||G||_2
    double infinity_norm = 0.0;                ///< ||G||_inf, max row sum
    std::optional<double> min_eigenvalue;      ///< lambda_min(G), symmetric case only
    bool is_symmetric = false;
};

/// ||G||_2 = sqrt(lambda_max(G^T G)), via singular values.
double spectral_norm(const Network& net);

/// Exact maximum row sum (entries are non-negative).
double infinity_norm(const Network& net);

/// lambda_min of (G + G^T)/2 for a network symmetric within sym_tol.
/// Strictly negative for every non-zero symmetric network.
/// Throws std::invalid_argument when the asymmetry exceeds sym_tol.
double min_eigenvalue(const Network& net, double sym_tol = kDefaultSymTol);

SpectralMeasures spectral_measures(const Network& net, double sym_tol = kDefaultSymTol);

/// Declarative description of a network, as it appears in config files.
struct NetworkSpec {
    std::string kind;           ///< complete | undirected_ring | bipartite_complete |
                                ///< directed_regular | asymmetric_star | trend_setter | explicit
    int n = 0;
    int degree = 2;             ///< directed_regular
    int left = 0, right = 0;    ///< bipartite_complete
    double weight = 1.0;
    double strong = 1.0, weak = 0.1;  ///< trend_setter
    Matrix explicit_weights;    ///< kind == "explicit"
};

/// Builds the network described by `spec`; validation errors from the
/// generators propagate unchanged.
Network make_network(const NetworkSpec& spec);

}  // namespace netgames

#endif
