#include "netgames/network.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <stdexcept>

namespace netgames {

namespace {

std::string entry_name(int i, int j) {
    return "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
}

}  // namespace

Network Network::from_weights(Matrix weights) {
    if (weights.rows() != weights.cols()) {
        throw std::invalid_argument("network matrix must be square, got " +
                                    std::to_string(weights.rows()) + "x" +
                                    std::to_string(weights.cols()));
    }
    if (weights.rows() < 1) {
        throw std::invalid_argument("network needs at least one agent");
    }
    for (int i = 0; i < weights.rows(); ++i) {
        for (int j = 0; j < weights.cols(); ++j) {
            const double w = weights(i, j);
            if (!std::isfinite(w)) {
                throw std::invalid_argument("non-finite weight at entry " + entry_name(i, j));
            }
            if (w < 0.0) {
                throw std::invalid_argument("negative weight at entry " + entry_name(i, j) +
                                            "; mixed-sign networks are not supported");
            }
            if (i == j && w != 0.0) {
                throw std::invalid_argument("nonzero diagonal at entry " + entry_name(i, j));
            }
        }
    }
    return Network(std::move(weights));
}

Network Network::complete(int n_agents, double weight) {
    if (n_agents < 1) throw std::invalid_argument("complete: need n_agents >= 1");
    Matrix w = Matrix::Constant(n_agents, n_agents, weight);
    w.diagonal().setZero();
    return from_weights(std::move(w));
}

Network Network::undirected_ring(int n_agents, double weight) {
    if (n_agents < 3) throw std::invalid_argument("undirected_ring: need n_agents >= 3");
    Matrix w = Matrix::Zero(n_agents, n_agents);
    for (int i = 0; i < n_agents; ++i) {
        w(i, (i + 1) % n_agents) = weight;
        w(i, (i + n_agents - 1) % n_agents) = weight;
    }
    return from_weights(std::move(w));
}

Network Network::bipartite_complete(int left, int right, double weight) {
    if (left < 1 || right < 1) throw std::invalid_argument("bipartite_complete: both sides need agents");
    const int n = left + right;
    Matrix w = Matrix::Zero(n, n);
    w.topRightCorner(left, right).setConstant(weight);
    w.bottomLeftCorner(right, left).setConstant(weight);
    return from_weights(std::move(w));
}

Network Network::directed_regular(int n_agents, int degree, double weight) {
    if (degree < 1) throw std::invalid_argument("directed_regular: need degree >= 1");
    if (n_agents < 2 * degree) {
        throw std::invalid_argument("directed_regular: need n_agents >= 2*degree");
    }
    Matrix w = Matrix::Zero(n_agents, n_agents);
    // Periphery listens to all hubs, hub k to the other hubs plus peripheral degree+k.
    for (int i = degree; i < n_agents; ++i) {
        for (int h = 0; h < degree; ++h) w(i, h) = weight;
    }
    for (int h = 0; h < degree; ++h) {
        for (int g = 0; g < degree; ++g) {
            if (g != h) w(h, g) = weight;
        }
        w(h, degree + h) = weight;
    }
    return from_weights(std::move(w));
}

Network Network::asymmetric_star(int n_agents, double weight) {
    if (n_agents < 2) throw std::invalid_argument("asymmetric_star: need n_agents >= 2");
    Matrix w = Matrix::Zero(n_agents, n_agents);
    w.col(0).tail(n_agents - 1).setConstant(weight);
    return from_weights(std::move(w));
}

Network Network::trend_setter(int n_agents, double strong, double weak) {
    if (n_agents < 2) throw std::invalid_argument("trend_setter: need n_agents >= 2");
    Matrix w = Matrix::Constant(n_agents, n_agents, weak);
    w.col(0).setConstant(strong);
    w.diagonal().setZero();
    return from_weights(std::move(w));
}

double Network::asymmetry() const {
    return (weights_ - weights_.transpose()).cwiseAbs().maxCoeff();
}

Matrix Network::influence_operator(int strategy_dim) const {
    const int n = n_agents();
    Matrix w = Matrix::Zero(n * strategy_dim, n * strategy_dim);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (weights_(i, j) != 0.0) {
                w.block(i * strategy_dim, j * strategy_dim, strategy_dim, strategy_dim) =
                    weights_(i, j) * Matrix::Identity(strategy_dim, strategy_dim);
            }
        }
    }
    return w;
}

double spectral_norm(const Network& net) {
    if (net.weights().isZero(0.0)) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(net.weights());
    return svd.singularValues()(0);
}

double infinity_norm(const Network& net) {
    return net.weights().cwiseAbs().rowwise().sum().maxCoeff();
}

double min_eigenvalue(const Network& net, double sym_tol) {
    if (net.asymmetry() > sym_tol) {
        throw std::invalid_argument("minimum eigenvalue undefined for asymmetric network (asymmetry " +
                                    std::to_string(net.asymmetry()) + " exceeds tolerance)");
    }
    const Matrix sym = 0.5 * (net.weights() + net.weights().transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

SpectralMeasures spectral_measures(const Network& net, double sym_tol) {
    SpectralMeasures m;
    m.spectral_norm = spectral_norm(net);
    m.infinity_norm = infinity_norm(net);
    m.is_symmetric = net.is_symmetric(sym_tol);
    if (m.is_symmetric) m.min_eigenvalue = min_eigenvalue(net, sym_tol);
    return m;
}

Network make_network(const NetworkSpec& spec) {
    if (spec.kind == "complete") return Network::complete(spec.n, spec.weight);
    if (spec.kind == "undirected_ring") return Network::undirected_ring(spec.n, spec.weight);
    if (spec.kind == "bipartite_complete") {
        return Network::bipartite_complete(spec.left, spec.right, spec.weight);
    }
    if (spec.kind == "directed_regular") {
        return Network::directed_regular(spec.n, spec.degree, spec.weight);
    }
    if (spec.kind == "asymmetric_star") return Network::asymmetric_star(spec.n, spec.weight);
    if (spec.kind == "trend_setter") {
        return Network::trend_setter(spec.n > 0 ? spec.n : 4, spec.strong, spec.weak);
    }
    if (spec.kind == "explicit") return Network::from_weights(spec.explicit_weights);
    throw std::invalid_argument("unknown network kind '" + spec.kind + "'");
}

}  // namespace netgames
