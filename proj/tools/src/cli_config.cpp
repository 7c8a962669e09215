#include "cli_config.hpp"

#include <fstream>
#include <stdexcept>

namespace netgames::cli {

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw std::invalid_argument("config field '" + field + "': " + what);
}

double number_at(const json& j, const std::string& field) {
    if (!j.contains(field) || !j[field].is_number()) fail(field, "expected a number");
    return j[field].get<double>();
}

double number_or(const json& j, const std::string& field, double fallback) {
    if (!j.contains(field)) return fallback;
    if (!j[field].is_number()) fail(field, "expected a number");
    return j[field].get<double>();
}

int integer_or(const json& j, const std::string& field, int fallback) {
    if (!j.contains(field)) return fallback;
    if (!j[field].is_number_integer()) fail(field, "expected an integer");
    return j[field].get<int>();
}

/// Accepts scalar, per-agent array, or per-agent array of vectors; returns
/// one n-vector per agent.
std::vector<Vector> per_agent_vectors(const json& j, const std::string& field, int n_agents,
                                      int dim) {
    std::vector<Vector> out;
    if (!j.contains(field)) fail(field, "missing");
    const json& v = j[field];
    if (v.is_number()) {
        out.assign(n_agents, Vector::Constant(dim, v.get<double>()));
        return out;
    }
    if (!v.is_array() || static_cast<int>(v.size()) != n_agents) {
        fail(field, "expected a scalar or one entry per agent");
    }
    for (const json& e : v) {
        if (e.is_number()) {
            out.push_back(Vector::Constant(dim, e.get<double>()));
        } else if (e.is_array() && static_cast<int>(e.size()) == dim) {
            Vector x(dim);
            for (int k = 0; k < dim; ++k) x(k) = e[k].get<double>();
            out.push_back(x);
        } else {
            fail(field, "entry has wrong shape");
        }
    }
    return out;
}

/// Accepts scalar (times identity), per-agent scalars, or per-agent matrices.
std::vector<Matrix> per_agent_matrices(const json& j, const std::string& field, int n_agents,
                                       int dim) {
    std::vector<Matrix> out;
    if (!j.contains(field)) fail(field, "missing");
    const json& v = j[field];
    auto scalar_block = [dim](double s) { return Matrix(s * Matrix::Identity(dim, dim)); };
    if (v.is_number()) {
        out.assign(n_agents, scalar_block(v.get<double>()));
        return out;
    }
    if (!v.is_array() || static_cast<int>(v.size()) != n_agents) {
        fail(field, "expected a scalar or one entry per agent");
    }
    for (const json& e : v) {
        if (e.is_number()) {
            out.push_back(scalar_block(e.get<double>()));
        } else if (e.is_array() && static_cast<int>(e.size()) == dim) {
            Matrix m(dim, dim);
            for (int r = 0; r < dim; ++r) {
                if (!e[r].is_array() || static_cast<int>(e[r].size()) != dim) {
                    fail(field, "matrix row has wrong length");
                }
                for (int c = 0; c < dim; ++c) m(r, c) = e[r][c].get<double>();
            }
            out.push_back(m);
        } else {
            fail(field, "entry has wrong shape");
        }
    }
    return out;
}

Vector per_agent_scalars(const json& j, const std::string& field, int n_agents) {
    if (!j.contains(field)) fail(field, "missing");
    const json& v = j[field];
    if (v.is_number()) return Vector::Constant(n_agents, v.get<double>());
    if (!v.is_array() || static_cast<int>(v.size()) != n_agents) {
        fail(field, "expected a scalar or one value per agent");
    }
    Vector out(n_agents);
    for (int i = 0; i < n_agents; ++i) out(i) = v[i].get<double>();
    return out;
}

NetworkSpec parse_network(const json& j) {
    if (!j.contains("network") || !j["network"].is_object()) fail("game.network", "missing object");
    const json& net = j["network"];
    NetworkSpec spec;
    if (!net.contains("kind") || !net["kind"].is_string()) fail("game.network.kind", "missing string");
    spec.kind = net["kind"].get<std::string>();
    spec.n = integer_or(net, "n", 0);
    spec.degree = integer_or(net, "degree", 2);
    spec.left = integer_or(net, "left", 0);
    spec.right = integer_or(net, "right", 0);
    spec.weight = number_or(net, "weight", 1.0);
    spec.strong = number_or(net, "strong", 1.0);
    spec.weak = number_or(net, "weak", 0.1);
    if (spec.kind == "explicit") {
        if (!net.contains("weights") || !net["weights"].is_array()) {
            fail("game.network.weights", "explicit networks need a weight matrix");
        }
        const json& rows = net["weights"];
        const int n = static_cast<int>(rows.size());
        Matrix w(n, n);
        for (int r = 0; r < n; ++r) {
            if (!rows[r].is_array() || static_cast<int>(rows[r].size()) != n) {
                fail("game.network.weights", "row " + std::to_string(r + 1) + " has wrong length");
            }
            for (int c = 0; c < n; ++c) w(r, c) = rows[r][c].get<double>();
        }
        spec.explicit_weights = w;
    }
    return spec;
}

json network_to_json(const NetworkSpec& spec) {
    json j;
    j["kind"] = spec.kind;
    if (spec.kind == "explicit") {
        json rows = json::array();
        for (int r = 0; r < spec.explicit_weights.rows(); ++r) {
            json row = json::array();
            for (int c = 0; c < spec.explicit_weights.cols(); ++c) {
                row.push_back(spec.explicit_weights(r, c));
            }
            rows.push_back(row);
        }
        j["weights"] = rows;
        return j;
    }
    if (spec.kind == "bipartite_complete") {
        j["left"] = spec.left;
        j["right"] = spec.right;
    } else {
        j["n"] = spec.n;
    }
    if (spec.kind == "directed_regular") j["degree"] = spec.degree;
    if (spec.kind == "trend_setter") {
        j["strong"] = spec.strong;
        j["weak"] = spec.weak;
    } else {
        j["weight"] = spec.weight;
    }
    return j;
}

std::vector<ConstraintSet> parse_constraints(const json& j, int n_agents, int dim) {
    auto one = [dim](const json& c) -> ConstraintSet {
        if (!c.contains("kind") || !c["kind"].is_string()) fail("constraints.kind", "missing string");
        const std::string kind = c["kind"].get<std::string>();
        if (kind == "unconstrained") return ConstraintSet::unconstrained(dim);
        if (kind == "nonneg") return ConstraintSet::nonneg(dim);
        if (kind == "box") {
            Vector lo(dim), hi(dim);
            for (int k = 0; k < dim; ++k) {
                lo(k) = c["lower"].is_array() ? c["lower"][k].get<double>() : c["lower"].get<double>();
                hi(k) = c["upper"].is_array() ? c["upper"][k].get<double>() : c["upper"].get<double>();
            }
            return ConstraintSet::box(lo, hi);
        }
        if (kind == "polyhedron") {
            const json& bj = c.value("B", json::array());
            const int m = static_cast<int>(bj.size());
            Matrix B(m, dim);
            Vector b(m);
            for (int r = 0; r < m; ++r) {
                for (int k = 0; k < dim; ++k) B(r, k) = bj[r][k].get<double>();
                b(r) = c["b"][r].get<double>();
            }
            Matrix H(0, dim);
            Vector h(0);
            if (c.contains("H")) {
                const json& hj = c["H"];
                const int p = static_cast<int>(hj.size());
                H.resize(p, dim);
                h.resize(p);
                for (int r = 0; r < p; ++r) {
                    for (int k = 0; k < dim; ++k) H(r, k) = hj[r][k].get<double>();
                    h(r) = c["h"][r].get<double>();
                }
            }
            return ConstraintSet::polyhedron(B, b, H, h);
        }
        fail("constraints.kind", "unknown kind '" + kind + "'");
    };

    if (!j.contains("constraints")) {
        return {ConstraintSet::nonneg(dim)};
    }
    const json& c = j["constraints"];
    if (c.is_object()) return {one(c)};
    if (!c.is_array() || static_cast<int>(c.size()) != n_agents) {
        fail("constraints", "expected an object or one entry per agent");
    }
    std::vector<ConstraintSet> out;
    for (const json& e : c) out.push_back(one(e));
    return out;
}

json vector_to_json(const Vector& v) {
    json out = json::array();
    for (int k = 0; k < v.size(); ++k) out.push_back(v(k));
    return out;
}

json matrix_to_json(const Matrix& m) {
    json out = json::array();
    for (int r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        out.push_back(row);
    }
    return out;
}

}  // namespace

GameSpec RunConfig::build_game() const {
    Network net = make_network(network);
    const int N = net.n_agents();
    const json& g = game_params;

    if (family == "linear_quadratic") {
        const int dim = integer_or(g, "strategy_dim", 1);
        LinearQuadraticFamily fam;
        fam.Q = g.contains("q") ? per_agent_matrices(g, "q", N, dim)
                                : std::vector<Matrix>(N, Matrix::Identity(dim, dim));
        fam.K = per_agent_matrices(g, "k", N, dim);
        fam.a = per_agent_vectors(g, "a", N, dim);
        return GameSpec(std::move(net), std::move(fam), parse_constraints(g, N, dim));
    }
    if (family == "races") {
        RacesFamily fam;
        fam.lower = per_agent_scalars(g, "a", N);
        fam.upper = per_agent_scalars(g, "b", N);
        fam.gamma = number_at(g, "gamma");
        return GameSpec(std::move(net), std::move(fam),
                        {ConstraintSet::box(Vector::Constant(1, fam.lower(0)),
                                            Vector::Constant(1, fam.upper(0)))});
    }
    if (family == "multi_activity") {
        MultiActivityFamily fam;
        fam.a_A = per_agent_scalars(g, "a_A", N);
        fam.a_B = per_agent_scalars(g, "a_B", N);
        fam.beta = per_agent_scalars(g, "beta", N);
        fam.delta = number_at(g, "delta");
        fam.mu = number_at(g, "mu");
        const json& bounds = g.contains("bounds") ? g["bounds"] : json::object();
        const double lo = number_or(bounds, "activity_min", 0.0);
        const double hi = number_or(bounds, "activity_max", 1e6);
        const double tlo = number_or(bounds, "total_min", 0.0);
        const double thi = number_or(bounds, "total_max", 2e6);
        Matrix B(6, 2);
        Vector b(6);
        B << -1, 0, 0, -1, 1, 0, 0, 1, 1, 1, -1, -1;
        b << -lo, -lo, hi, hi, thi, -tlo;
        return GameSpec(std::move(net), std::move(fam), {ConstraintSet::polyhedron(B, b)});
    }
    fail("game.family", "unknown family '" + family + "'");
}

json RunConfig::to_json() const {
    // Re-canonicalize through the built game so an emitted config always
    // parses back to the identical GameSpec.
    const GameSpec spec = build_game();
    const int N = spec.n_agents();
    json g;
    g["family"] = family;
    g["network"] = network_to_json(network);
    if (const auto* lq = spec.lq()) {
        g["strategy_dim"] = spec.strategy_dim();
        json q = json::array(), k = json::array(), a = json::array();
        for (int i = 0; i < N; ++i) {
            q.push_back(matrix_to_json(lq->Q[i]));
            k.push_back(matrix_to_json(lq->K[i]));
            a.push_back(vector_to_json(lq->a[i]));
        }
        g["q"] = q;
        g["k"] = k;
        g["a"] = a;
        json cs = json::array();
        for (int i = 0; i < N; ++i) {
            const ConstraintSet& set = spec.constraints(i);
            json c;
            switch (set.kind()) {
                case ConstraintKind::Unconstrained:
                    c["kind"] = "unconstrained";
                    break;
                case ConstraintKind::NonNegOrthant:
                    c["kind"] = "nonneg";
                    break;
                case ConstraintKind::Box:
                    c["kind"] = "box";
                    c["lower"] = vector_to_json(set.lower());
                    c["upper"] = vector_to_json(set.upper());
                    break;
                case ConstraintKind::Polyhedron: {
                    c["kind"] = "polyhedron";
                    auto [B, bb] = set.inequality_rows();
                    auto [H, hh] = set.equality_rows();
                    c["B"] = matrix_to_json(B);
                    c["b"] = vector_to_json(bb);
                    if (H.rows() > 0) {
                        c["H"] = matrix_to_json(H);
                        c["h"] = vector_to_json(hh);
                    }
                    break;
                }
            }
            cs.push_back(c);
        }
        g["constraints"] = cs;
    } else if (const auto* rc = spec.races()) {
        g["a"] = vector_to_json(rc->lower);
        g["b"] = vector_to_json(rc->upper);
        g["gamma"] = rc->gamma;
    } else if (const auto* ma = spec.multi_activity()) {
        g["a_A"] = vector_to_json(ma->a_A);
        g["a_B"] = vector_to_json(ma->a_B);
        g["beta"] = vector_to_json(ma->beta);
        g["delta"] = ma->delta;
        g["mu"] = ma->mu;
        if (game_params.contains("bounds")) g["bounds"] = game_params["bounds"];
    }

    json doc = sections;
    doc["game"] = g;
    return doc;
}

RunConfig parse_config(const json& doc) {
    if (!doc.is_object() || !doc.contains("game") || !doc["game"].is_object()) {
        throw std::invalid_argument("config field 'game': missing object");
    }
    const json& g = doc["game"];
    RunConfig cfg;
    if (!g.contains("family") || !g["family"].is_string()) fail("game.family", "missing string");
    cfg.family = g["family"].get<std::string>();
    cfg.network = parse_network(g);
    cfg.game_params = g;
    cfg.game_params.erase("network");
    cfg.game_params.erase("family");
    cfg.sections = doc;
    cfg.sections.erase("game");
    (void)cfg.build_game();  // validate eagerly so errors surface at parse time
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config parse error in '" + path + "': " + e.what());
    }
    return parse_config(doc);
}

DynamicsSection parse_dynamics_section(const RunConfig& cfg, const GameSpec& spec) {
    DynamicsSection out;
    const json& sec = cfg.sections.contains("dynamics") ? cfg.sections["dynamics"] : json::object();

    auto mode_of = [](const std::string& name) -> DynamicsMode {
        if (name == "simultaneous") return DynamicsMode::DiscreteSimultaneous;
        if (name == "sequential") return DynamicsMode::DiscreteSequential;
        if (name == "relaxed") return DynamicsMode::DiscreteRelaxed;
        if (name == "continuous") return DynamicsMode::ContinuousRk4;
        if (name == "projection") return DynamicsMode::Projection;
        fail("dynamics.modes", "unknown mode '" + name + "'");
    };
    if (sec.contains("modes")) {
        for (const json& m : sec["modes"]) out.modes.push_back(mode_of(m.get<std::string>()));
    } else {
        out.modes = {DynamicsMode::ContinuousRk4, DynamicsMode::DiscreteSequential,
                     DynamicsMode::DiscreteSimultaneous};
    }
    out.base.max_iters = integer_or(sec, "max_iters", 10000);
    out.base.residual_tol = number_or(sec, "residual_tol", 1e-9);
    out.base.record_every = integer_or(sec, "record_every", 1);
    out.base.relaxation = number_or(sec, "relaxation", 1.0);
    out.base.step = number_or(sec, "step", 0.05);
    out.base.time_horizon = number_or(sec, "time_horizon", 1e3);
    out.base.projection_step = number_or(sec, "projection_step", 0.5);

    if (sec.contains("x0") && sec["x0"].is_array()) {
        Vector x0(spec.profile_dim());
        if (static_cast<int>(sec["x0"].size()) != spec.profile_dim()) {
            fail("dynamics.x0", "wrong dimension");
        }
        for (int k = 0; k < x0.size(); ++k) x0(k) = sec["x0"][k].get<double>();
        out.x0 = x0;
    }
    return out;
}

}  // namespace netgames::cli
