#include "levychain/config.hpp"

#include "levychain/expression.hpp"
#include "levychain/pricing.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <numbers>
#include <sstream>

namespace levychain {

using nlohmann::json;

uint64_t fnv1a64(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

double RunConfig::M_for(double h) const { return M_log_rule ? pricing_truncation(h) : M; }

Fixture RunConfig::as_fixture() const {
    Fixture f;
    f.name = model_label;
    f.model = model;
    f.scheme = scheme;
    f.order = expected_order.value_or(ExpectedOrder::Linear);
    f.h_list = h_list;
    f.t = t;
    f.window = window;
    f.tail_cut = tail_cut;
    return f;
}

namespace {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field '") + key + "': " + e.what());
    }
}

std::vector<double> vec_or(const json& j, const char* key, std::vector<double> fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (v.is_number()) return {v.get<double>()};
    return get_or<std::vector<double>>(j, key, fallback);
}

LevyModel generic_model(const json& m) {
    LevyModel model;
    model.name = get_or<std::string>(m, "name", "custom");
    model.dim = get_or<int>(m, "dim", 1);
    if (model.dim < 1 || model.dim > kMaxDim) throw ConfigError("model.dim must be 1, 2 or 3");
    model.sigma2 = vec_or(m, "sigma2", std::vector<double>(model.dim, 0.0));
    model.mu = vec_or(m, "mu", std::vector<double>(model.dim, 0.0));
    model.cutoff_V = get_or<int>(m, "V", 1);
    if (m.contains("orey_epsilon")) model.orey_epsilon = get_or<double>(m, "orey_epsilon", 0.0);
    ClosedForms flags;
    if (m.contains("infinite_mass")) flags.infinite_mass = get_or<bool>(m, "infinite_mass", false);
    if (m.contains("infinite_variation")) flags.infinite_variation = get_or<bool>(m, "infinite_variation", false);
    std::vector<Atom> atoms;
    if (m.contains("atoms")) {
        for (const json& a : m.at("atoms")) {
            Atom atom;
            atom.x = vec_or(a, "x", {});
            atom.weight = get_or<double>(a, "w", 0.0);
            atoms.push_back(atom);
        }
    }
    if (m.contains("density")) {
        std::vector<std::string> vars;
        if (model.dim == 1) vars.push_back("x");
        for (int j = 1; j <= model.dim; ++j) vars.push_back("x" + std::to_string(j));
        auto expr = std::make_shared<Expression>(get_or<std::string>(m, "density", ""), vars);
        const int d = model.dim;
        DensityFn fn = [expr, d](std::span<const double> x) {
            if (d == 1) {
                double v[2] = {x[0], x[0]};
                return (*expr)(std::span<const double>(v, 2));
            }
            return (*expr)(x);
        };
        model.measure = LevyMeasure::with_density(d, fn, flags, get_or<double>(m, "support_radius", 0.0))
                            .plus_atoms(atoms);
    } else if (!atoms.empty()) {
        model.measure = LevyMeasure::atomic(model.dim, atoms, flags);
    } else {
        model.measure = LevyMeasure::zero(model.dim);
    }
    return model;
}

CgmyParams cgmy_params(const json& m) {
    CgmyParams p;
    p.c = get_or<double>(m, "c", p.c);
    p.lambda_plus = get_or<double>(m, "lambda_plus", p.lambda_plus);
    p.lambda_minus = get_or<double>(m, "lambda_minus", p.lambda_minus);
    p.alpha = get_or<double>(m, "alpha", p.alpha);
    return p;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    if (!j.contains("version")) throw ConfigError("config lacks the 'version' field");
    RunConfig c;
    c.version = get_or<int>(j, "version", 0);
    if (c.version != kConfigVersion)
        throw ConfigError("unsupported config version " + std::to_string(c.version) + " (expected " +
                          std::to_string(kConfigVersion) + ")");
    if (!j.contains("model") || !j.at("model").is_object()) throw ConfigError("config lacks a 'model' object");
    const json& m = j.at("model");

    // Defaults come from a named fixture when one is given.
    std::optional<Fixture> base;
    if (m.contains("fixture")) {
        base = fixture_by_name(get_or<std::string>(m, "fixture", ""));
    } else {
        std::string family = get_or<std::string>(m, "family", "levy");
        Fixture f;
        f.name = family;
        if (family == "alpha_stable") {
            f = alpha_stable_fixture(get_or<double>(m, "alpha", 1.5));
            f.model = stable_model(get_or<double>(m, "alpha", 1.5), get_or<double>(m, "c", 1.0));
        } else if (family == "vg") {
            f = vg_fixture();
            f.model = vg_model(get_or<double>(m, "scale", 1.0));
        } else if (family == "cgmy") {
            f = cgmy_fixture();
            c.cgmy = cgmy_params(m);
            double mu = (m.contains("mu") && m.at("mu").is_number()) ? m.at("mu").get<double>()
                                                                     : martingale_drift(c.cgmy);
            f.model = cgmy_model(c.cgmy, mu);
        } else if (family == "levy") {
            f.model = generic_model(m);
            f.h_list = {};
        } else {
            throw ConfigError("unknown model family '" + family + "'");
        }
        base = f;
    }
    c.model_label = base->name;
    c.model = base->model;
    c.scheme = base->scheme;
    c.h_list = base->h_list;
    c.t = base->t;
    c.window = base->window;
    c.tail_cut = base->tail_cut;
    if (m.contains("fixture")) c.expected_order = base->order;

    try {
        if (j.contains("scheme")) c.scheme = scheme_from_string(get_or<std::string>(j, "scheme", ""));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    c.h_list = vec_or(j, "h", c.h_list);
    if (j.contains("M")) {
        if (j.at("M").is_string()) {
            if (j.at("M").get<std::string>() != "log_rule") throw ConfigError("M must be a number or \"log_rule\"");
            c.M_log_rule = true;
        } else {
            c.M = get_or<double>(j, "M", c.M);
        }
    }
    c.t = get_or<double>(j, "t", c.t);
    c.window = get_or<double>(j, "window", c.window);
    c.tol = get_or<double>(j, "tol", c.tol);
    c.tail_cut = get_or<double>(j, "tail_cut", c.tail_cut);
    c.route = get_or<std::string>(j, "route", c.route);
    c.payoff = get_or<std::string>(j, "payoff", c.payoff);
    c.slack = get_or<double>(j, "slack", c.slack);
    if (j.contains("expected_order"))
        c.expected_order = expected_order_from_string(get_or<std::string>(j, "expected_order", ""));
    if (j.contains("p_grid")) {
        const json& g = j.at("p_grid");
        if (g.is_array()) {
            c.p_grid = g.get<std::vector<double>>();
        } else {
            double a = get_or<double>(g, "from", 0.0), b = get_or<double>(g, "to", std::numbers::pi);
            int n = get_or<int>(g, "points", 65);
            if (n < 2) throw ConfigError("p_grid.points must be >= 2");
            for (int i = 0; i < n; ++i) c.p_grid.push_back(a + (b - a) * i / (n - 1));
        }
    }
    if (j.contains("pricing")) {
        const json& p = j.at("pricing");
        c.S0 = get_or<double>(p, "S0", c.S0);
        c.rate = get_or<double>(p, "r", c.rate);
        c.maturity = get_or<double>(p, "T", c.maturity);
        c.strikes = vec_or(p, "strikes", {});
        c.reference_prices = vec_or(p, "reference", {});
        if (!c.reference_prices.empty() && c.reference_prices.size() != c.strikes.size())
            throw ConfigError("pricing.reference must match pricing.strikes");
    }

    for (size_t i = 0; i < c.h_list.size(); ++i) {
        if (!(c.h_list[i] > 0.0)) throw ConfigError("h values must be positive");
        if (i > 0 && !(c.h_list[i] < c.h_list[i - 1])) throw ConfigError("h list must be strictly decreasing");
    }
    if (!(c.tol > 0.0)) throw ConfigError("tol must be positive");
    if (!(c.t > 0.0)) throw ConfigError("t must be positive");
    if (!(c.window >= 0.0)) throw ConfigError("window must be nonnegative");
    if (c.route != "fourier_discrete" && c.route != "expm" && c.route != "both")
        throw ConfigError("route must be fourier_discrete, expm or both");
    validate_model(c.model);

    c.canonical = j.dump();
    c.hash = fnv1a64(c.canonical);
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace levychain
