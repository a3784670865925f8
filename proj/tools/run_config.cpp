#include "run_config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <numeric>

namespace hetdisc::cli {

namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const json& require_object(const json& doc, const std::string& path) {
    if (!doc.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
    return doc;
}

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> known) {
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw ConfigError(join(path, key), "unknown field");
    }
}

double read_number(const json& obj, const std::string& path, const char* key, double fallback, bool required = false) {
    const std::string p = join(path, key);
    if (!obj.contains(key)) {
        if (required) throw ConfigError(p, "required field is missing");
        return fallback;
    }
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(p, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(p, "must be finite");
    return d;
}

long read_integer(const json& obj, const std::string& path, const char* key, long fallback) {
    const std::string p = join(path, key);
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) throw ConfigError(p, "expected an integer");
    return v.get<long>();
}

std::string read_string(const json& obj, const std::string& path, const char* key, const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string()) throw ConfigError(join(path, key), "expected a string");
    return v.get<std::string>();
}

std::vector<double> read_vector(const json& obj, const std::string& path, const char* key, bool required) {
    const std::string p = join(path, key);
    if (!obj.contains(key)) {
        if (required) throw ConfigError(p, "required field is missing");
        return {};
    }
    const json& v = obj.at(key);
    if (!v.is_array()) throw ConfigError(p, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) throw ConfigError(index(p, i), "expected a number");
        const double d = v[i].get<double>();
        if (!std::isfinite(d)) throw ConfigError(index(p, i), "must be finite");
        out.push_back(d);
    }
    return out;
}

const json* block(const json& doc, const char* key, bool required) {
    if (!doc.contains(key)) {
        if (required) throw ConfigError(key, "required block is missing");
        return nullptr;
    }
    return &require_object(doc.at(key), key);
}

void check_simplex(const std::vector<double>& w, const std::string& p, std::size_t n) {
    if (w.size() != n) {
        throw ConfigError(p, "has " + std::to_string(w.size()) + " entries but agents.delta has " + std::to_string(n));
    }
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] < 0.0) throw ConfigError(index(p, i), "weights must be nonnegative");
    }
    const double s = std::accumulate(w.begin(), w.end(), 0.0);
    if (std::abs(s - 1.0) > 1e-12) throw ConfigError(p, "weights must sum to 1");
}

void validate(const RunConfig& c) {
    if (c.delta.empty()) throw ConfigError("agents.delta", "needs at least one agent");
    for (std::size_t i = 0; i < c.delta.size(); ++i) {
        if (!(c.delta[i] > 0.0 && c.delta[i] < 1.0)) throw ConfigError(index("agents.delta", i), "must lie in (0, 1)");
        if (i > 0 && !(c.delta[i] < c.delta[i - 1])) {
            throw ConfigError(index("agents.delta", i),
                              "discount factors must be strictly decreasing (most patient agent first)");
        }
    }
    check_simplex(c.theta0, "agents.theta0", c.delta.size());
    for (std::size_t i = 0; i < c.theta0.size(); ++i) {
        if (!(c.theta0[i] > 0.0)) throw ConfigError(index("agents.theta0", i), "initial weights must be positive");
    }
    if (!(c.gamma > 0.0)) throw ConfigError("preferences.gamma", "must be positive");
    if (!(c.eta > 0.0)) throw ConfigError("preferences.eta", "must be positive");
    if (!(c.A > 0.0)) throw ConfigError("technology.A", "must be positive");
    if (!(c.a > 0.0 && c.a < 1.0)) throw ConfigError("technology.a", "must lie in (0, 1)");
    const double k_max = std::pow(c.A, 1.0 / (1.0 - c.a));
    if (c.grid_size < 64) throw ConfigError("solver.grid_size", "must be at least 64");
    if (!(c.k_min > 0.0 && c.k_min < k_max)) throw ConfigError("solver.k_min", "must lie in (0, k_max)");
    if (c.T < 10) throw ConfigError("solver.T", "must be at least 10");
    if (!(c.tolerance > 0.0)) throw ConfigError("solver.tolerance", "must be positive");
    if (c.phi < 0.0) {
        const double floor = -c.phi * static_cast<double>(c.delta.size()) * c.gamma / c.eta;
        if (!(c.A * std::pow(c.k_min, c.a) - c.k_min > floor)) {
            throw ConfigError("solver.k_min", "output at k_min does not cover the consumption floor");
        }
    }
    if (!(c.k0 >= c.k_min && c.k0 <= k_max)) throw ConfigError("simulate.k0", "must lie in [k_min, k_max]");
    if (c.axioms_t_max < 1) throw ConfigError("axioms.t_max", "must be at least 1");
    if (c.axioms_tau_max < 1) throw ConfigError("axioms.tau_max", "must be at least 1");
    if (!c.theta_bar.empty()) check_simplex(c.theta_bar, "compare.theta_bar", c.delta.size());
    if (!(c.replan_period > 0 && 2 * c.replan_period < c.T)) {
        throw ConfigError("compare.replan_period", "must satisfy 0 < replan_period < T/2");
    }
    if (!c.z_upper.empty()) {
        if (c.z_upper.size() != c.delta.size()) throw ConfigError("compare.z_upper", "needs one bound per agent");
        for (std::size_t i = 0; i < c.z_upper.size(); ++i) {
            if (!(c.z_upper[i] > 0.0)) throw ConfigError(index("compare.z_upper", i), "must be positive");
        }
    }
}

const char* tail_name(TailMode m) { return m == TailMode::Zero ? "zero" : "dictator-continuation"; }
const char* interpolation_name(Interpolation i) { return i == Interpolation::Linear ? "linear" : "pchip"; }

}  // namespace

RunConfig parse_run_config(const json& doc) {
    require_object(doc, "");
    reject_unknown(doc, "", {"agents", "preferences", "technology", "solver", "simulate", "axioms", "compare"});
    RunConfig c;

    const json& agents = *block(doc, "agents", true);
    reject_unknown(agents, "agents", {"n", "delta", "theta0"});
    c.delta = read_vector(agents, "agents", "delta", true);
    c.theta0 = read_vector(agents, "agents", "theta0", true);
    if (agents.contains("n")) {
        const long n = read_integer(agents, "agents", "n", 0);
        if (n != static_cast<long>(c.delta.size())) {
            throw ConfigError("agents.n", "does not match the length of agents.delta");
        }
    }

    // Curvature drives every result, so it is never defaulted.
    const json& prefs = *block(doc, "preferences", true);
    reject_unknown(prefs, "preferences", {"gamma", "eta", "phi"});
    c.gamma = read_number(prefs, "preferences", "gamma", c.gamma, true);
    c.eta = read_number(prefs, "preferences", "eta", c.eta);
    c.phi = read_number(prefs, "preferences", "phi", c.phi);
    if (const json* p = block(doc, "technology", false)) {
        reject_unknown(*p, "technology", {"A", "a"});
        c.A = read_number(*p, "technology", "A", c.A);
        c.a = read_number(*p, "technology", "a", c.a);
    }
    if (const json* p = block(doc, "solver", false)) {
        reject_unknown(*p, "solver", {"grid_size", "k_min", "T", "tail_mode", "tolerance", "interpolation"});
        const long grid = read_integer(*p, "solver", "grid_size", static_cast<long>(c.grid_size));
        if (grid < 0) throw ConfigError("solver.grid_size", "must be at least 64");
        c.grid_size = static_cast<std::size_t>(grid);
        c.k_min = read_number(*p, "solver", "k_min", c.k_min);
        c.T = read_integer(*p, "solver", "T", c.T);
        c.tolerance = read_number(*p, "solver", "tolerance", c.tolerance);
        const std::string tail = read_string(*p, "solver", "tail_mode", tail_name(c.tail_mode));
        if (tail == "dictator-continuation") {
            c.tail_mode = TailMode::DictatorContinuation;
        } else if (tail == "zero") {
            c.tail_mode = TailMode::Zero;
        } else {
            throw ConfigError("solver.tail_mode", "expected \"dictator-continuation\" or \"zero\"");
        }
        const std::string interp = read_string(*p, "solver", "interpolation", interpolation_name(c.interpolation));
        if (interp == "pchip") {
            c.interpolation = Interpolation::MonotoneCubic;
        } else if (interp == "linear") {
            c.interpolation = Interpolation::Linear;
        } else {
            throw ConfigError("solver.interpolation", "expected \"pchip\" or \"linear\"");
        }
    }
    if (const json* p = block(doc, "simulate", false)) {
        reject_unknown(*p, "simulate", {"k0"});
        c.k0 = read_number(*p, "simulate", "k0", c.k0);
    }
    if (const json* p = block(doc, "axioms", false)) {
        reject_unknown(*p, "axioms", {"b", "t_max", "tau_max", "random_samples"});
        c.axioms_b = read_number(*p, "axioms", "b", c.axioms_b);
        c.axioms_t_max = read_integer(*p, "axioms", "t_max", c.axioms_t_max);
        c.axioms_tau_max = read_integer(*p, "axioms", "tau_max", c.axioms_tau_max);
        const long r = read_integer(*p, "axioms", "random_samples", 0);
        if (r < 0) throw ConfigError("axioms.random_samples", "must be nonnegative");
        c.axioms_random_samples = static_cast<std::size_t>(r);
    }
    if (const json* p = block(doc, "compare", false)) {
        reject_unknown(*p, "compare", {"theta_bar", "replan_period", "z_upper"});
        c.theta_bar = read_vector(*p, "compare", "theta_bar", false);
        c.replan_period = read_integer(*p, "compare", "replan_period", c.replan_period);
        c.z_upper = read_vector(*p, "compare", "z_upper", false);
    }
    validate(c);
    return c;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("<file>", "cannot open " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ConfigError("<file>", std::string("malformed JSON: ") + e.what());
    }
    return parse_run_config(doc);
}

json to_json(const RunConfig& c) {
    json j;
    j["agents"] = {{"n", c.delta.size()}, {"delta", c.delta}, {"theta0", c.theta0}};
    j["preferences"] = {{"gamma", c.gamma}, {"eta", c.eta}, {"phi", c.phi}};
    j["technology"] = {{"A", c.A}, {"a", c.a}};
    j["solver"] = {{"grid_size", c.grid_size},   {"k_min", c.k_min},
                   {"T", c.T},                   {"tail_mode", tail_name(c.tail_mode)},
                   {"tolerance", c.tolerance},   {"interpolation", interpolation_name(c.interpolation)}};
    j["simulate"] = {{"k0", c.k0}};
    j["axioms"] = {{"b", c.axioms_b},
                   {"t_max", c.axioms_t_max},
                   {"tau_max", c.axioms_tau_max},
                   {"random_samples", c.axioms_random_samples}};
    json cmp = {{"replan_period", c.replan_period}};
    if (!c.theta_bar.empty()) cmp["theta_bar"] = c.theta_bar;
    if (!c.z_upper.empty()) cmp["z_upper"] = c.z_upper;
    j["compare"] = cmp;
    return j;
}

SolverConfig RunConfig::solver_config(int threads) const {
    SolverConfig s{
        .prefs = LtcfParams::make(gamma, eta, phi),
        .tech = Technology::make(A, a),
        .discounts = DiscountProfile::make(delta, gamma),
        .theta0 = WeightVector::from(theta0),
    };
    s.grid_size = grid_size;
    s.k_min = k_min;
    s.horizon = T;
    s.tail = tail_mode;
    s.tolerance = tolerance;
    s.interpolation = interpolation;
    s.threads = threads;
    return s;
}

ConstWeightConfig RunConfig::const_weight_config(int threads) const {
    return ConstWeightConfig{
        .solver = solver_config(threads),
        .theta_bar = WeightVector::from(theta_bar.empty() ? theta0 : theta_bar),
        .z_upper = z_upper,
        .initial_capital = k0,
        .replan_period = replan_period,
    };
}

}  // namespace hetdisc::cli
