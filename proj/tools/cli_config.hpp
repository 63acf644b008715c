#ifndef PRCLAB_CLI_CONFIG_HPP
#define PRCLAB_CLI_CONFIG_HPP

#include <json.hpp>
#include <optional>
#include <set>

#include "prclab/analysis.hpp"
#include "prclab/models.hpp"

namespace prclab::cli {

using nlohmann::json;

/// Config (schema) violations: exit code 1, message points at the key.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                           const std::string& path) {
    if (!obj.is_object()) throw ConfigError(path + ": expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key())) throw ConfigError(path + "." + it.key() + ": unknown key");
}

inline double num_at(const json& obj, const std::string& key, double fallback,
                     const std::string& path) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) throw ConfigError(path + "." + key + ": expected a number");
    return obj[key].get<double>();
}

inline int int_at(const json& obj, const std::string& key, int fallback, const std::string& path) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_integer()) throw ConfigError(path + "." + key + ": expected an integer");
    return obj[key].get<int>();
}

inline std::string str_at(const json& obj, const std::string& key, const std::string& fallback,
                          const std::string& path) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_string()) throw ConfigError(path + "." + key + ": expected a string");
    return obj[key].get<std::string>();
}

struct ModelChoice {
    std::string id;
    ModelDef model;
    Vec lambda;
    Vec seed_state;
    double default_settle = 150.0;
};

inline ModelChoice build_model(const json& cfg) {
    if (!cfg.contains("model")) throw ConfigError("config.model: required");
    const json& mc = cfg["model"];
    reject_unknown(mc, {"id", "params", "sweep"}, "config.model");
    ModelChoice out;
    out.id = str_at(mc, "id", "", "config.model");
    const json params = mc.contains("params") ? mc["params"] : json::object();

    if (out.id == "goodwin") {
        reject_unknown(params, {"K", "tau", "nu"}, "config.model.params");
        GoodwinParams p;
        p.K = num_at(params, "K", p.K, "config.model.params");
        p.tau = num_at(params, "tau", p.tau, "config.model.params");
        p.nu = num_at(params, "nu", p.nu, "config.model.params");
        out.model = goodwin_model(p);
        out.lambda = nominal_lambda(p);
        out.seed_state = Vec::Constant(3, 0.5);
        out.default_settle = 150.0;
    } else if (out.id == "morris_lecar") {
        reject_unknown(params,
                       {"C", "g_Ca", "g_K", "g_L", "V_Ca", "V_K", "V_L", "V1", "V2", "V3", "V4",
                        "phi", "I_app"},
                       "config.model.params");
        MorrisLecarParams p;
        p.C = num_at(params, "C", p.C, "config.model.params");
        p.g_Ca = num_at(params, "g_Ca", p.g_Ca, "config.model.params");
        p.g_K = num_at(params, "g_K", p.g_K, "config.model.params");
        p.g_L = num_at(params, "g_L", p.g_L, "config.model.params");
        p.V_Ca = num_at(params, "V_Ca", p.V_Ca, "config.model.params");
        p.V_K = num_at(params, "V_K", p.V_K, "config.model.params");
        p.V_L = num_at(params, "V_L", p.V_L, "config.model.params");
        p.V1 = num_at(params, "V1", p.V1, "config.model.params");
        p.V2 = num_at(params, "V2", p.V2, "config.model.params");
        p.V3 = num_at(params, "V3", p.V3, "config.model.params");
        p.V4 = num_at(params, "V4", p.V4, "config.model.params");
        p.phi = num_at(params, "phi", p.phi, "config.model.params");
        p.I_app = num_at(params, "I_app", p.I_app, "config.model.params");
        std::vector<std::string> sweep{"I_app", "g_Ca"};
        if (mc.contains("sweep")) {
            if (!mc["sweep"].is_array()) throw ConfigError("config.model.sweep: expected an array");
            sweep.clear();
            for (const auto& s : mc["sweep"]) sweep.push_back(s.get<std::string>());
        }
        out.model = morris_lecar_model(p, sweep);
        out.lambda = nominal_lambda(p, sweep);
        out.seed_state = (Vec(2) << -20.0, 0.1).finished();
        out.default_settle = 3000.0;
    } else if (out.id == "radial_clock") {
        reject_unknown(params, {"omega0", "kappa", "gain"}, "config.model.params");
        RadialClockParams p;
        p.omega0 = num_at(params, "omega0", p.omega0, "config.model.params");
        p.kappa = num_at(params, "kappa", p.kappa, "config.model.params");
        p.gain = num_at(params, "gain", p.gain, "config.model.params");
        out.model = radial_clock_model(p);
        out.lambda = nominal_lambda(p);
        out.seed_state = (Vec(2) << 0.7, 0.4).finished();
        out.default_settle = 40.0 / p.omega0 * two_pi;
    } else {
        throw ConfigError("config.model.id: must be goodwin, morris_lecar or radial_clock");
    }
    return out;
}

struct SolverConfig {
    int N = 256;
    Scheme scheme = Scheme::MultipleShooting;
    NewtonOptions newton;
    GuessOptions guess;
};

inline SolverConfig build_solver(const json& cfg, const ModelChoice& mc,
                                 Scheme default_scheme = Scheme::MultipleShooting) {
    SolverConfig out;
    out.scheme = default_scheme;
    out.guess.settle_time = mc.default_settle;
    if (!cfg.contains("solver")) {
        out.guess.N = out.N;
        return out;
    }
    const json& sc = cfg["solver"];
    reject_unknown(sc,
                   {"N", "scheme", "newton_tol", "max_iter", "rtol", "atol", "settle_time",
                    "observe_time", "seed_state"},
                   "config.solver");
    out.N = int_at(sc, "N", out.N, "config.solver");
    if (out.N < 4) throw ConfigError("config.solver.N: must be >= 4");
    const std::string scheme = str_at(sc, "scheme", scheme_name(default_scheme), "config.solver");
    if (scheme == "multiple_shooting") out.scheme = Scheme::MultipleShooting;
    else if (scheme == "trapezoidal") out.scheme = Scheme::Trapezoidal;
    else throw ConfigError("config.solver.scheme: must be multiple_shooting or trapezoidal");
    out.newton.tol = num_at(sc, "newton_tol", out.newton.tol, "config.solver");
    out.newton.max_iter = int_at(sc, "max_iter", out.newton.max_iter, "config.solver");
    out.newton.ode.rtol = num_at(sc, "rtol", out.newton.ode.rtol, "config.solver");
    out.newton.ode.atol = num_at(sc, "atol", out.newton.ode.atol, "config.solver");
    out.guess.settle_time = num_at(sc, "settle_time", out.guess.settle_time, "config.solver");
    out.guess.observe_time = num_at(sc, "observe_time", 0.0, "config.solver");
    out.guess.N = out.N;
    return out;
}

inline json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    json cfg;
    try {
        cfg = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    reject_unknown(cfg,
                   {"schema", "seed", "model", "solver", "space", "prc", "sens", "robustness",
                    "identify", "classify", "dist"},
                   "config");
    const std::string schema = str_at(cfg, "schema", "", "config");
    if (schema != "prclab-config/1")
        throw ConfigError("config.schema: expected \"prclab-config/1\"");
    return cfg;
}

inline PrcSpace space_from(const json& cfg) {
    const std::string tag = str_at(cfg, "space", "D", "config");
    try {
        return parse_space(tag);
    } catch (const std::invalid_argument&) {
        throw ConfigError("config.space: must be one of A, B, C, D");
    }
}

}  // namespace prclab::cli

#endif
