// prclab: periodic orbits, phase response curves, their parametric
// sensitivities, and PRC-space analyses for built-in oscillator models.
//
// prclab <orbit|prc|sens|robustness|identify|classify|dist> --config <path> [--out <dir>]
// exit codes: 0 success, 1 usage/config error, 2 numerical failure

#include <CLI11.hpp>
#include <iostream>
#include <random>

#include "cli_config.hpp"
#include "cli_io.hpp"
#include "prclab/analysis.hpp"

namespace prclab::cli {

namespace fs = std::filesystem;

struct Common {
    json cfg;
    fs::path out_dir;
    ModelChoice mc;
};

PeriodicOrbit solve_configured_orbit(const Common& c, Scheme default_scheme) {
    const SolverConfig sc = build_solver(c.cfg, c.mc, default_scheme);
    Vec seed = c.mc.seed_state;
    if (c.cfg.contains("solver") && c.cfg["solver"].contains("seed_state")) {
        const auto& arr = c.cfg["solver"]["seed_state"];
        if (!arr.is_array() || static_cast<int>(arr.size()) != c.mc.model.n)
            throw ConfigError("config.solver.seed_state: expected an array of length n");
        seed.resize(c.mc.model.n);
        for (int i = 0; i < c.mc.model.n; ++i) seed[i] = arr[static_cast<size_t>(i)].get<double>();
    }
    return solve_orbit(c.mc.model, c.mc.lambda, seed, sc.guess, sc.scheme, sc.newton);
}

json orbit_header(const Common& c, const PeriodicOrbit& orbit) {
    json j;
    j["model"] = c.mc.id;
    j["omega"] = orbit.omega;
    j["T"] = orbit.period();
    j["residual"] = orbit.residual_norm;
    j["scheme"] = scheme_name(orbit.scheme);
    j["N"] = orbit.N();
    j["lambda"] = vec_to_json(orbit.lambda);
    json names = json::array();
    for (const auto& s : c.mc.model.param_names) names.push_back(s);
    j["parameters"] = names;
    return j;
}

int cmd_orbit(const Common& c) {
    const PeriodicOrbit orbit = solve_configured_orbit(c, Scheme::MultipleShooting);
    CsvTable t;
    t.header = {"theta"};
    for (int k = 0; k < orbit.n(); ++k) t.header.push_back("x_" + std::to_string(k + 1));
    for (int i = 0; i <= orbit.N(); ++i) {
        std::vector<double> row{orbit.partition.theta[i]};
        for (int k = 0; k < orbit.n(); ++k) row.push_back(orbit.x(k, i));
        t.rows.push_back(std::move(row));
    }
    write_csv(c.out_dir / "orbit.csv", t);
    write_json(c.out_dir / "orbit.json", orbit_header(c, orbit));
    std::cout << "orbit: omega = " << fmt17(orbit.omega) << ", T = " << fmt17(orbit.period())
              << ", residual = " << fmt17(orbit.residual_norm) << "\n";
    return 0;
}

int cmd_prc(const Common& c) {
    const PeriodicOrbit orbit = solve_configured_orbit(c, Scheme::MultipleShooting);
    const AdjointResult adj = adjoint_prc(c.mc.model, orbit);
    json header = orbit_header(c, orbit);

    json prc_cfg = c.cfg.contains("prc") ? c.cfg["prc"] : json::object();
    reject_unknown(prc_cfg, {"direct"}, "config.prc");

    CsvTable t;
    if (!prc_cfg.contains("direct")) {
        t.header = {"theta", "q"};
        for (int i = 0; i < orbit.N(); ++i) t.rows.push_back({two_pi * i / orbit.N(), adj.q[i]});
    } else {
        const json& dc = prc_cfg["direct"];
        reject_unknown(dc, {"amplitudes", "num_phases", "eps_rel", "max_periods"},
                       "config.prc.direct");
        std::vector<double> amplitudes{1e-2, 1e-3};
        if (dc.contains("amplitudes")) {
            amplitudes.clear();
            for (const auto& a : dc["amplitudes"]) amplitudes.push_back(a.get<double>());
        }
        const int num_phases = int_at(dc, "num_phases", 24, "config.prc.direct");
        DirectPrcOptions dopts;
        dopts.eps_rel = num_at(dc, "eps_rel", dopts.eps_rel, "config.prc.direct");
        dopts.max_periods = int_at(dc, "max_periods", dopts.max_periods, "config.prc.direct");

        const Vec phases = uniform_grid(num_phases);
        const TrigInterp qi(adj.q);
        t.header = {"theta", "q"};
        t.rows.resize(static_cast<size_t>(num_phases));
        for (int i = 0; i < num_phases; ++i)
            t.rows[static_cast<size_t>(i)] = {phases[i], qi(phases[i])};
        json summary = json::array();
        for (double alpha : amplitudes) {
            const FinitePrc fp = direct_prc(c.mc.model, orbit, ImpulseInput{alpha}, phases, dopts);
            t.header.push_back("delta_theta_" + fmt17(alpha));
            double sup = 0;
            for (int i = 0; i < num_phases; ++i) {
                t.rows[static_cast<size_t>(i)].push_back(fp.delta_theta[i]);
                if (alpha != 0)
                    sup = std::max(sup, std::abs(fp.delta_theta[i] / alpha - qi(phases[i])));
            }
            const double rel = sup / adj.q.lpNorm<Eigen::Infinity>();
            summary.push_back({{"alpha", alpha}, {"sup_err_vs_q", sup}, {"relative", rel}});
            std::cout << "direct vs adjoint, alpha = " << fmt17(alpha)
                      << ": sup|PRC/alpha - q| = " << fmt17(sup) << " (" << fmt17(100 * rel)
                      << "% of |q|_inf)\n";
        }
        header["direct_agreement"] = summary;
    }
    write_csv(c.out_dir / "prc.csv", t);
    write_json(c.out_dir / "prc.json", header);
    std::cout << "prc: " << t.rows.size() << " samples written\n";
    return 0;
}

int cmd_sens(const Common& c) {
    const PeriodicOrbit orbit = solve_configured_orbit(c, Scheme::Trapezoidal);
    const AdjointResult adj = adjoint_prc(c.mc.model, orbit);
    const SensitivityBundle bundle = sensitivity_bundle(c.mc.model, orbit, adj);

    json sens_cfg = c.cfg.contains("sens") ? c.cfg["sens"] : json::object();
    reject_unknown(sens_cfg, {"relative"}, "config.sens");
    const bool relative = sens_cfg.contains("relative") && sens_cfg["relative"].get<bool>();
    const PrcSpace space = space_from(c.cfg);

    CsvTable t;
    t.header = {"theta", "q"};
    for (const auto& name : c.mc.model.param_names) t.header.push_back("S_q_" + name);
    const int N = orbit.N();
    for (int i = 0; i < N; ++i) {
        std::vector<double> row{two_pi * i / N, adj.q[i]};
        for (int j = 0; j < c.mc.model.l; ++j) {
            double v = bundle.S_q[static_cast<size_t>(j)][i];
            if (relative) v *= orbit.lambda[j] / characteristic_norm(space, adj.q);
            row.push_back(v);
        }
        t.rows.push_back(std::move(row));
    }
    write_csv(c.out_dir / "sens.csv", t);

    json j = orbit_header(c, orbit);
    j["relative"] = relative;
    j["space"] = space_name(space);
    json so = json::object(), sT = json::object();
    for (int jx = 0; jx < c.mc.model.l; ++jx) {
        const std::string& name = c.mc.model.param_names[static_cast<size_t>(jx)];
        double Sw = bundle.S_omega[jx];
        double ST = period_sensitivity(Sw, orbit.omega);
        if (relative) {
            Sw = relative_sensitivity(orbit.omega, Sw, orbit.lambda[jx]);
            ST = relative_sensitivity(orbit.period(), ST, orbit.lambda[jx]);
        }
        so[name] = Sw;
        sT[name] = ST;
    }
    j["S_omega"] = so;
    j["S_T"] = sT;
    write_json(c.out_dir / "sens.json", j);
    std::cout << "sens: " << c.mc.model.l << " parameters on N = " << N << " grid\n";
    return 0;
}

int cmd_robustness(const Common& c) {
    const PeriodicOrbit orbit = solve_configured_orbit(c, Scheme::Trapezoidal);
    const AdjointResult adj = adjoint_prc(c.mc.model, orbit);
    const SensitivityBundle bundle = sensitivity_bundle(c.mc.model, orbit, adj);
    json rc = c.cfg.contains("robustness") ? c.cfg["robustness"] : json::object();
    reject_unknown(rc, {"scaling"}, "config.robustness");
    const std::string scaling = str_at(rc, "scaling", "relative", "config.robustness");
    if (scaling != "relative" && scaling != "absolute")
        throw ConfigError("config.robustness.scaling: must be relative or absolute");
    const PrcSpace space = space_from(c.cfg);
    const RobustnessReport rep =
        robustness(c.mc.model, orbit, adj, bundle, space, scaling == "relative");

    std::ostringstream body;
    body << "parameter,R_omega,R_q,rho_omega,rho_q\n";
    for (int j = 0; j < c.mc.model.l; ++j)
        body << rep.labels[static_cast<size_t>(j)] << "," << fmt17(rep.R_omega[j]) << ","
             << fmt17(rep.R_q[j]) << "," << fmt17(rep.rho_omega[j]) << "," << fmt17(rep.rho_q[j])
             << "\n";
    write_atomic(c.out_dir / "robustness.csv", body.str());

    json j = orbit_header(c, orbit);
    j["space"] = space_name(space);
    j["scaling"] = scaling;
    j["normalized"] = rep.normalized_q && rep.normalized_omega;
    json rank = json::array();
    for (int idx : rep.ranking_q) rank.push_back(rep.labels[static_cast<size_t>(idx)]);
    j["ranking_by_rho_q"] = rank;
    write_json(c.out_dir / "robustness.json", j);
    for (int jx = 0; jx < c.mc.model.l; ++jx)
        std::cout << rep.labels[static_cast<size_t>(jx)]
                  << ": rho_omega = " << fmt17(rep.rho_omega[jx])
                  << ", rho_q = " << fmt17(rep.rho_q[jx]) << "\n";
    return 0;
}

int cmd_identify(const Common& c) {
    if (!c.cfg.contains("identify")) throw ConfigError("config.identify: required");
    const json& ic = c.cfg["identify"];
    reject_unknown(ic, {"target_file", "lambda0", "max_iter", "grad_tol", "multistart"},
                   "config.identify");
    if (!ic.contains("target_file")) throw ConfigError("config.identify.target_file: required");
    const PhaseSignal q_ref_raw = read_prc_csv(ic["target_file"].get<std::string>());

    const SolverConfig sc = build_solver(c.cfg, c.mc, Scheme::Trapezoidal);
    IdentifyOptions opts;
    opts.space = space_from(c.cfg);
    opts.N = sc.N;
    opts.scheme = sc.scheme;
    opts.guess = sc.guess;
    opts.newton = sc.newton;
    opts.max_iter = int_at(ic, "max_iter", 150, "config.identify");
    opts.grad_tol = num_at(ic, "grad_tol", 1e-8, "config.identify");

    PhaseSignal q_ref = q_ref_raw;
    if (static_cast<int>(q_ref_raw.size()) != sc.N) {
        const TrigInterp interp(q_ref_raw);
        q_ref.resize(sc.N);
        for (int i = 0; i < sc.N; ++i) q_ref[i] = interp(two_pi * i / sc.N);
    }

    Vec lambda0 = c.mc.lambda;
    if (ic.contains("lambda0")) {
        const auto& arr = ic["lambda0"];
        if (!arr.is_array() || static_cast<int>(arr.size()) != c.mc.model.l)
            throw ConfigError("config.identify.lambda0: expected an array of length l");
        for (int j = 0; j < c.mc.model.l; ++j)
            lambda0[j] = arr[static_cast<size_t>(j)].get<double>();
    }

    int count = 1;
    double spread = 0.2;
    if (ic.contains("multistart")) {
        reject_unknown(ic["multistart"], {"count", "spread"}, "config.identify.multistart");
        count = int_at(ic["multistart"], "count", 2, "config.identify.multistart");
        spread = num_at(ic["multistart"], "spread", 0.2, "config.identify.multistart");
    }
    const uint64_t seed = static_cast<uint64_t>(num_at(c.cfg, "seed", 0, "config"));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);

    json results = json::array();
    int best = -1;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int k = 0; k < count; ++k) {
        Vec l0 = lambda0;
        if (k > 0)
            for (int j = 0; j < c.mc.model.l; ++j) l0[j] = lambda0[j] * (1.0 + spread * uni(rng));
        const IdentifyState st = identify(c.mc.model, q_ref, l0, c.mc.seed_state, opts);

        CsvTable trace;
        trace.header = {"iter"};
        for (const auto& n : c.mc.model.param_names) trace.header.push_back(n);
        trace.header.insert(trace.header.end(), {"cost", "grad_norm", "step"});
        for (size_t i = 0; i < st.trace.size(); ++i) {
            std::vector<double> row{static_cast<double>(i)};
            for (int j = 0; j < c.mc.model.l; ++j) row.push_back(st.trace[i].lambda[j]);
            row.insert(row.end(), {st.trace[i].cost, st.trace[i].grad_norm, st.trace[i].step});
            trace.rows.push_back(std::move(row));
        }
        write_csv(c.out_dir / ("identify_trace_" + std::to_string(k) + ".csv"), trace);

        json r;
        r["start"] = vec_to_json(l0);
        r["lambda"] = vec_to_json(st.lambda);
        r["cost"] = st.cost;
        r["dist"] = st.dist;
        r["iterations"] = st.iterations;
        r["status"] = (st.status == IdentifyStatus::GradientConverged ? "gradient_converged"
                       : st.status == IdentifyStatus::CostConverged   ? "cost_converged"
                       : st.status == IdentifyStatus::MaxIterations   ? "max_iterations"
                                                                      : "boundary_reached");
        results.push_back(r);
        if (st.cost < best_cost) {
            best_cost = st.cost;
            best = k;
        }
        std::cout << "start " << k << ": dist = " << fmt17(st.dist) << ", cost = " << fmt17(st.cost)
                  << ", iterations = " << st.iterations << " (" << r["status"].get<std::string>()
                  << ")\n";
    }
    json j;
    j["model"] = c.mc.id;
    j["space"] = space_name(opts.space);
    j["seed"] = seed;
    j["runs"] = results;
    j["best_run"] = best;
    write_json(c.out_dir / "identify.json", j);
    return 0;
}

int cmd_classify(const Common& c) {
    json cc = c.cfg.contains("classify") ? c.cfg["classify"] : json::object();
    reject_unknown(cc, {"input_file", "tie_tol"}, "config.classify");
    const double tie_tol = num_at(cc, "tie_tol", 1e-9, "config.classify");
    const PrcSpace space = space_from(c.cfg);

    PhaseSignal q;
    json j;
    if (cc.contains("input_file")) {
        q = read_prc_csv(cc["input_file"].get<std::string>());
        j["source"] = cc["input_file"].get<std::string>();
        j["model"] = c.mc.id;
    } else {
        const PeriodicOrbit orbit = solve_configured_orbit(c, Scheme::MultipleShooting);
        q = adjoint_prc(c.mc.model, orbit).q;
        j = orbit_header(c, orbit);
    }
    const Classification cl = classify(q, space, tie_tol);
    j["space"] = space_name(space);
    j["label"] = classification_name(cl.label);
    j["d_I"] = cl.d1;
    j["d_II"] = cl.d2;
    write_json(c.out_dir / "classify.json", j);
    std::cout << classification_name(cl.label) << " (d_I = " << fmt17(cl.d1)
              << ", d_II = " << fmt17(cl.d2) << ")\n";
    return 0;
}

int cmd_dist(const Common& c, const std::string& file1, const std::string& file2) {
    json dc = c.cfg.contains("dist") ? c.cfg["dist"] : json::object();
    reject_unknown(dc, {"spaces"}, "config.dist");
    std::vector<std::string> spaces{"A", "B", "C", "D"};
    if (dc.contains("spaces")) {
        spaces.clear();
        for (const auto& s : dc["spaces"]) spaces.push_back(s.get<std::string>());
    }
    const PhaseSignal q1 = read_prc_csv(file1);
    const PhaseSignal q2 = read_prc_csv(file2);
    if (q1.size() != q2.size()) throw GridMismatch("dist: the two files use different grids");
    json out;
    out["file1"] = file1;
    out["file2"] = file2;
    json d = json::object();
    for (const auto& tag : spaces) {
        const double val = distance(parse_space(tag), q1, q2);
        d[tag] = val;
        std::cout << "dist_" << tag << " = " << fmt17(val) << "\n";
    }
    out["dist"] = d;
    write_json(c.out_dir / "dist.json", out);
    return 0;
}

int run(int argc, char** argv) {
    CLI::App app{"phase response curve toolbox"};
    app.require_subcommand(1);
    std::string config_path, out_dir = ".";
    std::string file1, file2;

    const std::vector<std::string> names{"orbit", "prc",      "sens", "robustness",
                                         "identify", "classify", "dist"};
    std::map<std::string, CLI::App*> subs;
    for (const auto& n : names) {
        CLI::App* s = app.add_subcommand(n);
        s->add_option("--config", config_path, "configuration file")->required();
        s->add_option("--out", out_dir, "output directory");
        if (n == "dist") {
            s->add_option("file1", file1, "first PRC csv")->required();
            s->add_option("file2", file2, "second PRC csv")->required();
        }
        subs[n] = s;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // usage errors exit 1
    }

    try {
        Common c;
        c.cfg = load_config(config_path);
        c.out_dir = out_dir;
        std::filesystem::create_directories(c.out_dir);
        c.mc = build_model(c.cfg);

        if (subs["orbit"]->parsed()) return cmd_orbit(c);
        if (subs["prc"]->parsed()) return cmd_prc(c);
        if (subs["sens"]->parsed()) return cmd_sens(c);
        if (subs["robustness"]->parsed()) return cmd_robustness(c);
        if (subs["identify"]->parsed()) return cmd_identify(c);
        if (subs["classify"]->parsed()) return cmd_classify(c);
        if (subs["dist"]->parsed()) return cmd_dist(c, file1, file2);
        return 1;
    } catch (const ConfigError& e) {
        json err{{"error", {{"type", "config"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 1;
    } catch (const json::exception& e) {
        // wrong value types inside an otherwise valid config
        json err{{"error", {{"type", "config"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        json err{{"error", {{"type", "numerical"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 2;
    }
}

}  // namespace prclab::cli

int main(int argc, char** argv) { return prclab::cli::run(argc, argv); }
