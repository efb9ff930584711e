// runner.hpp — experiment orchestration behind the command-line tool: config
// ingestion, initial-data construction, the task pipeline
// spectrum → roots → windows → solve → fit/decompose/probe, and report
// emission.  Reports embed the config hash and the deliberate-deviation
// ledger; reruns with identical config are byte-identical.

#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "io.hpp"

namespace conetool {

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

inline Problem parse_problem(const std::string& s) {
    if (s == "heat" || s == "laplacian") return Problem::Laplacian;
    if (s == "pme") return Problem::Pme;
    if (s == "sh") return Problem::Sh;
    throw ConfigError("unknown problem '" + s + "'");
}

// ── Initial data ─────────────────────────────────────────────────────────
// One component: constant, eigenvector, power profile, or seeded random
// band-limited noise.  A JSON array of components is summed.
inline ConeField build_initial_component(const ConeModel& model, const nlohmann::json& j,
                                         std::uint64_t seed) {
    ConeField f;
    f.mesh = model.mesh;
    f.cross = model.cross;
    const int nn = model.mesh->size();
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant") {
        f.modes.push_back(
            {0, Eigen::VectorXcd::Constant(nn, j.at("value").get<double>())});
        return f;
    }
    if (kind == "eigenvector") {
        int mode = j.value("mode", 0);
        int index = j.value("index", 1);
        double scale = j.value("scale", 1.0);
        double shift = j.value("shift", 0.0);
        auto pairs = mode_eigenpairs(model, mode, index);
        Eigen::VectorXd v = pairs.back().vec / pairs.back().vec.cwiseAbs().maxCoeff();
        if (mode == 0) {
            f.modes.push_back({0, (shift + (scale * v).array()).matrix().cast<Complex>()});
        } else {
            if (shift != 0.0)
                f.modes.push_back({0, Eigen::VectorXcd::Constant(nn, shift)});
            f.modes.push_back({mode, (scale * v).cast<Complex>()});
        }
        return f;
    }
    if (kind == "power") {
        int mode = j.value("mode", 0);
        double alpha = j.at("alpha").get<double>();
        double scale = j.value("scale", 1.0);
        double shift = j.value("shift", 0.0);
        bool taper = j.value("taper", true);
        Eigen::VectorXcd v(nn);
        for (int i = 0; i < nn; ++i) {
            double x = model.mesh->x(i);
            v(i) = scale * std::pow(x, alpha) * (taper ? 1.0 - x : 1.0);
        }
        if (mode == 0) {
            v.array() += shift;
            f.modes.push_back({0, v});
        } else {
            if (shift != 0.0)
                f.modes.push_back({0, Eigen::VectorXcd::Constant(nn, shift)});
            f.modes.push_back({mode, v});
        }
        return f;
    }
    if (kind == "random_bandlimited") {
        double scale = j.value("scale", 1.0);
        double decay = j.value("decay", 1.0);
        double shift = j.value("shift", 0.0);
        std::mt19937_64 rng(seed + static_cast<std::uint64_t>(j.value("seed_offset", 0)));
        std::normal_distribution<double> gauss;
        for (int m = 0; m <= model.l_max; ++m) {
            Eigen::VectorXcd v(nn);
            Complex amp(gauss(rng), m == 0 ? 0.0 : gauss(rng));
            for (int i = 0; i < nn; ++i) {
                double x = model.mesh->x(i);
                v(i) = scale * std::pow(decay, m) * amp * x * (1.0 - 0.5 * x);
            }
            if (m == 0) v.array() += shift;
            f.modes.push_back({m, v});
            if (m > 0) f.modes.push_back({-m, v.conjugate()});
        }
        return f;
    }
    if (kind == "csv") {
        return read_field_csv(j.at("path").get<std::string>(), model);
    }
    throw ConfigError("unknown initial kind '" + kind + "'");
}

inline ConeField build_initial(const ConeModel& model, const nlohmann::json& j,
                               std::uint64_t seed) {
    if (j.is_array()) {
        if (j.empty()) throw ConfigError("initial: empty component list");
        ConeField acc = build_initial_component(model, j[0], seed);
        for (std::size_t k = 1; k < j.size(); ++k) {
            ConeField c = build_initial_component(model, j[k], seed);
            // merge by mode label
            for (const auto& mp : c.modes) {
                int idx = acc.mode_index(mp.m);
                if (idx < 0)
                    acc.modes.push_back(mp);
                else
                    acc.modes[static_cast<std::size_t>(idx)].v += mp.v;
            }
        }
        return acc;
    }
    return build_initial_component(model, j, seed);
}

// ── Task pipeline ────────────────────────────────────────────────────────
struct RunResult {
    int exit_code = 0;
    std::vector<std::string> messages;
};

inline Trajectory run_solve(const ConeModel& model, const std::string& problem,
                            const SolverConfig& config, const ConeField& u0,
                            const std::vector<double>& store_times) {
    if (problem == "heat") return solve_heat(model, u0, config, store_times);
    if (problem == "pme") return solve_pme(model, u0, config, store_times);
    if (problem == "sh") return solve_sh(model, u0, config, store_times);
    throw ConfigError("unknown problem '" + problem + "'");
}

inline JValue decomposition_json(const DecompositionReport& rep, const ConeModel& model) {
    JValue j = JValue::object();
    j.set("problem", rep.problem);
    j.set("decomposed_variable", rep.decomposed_variable);
    j.set("tau", rep.tau);
    j.set("nu", rep.nu);
    j.set("q", rep.q);
    j.set("gamma", rep.gamma);
    j.set("p", rep.p);
    j.set("w_at_tau", rep.w_at_tau);
    j.set("duhamel_max_diff", rep.duhamel_max_diff);
    j.set("G_tau_norm", rep.G_norm);
    j.set("w_norm", rep.w_norm);
    j.set("fitted_C", rep.fitted_C);
    j.set("vacuous", rep.vacuous);
    if (!rep.power_check.empty()) {
        JValue rows = JValue::array();
        for (const auto& r : rep.power_check) {
            JValue row = JValue::object();
            row.set("k", r.k);
            row.set("norm", r.norm);
            row.set("condition_estimate", r.condition_estimate);
            rows.push(std::move(row));
        }
        j.set("power_check", std::move(rows));
    }
    if (rep.v_tip_fit_valid) j.set("v_tip_fit", fit_json(0, rep.v_tip_fit));
    j.set("deviations", deviations_json(model));
    return j;
}

inline JValue probe_json(const ProbeResult& res, const ConeModel& model, double gamma) {
    JValue j = JValue::object();
    j.set("theta", res.theta);
    j.set("c", res.c);
    j.set("K_est", res.K_est);
    j.set("worst_lambda_re", res.worst_lambda.real());
    j.set("worst_lambda_im", res.worst_lambda.imag());
    j.set("samples", res.samples);
    j.set("weight_gamma", gamma);
    JValue table = JValue::array();
    for (const auto& [lam, val] : res.table) {
        JValue row = JValue::object();
        row.set("lambda_re", lam.real());
        row.set("lambda_im", lam.imag());
        row.set("bound", val);
        table.push(std::move(row));
    }
    j.set("table", std::move(table));
    j.set("note", res.note);
    j.set("deviations", deviations_json(model));
    return j;
}

// Default analysis weight: midpoint of the admissible window of the
// Laplacian realization for the model's spectrum.
inline double default_gamma(const ConeModel& model) {
    ModeSpectrum s = spectrum_of(*model.cross, std::max(model.l_max, 1));
    ParameterWindow w = weight_window(Problem::Laplacian, model.n, lambda1(s));
    return 0.5 * (w.lo + w.hi);
}

// Full verification pipeline for one geometry ("report" subcommand).
inline RunResult run_experiment(const nlohmann::json& cfg, const std::filesystem::path& out_dir,
                                std::uint64_t seed_override = 0, bool have_seed_override = false) {
    RunResult result;
    std::filesystem::create_directories(out_dir);

    ConeModel model = parse_model(cfg.at("model"));
    std::string problem = cfg.value("problem", "heat");
    (void)parse_problem(problem);
    std::uint64_t seed = have_seed_override
                             ? seed_override
                             : static_cast<std::uint64_t>(cfg.value("seed", 1));

    const std::string cfg_canonical = cfg.dump();
    JValue summary = JValue::object();
    summary.set("config_hash", fnv1a_hex(cfg_canonical));
    summary.set("problem", problem);
    summary.set("seed", static_cast<long long>(seed));
    summary.set("model", model_json(model));
    std::ostringstream text;
    text << "verification run (" << problem << ")\n";
    text << "config hash " << fnv1a_hex(cfg_canonical) << "\n";

    std::vector<std::string> tasks;
    if (cfg.contains("tasks"))
        for (const auto& t : cfg.at("tasks")) tasks.push_back(t.get<std::string>());
    else
        tasks = {"spectrum", "roots", "windows"};

    auto has_task = [&](const std::string& t) {
        return std::find(tasks.begin(), tasks.end(), t) != tasks.end();
    };

    ModeSpectrum spectrum = spectrum_of(*model.cross, std::max(model.l_max, 2));
    if (has_task("spectrum")) {
        write_text(out_dir / "spectrum.json", spectrum_json(spectrum).dump());
        text << "spectrum: " << spectrum.entries.size() << " modes, lambda1 = "
             << JValue::real17(lambda1(spectrum)) << "\n";
    }

    if (has_task("roots")) {
        const auto& rj = cfg.at("roots");
        double gamma = rj.value("gamma", default_gamma(model));
        int k = rj.value("k", 2);
        QSetOptions opts;
        opts.require_complete = rj.value("require_complete", true);
        // widen the spectrum until the certificate holds (presets only)
        ModeSpectrum wide = spectrum;
        if (model.cross->kind != CrossSection::Kind::Custom) {
            int l = std::max(model.l_max, 2);
            while (l < 4096 &&
                   !spectrum_complete_for_strip(wide, model.n,
                                                make_strip(Strip::Kind::S, model.n, gamma, k), k)) {
                l *= 2;
                wide = spectrum_of(*model.cross, l);
            }
        }
        QSetResult q = q_set(wide, model.n, gamma, k, opts);
        write_text(out_dir / "q_set.json", q_set_json(q).dump());
        text << "roots: k=" << k << " gamma=" << JValue::real17(gamma) << ": " << q.roots.size()
             << " roots, complete=" << (q.complete ? "yes" : "no") << "\n";
    }

    if (has_task("windows")) {
        const auto& wj = cfg.at("windows");
        double lam1 = lambda1(spectrum);
        double p = wj.value("p", 12.0), q = wj.value("q", 12.0);
        double gamma = wj.value("gamma", default_gamma(model));
        double s0 = wj.value("s0", 0.0);
        Problem prob = parse_problem(problem);
        JValue j = JValue::object();
        j.set("lambda1", lam1);
        j.set("weight_window", window_json(weight_window(prob, model.n, lam1,
                                                         prob == Problem::Laplacian ? 0.0 : q)));
        if (prob != Problem::Laplacian) {
            j.set("constraints",
                  window_json(validate_parameters(prob, model.n, lam1, p, q, gamma, s0)));
            j.set("delta_window", window_json(delta_window(model.n, p, q, gamma)));
        }
        write_text(out_dir / "windows.json", j.dump());
        text << "windows: written\n";
    }

    Trajectory traj;
    bool have_traj = false;
    if (has_task("solve") || has_task("fit") || has_task("decompose") || has_task("probe")) {
        SolverConfig solver = parse_solver_config(cfg.at("solver"));
        ConeField u0 = build_initial(model, cfg.at("initial"), seed);
        std::vector<double> store;
        if (cfg.contains("store_times"))
            for (const auto& t : cfg.at("store_times")) store.push_back(t.get<double>());
        traj = run_solve(model, problem, solver, u0, store);
        have_traj = true;
        if (has_task("solve")) {
            write_trajectory(out_dir / "traj", traj);
            text << "solve: " << traj.slices.size() << " stored slices to t="
                 << JValue::real17(traj.slices.back().t) << "\n";
        }
    }

    if (has_task("fit")) {
        const auto& fj = cfg.at("fit");
        double t = fj.value("time", traj.slices.back().t);
        int mode = fj.value("mode", 0);
        std::pair<double, double> window{1e-4, 1e-2};
        if (fj.contains("window"))
            window = {fj.at("window")[0].get<double>(), fj.at("window")[1].get<double>()};
        bool sub = fj.value("subtract_constant", false);
        FitResult fit = fit_exponent(traj.at(t), mode, window, sub);
        JValue j = fit_json(mode, fit);
        j.set("time", t);
        j.set("deviations", deviations_json(model));
        write_text(out_dir / "fit.json", j.dump());
        text << "fit: mode " << mode << " alpha=" << JValue::real17(fit.alpha)
             << " log_power=" << fit.log_power << "\n";
    }

    if (has_task("decompose")) {
        const auto& dj = cfg.at("decompose");
        DecomposeOptions opts;
        opts.q = dj.value("q", 2.0);
        opts.gamma = dj.value("gamma", default_gamma(model));
        opts.p = dj.value("p", 2.0);
        opts.k_max = dj.value("k_max", 2);
        double tau = dj.at("tau").get<double>();
        double nu = dj.at("nu").get<double>();
        DecompositionReport rep = decompose(traj, tau, nu, opts);
        write_text(out_dir / "decompose.json", decomposition_json(rep, model).dump());
        text << "decompose: fitted_C=" << JValue::real17(rep.fitted_C)
             << (rep.vacuous ? " (vacuous)" : "") << "\n";
    }

    if (has_task("probe")) {
        const auto& pj = cfg.at("probe");
        double t = pj.value("time", traj.slices.front().t);
        double theta = pj.value("theta", 3.0 * M_PI / 4.0);
        double c = pj.value("c", 0.0);
        int samples = pj.value("samples", 16);
        double gamma = pj.value("gamma", default_gamma(model));
        FrozenOperator fr = frozen_operator(traj, t);
        ProbeResult res = sectorial_probe(probe_matrix(fr, gamma), theta, c, samples);
        write_text(out_dir / "probe.json", probe_json(res, model, gamma).dump());
        text << "probe: K_est=" << JValue::real17(res.K_est) << "\n";
    }

    (void)have_traj;
    summary.set("deviations", deviations_json(model));
    write_text(out_dir / "summary.json", summary.dump());
    write_text(out_dir / "summary.txt", text.str());
    return result;
}

}  // namespace conetool
