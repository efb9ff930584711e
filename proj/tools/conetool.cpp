// conetool — cone asymptotics and solver experiments from the command line.
//
// Subcommands: spectrum, roots, windows, solve, fit, decompose, probe,
// compare, report.  Exit codes: 0 success, 1 numerical failure, 2 usage or
// config error.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "conetool/runner.hpp"

using namespace conetool;
namespace fs = std::filesystem;

namespace {

int g_threads = 1;
bool g_verbose = false;

void vlog(const std::string& msg) {
    if (g_verbose) std::cerr << "[conetool] " << msg << "\n";
}

std::vector<double> parse_time_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        if (!cell.empty()) out.push_back(std::stod(cell));
    }
    return out;
}

nlohmann::json load_json(const std::string& path) {
    try {
        return nlohmann::json::parse(read_text(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("cannot parse " + path + ": " + e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cone asymptotics toolkit"};
    app.require_subcommand(1);

    if (const char* env = std::getenv("CONETOOL_THREADS")) g_threads = std::atoi(env);
    app.add_option("--threads", g_threads, "worker thread cap (env CONETOOL_THREADS)");
    app.add_flag("--verbose", g_verbose, "progress logging to stderr");

    // spectrum
    auto* sp = app.add_subcommand("spectrum", "emit a cross-section spectrum");
    double sp_circle = 0.0, sp_sphere_a = 1.0;
    int sp_sphere_n = 0, sp_lmax = 8;
    std::string sp_custom, sp_out = "spectrum.json";
    sp->add_option("--circle", sp_circle, "circle circumference factor a");
    sp->add_option("--sphere-n", sp_sphere_n, "sphere dimension n (>= 2)");
    sp->add_option("--sphere-a", sp_sphere_a, "sphere radius a");
    sp->add_option("--custom", sp_custom, "JSON file with [[lambda, mult], ...]");
    sp->add_option("--lmax", sp_lmax, "mode cutoff");
    sp->add_option("--out", sp_out, "output path");

    // roots
    auto* rt = app.add_subcommand("roots", "exponent set Q_k with pole orders");
    std::string rt_spectrum, rt_out = "q_set.json";
    double rt_gamma = 0.0;
    int rt_k = 2;
    bool rt_allow_incomplete = false;
    rt->add_option("--spectrum", rt_spectrum, "spectrum JSON")->required();
    rt->add_option("--gamma", rt_gamma, "Mellin weight")->required();
    rt->add_option("--k", rt_k, "power of the Laplacian")->required();
    rt->add_flag("--allow-incomplete", rt_allow_incomplete,
                 "tolerate a failing truncation certificate");
    rt->add_option("--out", rt_out, "output path");

    // windows
    auto* wd = app.add_subcommand("windows", "admissible parameter windows");
    std::string wd_problem = "pme", wd_out = "windows.json";
    int wd_n = 1;
    double wd_lam1 = -1.0, wd_p = 12.0, wd_q = 12.0, wd_gamma = 0.0, wd_s0 = 0.0;
    wd->add_option("--problem", wd_problem, "laplacian|pme|sh")->required();
    wd->add_option("--n", wd_n, "cross-section dimension")->required();
    wd->add_option("--lambda1", wd_lam1, "greatest nonzero eigenvalue")->required();
    wd->add_option("--p", wd_p, "spatial exponent");
    wd->add_option("--q", wd_q, "time exponent");
    wd->add_option("--gamma", wd_gamma, "Mellin weight");
    wd->add_option("--s0", wd_s0, "base smoothness");
    wd->add_option("--out", wd_out, "output path");

    // solve
    auto* sv = app.add_subcommand("solve", "evolve heat|pme|sh on the model cone");
    std::string sv_problem, sv_model, sv_config, sv_times, sv_out = "traj";
    sv->add_option("problem", sv_problem, "heat|pme|sh")->required();
    sv->add_option("--model", sv_model, "model JSON")->required();
    sv->add_option("--config", sv_config, "solver config JSON (with \"initial\")")->required();
    sv->add_option("--times", sv_times, "comma-separated store times (default: all steps)");
    sv->add_option("--out", sv_out, "trajectory directory");
    std::uint64_t sv_seed = 1;
    sv->add_option("--seed", sv_seed, "seed for randomized initial data");

    // fit
    auto* ft = app.add_subcommand("fit", "near-tip exponent fit of a trajectory slice");
    std::string ft_traj, ft_out = "fit.json";
    double ft_time = 0.0, ft_lo = 1e-4, ft_hi = 1e-2;
    int ft_mode = 0;
    bool ft_sub = false;
    ft->add_option("--traj", ft_traj, "trajectory directory")->required();
    ft->add_option("--time", ft_time, "slice time")->required();
    ft->add_option("--mode", ft_mode, "mode index");
    ft->add_option("--window-lo", ft_lo, "fit window lower edge");
    ft->add_option("--window-hi", ft_hi, "fit window upper edge");
    ft->add_flag("--subtract-constant", ft_sub, "remove the extrapolated tip limit first");
    ft->add_option("--out", ft_out, "output path");

    // decompose
    auto* dc = app.add_subcommand("decompose", "frozen-coefficient decomposition on [tau, nu]");
    std::string dc_traj, dc_out = "report.json";
    double dc_tau = 0.0, dc_nu = 0.0, dc_q = 2.0, dc_p = 2.0;
    double dc_gamma = std::numeric_limits<double>::quiet_NaN();
    int dc_kmax = 2;
    dc->add_option("--traj", dc_traj, "trajectory directory")->required();
    dc->add_option("--tau", dc_tau, "window start (a stored stamp)")->required();
    dc->add_option("--nu", dc_nu, "window end (a stored stamp)")->required();
    dc->add_option("--q", dc_q, "time exponent");
    dc->add_option("--p", dc_p, "spatial exponent");
    dc->add_option("--gamma", dc_gamma, "Mellin weight (default: window midpoint)");
    dc->add_option("--k-max", dc_kmax, "operator-power check depth");
    dc->add_option("--out", dc_out, "output path");

    // probe
    auto* pb = app.add_subcommand("probe", "sectoriality probe of a frozen operator");
    std::string pb_from, pb_out = "probe.json";
    double pb_theta = 3.0 * M_PI / 4.0, pb_c = 0.0;
    double pb_gamma = std::numeric_limits<double>::quiet_NaN();
    int pb_samples = 16;
    pb->add_option("--matrix-from", pb_from, "traj_dir@time")->required();
    pb->add_option("--theta", pb_theta, "sector angle in (pi/2, pi)");
    pb->add_option("--c", pb_c, "spectral shift");
    pb->add_option("--samples", pb_samples, "points per ray");
    pb->add_option("--gamma", pb_gamma, "weight of the probe norm (default: window midpoint)");
    pb->add_option("--out", pb_out, "output path");

    // compare
    auto* cp = app.add_subcommand("compare", "tolerance-aware report comparison");
    std::string cp_report, cp_golden;
    double cp_abs = 1e-12, cp_rel = 1e-9;
    cp->add_option("--report", cp_report, "report JSON")->required();
    cp->add_option("--golden", cp_golden, "golden JSON")->required();
    cp->add_option("--tol-abs", cp_abs, "absolute tolerance");
    cp->add_option("--tol-rel", cp_rel, "relative tolerance");

    // report
    auto* rp = app.add_subcommand("report", "full verification pipeline from a config");
    std::string rp_config, rp_out = "report_out";
    std::uint64_t rp_seed = 0;
    bool rp_have_seed = false;
    rp->add_option("--config", rp_config, "experiment config JSON")->required();
    rp->add_option("--out", rp_out, "output directory");
    rp->add_option("--seed", rp_seed, "override the config seed")
        ->each([&](const std::string&) { rp_have_seed = true; });

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sp) {
            ModeSpectrum s;
            if (sp_circle > 0.0)
                s = circle_spectrum(sp_circle, sp_lmax);
            else if (sp_sphere_n >= 2)
                s = sphere_spectrum(sp_sphere_n, sp_sphere_a, sp_lmax);
            else if (!sp_custom.empty()) {
                std::vector<std::pair<double, int>> pairs;
                nlohmann::json j = load_json(sp_custom);
                int n = 1;
                const nlohmann::json* list = &j;
                if (j.is_object()) {
                    n = j.value("n", 1);
                    list = &j.at("pairs");
                }
                for (const auto& e : *list)
                    pairs.push_back({e.at(0).get<double>(), e.at(1).get<int>()});
                s = custom_spectrum(pairs, n);
            } else
                throw ConfigError("spectrum: give --circle, --sphere-n, or --custom");
            write_text(sp_out, spectrum_json(s).dump());
            vlog("wrote " + sp_out);
        } else if (*rt) {
            ModeSpectrum s = parse_spectrum(load_json(rt_spectrum));
            QSetOptions opts;
            opts.require_complete = !rt_allow_incomplete;
            QSetResult q = q_set(s, s.n, rt_gamma, rt_k, opts);
            write_text(rt_out, q_set_json(q).dump());
            vlog("wrote " + rt_out);
        } else if (*wd) {
            Problem prob = parse_problem(wd_problem);
            JValue j = JValue::object();
            j.set("lambda1", wd_lam1);
            j.set("weight_window",
                  window_json(weight_window(prob, wd_n, wd_lam1,
                                            prob == Problem::Laplacian ? 0.0 : wd_q)));
            if (prob != Problem::Laplacian) {
                j.set("constraints", window_json(validate_parameters(prob, wd_n, wd_lam1, wd_p,
                                                                     wd_q, wd_gamma, wd_s0)));
                j.set("delta_window", window_json(delta_window(wd_n, wd_p, wd_q, wd_gamma)));
            }
            write_text(wd_out, j.dump());
            vlog("wrote " + wd_out);
        } else if (*sv) {
            ConeModel model = parse_model(load_json(sv_model));
            nlohmann::json cj = load_json(sv_config);
            SolverConfig config = parse_solver_config(cj);
            config.threads = g_threads;
            if (!cj.contains("initial")) throw ConfigError("solve: config needs \"initial\"");
            ConeField u0 = build_initial(model, cj.at("initial"), sv_seed);
            std::vector<double> times =
                sv_times.empty() ? std::vector<double>{} : parse_time_list(sv_times);
            Trajectory traj = run_solve(model, sv_problem, config, u0, times);
            write_trajectory(sv_out, traj);
            vlog("wrote trajectory with " + std::to_string(traj.slices.size()) + " slices");
        } else if (*ft) {
            Trajectory traj = read_trajectory(ft_traj);
            FitResult fit = fit_exponent(traj.at(ft_time), ft_mode, {ft_lo, ft_hi}, ft_sub);
            JValue j = fit_json(ft_mode, fit);
            j.set("time", ft_time);
            j.set("deviations", deviations_json(traj.model));
            write_text(ft_out, j.dump());
            vlog("alpha = " + JValue::real17(fit.alpha));
        } else if (*dc) {
            Trajectory traj = read_trajectory(dc_traj);
            DecomposeOptions opts;
            opts.q = dc_q;
            opts.p = dc_p;
            opts.gamma = std::isnan(dc_gamma) ? default_gamma(traj.model) : dc_gamma;
            opts.k_max = dc_kmax;
            DecompositionReport rep = decompose(traj, dc_tau, dc_nu, opts);
            write_text(dc_out, decomposition_json(rep, traj.model).dump());
            vlog("fitted_C = " + JValue::real17(rep.fitted_C));
        } else if (*pb) {
            auto at = pb_from.find('@');
            if (at == std::string::npos)
                throw ConfigError("probe: --matrix-from must be traj_dir@time");
            Trajectory traj = read_trajectory(pb_from.substr(0, at));
            double t = std::stod(pb_from.substr(at + 1));
            double gamma = std::isnan(pb_gamma) ? default_gamma(traj.model) : pb_gamma;
            FrozenOperator fr = frozen_operator(traj, t);
            ProbeResult res = sectorial_probe(probe_matrix(fr, gamma), pb_theta, pb_c, pb_samples);
            write_text(pb_out, probe_json(res, traj.model, gamma).dump());
            vlog("K_est = " + JValue::real17(res.K_est));
        } else if (*cp) {
            nlohmann::json a = load_json(cp_report), b = load_json(cp_golden);
            CompareResult res = compare_reports(a, b, cp_abs, cp_rel);
            for (const auto& d : res.diffs) std::cout << d << "\n";
            if (res.schema_mismatch) {
                std::cerr << "schema mismatch\n";
                return 2;
            }
            if (!res.diffs.empty()) return 1;
            std::cout << "reports agree within tolerance\n";
        } else if (*rp) {
            nlohmann::json cfg = load_json(rp_config);
            RunResult rr = run_experiment(cfg, rp_out, rp_seed, rp_have_seed);
            return rr.exit_code;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
