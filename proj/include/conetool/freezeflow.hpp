// freezeflow.hpp — frozen-coefficient decomposition of evolved solutions.
//
// Along a trajectory of the quasilinear problem u' + A(u)u = F(u,·) + G,
// freeze the operator at a stamp τ: A_τ = A(u(τ)).  Then on [τ, ν]
//
//   u = v_τ + w_τ,
//   v_τ(t) = e^{(τ−t)A_τ} u(τ)                      (smooth part)
//   w_τ(t) = ∫_0^{t−τ} e^{(τ+s−t)A_τ} G_τ(s) ds     (remainder)
//   G_τ(t) = A_τ u(t) − A(u(t))u(t) + F(u(t),t) + G(t),
//
// and the remainder obeys ‖w_τ‖_MR ≤ C·‖G_τ‖_{L^q(τ,ν;X₀)} with C bounded
// as the window shrinks.  Discrete surrogates used here:
//   * X₀ norm  = s=0 Mellin norm at (γ, p),
//   * MR norm  = L^q-in-time of ‖w‖ + ‖ẇ‖ + ‖A_τ w‖ in X₀, the time
//     derivative by stepper-consistent backward differences,
//   * v_τ propagated by the run's own stepper; a dense matrix-exponential
//     route is available as an independent cross-check on coarse meshes,
//   * w_τ computed two ways: pointwise subtraction u − v_τ, and the
//     stepper-consistent discrete Duhamel convolution of G_τ.
// Problem instances:  heat  A = −Δ (G_τ ≡ 0);  porous medium, transformed
// trajectory w = u^m, A(w) = −m w^{(m−1)/m} Δ;  Swift–Hohenberg
// A = (Δ+1)² constant with G_τ(t) = V(u(t),t).
//
// Sectoriality is probed as the scalar bound sup (1+|λ|)‖(A+c+λ)^{−1}‖ over
// rays arg λ = ±θ; the randomized-sum strengthening of that bound admits no
// finite-sample certificate and is NOT computed — every probe report says
// so.

#pragma once

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "meshnorm.hpp"
#include "operators.hpp"
#include "solve.hpp"
#include "transform.hpp"

namespace conetool {

// ── Frozen operator ──────────────────────────────────────────────────────
struct FrozenOperator {
    enum class Kind { ModeDiag, PhysBanded };

    std::string problem;  // "heat" | "pme" | "sh"
    double tau = 0.0;
    double m = 1.0;  // porous-medium exponent
    Kind kind = Kind::ModeDiag;
    ConeModel model;

    // mode-diagonal data
    std::vector<ModeOperator> ops;      // L_j per retained mode
    Eigen::VectorXd coef;               // PME frozen coefficient m·w(τ)^{(m−1)/m} (radial)
    // physical-grid data (non-axisymmetric porous medium on a circle)
    std::optional<detail::PhysOperator> phys;
    Eigen::MatrixXd coef_phys;

    bool is_sh() const { return problem == "sh"; }
    bool is_heat() const { return problem == "heat"; }

    // A_τ f
    ConeField apply(const ConeField& f) const {
        ConeField out = f;
        if (kind == Kind::PhysBanded) {
            CircleTransform tr(model.l_max);
            ConeField fb = expand_band(f, model.l_max);
            Eigen::MatrixXd U = tr.to_physical(fb).real();
            Eigen::MatrixXd AU = -(coef_phys.array() * phys->apply(U).array()).matrix();
            return tr.to_modes(AU.cast<Complex>(), fb);
        }
        for (std::size_t j = 0; j < f.modes.size(); ++j) {
            const Eigen::VectorXcd& v = f.modes[j].v;
            if (is_sh()) {
                Eigen::VectorXcd w = ops[j].L.apply(v) + v;
                out.modes[j].v = ops[j].L.apply(w) + w;
            } else if (is_heat()) {
                out.modes[j].v = -ops[j].L.apply(v);
            } else {
                Eigen::VectorXcd Lv = ops[j].L.apply(v);
                out.modes[j].v = -(coef.array().cast<Complex>() * Lv.array());
            }
        }
        return out;
    }

    // (I + alpha·A_τ)^{-1} rhs
    ConeField solve_shifted(double alpha, const ConeField& rhs) const {
        ConeField out = rhs;
        if (kind == Kind::PhysBanded) {
            CircleTransform tr(model.l_max);
            ConeField rb = expand_band(rhs, model.l_max);
            Eigen::MatrixXd R = tr.to_physical(rb).real();
            // A = −coef·Δ, so I + αA = I − α·coef·Δ
            Banded<double> B = phys->shifted(-alpha, coef_phys, /*coeff_left=*/true);
            B.factorize();
            Eigen::VectorXd flat((model.mesh->N + 1) * phys->P);
            for (int i = 0; i <= model.mesh->N; ++i)
                for (int p = 0; p < phys->P; ++p) flat(i * phys->P + p) = R(i, p);
            B.solve_inplace(flat.data(), 1);
            for (int i = 0; i <= model.mesh->N; ++i)
                for (int p = 0; p < phys->P; ++p) R(i, p) = flat(i * phys->P + p);
            return tr.to_modes(R.cast<Complex>(), rb);
        }
        for (std::size_t j = 0; j < rhs.modes.size(); ++j) {
            const Eigen::VectorXcd& v = rhs.modes[j].v;
            if (is_sh()) {
                auto solver = detail::ShImplicit::make(ops[j], alpha);
                out.modes[j].v = solver.solve(v, v(model.mesh->N));
            } else if (is_heat()) {
                out.modes[j].v = thomas_solve(ops[j].L.scaled_shifted(1.0, -alpha), v);
            } else {
                Tridiag scaled = ops[j].L.row_scaled(coef);
                out.modes[j].v = thomas_solve(scaled.scaled_shifted(1.0, -alpha), v);
            }
        }
        return out;
    }

    // dense matrices per mode, for the matrix-exponential cross-check
    std::vector<Eigen::MatrixXd> dense_blocks() const {
        if (kind != Kind::ModeDiag)
            throw std::invalid_argument("dense_blocks: physical-grid operator");
        std::vector<Eigen::MatrixXd> out;
        const int nn = model.mesh->size();
        for (const auto& op : ops) {
            Eigen::MatrixXd L = Eigen::MatrixXd::Zero(nn, nn);
            for (int i = 0; i < nn; ++i) {
                L(i, i) = op.L.diag(i);
                if (i > 0) L(i, i - 1) = op.L.sub(i);
                if (i < nn - 1) L(i, i + 1) = op.L.super(i);
            }
            if (is_sh()) {
                Eigen::MatrixXd M = L + Eigen::MatrixXd::Identity(nn, nn);
                out.push_back(M * M);
            } else if (is_heat()) {
                out.push_back(-L);
            } else {
                out.push_back(-(coef.asDiagonal() * L));
            }
        }
        return out;
    }
};

// Transformed-variable slice w = u^m of a porous-medium trajectory slice.
inline ConeField pme_w_slice(const ConeField& u, double m, int l_max) {
    return apply_pointwise(u, l_max, [m](double v) { return std::pow(v, m); });
}

inline FrozenOperator frozen_operator(const Trajectory& traj, double tau) {
    int idx = traj.index_of_time(tau);
    if (idx < 0) throw std::invalid_argument("frozen_operator: tau is not a trajectory stamp");
    const ConeField& slice = traj.slices[static_cast<std::size_t>(idx)];

    FrozenOperator fr;
    fr.problem = traj.problem;
    fr.tau = tau;
    fr.m = traj.config.m;
    fr.model = traj.model;

    const bool axisym = is_axisymmetric(slice);
    if (traj.problem == "pme") {
        double mn = physical_min(slice, traj.model.l_max);
        if (!(mn > 0.0))
            throw std::runtime_error("frozen_operator: slice at tau is not strictly positive");
        ConeField w = pme_w_slice(slice, fr.m, traj.model.l_max);
        if (axisym) {
            fr.kind = FrozenOperator::Kind::ModeDiag;
            Eigen::VectorXd wv = w.mode(0).real();
            fr.coef.resize(wv.size());
            for (int i = 0; i < wv.size(); ++i)
                fr.coef(i) = fr.m * std::pow(wv(i), (fr.m - 1.0) / fr.m);
            for (const auto& mp : slice.modes) fr.ops.push_back(assemble_mode_operator(traj.model, mp.m));
        } else {
            fr.kind = FrozenOperator::Kind::PhysBanded;
            fr.phys = detail::PhysOperator::make(traj.model);
            CircleTransform tr(traj.model.l_max);
            Eigen::MatrixXd W = tr.to_physical(expand_band(w, traj.model.l_max)).real();
            fr.coef_phys = (fr.m * W.array().pow((fr.m - 1.0) / fr.m)).matrix();
        }
    } else {
        fr.kind = FrozenOperator::Kind::ModeDiag;
        for (const auto& mp : slice.modes) fr.ops.push_back(assemble_mode_operator(traj.model, mp.m));
    }
    return fr;
}

// The forcing G_τ evaluated on a trajectory slice (in the decomposition
// variable: w = u^m for the porous medium, u itself otherwise).
inline ConeField frozen_forcing(const FrozenOperator& fr, const Trajectory& traj,
                                const ConeField& slice_decomp_var) {
    if (fr.is_heat()) return ConeField::zeros_like(slice_decomp_var, slice_decomp_var.t);
    if (fr.is_sh()) {
        double t = slice_decomp_var.t;
        return apply_pointwise(slice_decomp_var, traj.model.l_max,
                               [&](double v) { return traj.config.V.eval(v, t); });
    }
    // pme: G_τ(t) = (A_τ − A(w(t))) w(t) = (c(t) − c_τ) ⊙ Δw(t)
    const ConeField& w = slice_decomp_var;
    if (fr.kind == FrozenOperator::Kind::ModeDiag) {
        if (!is_axisymmetric(w))
            throw std::invalid_argument(
                "frozen_forcing: slice became non-axisymmetric after an axisymmetric freeze");
        ConeField out = w;
        Eigen::VectorXd wv = w.mode(0).real();
        Eigen::VectorXd ct(wv.size());
        for (int i = 0; i < wv.size(); ++i)
            ct(i) = fr.m * std::pow(wv(i), (fr.m - 1.0) / fr.m);
        for (std::size_t j = 0; j < w.modes.size(); ++j) {
            Eigen::VectorXcd Lw = fr.ops[j].L.apply(w.modes[j].v);
            out.modes[j].v = ((ct - fr.coef).array().cast<Complex>() * Lw.array());
        }
        return out;
    }
    CircleTransform tr(fr.model.l_max);
    ConeField wb = expand_band(w, fr.model.l_max);
    Eigen::MatrixXd W = tr.to_physical(wb).real();
    Eigen::MatrixXd ct = (fr.m * W.array().pow((fr.m - 1.0) / fr.m)).matrix();
    Eigen::MatrixXd G = ((ct - fr.coef_phys).array() * fr.phys->apply(W).array()).matrix();
    return tr.to_modes(G.cast<Complex>(), wb);
}

namespace detail {

// One step of v' + A v = g(t) with the configured stepper.
inline ConeField frozen_step(const FrozenOperator& fr, const ConeField& v, double dt,
                             SolverConfig::Stepper stepper, const ConeField* g_new,
                             const ConeField* g_old, const ConeField* g_mid) {
    if (stepper == SolverConfig::Stepper::BackwardEuler) {
        ConeField rhs = v;
        if (g_new) rhs = field_axpy(dt, *g_new, rhs);
        ConeField out = fr.solve_shifted(dt, rhs);
        out.t = v.t + dt;
        return out;
    }
    const double g = kTrbdf2Gamma;
    const double beta = (1.0 - g) / (2.0 - g);
    const double c1 = 1.0 / (g * (2.0 - g)), c2 = (1.0 - g) * (1.0 - g) / (g * (2.0 - g));
    ConeField Av = fr.apply(v);
    ConeField rhs1 = field_axpy(-0.5 * g * dt, Av, v);
    if (g_old && g_mid) {  // trapezoid of the forcing over the first stage
        rhs1 = field_axpy(0.5 * g * dt, *g_old, rhs1);
        rhs1 = field_axpy(0.5 * g * dt, *g_mid, rhs1);
    } else if (g_old) {
        rhs1 = field_axpy(g * dt, *g_old, rhs1);
    }
    ConeField vs = fr.solve_shifted(0.5 * g * dt, rhs1);
    ConeField rhs2 = field_axpy(c1, vs, field_axpy(-c2, v, ConeField::zeros_like(v, v.t)));
    if (g_new) rhs2 = field_axpy(beta * dt, *g_new, rhs2);
    ConeField out = fr.solve_shifted(beta * dt, rhs2);
    out.t = v.t + dt;
    return out;
}

}  // namespace detail

// v_τ on the stamps `times` (ascending, starting at τ), propagated by the
// trajectory's own stepper applied to v' + A_τ v = 0, v(τ) = u(τ).
inline std::vector<ConeField> smooth_part(const FrozenOperator& fr, const ConeField& u_at_tau,
                                          const std::vector<double>& times,
                                          SolverConfig::Stepper stepper) {
    std::vector<ConeField> out;
    ConeField v = u_at_tau;
    v.t = times.front();
    out.push_back(v);
    for (std::size_t k = 1; k < times.size(); ++k) {
        double dt = times[k] - times[k - 1];
        v = detail::frozen_step(fr, v, dt, stepper, nullptr, nullptr, nullptr);
        v.t = times[k];
        out.push_back(v);
    }
    return out;
}

// Dense matrix-exponential evaluation of v_τ(t) = e^{(τ−t)A_τ}u(τ): the
// independent cross-check route (coarse meshes only).
inline std::vector<ConeField> smooth_part_expm(const FrozenOperator& fr,
                                               const ConeField& u_at_tau,
                                               const std::vector<double>& times) {
    if (fr.model.mesh->N > 256)
        throw std::invalid_argument("smooth_part_expm: mesh too fine for the dense route (N>256)");
    std::vector<Eigen::MatrixXd> blocks = fr.dense_blocks();
    std::vector<ConeField> out;
    for (double t : times) {
        ConeField v = u_at_tau;
        v.t = t;
        for (std::size_t j = 0; j < v.modes.size(); ++j) {
            Eigen::MatrixXd E = (-(t - times.front()) * blocks[j]).exp();
            v.modes[j].v = E * u_at_tau.modes[j].v;
        }
        out.push_back(v);
    }
    return out;
}

struct RemainderResult {
    std::vector<ConeField> w_sub;      // u − v_τ
    std::vector<ConeField> w_duhamel;  // discrete convolution of G_τ
    double max_route_diff = 0.0;       // sup-norm gap, relative to sup|u|
    double w_at_tau = 0.0;             // sup |w(τ)|: exact-left-endpoint check
};

// ── Decomposition driver ─────────────────────────────────────────────────
struct DecomposeOptions {
    double q = 2.0;      // time exponent of the maximal-regularity norm
    double gamma = 0.0;  // Mellin weight of X₀
    double p = 2.0;      // spatial exponent of X₀
    int k_max = 0;       // operator-power check depth (0 = skip)
};

struct PowerCheckRow {
    int k = 0;
    double norm = 0.0;             // X₀ norm of A_τ^k v(t_mid)
    double condition_estimate = 0.0;  // worst-case round-off amplification
};

struct DecompositionReport {
    std::string problem;
    std::string decomposed_variable;  // "u" or "w=u^m"
    double tau = 0.0, nu = 0.0;
    double q = 2.0, gamma = 0.0, p = 2.0;
    std::vector<double> times;
    std::vector<ConeField> v, w;
    double w_at_tau = 0.0;
    double duhamel_max_diff = 0.0;
    double G_norm = 0.0;
    double w_norm = 0.0;
    double fitted_C = 0.0;
    bool vacuous = false;  // ‖G_τ‖ below 1e−14: bound carries no information
    std::vector<PowerCheckRow> power_check;
    FitResult v_tip_fit;  // near-tip exponent of v at the mid stamp (mode 0)
    bool v_tip_fit_valid = false;
};

// L^q-in-time Riemann sum of the X₀ norms over stamps k ≥ 1.
inline double lq_time_norm(const std::vector<double>& vals, double dt, double q) {
    double s = 0.0;
    for (std::size_t k = 1; k < vals.size(); ++k) s += dt * std::pow(vals[k], q);
    return std::pow(s, 1.0 / q);
}

inline DecompositionReport decompose(const Trajectory& traj, double tau, double nu,
                                     const DecomposeOptions& opts) {
    int i0 = traj.index_of_time(tau), i1 = traj.index_of_time(nu);
    if (i0 < 0 || i1 < 0 || i1 <= i0)
        throw std::invalid_argument("decompose: [tau, nu] must be trajectory stamps with tau < nu");

    DecompositionReport rep;
    rep.problem = traj.problem;
    rep.tau = tau;
    rep.nu = nu;
    rep.q = opts.q;
    rep.gamma = opts.gamma;
    rep.p = opts.p;
    rep.decomposed_variable = traj.problem == "pme" ? "w=u^m" : "u";

    // decomposition-variable slices on the window
    std::vector<ConeField> uslices;
    for (int i = i0; i <= i1; ++i) {
        const ConeField& s = traj.slices[static_cast<std::size_t>(i)];
        ConeField d = traj.problem == "pme" ? pme_w_slice(s, traj.config.m, traj.model.l_max) : s;
        d.t = s.t;
        uslices.push_back(std::move(d));
        rep.times.push_back(s.t);
    }
    const double dt = rep.times.size() > 1 ? rep.times[1] - rep.times[0] : 0.0;

    FrozenOperator fr = frozen_operator(traj, tau);
    rep.v = smooth_part(fr, uslices.front(), rep.times, traj.config.time_stepper);

    // subtraction route
    rep.w.clear();
    double scale = 0.0;
    for (const auto& s : uslices) scale = std::max(scale, field_max_abs(s));
    for (std::size_t k = 0; k < uslices.size(); ++k) {
        ConeField wk = field_sub(uslices[k], rep.v[k]);
        wk.t = rep.times[k];
        rep.w.push_back(std::move(wk));
    }
    rep.w_at_tau = field_max_abs(rep.w.front()) / std::max(scale, 1e-300);

    // Duhamel route
    std::vector<ConeField> G;
    for (auto& s : uslices) G.push_back(frozen_forcing(fr, traj, s));
    {
        ConeField eta = ConeField::zeros_like(uslices.front(), tau);
        double maxdiff = field_max_abs(rep.w.front());
        const double gw = detail::kTrbdf2Gamma;  // stage-time interpolation weight
        for (std::size_t k = 1; k < uslices.size(); ++k) {
            ConeField gmid = field_axpy(1.0 - gw, G[k - 1],
                                        field_axpy(gw, G[k], ConeField::zeros_like(G[k], 0)));
            eta = detail::frozen_step(fr, eta, dt, traj.config.time_stepper, &G[k], &G[k - 1],
                                      &gmid);
            eta.t = rep.times[k];
            maxdiff = std::max(maxdiff, field_max_abs(field_sub(eta, rep.w[k])));
        }
        rep.duhamel_max_diff = maxdiff / std::max(scale, 1e-300);
    }

    // norms and the fitted constant
    std::vector<double> gnorms, wnorms, wdots, aws;
    for (std::size_t k = 0; k < uslices.size(); ++k) {
        gnorms.push_back(mellin_norm(G[k], 0, opts.gamma, opts.p));
        wnorms.push_back(mellin_norm(rep.w[k], 0, opts.gamma, opts.p));
        aws.push_back(mellin_norm(fr.apply(rep.w[k]), 0, opts.gamma, opts.p));
        if (k >= 1) {
            ConeField dot = field_axpy(-1.0, rep.w[k - 1], rep.w[k]);
            for (auto& mp : dot.modes) mp.v /= dt;
            wdots.push_back(mellin_norm(dot, 0, opts.gamma, opts.p));
        } else {
            wdots.push_back(0.0);
        }
    }
    rep.G_norm = lq_time_norm(gnorms, dt, opts.q);
    rep.w_norm = lq_time_norm(wnorms, dt, opts.q) + lq_time_norm(wdots, dt, opts.q) +
                 lq_time_norm(aws, dt, opts.q);
    rep.vacuous = rep.G_norm < 1e-14;
    rep.fitted_C = rep.vacuous ? 0.0 : rep.w_norm / rep.G_norm;

    // operator-power membership check at the mid stamp
    if (opts.k_max > 0) {
        std::size_t mid = uslices.size() / 2;
        ConeField vk = rep.v[mid];
        double ampl = 0.0;  // worst collar-row absolute sum of A_τ
        {
            ConeField ones = ConeField::zeros_like(vk, vk.t);
            for (auto& mp : ones.modes) mp.v.setOnes();
            // amplitude bound: per-mode row sums on the collar
            for (std::size_t j = 0; j < vk.modes.size(); ++j) {
                const auto m = fr.kind == FrozenOperator::Kind::ModeDiag && j < fr.ops.size()
                                   ? fr.ops[j].L
                                   : Tridiag::zero(1);
                for (int i = 0; i < m.size(); ++i) {
                    if (fr.model.mesh->x(std::min(i, fr.model.mesh->N)) > kOmegaOne) break;
                    double row = std::abs(m.diag(i)) + (i > 0 ? std::abs(m.sub(i)) : 0.0) +
                                 (i < m.size() - 1 ? std::abs(m.super(i)) : 0.0);
                    ampl = std::max(ampl, row);
                }
            }
            if (fr.is_sh()) ampl = (ampl + 1.0) * (ampl + 1.0);
        }
        for (int k = 1; k <= opts.k_max; ++k) {
            vk = fr.apply(vk);
            PowerCheckRow row;
            row.k = k;
            row.norm = mellin_norm(vk, 0, opts.gamma, opts.p);
            row.condition_estimate =
                2.2e-16 * field_max_abs(rep.v[mid]) * std::pow(ampl, k);
            rep.power_check.push_back(row);
        }
        if (rep.v[mid].has_mode(0)) {
            try {
                rep.v_tip_fit = fit_exponent(rep.v[mid], 0, {1e-4, 1e-2}, true);
                rep.v_tip_fit_valid = true;
            } catch (const std::exception&) {
                rep.v_tip_fit_valid = false;
            }
        }
    }
    return rep;
}

struct WindowFit {
    double nu = 0.0;
    double fitted_C = 0.0;
    bool vacuous = false;
};

// fitted_C over shrinking windows [τ, ν_i]; the sequence must stay bounded.
inline std::vector<WindowFit> remainder_bound(const Trajectory& traj, double tau,
                                              const std::vector<double>& nus,
                                              const DecomposeOptions& opts) {
    if (nus.size() < 3)
        throw std::invalid_argument("remainder_bound: need at least 3 nested windows");
    std::vector<WindowFit> out;
    for (double nu : nus) {
        DecompositionReport rep = decompose(traj, tau, nu, opts);
        out.push_back({nu, rep.fitted_C, rep.vacuous});
    }
    return out;
}

struct EpsWindow {
    double t1 = 0.0, t2 = 0.0;
    double norm = 0.0;
    bool success = false;
    int bisections = 0;
};

// Shrinking-window search: find (t1, t2) ∋ t with ‖u − v_{t1}‖_MR < ε.
inline EpsWindow epsilon_window_search(const Trajectory& traj, double t, double eps,
                                       const DecomposeOptions& opts) {
    const double t_first = traj.slices.front().t, t_last = traj.slices.back().t;
    const double dt = traj.config.dt;
    double half = std::min(t - t_first, t_last - t);
    EpsWindow res;
    while (half >= 2.0 * dt) {
        double t1 = std::round((t - half) / dt) * dt;
        double t2 = std::round((t + half) / dt) * dt;
        DecompositionReport rep = decompose(traj, t1, t2, opts);
        res.t1 = t1;
        res.t2 = t2;
        res.norm = rep.w_norm;
        ++res.bisections;
        if (rep.w_norm < eps) {
            res.success = true;
            return res;
        }
        half *= 0.5;
    }
    return res;
}

// ── Sectoriality probe ───────────────────────────────────────────────────
struct ProbeMatrix {
    // Block-diagonal real operator expressed in the weighted basis.  Every
    // operator assembled here is diagonally similar to a symmetric matrix,
    // so its spectrum is real; mu_min per block feeds the spectral pre-scan
    // (the sector must avoid −σ(A)−c) and the λ=0 singularity test — ray
    // samples have nonzero imaginary part and cannot hit a real spectrum.
    std::vector<Banded<double>> blocks;
    std::vector<double> mu_min;  // smallest real eigenvalue per block
    bool scan_available = true;

    static ProbeMatrix from_diagonal(const Eigen::VectorXd& d) {
        ProbeMatrix P;
        Banded<double> b = Banded<double>::zero(static_cast<int>(d.size()), 0, 0);
        for (int i = 0; i < d.size(); ++i) b.set(i, i, d(i));
        P.blocks.push_back(std::move(b));
        P.mu_min.push_back(d.minCoeff());
        return P;
    }
};

// Weighted-basis blocks W A_τ W^{−1} with W = diag(Δt_i x_i^{(n+1)/2−γ}).
inline ProbeMatrix probe_matrix(const FrozenOperator& fr, double gamma) {
    const RadialMesh& mesh = *fr.model.mesh;
    const int nn = mesh.size();
    Eigen::VectorXd wts(nn);
    for (int i = 0; i < nn; ++i) {
        double cell = (i == 0)          ? 0.5 * mesh.log_step(0)
                      : (i == mesh.N)   ? 0.5 * mesh.log_step(mesh.N - 1)
                                        : 0.5 * (mesh.log_step(i - 1) + mesh.log_step(i));
        wts(i) = std::sqrt(cell) * std::pow(mesh.x(i), 0.5 * (fr.model.n + 1) - gamma);
    }
    ProbeMatrix P;
    const bool dirichlet = fr.model.outer_bc.type == OuterBC::Type::Dirichlet;
    if (fr.kind == FrozenOperator::Kind::ModeDiag) {
        // A Dirichlet boundary node is pinned data, not part of the operator's
        // space: restrict to the active rows/columns.
        const int active = dirichlet ? nn - 1 : nn;
        for (std::size_t j = 0; j < fr.ops.size(); ++j) {
            const Tridiag& L = fr.ops[j].L;
            Tridiag A = Tridiag::zero(active);
            for (int i = 0; i < active; ++i) {
                double s = fr.is_heat() || fr.is_sh() ? 1.0 : fr.coef(i);
                A.diag(i) = -s * L.diag(i);
                if (i > 0) A.sub(i) = -s * L.sub(i);
                if (i < active - 1) A.super(i) = -s * L.super(i);
            }
            SymTridiag sym = symmetrize(A);
            if (fr.is_sh()) {
                // ((Δ+1)²) spectrum is (1−μ)² over μ ∈ σ(−L): the smallest
                // value comes from the eigenvalue nearest 1
                double d1 = spectrum_distance(sym, 1.0);
                P.mu_min.push_back(d1 * d1);
                Tridiag restricted = Tridiag::zero(active);
                for (int i = 0; i < active; ++i) {
                    restricted.diag(i) = L.diag(i);
                    if (i > 0) restricted.sub(i) = L.sub(i);
                    if (i < active - 1) restricted.super(i) = L.super(i);
                }
                Banded<double> M2 = detail::tridiag_plus_identity_squared(restricted);
                Banded<double> B = Banded<double>::zero(active, 2, 2);
                for (int i = 0; i < active; ++i)
                    for (int k = std::max(0, i - 2); k <= std::min(active - 1, i + 2); ++k)
                        if (M2.get(i, k) != 0.0) B.set(i, k, M2.get(i, k) * wts(i) / wts(k));
                P.blocks.push_back(std::move(B));
            } else {
                P.mu_min.push_back(kth_eigenvalue(sym, 1));
                Banded<double> B = Banded<double>::zero(active, 1, 1);
                for (int i = 0; i < active; ++i)
                    for (int k = std::max(0, i - 1); k <= std::min(active - 1, i + 1); ++k)
                        B.set(i, k, A.entry(i, k) * wts(i) / wts(k));
                P.blocks.push_back(std::move(B));
            }
        }
        return P;
    }
    // physical-grid operator: one block, node-major, weight per radial node;
    // Dirichlet drops the boundary node's P rows/columns
    const int active_nodes = dirichlet ? mesh.N : mesh.N + 1;
    const int total = active_nodes * fr.phys->P;
    Banded<double> B = Banded<double>::zero(total, fr.phys->P, fr.phys->P);
    // A_τ = −coef·Δ = I − (I + coef·Δ), with (I + coef·Δ) assembled bandwise
    Banded<double> built = fr.phys->shifted(1.0, fr.coef_phys, true);
    for (int r = 0; r < total; ++r) {
        int i = r / fr.phys->P;
        for (int c = std::max(0, r - fr.phys->P); c <= std::min(total - 1, r + fr.phys->P); ++c) {
            if (!built.in_band(r, c)) continue;
            int ic = c / fr.phys->P;
            double v = (r == c ? 1.0 : 0.0) - built.get(r, c);
            if (v != 0.0) B.set(r, c, v * wts(i) / wts(ic));
        }
    }
    if (total <= 1200) {
        Eigen::MatrixXd D = Eigen::MatrixXd::Zero(total, total);
        for (int r = 0; r < total; ++r)
            for (int c = std::max(0, r - fr.phys->P); c <= std::min(total - 1, r + fr.phys->P);
                 ++c)
                if (B.in_band(r, c)) D(r, c) = B.get(r, c);
        Eigen::EigenSolver<Eigen::MatrixXd> es(D, /*computeEigenvectors=*/false);
        P.mu_min.push_back(es.eigenvalues().real().minCoeff());
    } else {
        P.scan_available = false;
        P.mu_min.push_back(0.0);
    }
    P.blocks.push_back(std::move(B));
    return P;
}

struct ProbeResult {
    double K_est = 0.0;
    Complex worst_lambda = 0.0;
    double theta = 0.0, c = 0.0;
    int samples = 0;
    std::vector<std::pair<Complex, double>> table;  // (λ, (1+|λ|)‖R‖)
    std::string note =
        "scalar sectorial bound only; the randomized-sum (R-) bound has no finite-sample "
        "certificate and is not computed";
};

// sup over sample points λ ∈ {0} ∪ rays arg(λ)=±θ of (1+|λ|)‖(A+c+λ)^{−1}‖
// in the weighted operator norm.
inline ProbeResult sectorial_probe(const ProbeMatrix& A, double theta, double c, int samples) {
    if (!(theta > M_PI / 2 && theta < M_PI))
        throw std::invalid_argument("sectorial_probe: theta must lie in (pi/2, pi)");
    if (c < 0.0) throw std::invalid_argument("sectorial_probe: shift c must be >= 0");
    std::vector<Complex> lambdas{Complex(0.0, 0.0)};
    for (int s = 0; s < samples; ++s) {
        double r = std::pow(10.0, -3.0 + 9.0 * s / std::max(1, samples - 1));
        lambdas.push_back(std::polar(r, theta));
        lambdas.push_back(std::polar(r, -theta));
    }
    ProbeResult res;
    res.theta = theta;
    res.c = c;
    res.samples = static_cast<int>(lambdas.size());

    // Spectral pre-scan: the sector contains the positive real axis, so the
    // shifted spectrum must stay strictly positive.  This catches singular
    // points the ray samples cannot see (real spectra never meet arg = ±θ).
    if (A.scan_available) {
        for (double mu : A.mu_min)
            if (!(mu + c > 1e-9))
                throw std::runtime_error(
                    "sectorial_probe: singular resolvent at lambda=" +
                    std::to_string(std::max(0.0, -(mu + c))) +
                    " (spectrum reaches the sector; smallest shifted eigenvalue " +
                    std::to_string(mu + c) + ")");
    }

    for (Complex lam : lambdas) {
        double inv_norm = 0.0;  // max over blocks of 1/σ_min
        for (const auto& blk : A.blocks) {
            Banded<Complex> M = Banded<Complex>::zero(blk.n, blk.kl, blk.ku);
            for (int j = 0; j < blk.n; ++j)
                for (int i = std::max(0, j - blk.ku); i <= std::min(blk.n - 1, j + blk.kl); ++i) {
                    Complex v = blk.get(i, j);
                    if (i == j) v += c + lam;
                    if (v != 0.0) M.set(i, j, v);
                }
            double smin = smallest_singular_value(M);
            if (smin == 0.0)
                throw std::runtime_error("sectorial_probe: singular resolvent at lambda=(" +
                                         std::to_string(lam.real()) + "," +
                                         std::to_string(lam.imag()) + ")");
            inv_norm = std::max(inv_norm, 1.0 / smin);
        }
        double val = (1.0 + std::abs(lam)) * inv_norm;
        res.table.push_back({lam, val});
        if (val > res.K_est) {
            res.K_est = val;
            res.worst_lambda = lam;
        }
    }
    return res;
}

struct ScanRow {
    double t = 0.0;
    double c_needed = -1.0;  // smallest shift from the grid; −1 when none worked
    double K_est = 0.0;
    std::string failure;
};

// Per-stamp scan: smallest shift c ∈ {0,1,2,4,...} making the probe finite.
inline std::vector<ScanRow> uniform_bound_scan(const Trajectory& traj,
                                               const std::vector<double>& times, double theta,
                                               double gamma, int samples = 12,
                                               double c_max = 64.0) {
    std::vector<ScanRow> rows;
    for (double t : times) {
        ScanRow row;
        row.t = t;
        try {
            FrozenOperator fr = frozen_operator(traj, t);
            ProbeMatrix P = probe_matrix(fr, gamma);
            double c = 0.0;
            bool found = false;
            while (c <= c_max) {
                try {
                    ProbeResult pr = sectorial_probe(P, theta, c, samples);
                    row.c_needed = c;
                    row.K_est = pr.K_est;
                    found = true;
                    break;
                } catch (const std::runtime_error&) {
                    c = (c == 0.0) ? 1.0 : 2.0 * c;
                }
            }
            if (!found) row.failure = "no shift in the grid produced a finite bound";
        } catch (const std::exception& e) {
            row.failure = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace conetool
