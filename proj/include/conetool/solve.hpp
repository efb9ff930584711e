// solve.hpp — mode-decomposed radial time steppers on the model cone:
// heat (u' = Δu), porous medium (u' = Δ(u^m), direct Newton form and the
// transformed lagged-coefficient form w' = m w^{(m−1)/m} Δw), and
// Swift–Hohenberg (u' + (Δ+1)²u = V(u,t), IMEX with the stiff bi-Laplacian
// implicit).
//
// Backward Euler and TR-BDF2 are available; TR-BDF2 is the default (stiff
// fourth-order stability), Backward Euler is the right choice for
// monotonicity-sensitive porous-medium runs.  Mode solves within a step are
// independent; the time loop is sequential.

#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "linalg.hpp"
#include "mesh.hpp"
#include "operators.hpp"
#include "transform.hpp"

namespace conetool {

// Run f(j) for j in [0, count) on up to `threads` workers.  Callers write to
// disjoint slots, so the result is independent of the schedule.
inline void parallel_for(int count, int threads, const std::function<void(int)>& f) {
    threads = std::min(std::max(threads, 1), count);
    if (threads <= 1) {
        for (int j = 0; j < count; ++j) f(j);
        return;
    }
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&, w]() {
            for (int j = w; j < count; j += threads) f(j);
        });
    for (auto& t : pool) t.join();
}

// V(u,t) = Σ_d c_d(t) u^d with polynomial-in-t coefficients c_d.
struct TimePoly {
    std::vector<std::vector<double>> coeffs;  // coeffs[d][j]: coefficient of u^d t^j

    bool zero() const {
        for (const auto& c : coeffs)
            for (double a : c)
                if (a != 0.0) return false;
        return true;
    }

    double eval(double u, double t) const {
        double v = 0.0, up = 1.0;
        for (const auto& c : coeffs) {
            double cd = 0.0, tp = 1.0;
            for (double a : c) {
                cd += a * tp;
                tp *= t;
            }
            v += cd * up;
            up *= u;
        }
        return v;
    }

    static TimePoly cubic(double c1, double c3) {  // c1·u + c3·u³
        TimePoly p;
        p.coeffs = {{0.0}, {c1}, {0.0}, {c3}};
        return p;
    }
};

enum class PmeForm { Transformed, Direct };

struct SolverConfig {
    enum class Stepper { BackwardEuler, TrBdf2 };
    Stepper time_stepper = Stepper::TrBdf2;
    double dt = 1e-3;
    double t_end = 1.0;
    bool imex_split = true;  // SH: (Δ+1)² implicit, V explicit
    double newton_tol = 1e-10;
    int max_newton = 25;
    double m = 1.0;  // porous-medium exponent
    PmeForm pme_form = PmeForm::Transformed;
    TimePoly V;
    double growth_guard = 100.0;  // per-step sup-norm growth factor treated as blow-up
    int threads = 1;
};

struct Trajectory {
    std::string problem;  // "heat" | "pme" | "sh"
    ConeModel model;
    SolverConfig config;
    std::vector<ConeField> slices;

    int index_of_time(double t, double tol = 1e-9) const {
        for (std::size_t i = 0; i < slices.size(); ++i)
            if (std::abs(slices[i].t - t) < tol) return static_cast<int>(i);
        return -1;
    }
    const ConeField& at(double t) const {
        int i = index_of_time(t);
        if (i < 0) throw std::invalid_argument("Trajectory: no slice at t=" + std::to_string(t));
        return slices[static_cast<std::size_t>(i)];
    }
};

namespace detail {

inline constexpr double kTrbdf2Gamma = 0.585786437626904951;  // 2 − √2

// One linear step of u' = L u for a tridiagonal L (boundary handling baked
// into the rows).  Backward Euler or TR-BDF2.
inline Eigen::VectorXcd linear_step(const Tridiag& L, const Eigen::VectorXcd& u, double dt,
                                    SolverConfig::Stepper stepper) {
    if (stepper == SolverConfig::Stepper::BackwardEuler) {
        Tridiag A = L.scaled_shifted(1.0, -dt);  // I − dt·L
        return thomas_solve(A, u);
    }
    const double g = kTrbdf2Gamma;
    Tridiag A1 = L.scaled_shifted(1.0, -0.5 * g * dt);
    Eigen::VectorXcd rhs1 = u + 0.5 * g * dt * L.apply(u);
    Eigen::VectorXcd ustar = thomas_solve(A1, rhs1);
    const double beta = (1.0 - g) / (2.0 - g);
    const double c1 = 1.0 / (g * (2.0 - g)), c2 = (1.0 - g) * (1.0 - g) / (g * (2.0 - g));
    Tridiag A2 = L.scaled_shifted(1.0, -beta * dt);
    Eigen::VectorXcd rhs2 = c1 * ustar - c2 * u;
    return thomas_solve(A2, rhs2);
}

// (T + I)² as a banded matrix (kl = ku = 2).
inline Banded<double> tridiag_plus_identity_squared(const Tridiag& T) {
    const int n = T.size();
    auto entry = [&](int i, int j) -> double {
        if (i < 0 || j < 0 || i >= n || j >= n) return 0.0;
        if (i == j) return T.diag(i) + 1.0;
        if (j == i - 1) return T.sub(i);
        if (j == i + 1) return T.super(i);
        return 0.0;
    };
    Banded<double> B = Banded<double>::zero(n, 2, 2);
    for (int i = 0; i < n; ++i)
        for (int j = std::max(0, i - 2); j <= std::min(n - 1, i + 2); ++j) {
            double s = 0.0;
            for (int k = std::max({0, i - 1, j - 1}); k <= std::min({n - 1, i + 1, j + 1}); ++k)
                s += entry(i, k) * entry(k, j);
            if (s != 0.0) B.set(i, j, s);
        }
    return B;
}

// Solve (I + α(L+1)²) x = rhs for complex rhs with a prefactored banded LU.
struct ShImplicit {
    Banded<double> B;
    bool dirichlet = false;
    int boundary_row = 0;

    static ShImplicit make(const ModeOperator& op, double alpha) {
        ShImplicit s;
        Banded<double> M2 = tridiag_plus_identity_squared(op.L);
        const int n = op.L.size();
        s.B = Banded<double>::zero(n, 2, 2);
        for (int i = 0; i < n; ++i)
            for (int j = std::max(0, i - 2); j <= std::min(n - 1, i + 2); ++j) {
                double v = alpha * M2.get(i, j) + (i == j ? 1.0 : 0.0);
                if (v != 0.0) s.B.set(i, j, v);
            }
        s.dirichlet = op.bc.type == OuterBC::Type::Dirichlet;
        s.boundary_row = n - 1;
        if (s.dirichlet) {
            for (int j = std::max(0, s.boundary_row - 2); j <= s.boundary_row; ++j)
                s.B.set(s.boundary_row, j, j == s.boundary_row ? 1.0 : 0.0);
        }
        s.B.factorize();
        return s;
    }

    Eigen::VectorXcd solve(Eigen::VectorXcd rhs, Complex boundary_value) const {
        if (dirichlet) rhs(boundary_row) = boundary_value;
        const int n = s_size(rhs);
        Eigen::MatrixXd packed(n, 2);
        packed.col(0) = rhs.real();
        packed.col(1) = rhs.imag();
        B.solve_inplace(packed.data(), 2);
        Eigen::VectorXcd out(n);
        out.real() = packed.col(0);
        out.imag() = packed.col(1);
        return out;
    }

  private:
    static int s_size(const Eigen::VectorXcd& v) { return static_cast<int>(v.size()); }
};

// Δ on the physical (nodes × P) grid for circle cross sections: radial flux
// rows (λ = 0) plus the spectral angular circulant.
struct PhysOperator {
    int P = 0;
    Tridiag radial;          // λ=0 rows, Dirichlet boundary row zeroed
    Eigen::MatrixXd ang;     // P×P circulant realizing Δ_{h(0)}
    Eigen::VectorXd inv_x2;  // x_i^{−2}; zero at a Dirichlet boundary row
    bool dirichlet = false;
    int N = 0;

    static PhysOperator make(const ConeModel& model) {
        PhysOperator op;
        op.P = 2 * model.l_max + 2;
        ModeOperator radial_op = assemble_mode_operator(model, 0);
        op.radial = radial_op.L;
        op.N = model.mesh->N;
        op.dirichlet = model.outer_bc.type == OuterBC::Type::Dirichlet;
        op.inv_x2.resize(model.mesh->size());
        for (int i = 0; i < model.mesh->size(); ++i)
            op.inv_x2(i) = 1.0 / (model.mesh->x(i) * model.mesh->x(i));
        if (op.dirichlet) op.inv_x2(op.N) = 0.0;  // boundary row carries no operator
        op.ang = Eigen::MatrixXd::Zero(op.P, op.P);
        const double a = model.cross->radius;
        for (int p = 0; p < op.P; ++p)
            for (int q = 0; q < op.P; ++q) {
                double s = 0.0;
                for (int b = 0; b < op.P; ++b) {
                    int m = (b <= op.P / 2) ? b : b - op.P;
                    double lam = -double(m) * double(m) / (a * a);
                    s += lam * std::cos(2.0 * M_PI * b * (p - q) / op.P);
                }
                op.ang(p, q) = s / op.P;
            }
        return op;
    }

    Eigen::MatrixXd apply(const Eigen::MatrixXd& U) const {
        Eigen::MatrixXd out(U.rows(), U.cols());
        for (int p = 0; p < P; ++p) out.col(p) = radial.apply(Eigen::VectorXd(U.col(p)));
        out += inv_x2.asDiagonal() * (U * ang.transpose());
        return out;
    }

    // Banded (I + s·diag(c)·Δ) or (I + s·Δ·diag(c)) in node-major order.
    Banded<double> shifted(double s, const Eigen::MatrixXd& c, bool coeff_left) const {
        const int n = (N + 1) * P;
        Banded<double> B = Banded<double>::zero(n, P, P);
        auto idx = [&](int i, int p) { return i * P + p; };
        for (int i = 0; i <= N; ++i)
            for (int p = 0; p < P; ++p) {
                const int row = idx(i, p);
                B.add(row, row, 1.0);
                // radial couplings (same angular index)
                for (int d = -1; d <= 1; ++d) {
                    int j = i + d;
                    if (j < 0 || j > N) continue;
                    double Lij = d == 0 ? radial.diag(i) : (d < 0 ? radial.sub(i) : radial.super(i));
                    if (Lij == 0.0) continue;
                    double cf = coeff_left ? c(i, p) : c(j, p);
                    B.add(row, idx(j, p), s * cf * Lij);
                }
                // angular couplings (same radial index)
                if (inv_x2(i) != 0.0)
                    for (int q = 0; q < P; ++q) {
                        double Aij = inv_x2(i) * ang(p, q);
                        if (Aij == 0.0) continue;
                        double cf = coeff_left ? c(i, p) : c(i, q);
                        B.add(row, idx(i, q), s * cf * Aij);
                    }
            }
        if (dirichlet)
            for (int p = 0; p < P; ++p) {
                const int row = idx(N, p);
                for (int q = 0; q < P; ++q) {
                    if (B.in_band(row, idx(N, q))) B.set(row, idx(N, q), q == p ? 1.0 : 0.0);
                }
                if (N > 0 && B.in_band(row, idx(N - 1, p))) B.set(row, idx(N - 1, p), 0.0);
            }
        return B;
    }
};

inline void check_finite(const ConeField& f, double t, const char* what) {
    for (const auto& mp : f.modes)
        if (!mp.v.allFinite())
            throw std::runtime_error(std::string(what) + ": non-finite values at t=" +
                                     std::to_string(t));
}

}  // namespace detail

// ── Heat equation ────────────────────────────────────────────────────────
inline Trajectory solve_heat(const ConeModel& model, const ConeField& u0,
                             const SolverConfig& config,
                             const std::vector<double>& store_times = {}) {
    const int steps = static_cast<int>(std::llround(config.t_end / config.dt));
    if (std::abs(steps * config.dt - config.t_end) > 1e-9)
        throw std::invalid_argument("solve_heat: t_end must be a multiple of dt");

    Trajectory traj;
    traj.problem = "heat";
    traj.model = model;
    traj.config = config;

    std::vector<ModeOperator> ops;
    for (const auto& mp : u0.modes) ops.push_back(assemble_mode_operator(model, mp.m));

    ConeField u = u0;
    u.t = 0.0;
    auto want = [&](double t) {
        if (store_times.empty()) return true;
        for (double s : store_times)
            if (std::abs(s - t) < 1e-9) return true;
        return false;
    };
    if (want(u.t)) traj.slices.push_back(u);
    for (int k = 1; k <= steps; ++k) {
        parallel_for(static_cast<int>(u.modes.size()), config.threads, [&](int j) {
            auto& mp = u.modes[static_cast<std::size_t>(j)];
            mp.v = detail::linear_step(ops[static_cast<std::size_t>(j)].L, mp.v, config.dt,
                                       config.time_stepper);
        });
        u.t = k * config.dt;
        detail::check_finite(u, u.t, "solve_heat");
        if (want(u.t)) traj.slices.push_back(u);
    }
    return traj;
}

// ── Porous medium equation ───────────────────────────────────────────────
// Transformed form (default): semi-implicit lagged-coefficient step
//   (I − dt·m·diag((w^k)^{(m−1)/m})·Δ) w^{k+1} = w^k,  returns u = w^{1/m}.
// Direct form: backward Euler on u' = Δ(u^m) with Newton iteration, the
// nonlinearity evaluated pointwise in physical space.
inline Trajectory solve_pme(const ConeModel& model, const ConeField& u0,
                            const SolverConfig& config,
                            const std::vector<double>& store_times = {}) {
    if (config.m <= 0.0) throw std::invalid_argument("solve_pme: m must be > 0");
    const int steps = static_cast<int>(std::llround(config.t_end / config.dt));
    if (std::abs(steps * config.dt - config.t_end) > 1e-9)
        throw std::invalid_argument("solve_pme: t_end must be a multiple of dt");
    {
        double mn = physical_min(u0, model.l_max);
        if (!(mn > 0.0))
            throw std::invalid_argument("solve_pme: initial data must be strictly positive (min=" +
                                        std::to_string(mn) + ")");
    }

    Trajectory traj;
    traj.problem = "pme";
    traj.model = model;
    traj.config = config;

    const double m = config.m;
    const bool axisym = is_axisymmetric(u0);
    const bool circle = model.cross->kind == CrossSection::Kind::Circle;
    if (!axisym && !circle)
        throw std::invalid_argument("solve_pme: non-axisymmetric data needs a circle cross-section");

    auto want = [&](double t) {
        if (store_times.empty()) return true;
        for (double s : store_times)
            if (std::abs(s - t) < 1e-9) return true;
        return false;
    };

    auto positivity_guard = [&](const ConeField& f, double t) {
        double mn = physical_min(f, model.l_max);
        if (!(mn > 0.0))
            throw std::runtime_error("solve_pme: positivity loss at t=" + std::to_string(t) +
                                     " (min=" + std::to_string(mn) +
                                     "); outside the comparison-principle regime");
    };

    ConeField u = u0;
    u.t = 0.0;
    if (want(u.t)) traj.slices.push_back(u);

    if (axisym) {
        ModeOperator op = assemble_mode_operator(model, 0);
        Eigen::VectorXd w = u.mode(0).real();
        if (config.pme_form == PmeForm::Transformed)
            for (int i = 0; i < w.size(); ++i) w(i) = std::pow(w(i), m);
        const int nn = static_cast<int>(w.size());

        for (int k = 1; k <= steps; ++k) {
            if (config.pme_form == PmeForm::Transformed) {
                auto frozen_step = [&](const Eigen::VectorXd& wk, double dt) {
                    Eigen::VectorXd eta(nn);
                    for (int i = 0; i < nn; ++i) eta(i) = m * std::pow(wk(i), (m - 1.0) / m);
                    Tridiag scaled = op.L.row_scaled(eta);
                    if (config.time_stepper == SolverConfig::Stepper::BackwardEuler) {
                        return Eigen::VectorXd(
                            thomas_solve(scaled.scaled_shifted(1.0, -dt), wk));
                    }
                    // TR-BDF2 with the coefficient frozen at the step start
                    const double g = detail::kTrbdf2Gamma;
                    Eigen::VectorXd rhs1 = wk + 0.5 * g * dt * scaled.apply(wk);
                    Eigen::VectorXd ws =
                        thomas_solve(scaled.scaled_shifted(1.0, -0.5 * g * dt), rhs1);
                    const double beta = (1.0 - g) / (2.0 - g);
                    const double c1 = 1.0 / (g * (2.0 - g)),
                                 c2 = (1.0 - g) * (1.0 - g) / (g * (2.0 - g));
                    Eigen::VectorXd rhs2 = c1 * ws - c2 * wk;
                    return Eigen::VectorXd(
                        thomas_solve(scaled.scaled_shifted(1.0, -beta * dt), rhs2));
                };
                w = frozen_step(w, config.dt);
            } else {
                // direct form: Newton on G(v) = v − dt·L(v^m) − u^k
                Eigen::VectorXd uk = w;  // here w stores u itself
                Eigen::VectorXd v = uk;
                bool converged = false;
                const double scale = std::max(1.0, uk.cwiseAbs().maxCoeff());
                for (int it = 0; it < config.max_newton; ++it) {
                    Eigen::VectorXd vm(nn), dvm(nn);
                    for (int i = 0; i < nn; ++i) {
                        vm(i) = std::pow(v(i), m);
                        dvm(i) = m * std::pow(v(i), m - 1.0);
                    }
                    Eigen::VectorXd G = v - config.dt * op.L.apply(Eigen::VectorXd(vm)) - uk;
                    // J = I − dt·L·diag(dvm): column-scaled tridiagonal
                    Tridiag J = Tridiag::zero(nn);
                    for (int i = 0; i < nn; ++i) {
                        J.diag(i) = 1.0 - config.dt * op.L.diag(i) * dvm(i);
                        if (i > 0) J.sub(i) = -config.dt * op.L.sub(i) * dvm(i - 1);
                        if (i < nn - 1) J.super(i) = -config.dt * op.L.super(i) * dvm(i + 1);
                    }
                    Eigen::VectorXd step = thomas_solve(J, G);
                    v -= step;
                    if (!(v.minCoeff() > 0.0))
                        throw std::runtime_error("solve_pme: Newton iterate lost positivity");
                    // the residual near the tip carries x^{−2}-amplified rounding,
                    // so convergence is judged on the Newton step
                    if (step.cwiseAbs().maxCoeff() < config.newton_tol * scale) {
                        converged = true;
                        break;
                    }
                }
                if (!converged) throw std::runtime_error("solve_pme: Newton divergence");
                w = v;
            }
            // write back u
            Eigen::VectorXd uo(nn);
            for (int i = 0; i < nn; ++i)
                uo(i) = config.pme_form == PmeForm::Transformed ? std::pow(w(i), 1.0 / m) : w(i);
            u.modes[static_cast<std::size_t>(u.mode_index(0))].v = uo.cast<Complex>();
            u.t = k * config.dt;
            detail::check_finite(u, u.t, "solve_pme");
            positivity_guard(u, u.t);
            if (want(u.t)) traj.slices.push_back(u);
        }
        return traj;
    }

    // multi-mode circle run in physical space
    detail::PhysOperator phys = detail::PhysOperator::make(model);
    CircleTransform tr(model.l_max);
    ConeField uf = expand_band(u, model.l_max);
    Eigen::MatrixXd U = tr.to_physical(uf).real();
    if (config.pme_form == PmeForm::Transformed)
        U = U.array().pow(m).matrix();

    for (int k = 1; k <= steps; ++k) {
        const int total = (model.mesh->N + 1) * phys.P;
        if (config.pme_form == PmeForm::Transformed) {
            Eigen::MatrixXd eta = (m * U.array().pow((m - 1.0) / m)).matrix();
            Banded<double> B = phys.shifted(-config.dt, eta, /*coeff_left=*/true);
            B.factorize();
            Eigen::VectorXd flat(total);
            for (int i = 0; i <= model.mesh->N; ++i)
                for (int p = 0; p < phys.P; ++p) flat(i * phys.P + p) = U(i, p);
            B.solve_inplace(flat.data(), 1);
            for (int i = 0; i <= model.mesh->N; ++i)
                for (int p = 0; p < phys.P; ++p) U(i, p) = flat(i * phys.P + p);
        } else {
            Eigen::MatrixXd Uk = U, V = U;
            bool converged = false;
            const double scale = std::max(1.0, Uk.cwiseAbs().maxCoeff());
            for (int it = 0; it < config.max_newton; ++it) {
                Eigen::MatrixXd Vm = V.array().pow(m).matrix();
                Eigen::MatrixXd G = V - config.dt * phys.apply(Vm) - Uk;
                if (phys.dirichlet) G.row(model.mesh->N).setZero();
                Eigen::MatrixXd dVm = (m * V.array().pow(m - 1.0)).matrix();
                Banded<double> J = phys.shifted(-config.dt, dVm, /*coeff_left=*/false);
                J.factorize();
                Eigen::VectorXd flat(total);
                for (int i = 0; i <= model.mesh->N; ++i)
                    for (int p = 0; p < phys.P; ++p) flat(i * phys.P + p) = G(i, p);
                J.solve_inplace(flat.data(), 1);
                double stepmax = flat.cwiseAbs().maxCoeff();
                for (int i = 0; i <= model.mesh->N; ++i)
                    for (int p = 0; p < phys.P; ++p) V(i, p) -= flat(i * phys.P + p);
                if (stepmax < config.newton_tol * scale) {
                    converged = true;
                    break;
                }
            }
            if (!converged) throw std::runtime_error("solve_pme: Newton divergence");
            U = V;
        }
        double mn = U.minCoeff();
        if (!(mn > 0.0))
            throw std::runtime_error("solve_pme: positivity loss at t=" +
                                     std::to_string(k * config.dt) + " (min=" +
                                     std::to_string(mn) + ")");
        Eigen::MatrixXd Uphys =
            config.pme_form == PmeForm::Transformed ? U.array().pow(1.0 / m).matrix() : U;
        ConeField unew = tr.to_modes(Uphys.cast<Complex>(), uf);
        unew.t = k * config.dt;
        u = unew;
        detail::check_finite(u, u.t, "solve_pme");
        if (want(u.t)) traj.slices.push_back(u);
    }
    return traj;
}

// ── Swift–Hohenberg equation ─────────────────────────────────────────────
inline Trajectory solve_sh(const ConeModel& model, const ConeField& u0,
                           const SolverConfig& config,
                           const std::vector<double>& store_times = {}) {
    const int steps = static_cast<int>(std::llround(config.t_end / config.dt));
    if (std::abs(steps * config.dt - config.t_end) > 1e-9)
        throw std::invalid_argument("solve_sh: t_end must be a multiple of dt");

    Trajectory traj;
    traj.problem = "sh";
    traj.model = model;
    traj.config = config;

    const bool circle = model.cross->kind == CrossSection::Kind::Circle;
    const bool has_V = !config.V.zero();
    ConeField u = (circle && has_V) ? expand_band(u0, model.l_max) : u0;
    u.t = 0.0;

    std::vector<ModeOperator> ops;
    std::vector<detail::ShImplicit> be_solvers, tr1_solvers, tr2_solvers;
    const double g = detail::kTrbdf2Gamma;
    const double beta = (1.0 - g) / (2.0 - g);
    for (const auto& mp : u.modes) {
        ops.push_back(assemble_mode_operator(model, mp.m));
        if (config.time_stepper == SolverConfig::Stepper::BackwardEuler) {
            be_solvers.push_back(detail::ShImplicit::make(ops.back(), config.dt));
        } else {
            tr1_solvers.push_back(detail::ShImplicit::make(ops.back(), 0.5 * g * config.dt));
            tr2_solvers.push_back(detail::ShImplicit::make(ops.back(), beta * config.dt));
        }
    }

    auto want = [&](double t) {
        if (store_times.empty()) return true;
        for (double s : store_times)
            if (std::abs(s - t) < 1e-9) return true;
        return false;
    };
    if (want(u.t)) traj.slices.push_back(u);

    auto forcing = [&](const ConeField& f, double t) -> ConeField {
        ConeField V = apply_pointwise(f, model.l_max,
                                      [&](double v) { return config.V.eval(v, t); });
        return V;
    };
    auto apply_A = [&](const ConeField& f) {  // (Δ+1)² f, mode-wise
        ConeField out = f;
        for (std::size_t j = 0; j < f.modes.size(); ++j) {
            Eigen::VectorXcd w = ops[j].L.apply(f.modes[j].v) + f.modes[j].v;
            out.modes[j].v = ops[j].L.apply(w) + w;
        }
        return out;
    };

    for (int k = 1; k <= steps; ++k) {
        const double t0 = (k - 1) * config.dt;
        double prev_norm = field_max_abs(u);
        ConeField unew = u;
        if (config.time_stepper == SolverConfig::Stepper::BackwardEuler) {
            ConeField V = has_V ? forcing(u, t0) : ConeField();
            for (std::size_t j = 0; j < u.modes.size(); ++j) {
                Eigen::VectorXcd rhs = u.modes[j].v;
                if (has_V) rhs += config.dt * V.mode(u.modes[j].m);
                unew.modes[j].v = be_solvers[j].solve(rhs, u.modes[j].v(model.mesh->N));
            }
        } else {
            ConeField V0 = has_V ? forcing(u, t0) : ConeField();
            ConeField Au = apply_A(u);
            ConeField ustar = u;
            for (std::size_t j = 0; j < u.modes.size(); ++j) {
                Eigen::VectorXcd rhs = u.modes[j].v - 0.5 * g * config.dt * Au.modes[j].v;
                if (has_V) rhs += g * config.dt * V0.mode(u.modes[j].m);
                ustar.modes[j].v = tr1_solvers[j].solve(rhs, u.modes[j].v(model.mesh->N));
            }
            ConeField Vs = has_V ? forcing(ustar, t0 + g * config.dt) : ConeField();
            const double c1 = 1.0 / (g * (2.0 - g)), c2 = (1.0 - g) * (1.0 - g) / (g * (2.0 - g));
            for (std::size_t j = 0; j < u.modes.size(); ++j) {
                Eigen::VectorXcd rhs = c1 * ustar.modes[j].v - c2 * u.modes[j].v;
                if (has_V) rhs += beta * config.dt * Vs.mode(u.modes[j].m);
                unew.modes[j].v = tr2_solvers[j].solve(rhs, u.modes[j].v(model.mesh->N));
            }
        }
        u = unew;
        u.t = k * config.dt;
        detail::check_finite(u, u.t, "solve_sh");
        if (!has_V && field_max_abs(u) > config.growth_guard * std::max(prev_norm, 1e-300))
            throw std::runtime_error("solve_sh: step-size instability detected at t=" +
                                     std::to_string(u.t));
        if (want(u.t)) traj.slices.push_back(u);
    }
    return traj;
}

}  // namespace conetool
