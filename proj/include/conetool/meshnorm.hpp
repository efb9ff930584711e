// meshnorm.hpp — discrete Mellin–Sobolev norms, near-tip exponent fits and
// the pointwise decay-bound check.
//
// The integer-order norm on the collar is
//
//   ‖u‖^p ≈ Σ_{k+o≤s} Σ_j Σ_i  | x_i^{(n+1)/2−γ} (x∂_x)^k (ω u_j)(x_i) |^p
//                               · (−λ_j)^{op/2} · Δlog x_i ,
//
// with (x∂_x) discretized by centered differences in log x and tangential
// derivatives acting diagonally in mode space as sqrt(−λ_j) per order.
// The cut-off ω is 1 for x ≤ 1/2 and ramps smoothly to 0 at x = 1; every
// norm-bearing report carries ω's parameters since the choice is free.
//
// Near-tip exponents are recovered by least squares of log|u_j| against
// α·log x + η·log|log x| + c over a fit window, with the integer log power
// η ∈ {0,1,2} selected by penalized residual comparison.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "indicial.hpp"
#include "mesh.hpp"
#include "spectrum.hpp"

namespace conetool {

inline constexpr double kOmegaOne = 0.5;   // ω ≡ 1 for x ≤ this
inline constexpr double kOmegaZero = 1.0;  // ω ≡ 0 from here on
inline constexpr double kFitNoiseFloor = 1e-13;

// C^∞ cut-off: 1 on [0, 1/2], 0 at 1, exp-partition transition between.
inline double omega_cutoff(double x) {
    if (x <= kOmegaOne) return 1.0;
    if (x >= kOmegaZero) return 0.0;
    auto bump = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
    double s = (x - kOmegaOne) / (kOmegaZero - kOmegaOne);
    return bump(1.0 - s) / (bump(1.0 - s) + bump(s));
}

namespace detail {

// (x∂_x) by centered differences in log x; one-sided at the ends.
inline Eigen::VectorXcd log_derivative(const Eigen::VectorXcd& f, const RadialMesh& mesh) {
    const int n = static_cast<int>(f.size());
    Eigen::VectorXcd g(n);
    for (int i = 0; i < n; ++i) {
        if (i == 0) {
            g(i) = (f(1) - f(0)) / mesh.log_step(0);
        } else if (i == n - 1) {
            g(i) = (f(i) - f(i - 1)) / mesh.log_step(i - 1);
        } else {
            double hl = mesh.log_step(i - 1), hr = mesh.log_step(i);
            g(i) = (f(i + 1) - f(i - 1)) / (hl + hr);
            if (mesh.grading != RadialMesh::Grading::Geometric) {
                // non-uniform 3-point first derivative
                g(i) = (hl * hl * f(i + 1) - hr * hr * f(i - 1) + (hr * hr - hl * hl) * f(i)) /
                       (hl * hr * (hl + hr));
            }
        }
    }
    return g;
}

}  // namespace detail

struct MellinNormResult {
    double value = 0.0;
    bool tip_diverging = false;  // per-node contribution not decaying toward x_0
    double omega_one = kOmegaOne;
    double omega_zero = kOmegaZero;
};

inline MellinNormResult mellin_norm_detailed(const ConeField& f, int s, double gamma, double p) {
    if (s < 0 || s > 2) throw std::invalid_argument("mellin_norm: s must be 0, 1 or 2");
    if (p <= 1.0) throw std::invalid_argument("mellin_norm: p must be > 1");
    if (!f.mesh) throw std::invalid_argument("mellin_norm: field has no mesh");
    const RadialMesh& mesh = *f.mesh;
    const int n = f.cross ? f.cross->dim : 1;
    const int nn = mesh.size();

    double sum = 0.0;
    double inner0 = 0.0, inner1 = 0.0;  // innermost vs next-decade node contribution
    const int probe = std::min(nn - 1, std::max(4, nn / 16));
    for (const auto& mp : f.modes) {
        const double lam = f.cross ? lambda_for_mode(*f.cross, mp.m) : 0.0;
        Eigen::VectorXcd cut(nn);
        for (int i = 0; i < nn; ++i) cut(i) = mp.v(i) * omega_cutoff(mesh.x(i));

        std::vector<Eigen::VectorXcd> dk;  // (x∂_x)^k (ω u), k = 0..s
        dk.push_back(cut);
        for (int k = 1; k <= s; ++k) dk.push_back(detail::log_derivative(dk.back(), mesh));

        for (int k = 0; k <= s; ++k)
            for (int o = 0; k + o <= s; ++o) {
                const double tangential = std::pow(std::max(-lam, 0.0), 0.5 * o);
                for (int i = 0; i < nn; ++i) {
                    double xw = std::pow(mesh.x(i), 0.5 * (n + 1) - gamma);
                    double term = std::pow(std::abs(dk[static_cast<std::size_t>(k)](i)) * xw *
                                               tangential,
                                           p) *
                                  mesh.log_weight(i);
                    sum += term;
                    if (i == 0) inner0 += term / mesh.log_weight(i);
                    if (i == probe) inner1 += term / mesh.log_weight(i);
                }
            }
    }
    MellinNormResult r;
    r.value = std::pow(sum, 1.0 / p);
    r.tip_diverging = inner0 > inner1 && inner0 > 0.0;
    return r;
}

inline double mellin_norm(const ConeField& f, int s, double gamma, double p) {
    return mellin_norm_detailed(f, s, gamma, p).value;
}

// Richardson limit of a mode profile at the tip from the three innermost
// nodes, assuming f = c + a·x^β with unknown β > 0.
inline std::complex<double> tip_limit(const Eigen::VectorXcd& v) {
    if (v.size() < 3) throw std::invalid_argument("tip_limit: need ≥ 3 nodes");
    const std::complex<double> f0 = v(0), f1 = v(1), f2 = v(2);
    const std::complex<double> d01 = f1 - f0, d12 = f2 - f1;
    if (std::abs(d12) < 1e-300) return f0;
    const std::complex<double> q = d01 / d12;  // = r^β on a geometric mesh
    if (std::abs(q) >= 1.0 || std::abs(1.0 - q) < 1e-6) return f0;
    return f0 - d01 * q / (1.0 - q);
}

struct FitResult {
    double alpha = 0.0;
    int log_power = 0;
    double residual = 0.0;  // RMS in log space
    double x_lo = 0.0, x_hi = 0.0;
    int points = 0;
    std::complex<double> tip_constant = 0.0;  // subtracted value (mode 0 only)
};

// Least-squares fit of log|f_j| ~ α log x + η log|log x| + c on a window;
// η ∈ {0,1,2} chosen by residual with a 2·log(W) penalty for η ≠ 0.
inline FitResult fit_exponent(const ConeField& f, int mode, std::pair<double, double> window,
                              bool subtract_constant = false) {
    if (!f.mesh) throw std::invalid_argument("fit_exponent: field has no mesh");
    const RadialMesh& mesh = *f.mesh;
    Eigen::VectorXcd v = f.mode(mode);
    FitResult res;
    res.x_lo = window.first;
    res.x_hi = window.second;
    if (subtract_constant && mode == 0) {
        res.tip_constant = tip_limit(v);
        v.array() -= res.tip_constant;
    }

    std::vector<double> ts, ys, us;
    double vmax = 0.0;
    for (int i = 0; i < mesh.size(); ++i) {
        double x = mesh.x(i);
        if (x < window.first || x > window.second) continue;
        vmax = std::max(vmax, std::abs(v(i)));
    }
    if (vmax < kFitNoiseFloor)
        throw std::runtime_error("fit_exponent: field below noise floor on the window");
    for (int i = 0; i < mesh.size(); ++i) {
        double x = mesh.x(i);
        if (x < window.first || x > window.second || x >= 1.0) continue;
        double a = std::abs(v(i));
        if (a <= 0.0) continue;
        ts.push_back(std::log(x));
        us.push_back(std::log(-std::log(x)));
        ys.push_back(std::log(a));
    }
    const int W = static_cast<int>(ts.size());
    if (W < 8) throw std::invalid_argument("fit_exponent: degenerate window (< 8 nodes)");

    double best_score = 0.0;
    for (int eta = 0; eta <= 2; ++eta) {
        // fit y − η·u = α·t + c
        double st = 0, sy = 0, stt = 0, sty = 0;
        for (int i = 0; i < W; ++i) {
            double y = ys[static_cast<std::size_t>(i)] - eta * us[static_cast<std::size_t>(i)];
            double t = ts[static_cast<std::size_t>(i)];
            st += t;
            sy += y;
            stt += t * t;
            sty += t * y;
        }
        double denom = W * stt - st * st;
        double alpha = (W * sty - st * sy) / denom;
        double c = (sy - alpha * st) / W;
        double rss = 0.0;
        for (int i = 0; i < W; ++i) {
            double y = ys[static_cast<std::size_t>(i)] - eta * us[static_cast<std::size_t>(i)];
            double r = y - alpha * ts[static_cast<std::size_t>(i)] - c;
            rss += r * r;
        }
        double score = W * std::log(std::max(rss, 1e-30) / W) + (eta != 0 ? 2.0 * std::log(W) : 0.0);
        if (eta == 0 || score < best_score) {
            best_score = score;
            res.alpha = alpha;
            res.log_power = eta;
            res.residual = std::sqrt(rss / W);
        }
    }
    res.points = W;
    return res;
}

struct DecayBoundResult {
    bool ok = false;
    double worst_ratio = 0.0;
    double worst_x = 0.0;
    double exponent = 0.0;
};

// |u(x,·)| ≤ L x^{γ+2k−(n+1)/2−ε} over the collar nodes (x ≤ 1/2); the
// cross-section sup is bounded by the coefficient ℓ¹ sum (exact on a
// single circle mode).
inline DecayBoundResult decay_bound_check(const ConeField& f, int n, double gamma, int k,
                                          double eps, double L) {
    DecayBoundResult r;
    r.exponent = pointwise_bound_exponent(n, gamma, k, eps);
    const RadialMesh& mesh = *f.mesh;
    for (int i = 0; i < mesh.size(); ++i) {
        double x = mesh.x(i);
        if (x > kOmegaOne) break;
        double sup = 0.0;
        for (const auto& mp : f.modes) sup += std::abs(mp.v(i));
        double ratio = sup / std::pow(x, r.exponent);
        if (ratio > r.worst_ratio) {
            r.worst_ratio = ratio;
            r.worst_x = x;
        }
    }
    r.ok = r.worst_ratio <= L;
    return r;
}

}  // namespace conetool
