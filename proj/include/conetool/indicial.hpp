// indicial.hpp — conormal-symbol calculus for straight cones.
//
// The conormal symbol of the cone Laplacian acts on the mode-j eigenspace
// of the cross-section Laplacian as the scalar polynomial
//
//     p_j(λ) = λ² − (n−1)λ + λ_j,
//
// whose roots are ρ±(j) = (n−1)/2 ± sqrt(((n−1)/2)² − λ_j)  (real, since
// λ_j ≤ 0).  The k-th power of the Laplacian has conormal symbol
// ∏_{ν=0..k−1} p_j(λ + 2ν) on mode j, so its inverse has poles at the
// shifted roots ρ±(j) − 2ν.  The candidate exponent set Q_k collects the
// shifted roots inside the strip
//
//     S_k = { Re λ ∈ [ (n+1)/2 − γ − 2k , (n+1)/2 − γ − 2 ) },
//
// each with pole order η_ρ = max over modes j of the total multiplicity of
// ρ as a root of ∏_ν p_j(λ+2ν).  A solution term x^{−ρ} log^η x with
// η ≤ η_ρ corresponds to each ρ ∈ Q_k; the constant summand contributes
// ρ = η = 0 on top.  Q_k as computed here is the full candidate superset:
// for special geometries the true exponent set can be smaller.
//
// Admissible parameter windows (weight γ, exponents p, q, s₀, δ) for the
// heat/porous-medium/Swift–Hohenberg realizations are evaluated as
// inequality ledgers so each constraint stays independently checkable.

#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spectrum.hpp"

namespace conetool {

enum class Problem { Laplacian, Pme, Sh };

inline std::string problem_name(Problem p) {
    switch (p) {
        case Problem::Laplacian: return "laplacian";
        case Problem::Pme: return "pme";
        case Problem::Sh: return "sh";
    }
    return "?";
}

// One point of the Mellin plane contributing x^{−ρ} log^η x terms.
struct IndicialRoot {
    std::complex<double> rho;
    int eta = 1;  // pole order η_ρ
    struct Source {
        int mode = 0;                 // mode index j
        int nu = 0;                   // shift index ν
        int factor_multiplicity = 1;  // 1 or 2 (double root of p_j)
    };
    std::vector<Source> sources;
    std::complex<double> x_exponent;   // −ρ
    bool boundary_ambiguous = false;   // within 1e−12 of a strip endpoint
};

struct ModeRootPair {
    int mode = 0;
    double rho_plus = 0.0;
    double rho_minus = 0.0;
    bool double_root = false;  // discriminant = 0
};

// Roots of p_j(λ) = λ² − (n−1)λ + λ_j for every retained mode.
inline std::vector<ModeRootPair> conormal_roots(const ModeSpectrum& s, int n) {
    s.validate();
    std::vector<ModeRootPair> out;
    out.reserve(s.entries.size());
    const double half = 0.5 * (n - 1);
    for (const auto& e : s.entries) {
        double disc = half * half - e.lambda;  // ≥ 0 for λ ≤ 0
        double root = std::sqrt(disc);
        out.push_back({e.index, half + root, half - root, disc == 0.0});
    }
    return out;
}

struct Strip {
    enum class Kind { I, S, V };
    Kind kind = Kind::S;
    double re_min = 0.0;  // inclusive
    double re_max = 0.0;  // exclusive for I and S, inclusive for V
    bool max_inclusive = false;

    bool contains(double re) const {
        if (re < re_min) return false;
        return max_inclusive ? re <= re_max : re < re_max;
    }
    bool near_boundary(double re, double tol = 1e-12) const {
        return std::abs(re - re_min) < tol || std::abs(re - re_max) < tol;
    }
};

// I:   [ (n+1)/2 − γ − μ ,  (n+1)/2 − γ )
// S_k: [ (n+1)/2 − γ − 2k,  (n+1)/2 − γ − 2 )
// V_k: [ (n+1)/2 − γ − 2k,  (n+1)/2 − γ − 2(k−1) ]   (closed)
inline Strip make_strip(Strip::Kind kind, int n, double gamma, int mu_or_k) {
    const double top = 0.5 * (n + 1) - gamma;
    Strip st;
    st.kind = kind;
    switch (kind) {
        case Strip::Kind::I:
            if (mu_or_k < 1) throw std::invalid_argument("make_strip: μ must be ≥ 1");
            st.re_min = top - mu_or_k;
            st.re_max = top;
            st.max_inclusive = false;
            break;
        case Strip::Kind::S:
            if (mu_or_k < 1) throw std::invalid_argument("make_strip: k must be ≥ 1");
            st.re_min = top - 2.0 * mu_or_k;
            st.re_max = top - 2.0;
            st.max_inclusive = false;
            break;
        case Strip::Kind::V:
            if (mu_or_k < 1) throw std::invalid_argument("make_strip: k must be ≥ 1");
            st.re_min = top - 2.0 * mu_or_k;
            st.re_max = top - 2.0 * (mu_or_k - 1);
            st.max_inclusive = true;
            break;
    }
    return st;
}

struct Constraint {
    std::string description;
    double lhs = 0.0;
    double rhs = 0.0;
    bool satisfied = false;
};

struct ParameterWindow {
    std::string name;
    double lo = 0.0;
    double hi = 0.0;
    bool lo_open = true;
    bool hi_open = true;
    bool admissible = false;
    std::vector<Constraint> constraints;
};

// Upper endpoint of the admissible weight window: the first shifted root
// must stay clear, so γ < min{ −1 + sqrt(((n−1)/2)² − λ₁), (n+1)/2 }.
inline double weight_window_upper(int n, double lam1) {
    const double half = 0.5 * (n - 1);
    return std::min(-1.0 + std::sqrt(half * half - lam1), 0.5 * (n + 1));
}

inline ParameterWindow weight_window(Problem problem, int n, double lam1, double q = 0.0) {
    if (lam1 >= 0.0) throw std::invalid_argument("weight_window: λ1 must be < 0");
    ParameterWindow w;
    w.name = "gamma window (" + problem_name(problem) + ")";
    double lo = 0.5 * (n - 3);
    if (problem != Problem::Laplacian) {
        if (q <= 1.0) throw std::invalid_argument("weight_window: q must be > 1 for pme/sh");
        lo += 2.0 / q;
    }
    w.lo = lo;
    w.hi = weight_window_upper(n, lam1);
    w.admissible = w.lo < w.hi;
    if (!w.admissible)
        w.constraints.push_back({"window lower endpoint < upper endpoint", w.lo, w.hi, false});
    return w;
}

// Inequality ledger for (p, q, γ, s₀).  Every constraint is recorded with
// its two sides; the window is admissible iff all hold.
inline ParameterWindow validate_parameters(Problem problem, int n, double lam1, double p,
                                           double q, double gamma, double s0) {
    if (p <= 1.0 || q <= 1.0) throw std::invalid_argument("validate_parameters: p, q must be > 1");
    if (lam1 >= 0.0) throw std::invalid_argument("validate_parameters: λ1 must be < 0");
    const double half = 0.5 * (n - 1);
    const double root1 = std::sqrt(half * half - lam1);
    ParameterWindow w;
    w.name = "parameter ledger (" + problem_name(problem) + ")";
    auto add = [&w](std::string d, double lhs, double rhs, bool strict = true) {
        w.constraints.push_back({std::move(d), lhs, rhs, strict ? lhs < rhs : lhs <= rhs});
    };
    if (problem == Problem::Laplacian) {
        add("(n-3)/2 < gamma", 0.5 * (n - 3), gamma);
        add("gamma < min{-1+sqrt(((n-1)/2)^2-lambda1), (n+1)/2}", gamma,
            weight_window_upper(n, lam1));
    } else {
        add("2/q < -(n-1)/2 + sqrt(((n-1)/2)^2-lambda1)", 2.0 / q, -half + root1);
        if (problem == Problem::Pme)
            add("(n+1)/p + 2/q < 1", (n + 1) / p + 2.0 / q, 1.0);
        else
            add("2/q + (n+1)/p < 2", 2.0 / q + (n + 1) / p, 2.0);
        add("(n-3)/2 + 2/q < gamma", 0.5 * (n - 3) + 2.0 / q, gamma);
        add("gamma < min{-1+sqrt(((n-1)/2)^2-lambda1), (n+1)/2}", gamma,
            weight_window_upper(n, lam1));
        if (problem == Problem::Pme)
            add("s0 > max{-1+(n+1)/p+2/q, -2/q}",
                std::max(-1.0 + (n + 1) / p + 2.0 / q, -2.0 / q), s0);
        else
            add("s0 >= 0", -s0, 0.0, false);
    }
    w.admissible = true;
    for (const auto& c : w.constraints) w.admissible = w.admissible && c.satisfied;
    w.lo = gamma;
    w.hi = gamma;
    w.lo_open = w.hi_open = false;
    return w;
}

// δ ∈ (0, ½ min{2 − (n+1)/p − 2/q, γ − (n−3)/2 − 2/q}).
inline ParameterWindow delta_window(int n, double p, double q, double gamma) {
    if (p <= 1.0 || q <= 1.0) throw std::invalid_argument("delta_window: p, q must be > 1");
    ParameterWindow w;
    w.name = "delta window";
    const double a = 2.0 - (n + 1) / p - 2.0 / q;
    const double b = gamma - 0.5 * (n - 3) - 2.0 / q;
    w.lo = 0.0;
    w.hi = 0.5 * std::min(a, b);
    w.admissible = w.hi > 0.0;
    w.constraints.push_back({"2-(n+1)/p-2/q > 0", 0.0, a, a > 0.0});
    w.constraints.push_back({"gamma-(n-3)/2-2/q > 0", 0.0, b, b > 0.0});
    return w;
}

// Decay exponent required of the minimal-domain part: γ + 2k − (n+1)/2 − ε.
inline double pointwise_bound_exponent(int n, double gamma, int k, double eps) {
    if (eps < 0.0) throw std::invalid_argument("pointwise_bound_exponent: ε must be ≥ 0");
    return gamma + 2.0 * k - 0.5 * (n + 1) - eps;
}

struct QSetOptions {
    bool require_complete = true;  // hard error when the truncation certificate fails
    double merge_tol = 1e-9;       // candidate poles closer than this coincide
    double boundary_tol = 1e-12;   // endpoint-ambiguity flag threshold
};

struct QSetResult {
    std::vector<IndicialRoot> roots;  // sorted by Re(ρ) descending
    Strip strip;
    bool complete = false;        // truncation certificate
    bool gamma_in_window = true;  // weight window of the Laplacian realization
    bool superset = true;         // candidate superset, not necessarily attained
    int n = 1;
    int k = 2;
    double gamma = 0.0;
    std::vector<std::string> warnings;
};

// Truncation certificate: every root of an omitted mode (λ < λ_min retained),
// shifted by any ν ∈ {0..k−1}, must fall outside the strip.  Both root
// branches are monotone in λ, so checking the smallest retained eigenvalue
// suffices: its minus-root must already sit at or below the strip and its
// plus-root at or above re_max + 2(k−1).
inline bool spectrum_complete_for_strip(const ModeSpectrum& s, int n, const Strip& strip, int k) {
    const double half = 0.5 * (n - 1);
    const double root = std::sqrt(half * half - s.lambda_min());
    const bool minus_ok = (half - root) <= strip.re_min;
    const bool plus_ok = (half + root) >= strip.re_max + 2.0 * (k - 1);
    return minus_ok && plus_ok;
}

// Candidate exponent set Q_k with pole orders.
inline QSetResult q_set(const ModeSpectrum& s, int n, double gamma, int k,
                        const QSetOptions& opts = {}) {
    if (k < 1) throw std::invalid_argument("q_set: k must be ≥ 1");
    s.validate();

    QSetResult res;
    res.n = n;
    res.k = k;
    res.gamma = gamma;
    res.strip = make_strip(Strip::Kind::S, n, gamma, k);

    if (s.entries.size() >= 2) {
        double lo = 0.5 * (n - 3), hi = weight_window_upper(n, lambda1(s));
        res.gamma_in_window = gamma > lo && gamma < hi;
        if (!res.gamma_in_window)
            res.warnings.push_back("gamma outside the admissible weight window");
    }

    res.complete = spectrum_complete_for_strip(s, n, res.strip, k);
    if (!res.complete) {
        if (opts.require_complete)
            throw std::runtime_error(
                "q_set: spectrum cutoff insufficient for strip completeness (certificate failure)");
        res.warnings.push_back("spectrum cutoff insufficient: exponent set may be incomplete");
    }

    if (k == 1) return res;  // S_1 is empty as an exponent strip: Q_1 = ∅

    const double half = 0.5 * (n - 1);
    struct Candidate {
        double rho;
        IndicialRoot::Source src;
    };
    std::vector<Candidate> cands;
    for (const auto& e : s.entries) {
        const double disc = half * half - e.lambda;
        const double root = std::sqrt(disc);
        for (int nu = 0; nu < k; ++nu) {
            for (double sign : {+1.0, -1.0}) {
                double rho = -2.0 * nu + half + sign * root;
                if (!res.strip.contains(rho)) continue;
                int fm = (disc == 0.0) ? 2 : 1;
                cands.push_back({rho, {e.index, nu, fm}});
                if (disc == 0.0) break;  // double root: one candidate, multiplicity 2
            }
        }
    }

    // Merge coincident candidates and compute pole orders: for each merged ρ,
    // η_ρ = max over modes j of Σ_ν mult(ρ+2ν as root of p_j).
    std::sort(cands.begin(), cands.end(),
              [](const Candidate& a, const Candidate& b) { return a.rho > b.rho; });
    std::size_t i = 0;
    while (i < cands.size()) {
        std::size_t jend = i + 1;
        while (jend < cands.size() && std::abs(cands[jend].rho - cands[i].rho) < opts.merge_tol)
            ++jend;
        IndicialRoot r;
        r.rho = {cands[i].rho, 0.0};
        r.x_exponent = -r.rho;
        int eta = 0;
        std::vector<int> per_mode(s.entries.size(), 0);
        for (std::size_t t = i; t < jend; ++t) {
            r.sources.push_back(cands[t].src);
            per_mode[static_cast<std::size_t>(cands[t].src.mode)] += cands[t].src.factor_multiplicity;
        }
        for (int m : per_mode) eta = std::max(eta, m);
        r.eta = eta;
        r.boundary_ambiguous = res.strip.near_boundary(cands[i].rho, opts.boundary_tol);
        if (r.boundary_ambiguous)
            res.warnings.push_back("root at Re(rho)=" + std::to_string(cands[i].rho) +
                                   " is boundary-ambiguous");
        res.roots.push_back(std::move(r));
        i = jend;
    }
    return res;
}

// Menu of decay exponents α = Re(−ρ) with maximal log powers: the constant
// summand contributes (0,0), each ρ ∈ Q_k contributes (−Re ρ, η_ρ).
struct ExponentEntry {
    double alpha = 0.0;
    int max_log_power = 0;
};

inline std::vector<ExponentEntry> predicted_x_exponents(const ModeSpectrum& s, int n, double gamma,
                                                        int k, const QSetOptions& opts = {}) {
    QSetResult q = q_set(s, n, gamma, k, opts);
    std::vector<ExponentEntry> out;
    out.push_back({0.0, 0});
    for (const auto& r : q.roots) out.push_back({-r.rho.real(), r.eta});
    std::sort(out.begin(), out.end(),
              [](const ExponentEntry& a, const ExponentEntry& b) { return a.alpha < b.alpha; });
    return out;
}

}  // namespace conetool
