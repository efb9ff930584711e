// spectrum.hpp — cross-section Laplacian spectra for model cones.
//
// Every asymptotics quantity downstream is driven by the eigenvalues
// {λ_j} of the Laplacian on the cone cross section (sign convention:
// Δ ≤ 0, so λ_0 = 0 > λ_1 > λ_2 > ...).  Supported cross sections:
//
//   Circle(a)         flat circle of circumference 2πa (dim 1):
//                       λ_l = −(l/a)²,  mult 1 (l=0) / 2 (l≥1)
//   RoundSphere(n,a)  round S^n of radius a (dim n ≥ 2):
//                       λ_l = −l(l+n−1)/a²,
//                       mult C(n+l,n) − C(n+l−2,n)   (2l+1 on unit S²)
//   Custom            explicit (eigenvalue, multiplicity) list
//
// Spectra are truncated at a cutoff l_max; consumers must check strip
// completeness before trusting exponent sets derived from them.

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace conetool {

struct SpectrumEntry {
    int index = 0;        // mode index j, 0-based
    double lambda = 0.0;  // eigenvalue, ≤ 0
    int multiplicity = 1;
};

struct CrossSection {
    enum class Kind { Circle, RoundSphere, Custom };

    Kind kind = Kind::Circle;
    int dim = 1;          // n = cross-section dimension
    double radius = 1.0;  // a; unused for Custom
    std::vector<std::pair<double, int>> custom;  // (eigenvalue, multiplicity)

    static CrossSection circle(double a) {
        if (a <= 0.0) throw std::invalid_argument("circle: circumference factor a must be > 0");
        CrossSection c;
        c.kind = Kind::Circle;
        c.dim = 1;
        c.radius = a;
        return c;
    }

    static CrossSection round_sphere(int n, double a) {
        if (n < 2) throw std::invalid_argument("round_sphere: dimension n must be ≥ 2");
        if (a <= 0.0) throw std::invalid_argument("round_sphere: radius a must be > 0");
        CrossSection c;
        c.kind = Kind::RoundSphere;
        c.dim = n;
        c.radius = a;
        return c;
    }

    static CrossSection custom_list(std::vector<std::pair<double, int>> pairs, int n) {
        if (n < 1) throw std::invalid_argument("custom_list: dimension n must be ≥ 1");
        CrossSection c;
        c.kind = Kind::Custom;
        c.dim = n;
        c.radius = 0.0;
        c.custom = std::move(pairs);
        return c;
    }
};

struct ModeSpectrum {
    int n = 1;  // cross-section dimension
    std::vector<SpectrumEntry> entries;
    int l_max = 0;
    bool truncated = true;  // entries above l_max are absent

    const SpectrumEntry& at(int j) const {
        if (j < 0 || j >= static_cast<int>(entries.size()))
            throw std::out_of_range("ModeSpectrum: mode index " + std::to_string(j));
        return entries[static_cast<std::size_t>(j)];
    }

    int mode_count() const { return static_cast<int>(entries.size()); }

    // Smallest (most negative) retained eigenvalue.
    double lambda_min() const {
        if (entries.empty()) throw std::invalid_argument("ModeSpectrum: empty");
        return entries.back().lambda;
    }

    void validate() const {
        if (entries.empty()) throw std::invalid_argument("ModeSpectrum: empty");
        if (entries.front().lambda != 0.0)
            throw std::invalid_argument("ModeSpectrum: eigenvalue 0 missing (lambda_0 must be 0)");
        for (std::size_t i = 0; i < entries.size(); ++i) {
            if (entries[i].lambda > 0.0)
                throw std::invalid_argument("ModeSpectrum: positive eigenvalue present");
            if (entries[i].multiplicity < 1)
                throw std::invalid_argument("ModeSpectrum: multiplicity must be ≥ 1");
            if (i > 0 && !(entries[i].lambda < entries[i - 1].lambda))
                throw std::invalid_argument("ModeSpectrum: eigenvalues must be strictly decreasing");
        }
    }
};

// Dimension of the degree-l spherical-harmonic space on S^n.
inline int sphere_multiplicity(int l, int n) {
    if (l == 0) return 1;
    if (l == 1) return n + 1;
    auto binom = [](int a, int b) -> double {
        double r = 1.0;
        for (int i = 1; i <= b; ++i) r *= static_cast<double>(a - b + i) / i;
        return r;
    };
    return static_cast<int>(std::llround(binom(n + l, n) - binom(n + l - 2, n)));
}

// λ_l = −(l/a)² on the circle of circumference 2πa; n = 1.
inline ModeSpectrum circle_spectrum(double a, int l_max) {
    if (a <= 0.0) throw std::invalid_argument("circle_spectrum: a must be > 0");
    if (l_max < 1) throw std::invalid_argument("circle_spectrum: l_max must be ≥ 1");
    ModeSpectrum s;
    s.n = 1;
    s.l_max = l_max;
    for (int l = 0; l <= l_max; ++l) {
        double q = static_cast<double>(l) / a;
        s.entries.push_back({l, -q * q, l == 0 ? 1 : 2});
    }
    s.validate();
    return s;
}

// λ_l = −l(l+n−1)/a² on S^n of radius a with spherical-harmonic multiplicity.
inline ModeSpectrum sphere_spectrum(int n, double a, int l_max) {
    if (n < 2) throw std::invalid_argument("sphere_spectrum: n must be ≥ 2");
    if (a <= 0.0) throw std::invalid_argument("sphere_spectrum: a must be > 0");
    if (l_max < 1) throw std::invalid_argument("sphere_spectrum: l_max must be ≥ 1");
    ModeSpectrum s;
    s.n = n;
    s.l_max = l_max;
    for (int l = 0; l <= l_max; ++l) {
        double lam = -static_cast<double>(l) * (l + n - 1) / (a * a);
        s.entries.push_back({l, lam, sphere_multiplicity(l, n)});
    }
    s.validate();
    return s;
}

// Validates and sorts a user-supplied eigenvalue list.  Duplicates are an
// error rather than merged, to force explicit input.
inline ModeSpectrum custom_spectrum(const std::vector<std::pair<double, int>>& pairs, int n) {
    if (pairs.empty()) throw std::invalid_argument("custom_spectrum: empty list");
    if (n < 1) throw std::invalid_argument("custom_spectrum: n must be ≥ 1");
    std::vector<std::pair<double, int>> sorted = pairs;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& x, const auto& y) { return x.first > y.first; });
    ModeSpectrum s;
    s.n = n;
    s.l_max = static_cast<int>(sorted.size()) - 1;
    bool has_zero = false;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (sorted[i].first > 0.0)
            throw std::invalid_argument("custom_spectrum: positive eigenvalue " +
                                        std::to_string(sorted[i].first));
        if (sorted[i].first == 0.0) has_zero = true;
        if (i > 0 && sorted[i].first == sorted[i - 1].first)
            throw std::invalid_argument("custom_spectrum: duplicate eigenvalue " +
                                        std::to_string(sorted[i].first));
        if (sorted[i].second < 1)
            throw std::invalid_argument("custom_spectrum: multiplicity must be ≥ 1");
        s.entries.push_back({static_cast<int>(i), sorted[i].first, sorted[i].second});
    }
    if (!has_zero) throw std::invalid_argument("custom_spectrum: eigenvalue 0 missing");
    s.validate();
    return s;
}

inline ModeSpectrum spectrum_of(const CrossSection& c, int l_max) {
    switch (c.kind) {
        case CrossSection::Kind::Circle: return circle_spectrum(c.radius, l_max);
        case CrossSection::Kind::RoundSphere: return sphere_spectrum(c.dim, c.radius, l_max);
        case CrossSection::Kind::Custom: return custom_spectrum(c.custom, c.dim);
    }
    throw std::logic_error("spectrum_of: unknown cross-section kind");
}

// Greatest strictly negative eigenvalue λ_1.
inline double lambda1(const ModeSpectrum& s) {
    s.validate();
    for (const auto& e : s.entries)
        if (e.lambda < 0.0) return e.lambda;
    throw std::invalid_argument("lambda1: spectrum contains only the eigenvalue 0");
}

// Eigenvalue attached to a (possibly signed) mode label.  Circle modes are
// labeled by the signed Fourier index m; sphere/custom modes by j ≥ 0.
inline double lambda_for_mode(const CrossSection& c, int m) {
    switch (c.kind) {
        case CrossSection::Kind::Circle: {
            double q = static_cast<double>(m) / c.radius;
            return -q * q;
        }
        case CrossSection::Kind::RoundSphere: {
            if (m < 0) throw std::invalid_argument("lambda_for_mode: sphere mode must be ≥ 0");
            return -static_cast<double>(m) * (m + c.dim - 1) / (c.radius * c.radius);
        }
        case CrossSection::Kind::Custom: {
            if (m < 0 || m >= static_cast<int>(c.custom.size()))
                throw std::invalid_argument("lambda_for_mode: custom mode out of range");
            std::vector<std::pair<double, int>> sorted = c.custom;
            std::sort(sorted.begin(), sorted.end(),
                      [](const auto& x, const auto& y) { return x.first > y.first; });
            return sorted[static_cast<std::size_t>(m)].first;
        }
    }
    throw std::logic_error("lambda_for_mode: unknown cross-section kind");
}

}  // namespace conetool
