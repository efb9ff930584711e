// transform.hpp — angular mode ↔ physical-grid transforms, needed to apply
// pointwise nonlinearities (u^m, V(u)) to mode-decomposed fields.
//
// Circle cross sections use the discrete Fourier pair on P = 2·l_max + 2
// equispaced angles; band-limited fields (empty Nyquist bin) round-trip to
// machine precision.  Sphere and custom cross sections carry nonlinear runs
// only for axisymmetric data, where the transform is the identity on the
// mode-0 profile.

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>

#include "mesh.hpp"

namespace conetool {

inline bool is_axisymmetric(const ConeField& f) {
    for (const auto& mp : f.modes)
        if (mp.m != 0 && mp.v.cwiseAbs().maxCoeff() != 0.0) return false;
    return true;
}

// Expand a circle field to the full signed band m ∈ [−l_max, l_max],
// zero-filling absent modes.
inline ConeField expand_band(const ConeField& f, int l_max) {
    ConeField g = f;
    g.modes.clear();
    const int rows = f.modes.empty() ? f.mesh->size() : static_cast<int>(f.modes[0].v.size());
    for (int m = -l_max; m <= l_max; ++m) {
        int idx = f.mode_index(m);
        if (idx >= 0)
            g.modes.push_back(f.modes[static_cast<std::size_t>(idx)]);
        else
            g.modes.push_back({m, Eigen::VectorXcd::Zero(rows)});
    }
    return g;
}

struct CircleTransform {
    int l_max = 0;
    int P = 0;  // angular sample count, 2·l_max + 2

    explicit CircleTransform(int l_max_) : l_max(l_max_), P(2 * l_max_ + 2) {}

    // (nodes × P) complex physical samples u(x_i, θ_p) = Σ_m û_m(x_i) e^{imθ_p}.
    Eigen::MatrixXcd to_physical(const ConeField& f) const {
        const int rows = f.mesh->size();
        Eigen::MatrixXcd phys = Eigen::MatrixXcd::Zero(rows, P);
        for (const auto& mp : f.modes) {
            if (std::abs(mp.m) > l_max)
                throw std::invalid_argument("CircleTransform: mode outside band");
            for (int p = 0; p < P; ++p) {
                double th = 2.0 * M_PI * p / P;
                Complex e = std::polar(1.0, mp.m * th);
                phys.col(p) += mp.v * e;
            }
        }
        return phys;
    }

    // û_m(x_i) = (1/P) Σ_p u(x_i, θ_p) e^{−imθ_p} for |m| ≤ l_max.
    ConeField to_modes(const Eigen::MatrixXcd& phys, const ConeField& like) const {
        ConeField g;
        g.t = like.t;
        g.mesh = like.mesh;
        g.cross = like.cross;
        for (int m = -l_max; m <= l_max; ++m) {
            Eigen::VectorXcd v = Eigen::VectorXcd::Zero(phys.rows());
            for (int p = 0; p < P; ++p) {
                double th = 2.0 * M_PI * p / P;
                v += phys.col(p) * std::polar(1.0 / P, -m * th);
            }
            g.modes.push_back({m, v});
        }
        return g;
    }
};

// Apply a real scalar function pointwise in physical space.  Circle fields
// go through the Fourier pair; other cross sections must be axisymmetric.
inline ConeField apply_pointwise(const ConeField& f, int l_max,
                                 const std::function<double(double)>& g) {
    if (f.cross && f.cross->kind == CrossSection::Kind::Circle && !is_axisymmetric(f)) {
        CircleTransform tr(l_max);
        Eigen::MatrixXcd phys = tr.to_physical(expand_band(f, l_max));
        for (Eigen::Index i = 0; i < phys.rows(); ++i)
            for (Eigen::Index p = 0; p < phys.cols(); ++p)
                phys(i, p) = g(phys(i, p).real());
        return tr.to_modes(phys, f);
    }
    if (!is_axisymmetric(f))
        throw std::invalid_argument(
            "apply_pointwise: non-axisymmetric nonlinear runs need a circle cross-section");
    ConeField out = f;
    for (auto& mp : out.modes) {
        if (mp.m != 0) continue;
        for (Eigen::Index i = 0; i < mp.v.size(); ++i) mp.v(i) = g(mp.v(i).real());
    }
    return out;
}

// Minimum of the physical realization (exact for axisymmetric fields, via
// the angular grid otherwise).
inline double physical_min(const ConeField& f, int l_max) {
    if (f.cross && f.cross->kind == CrossSection::Kind::Circle && !is_axisymmetric(f)) {
        CircleTransform tr(l_max);
        return tr.to_physical(expand_band(f, l_max)).real().minCoeff();
    }
    double mn = std::numeric_limits<double>::infinity();
    for (const auto& mp : f.modes)
        if (mp.m == 0) mn = std::min(mn, mp.v.real().minCoeff());
    return mn;
}

inline double physical_max(const ConeField& f, int l_max) {
    if (f.cross && f.cross->kind == CrossSection::Kind::Circle && !is_axisymmetric(f)) {
        CircleTransform tr(l_max);
        return tr.to_physical(expand_band(f, l_max)).real().maxCoeff();
    }
    double mx = -std::numeric_limits<double>::infinity();
    for (const auto& mp : f.modes)
        if (mp.m == 0) mx = std::max(mx, mp.v.real().maxCoeff());
    return mx;
}

}  // namespace conetool
