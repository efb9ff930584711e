// mesh.hpp — graded radial meshes on the model cone collar and fields on
// them, stored as mode-coefficient profiles of the radial variable.
//
// All fields live on the open cone: x_0 > 0 < x_1 < ... < x_N = 1, the tip
// itself is excluded.  Geometric grading (x_i = r^{N−i}) is the default:
// the degenerate radial operator has constant coefficients in log x plus an
// Euler factor, so geometric meshes make the discrete Mellin calculus exact
// to second order.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "spectrum.hpp"

namespace conetool {

struct RadialMesh {
    enum class Grading { Geometric, PowerLaw };

    Grading grading = Grading::Geometric;
    double ratio = 0.0;  // geometric: x_i / x_{i+1}
    double beta = 0.0;   // power law exponent
    int N = 0;           // highest node index; nodes.size() == N+1
    std::vector<double> nodes;

    // Geometric mesh with prescribed innermost node x_0 ≈ x0.
    static RadialMesh geometric(int N, double x0 = 1e-6) {
        if (N < 2) throw std::invalid_argument("RadialMesh: N must be ≥ 2");
        if (!(x0 > 0.0 && x0 < 1.0)) throw std::invalid_argument("RadialMesh: need 0 < x0 < 1");
        return geometric_ratio(N, std::exp(std::log(x0) / N));
    }

    static RadialMesh geometric_ratio(int N, double r) {
        if (N < 2) throw std::invalid_argument("RadialMesh: N must be ≥ 2");
        if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("RadialMesh: need r in (0,1)");
        RadialMesh m;
        m.grading = Grading::Geometric;
        m.ratio = r;
        m.N = N;
        m.nodes.resize(static_cast<std::size_t>(N) + 1);
        m.nodes[static_cast<std::size_t>(N)] = 1.0;
        for (int i = N - 1; i >= 0; --i)
            m.nodes[static_cast<std::size_t>(i)] = m.nodes[static_cast<std::size_t>(i) + 1] * r;
        return m;
    }

    static RadialMesh power_law(int N, double beta) {
        if (N < 2) throw std::invalid_argument("RadialMesh: N must be ≥ 2");
        if (beta < 1.0) throw std::invalid_argument("RadialMesh: beta must be ≥ 1");
        RadialMesh m;
        m.grading = Grading::PowerLaw;
        m.beta = beta;
        m.N = N;
        m.nodes.resize(static_cast<std::size_t>(N) + 1);
        for (int i = 0; i <= N; ++i)
            m.nodes[static_cast<std::size_t>(i)] =
                std::pow(double(i + 1) / double(N + 1), beta);
        return m;
    }

    double x(int i) const { return nodes[static_cast<std::size_t>(i)]; }
    int size() const { return N + 1; }

    // log-step to the right of node i (uniform −log r on geometric meshes).
    double log_step(int i) const {
        if (grading == Grading::Geometric) return -std::log(ratio);
        return std::log(nodes[static_cast<std::size_t>(i) + 1] / nodes[static_cast<std::size_t>(i)]);
    }

    // dx/x quadrature weight of node i (trapezoid in log x).
    double log_weight(int i) const {
        double left = (i > 0) ? 0.5 * log_step(i - 1) : 0.5 * log_step(0);
        double right = (i < N) ? 0.5 * log_step(i) : 0.5 * log_step(N - 1);
        return left + right;
    }
};

struct ModeProfile {
    int m = 0;  // circle: signed Fourier index; sphere/custom: j ≥ 0
    Eigen::VectorXcd v;
};

// A time-stamped field on the model cone.
struct ConeField {
    double t = 0.0;
    std::shared_ptr<const RadialMesh> mesh;
    std::shared_ptr<const CrossSection> cross;
    std::vector<ModeProfile> modes;

    int mode_index(int m) const {
        for (std::size_t i = 0; i < modes.size(); ++i)
            if (modes[i].m == m) return static_cast<int>(i);
        return -1;
    }
    const Eigen::VectorXcd& mode(int m) const {
        int i = mode_index(m);
        if (i < 0) throw std::invalid_argument("ConeField: mode " + std::to_string(m) + " absent");
        return modes[static_cast<std::size_t>(i)].v;
    }
    bool has_mode(int m) const { return mode_index(m) >= 0; }

    static ConeField zeros_like(const ConeField& f, double t) {
        ConeField g;
        g.t = t;
        g.mesh = f.mesh;
        g.cross = f.cross;
        for (const auto& mp : f.modes)
            g.modes.push_back({mp.m, Eigen::VectorXcd::Zero(mp.v.size())});
        return g;
    }
};

inline ConeField field_axpy(double a, const ConeField& x, const ConeField& y) {
    if (x.modes.size() != y.modes.size())
        throw std::invalid_argument("field_axpy: mode lists differ");
    ConeField r = y;
    for (std::size_t i = 0; i < x.modes.size(); ++i) {
        if (x.modes[i].m != y.modes[i].m)
            throw std::invalid_argument("field_axpy: mode labels differ");
        r.modes[i].v = a * x.modes[i].v + y.modes[i].v;
    }
    return r;
}

inline ConeField field_sub(const ConeField& x, const ConeField& y) { return field_axpy(-1.0, y, x); }

inline double field_max_abs(const ConeField& f) {
    double m = 0.0;
    for (const auto& mp : f.modes) m = std::max(m, mp.v.cwiseAbs().maxCoeff());
    return m;
}

}  // namespace conetool
