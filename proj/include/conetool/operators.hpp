// operators.hpp — the model cone and the mode-wise radial operators.
//
// On the straight model cone x ∈ (0,1] with constant cross-section metric,
// the Laplacian acts on the mode-j coefficient as
//
//   L_j = x^{−2} ( (x∂_x)² + (n−1)(x∂_x) + λ_j )
//       = x^{−(n+1)} ∂_t ( x^{n−1} ∂_t · ) + λ_j x^{−2},    t = log x,
//
// discretized in flux form on the log mesh with face coefficients
// x_{i+1/2}^{n−1}, x_{i+1/2} = sqrt(x_i x_{i+1}).  Consequences, exact in
// floating point by construction:
//   * symmetry in the inner product with weights w_i = x_i^{n+1} Δt_i,
//   * constants in the kernel when λ_j = 0 (row sums vanish),
//   * conservation of Σ w_i u_i under Neumann steps (flux telescoping).
// No boundary condition is imposed at the tip: the innermost cell sees zero
// flux through the tip face, the natural closure of the degeneracy.  The
// outer boundary carries Dirichlet (value pinned) or Neumann (reflected
// ghost) data; this outer closure replaces the smooth interior of the full
// manifold and is recorded as a deliberate deviation in every report.

#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>

#include "linalg.hpp"
#include "mesh.hpp"
#include "spectrum.hpp"

namespace conetool {

struct OuterBC {
    enum class Type { Dirichlet, Neumann };
    Type type = Type::Dirichlet;
    double value = 0.0;

    static OuterBC dirichlet(double v = 0.0) { return {Type::Dirichlet, v}; }
    static OuterBC neumann() { return {Type::Neumann, 0.0}; }
};

struct ConeModel {
    int n = 1;  // cross-section dimension
    std::shared_ptr<const CrossSection> cross;
    std::shared_ptr<const RadialMesh> mesh;
    OuterBC outer_bc = OuterBC::dirichlet();
    int l_max = 0;            // mode cutoff for multi-mode runs
    bool collar_only = true;  // the model cone replaces the full manifold

    static ConeModel make(const CrossSection& cs, const RadialMesh& m, OuterBC bc, int l_max) {
        ConeModel c;
        c.cross = std::make_shared<CrossSection>(cs);
        c.mesh = std::make_shared<RadialMesh>(m);
        c.n = cs.dim;
        c.outer_bc = bc;
        c.l_max = l_max;
        return c;
    }
};

// Quadrature/symmetry weights w_i = x_i^{n+1} Δt_i of the scheme.
inline Eigen::VectorXd scheme_weights(const ConeModel& model) {
    const RadialMesh& mesh = *model.mesh;
    Eigen::VectorXd w(mesh.size());
    for (int i = 0; i < mesh.size(); ++i) {
        double cell;
        if (i == 0)
            cell = 0.5 * mesh.log_step(0);
        else if (i == mesh.N)
            cell = 0.5 * mesh.log_step(mesh.N - 1);
        else
            cell = 0.5 * (mesh.log_step(i - 1) + mesh.log_step(i));
        w(i) = std::pow(mesh.x(i), model.n + 1) * cell;
    }
    return w;
}

// Tridiagonal discretization of L_j over all N+1 nodes.  For Dirichlet the
// boundary row is zero (the flow keeps u_N pinned); interior rows still
// reference u_N through the super-diagonal.
struct ModeOperator {
    int mode = 0;
    double lambda = 0.0;
    int n = 1;
    OuterBC bc;
    std::shared_ptr<const RadialMesh> mesh;
    Tridiag L;              // rows of L_j
    Eigen::VectorXd weights;  // w_i of the scheme

    Eigen::VectorXcd apply(const Eigen::VectorXcd& u) const { return L.apply(u); }
    Eigen::VectorXd apply(const Eigen::VectorXd& u) const { return L.apply(u); }
};

inline ModeOperator assemble_mode_operator(const ConeModel& model, int mode) {
    const RadialMesh& mesh = *model.mesh;
    const int N = mesh.N;
    const int n = model.n;
    const double lam = lambda_for_mode(*model.cross, mode);

    ModeOperator op;
    op.mode = mode;
    op.lambda = lam;
    op.n = n;
    op.bc = model.outer_bc;
    op.mesh = model.mesh;
    op.L = Tridiag::zero(N + 1);
    op.weights = scheme_weights(model);

    auto face = [&](int i) {  // x_{i+1/2}^{n−1} / h_{i+1/2}
        double xf = std::sqrt(mesh.x(i) * mesh.x(i + 1));
        return std::pow(xf, n - 1) / mesh.log_step(i);
    };

    for (int i = 0; i <= N; ++i) {
        const bool dirichlet_row = (model.outer_bc.type == OuterBC::Type::Dirichlet && i == N);
        if (dirichlet_row) continue;  // zero row
        const double w = op.weights(i);
        double fl = (i > 0) ? face(i - 1) : 0.0;  // zero flux through the tip face
        double fr = (i < N) ? face(i) : 0.0;      // Neumann: zero flux at the outer face
        if (i > 0) op.L.sub(i) = fl / w;
        if (i < N) op.L.super(i) = fr / w;
        op.L.diag(i) = -(fl + fr) / w + lam / (mesh.x(i) * mesh.x(i));
    }
    return op;
}

struct Eigenpair {
    double mu = 0.0;  // eigenvalue of −L_j
    Eigen::VectorXd vec;  // over all N+1 nodes (Dirichlet: u_N = 0)
};

// The `count` smallest eigenvalues of −L_j with eigenvectors.  The operator
// is diagonally similar to a symmetric tridiagonal matrix, so Sturm
// bisection applies; eigenvectors come from inverse iteration.
inline std::vector<Eigenpair> mode_eigenpairs(const ConeModel& model, int mode, int count) {
    ModeOperator op = assemble_mode_operator(model, mode);
    const int N = model.mesh->N;
    const bool dirichlet = model.outer_bc.type == OuterBC::Type::Dirichlet;
    const int m = dirichlet ? N : N + 1;  // active nodes

    Tridiag minusL = Tridiag::zero(m);
    for (int i = 0; i < m; ++i) {
        minusL.diag(i) = -op.L.diag(i);
        if (i > 0) minusL.sub(i) = -op.L.sub(i);
        if (i < m - 1) minusL.super(i) = -op.L.super(i);
    }
    SymTridiag sym = symmetrize(minusL);
    std::vector<double> mus = smallest_eigenvalues(sym, count);

    std::vector<Eigenpair> out;
    for (double mu : mus) {
        Eigenpair p;
        p.mu = mu;
        Eigen::VectorXd v = tridiag_eigenvector(minusL, mu);
        p.vec = Eigen::VectorXd::Zero(N + 1);
        p.vec.head(m) = v;
        // normalize in the weighted inner product
        double norm2 = 0.0;
        for (int i = 0; i <= N; ++i) norm2 += op.weights(i) * p.vec(i) * p.vec(i);
        p.vec /= std::sqrt(norm2);
        out.push_back(std::move(p));
    }
    return out;
}

// Scheme-conserved discrete mass Σ w_i u_i of the mode-0 profile.
inline Complex conserved_mass(const ConeModel& model, const ConeField& f) {
    const Eigen::VectorXd w = scheme_weights(model);
    const Eigen::VectorXcd& u = f.mode(0);
    Complex m = 0.0;
    for (int i = 0; i < w.size(); ++i) m += w(i) * u(i);
    return m;
}

}  // namespace conetool
