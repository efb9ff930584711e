// linalg.hpp — small dense-free linear algebra kernels: tridiagonal systems,
// Sturm-sequence eigenvalue bisection, LAPACK-banded LU, and smallest
// singular values of banded matrices (via bidiagonalization), used for
// resolvent norms.

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <vector>

#define LAPACK_COMPLEX_CPP
#include <lapacke.h>

namespace conetool {

using Complex = std::complex<double>;

// ── Tridiagonal matrix with Thomas solves ────────────────────────────────
// Rows i hold (sub[i], diag[i], super[i]); sub[0] and super[n−1] unused.
struct Tridiag {
    Eigen::VectorXd sub, diag, super;

    int size() const { return static_cast<int>(diag.size()); }

    double entry(int i, int j) const {
        if (j == i) return diag(i);
        if (j == i - 1 && i > 0) return sub(i);
        if (j == i + 1 && i + 1 < size()) return super(i);
        return 0.0;
    }

    static Tridiag zero(int n) {
        Tridiag t;
        t.sub = Eigen::VectorXd::Zero(n);
        t.diag = Eigen::VectorXd::Zero(n);
        t.super = Eigen::VectorXd::Zero(n);
        return t;
    }

    template <typename Vec>
    Vec apply(const Vec& x) const {
        const int n = size();
        Vec y(n);
        for (int i = 0; i < n; ++i) {
            auto v = diag(i) * x(i);
            if (i > 0) v += sub(i) * x(i - 1);
            if (i < n - 1) v += super(i) * x(i + 1);
            y(i) = v;
        }
        return y;
    }

    // this := a*I + b*this
    Tridiag scaled_shifted(double a, double b) const {
        Tridiag t = *this;
        t.sub *= b;
        t.diag = (b * diag).array() + a;
        t.super *= b;
        return t;
    }

    // Row-scale: diag(s) * this.
    Tridiag row_scaled(const Eigen::VectorXd& s) const {
        Tridiag t = *this;
        t.sub.array() *= s.array();
        t.diag.array() *= s.array();
        t.super.array() *= s.array();
        return t;
    }
};

// Solve T x = rhs by Thomas elimination (no pivoting; the systems assembled
// here are strictly diagonally dominant after the implicit shift).
template <typename Vec>
inline Vec thomas_solve(const Tridiag& T, const Vec& rhs) {
    const int n = T.size();
    Eigen::VectorXd c(n);
    Vec d = rhs;
    double beta = T.diag(0);
    if (beta == 0.0) throw std::runtime_error("thomas_solve: zero pivot");
    c(0) = T.super(0) / beta;
    d(0) = rhs(0) / beta;
    for (int i = 1; i < n; ++i) {
        beta = T.diag(i) - T.sub(i) * c(i - 1);
        if (beta == 0.0) throw std::runtime_error("thomas_solve: zero pivot");
        if (i < n - 1) c(i) = T.super(i) / beta;
        d(i) = (rhs(i) - T.sub(i) * d(i - 1)) / beta;
    }
    for (int i = n - 2; i >= 0; --i) d(i) -= c(i) * d(i + 1);
    return d;
}

// Complex-shifted Thomas solve: (T + z·I) x = rhs with complex z.
inline Eigen::VectorXcd thomas_solve_shifted(const Tridiag& T, Complex z,
                                             const Eigen::VectorXcd& rhs) {
    const int n = T.size();
    Eigen::VectorXcd c(n), d(n);
    Complex beta = T.diag(0) + z;
    c(0) = T.super(0) / beta;
    d(0) = rhs(0) / beta;
    for (int i = 1; i < n; ++i) {
        beta = T.diag(i) + z - T.sub(i) * c(i - 1);
        if (std::abs(beta) == 0.0) throw std::runtime_error("thomas_solve_shifted: zero pivot");
        if (i < n - 1) c(i) = T.super(i) / beta;
        d(i) = (rhs(i) - T.sub(i) * d(i - 1)) / beta;
    }
    for (int i = n - 2; i >= 0; --i) d(i) -= c(i) * d(i + 1);
    return d;
}

// ── Symmetric tridiagonal eigenvalues by Sturm bisection ─────────────────
struct SymTridiag {
    Eigen::VectorXd d;  // diagonal, size n
    Eigen::VectorXd e;  // off-diagonal, size n−1
};

// Diagonal similarity of a sign-consistent tridiagonal (sub·super > 0).
inline SymTridiag symmetrize(const Tridiag& T) {
    const int n = T.size();
    SymTridiag s;
    s.d = T.diag;
    s.e.resize(n - 1);
    for (int i = 0; i < n - 1; ++i) {
        double prod = T.super(i) * T.sub(i + 1);
        if (prod < 0.0)
            throw std::invalid_argument("symmetrize: sub/super sign mismatch, not symmetrizable");
        s.e(i) = std::sqrt(prod);
    }
    return s;
}

// Number of eigenvalues strictly below x.
inline int sturm_count(const SymTridiag& T, double x) {
    const int n = static_cast<int>(T.d.size());
    int count = 0;
    double q = T.d(0) - x;
    if (q < 0.0) ++count;
    for (int i = 1; i < n; ++i) {
        double e2 = T.e(i - 1) * T.e(i - 1);
        if (q == 0.0) q = -1e-300;
        q = T.d(i) - x - e2 / q;
        if (q < 0.0) ++count;
    }
    return count;
}

inline std::pair<double, double> gershgorin_bounds(const SymTridiag& T) {
    const int n = static_cast<int>(T.d.size());
    double lo = T.d(0), hi = T.d(0);
    for (int i = 0; i < n; ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(T.e(i - 1));
        if (i < n - 1) r += std::abs(T.e(i));
        lo = std::min(lo, T.d(i) - r);
        hi = std::max(hi, T.d(i) + r);
    }
    return {lo, hi};
}

// m-th eigenvalue (1-based, ascending) by bisection on the Sturm count.
inline double kth_eigenvalue(const SymTridiag& T, int m, double tol = 1e-13) {
    const int n = static_cast<int>(T.d.size());
    if (m < 1 || m > n) throw std::invalid_argument("kth_eigenvalue: bad index");
    auto [a, b] = gershgorin_bounds(T);
    while (b - a > tol * std::max(1.0, std::abs(a) + std::abs(b))) {
        double c = 0.5 * (a + b);
        if (sturm_count(T, c) >= m)
            b = c;
        else
            a = c;
    }
    return 0.5 * (a + b);
}

// The k smallest eigenvalues, ascending.
inline std::vector<double> smallest_eigenvalues(const SymTridiag& T, int k,
                                                double tol = 1e-13) {
    std::vector<double> out;
    for (int m = 1; m <= k; ++m) out.push_back(kth_eigenvalue(T, m, tol));
    return out;
}

// Distance from `target` to the spectrum, via the two bracketing eigenvalues.
inline double spectrum_distance(const SymTridiag& T, double target) {
    const int n = static_cast<int>(T.d.size());
    int below = sturm_count(T, target);
    double dist = std::numeric_limits<double>::infinity();
    if (below >= 1) dist = std::min(dist, target - kth_eigenvalue(T, below));
    if (below < n) dist = std::min(dist, kth_eigenvalue(T, below + 1) - target);
    return dist;
}

// Inverse iteration for the eigenvector of a (possibly unsymmetric)
// tridiagonal at an already-converged eigenvalue.
inline Eigen::VectorXd tridiag_eigenvector(const Tridiag& T, double mu, int iters = 4) {
    const int n = T.size();
    Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0);
    for (int i = 0; i < n; ++i) x(i) += 1e-3 * std::cos(2.7 * i);
    Tridiag shifted = T;
    // small relative detuning keeps the solve well-posed at the eigenvalue
    double detune = 1e-11 * std::max(1.0, std::abs(mu));
    shifted.diag.array() -= (mu + detune);
    for (int it = 0; it < iters; ++it) {
        x = thomas_solve(shifted, x);
        x /= x.norm();
    }
    int imax = 0;
    x.cwiseAbs().maxCoeff(&imax);
    if (x(imax) < 0.0) x = -x;
    return x;
}

// ── LAPACK banded matrices ───────────────────────────────────────────────
// Column-major band storage with the extra kl rows required by gbtrf:
// entry (i,j) lives at ab[j*ldab + kl + ku + i − j].
template <typename T>
struct Banded {
    int n = 0, kl = 0, ku = 0;
    std::vector<T> ab;
    std::vector<lapack_int> ipiv;
    bool factored = false;

    static Banded zero(int n, int kl, int ku) {
        Banded b;
        b.n = n;
        b.kl = kl;
        b.ku = ku;
        b.ab.assign(static_cast<std::size_t>(b.ldab()) * n, T(0));
        return b;
    }

    int ldab() const { return 2 * kl + ku + 1; }
    bool in_band(int i, int j) const { return i - j <= kl && j - i <= ku; }

    T get(int i, int j) const {
        if (!in_band(i, j)) return T(0);
        return ab[static_cast<std::size_t>(j) * ldab() + kl + ku + i - j];
    }
    void set(int i, int j, T v) {
        if (!in_band(i, j)) throw std::out_of_range("Banded::set outside band");
        ab[static_cast<std::size_t>(j) * ldab() + kl + ku + i - j] = v;
    }
    void add(int i, int j, T v) {
        if (!in_band(i, j)) throw std::out_of_range("Banded::add outside band");
        ab[static_cast<std::size_t>(j) * ldab() + kl + ku + i - j] += v;
    }

    template <typename Vec>
    Vec apply(const Vec& x) const {
        Vec y = Vec::Zero(n);
        for (int j = 0; j < n; ++j) {
            int ilo = std::max(0, j - ku), ihi = std::min(n - 1, j + kl);
            for (int i = ilo; i <= ihi; ++i) y(i) += get(i, j) * x(j);
        }
        return y;
    }

    void factorize();
    void solve_inplace(T* rhs, int nrhs = 1) const;
};

template <>
inline void Banded<double>::factorize() {
    ipiv.resize(static_cast<std::size_t>(n));
    lapack_int info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, n, n, kl, ku, ab.data(), ldab(),
                                     ipiv.data());
    if (info != 0) throw std::runtime_error("dgbtrf failed, info=" + std::to_string(info));
    factored = true;
}

template <>
inline void Banded<double>::solve_inplace(double* rhs, int nrhs) const {
    if (!factored) throw std::logic_error("Banded: factorize before solve");
    lapack_int info = LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', n, kl, ku, nrhs, ab.data(), ldab(),
                                     ipiv.data(), rhs, n);
    if (info != 0) throw std::runtime_error("dgbtrs failed, info=" + std::to_string(info));
}

template <>
inline void Banded<Complex>::factorize() {
    ipiv.resize(static_cast<std::size_t>(n));
    lapack_int info = LAPACKE_zgbtrf(LAPACK_COL_MAJOR, n, n, kl, ku,
                                     reinterpret_cast<lapack_complex_double*>(ab.data()), ldab(),
                                     ipiv.data());
    if (info != 0) throw std::runtime_error("zgbtrf failed, info=" + std::to_string(info));
    factored = true;
}

template <>
inline void Banded<Complex>::solve_inplace(Complex* rhs, int nrhs) const {
    if (!factored) throw std::logic_error("Banded: factorize before solve");
    lapack_int info =
        LAPACKE_zgbtrs(LAPACK_COL_MAJOR, 'N', n, kl, ku, nrhs,
                       reinterpret_cast<const lapack_complex_double*>(ab.data()), ldab(),
                       ipiv.data(), reinterpret_cast<lapack_complex_double*>(rhs), n);
    if (info != 0) throw std::runtime_error("zgbtrs failed, info=" + std::to_string(info));
}

// Smallest singular value of a complex banded matrix: reduce to real
// bidiagonal form (zgbbrd) and run the QR SVD sweep (dbdsqr, values only).
inline double smallest_singular_value(const Banded<Complex>& B) {
    const int n = B.n;
    const int ldab = B.kl + B.ku + 1;
    std::vector<Complex> ab(static_cast<std::size_t>(ldab) * n, Complex(0));
    for (int j = 0; j < n; ++j) {
        int ilo = std::max(0, j - B.ku), ihi = std::min(n - 1, j + B.kl);
        for (int i = ilo; i <= ihi; ++i)
            ab[static_cast<std::size_t>(j) * ldab + B.ku + i - j] = B.get(i, j);
    }
    std::vector<double> d(static_cast<std::size_t>(n)), e(static_cast<std::size_t>(std::max(n - 1, 1)));
    Complex dummy;
    lapack_int info = LAPACKE_zgbbrd(LAPACK_COL_MAJOR, 'N', n, n, 0, B.kl, B.ku,
                                     reinterpret_cast<lapack_complex_double*>(ab.data()), ldab,
                                     d.data(), e.data(),
                                     reinterpret_cast<lapack_complex_double*>(&dummy), 1,
                                     reinterpret_cast<lapack_complex_double*>(&dummy), 1,
                                     reinterpret_cast<lapack_complex_double*>(&dummy), 1);
    if (info != 0) throw std::runtime_error("zgbbrd failed, info=" + std::to_string(info));
    double ddummy = 0.0;
    info = LAPACKE_dbdsqr(LAPACK_COL_MAJOR, 'U', n, 0, 0, 0, d.data(), e.data(), &ddummy, 1,
                          &ddummy, 1, &ddummy, 1);
    if (info != 0) throw std::runtime_error("dbdsqr failed, info=" + std::to_string(info));
    return d[static_cast<std::size_t>(n - 1)];  // dbdsqr returns descending order
}

}  // namespace conetool
