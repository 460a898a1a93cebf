#pragma once

// Linearized Gaussian fluctuations.
//
// Quadratures are X = (d^+ + d)/sqrt(2), Y = i(d^+ - d)/sqrt(2), ordered
// (X_a, Y_a, X_m, Y_m, X_b, Y_b). The covariance convention is
// V_ij = <u_i u_j + u_j u_i>/2, so the vacuum has V = I/2 and the diffusion matrix is
// D = diag[kappa (2N + 1)] per quadrature. V solves A V + V A^T = -D.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "cmm/error.hpp"
#include "cmm/model.hpp"
#include "cmm/steady_state.hpp"

namespace cmm {

using Matrix6 = Eigen::Matrix<double, 6, 6>;
using Vector6 = Eigen::Matrix<double, 6, 1>;

struct EffectiveParams {
    double delta_a = 0.0;
    double delta_F = 0.0;
    double delta_m_tilde = 0.0;
    double delta_K = 0.0;
    double g_ma = 0.0;
    double G_mb = 0.0;
    double omega_b = 1.0;
    double kappa_a = 0.0;
    double kappa_b = 0.0;
    double kappa_m = 0.0;
    ThermalOccupations occupations;

    void validate() const {
        using namespace detail;
        for (auto [v, name] : {std::pair{delta_a, "delta_a"}, {delta_F, "delta_F"}, {delta_m_tilde, "delta_m_tilde"},
                               {delta_K, "delta_K"}, {g_ma, "g_ma"}, {omega_b, "omega_b"}}) {
            require_finite(v, name);
        }
        require_nonnegative(G_mb, "G_mb");
        require_positive(kappa_a, "kappa_a");
        require_positive(kappa_b, "kappa_b");
        require_positive(kappa_m, "kappa_m");
        occupations.validate();
    }

    /// Frequency unit used for the stability threshold.
    double frequency_scale() const { return std::abs(omega_b) > 0.0 ? std::abs(omega_b) : 1.0; }

    bool operator==(const EffectiveParams&) const = default;

    /// Linearization around a solved steady state. G_mb = g_mb m_s with m_s real.
    static EffectiveParams from_steady_state(const SystemParams& p, const SteadyState& st,
                                             const ThermalOccupations& occupations) {
        EffectiveParams e;
        e.delta_a = p.delta_a();
        e.delta_F = p.delta_F;
        e.delta_m_tilde = st.delta_m_tilde;
        e.delta_K = st.delta_k;
        e.g_ma = p.g_ma;
        e.G_mb = std::abs(p.g_mb * st.m_s.real());
        e.omega_b = p.omega_b;
        e.kappa_a = p.kappa_a;
        e.kappa_b = p.kappa_b;
        e.kappa_m = p.kappa_m;
        e.occupations = occupations;
        return e;
    }
};

/// Drive amplitude that produces the effective optomechanical-type coupling G_mb for a
/// given bare coupling g_mb, from m_s = G_mb / g_mb and the stationary balance equations.
inline double drive_for_effective(const EffectiveParams& e, double g_mb) {
    detail::require_positive(std::abs(g_mb), "g_mb");
    detail::require(e.g_ma != 0.0, "g_ma must be nonzero to drive the magnon through the cavity");
    const double m = e.G_mb / std::abs(g_mb);
    const std::complex<double> magnon{e.kappa_m, e.delta_m_tilde + e.delta_K};
    const std::complex<double> cavity{e.kappa_a, e.delta_a - e.delta_F};
    return m * std::abs(magnon * cavity + e.g_ma * e.g_ma) / std::abs(e.g_ma);
}

/// Linearization margin |m_s|^2 of the classical state behind an effective parameter set.
inline double effective_validity(const EffectiveParams& e, double g_mb) {
    detail::require_positive(std::abs(g_mb), "g_mb");
    const double m = e.G_mb / std::abs(g_mb);
    return m * m;
}

struct DriftMatrix {
    Matrix6 matrix = Matrix6::Zero();
    double frequency_scale = 1.0;
};

struct CovarianceMatrix {
    Matrix6 matrix = Matrix6::Identity() * 0.5;
};

struct StabilityReport {
    bool stable = false;
    double spectral_abscissa = 0.0;
    Eigen::Matrix<std::complex<double>, 6, 1> eigenvalues;
};

inline DriftMatrix build_drift(const EffectiveParams& e) {
    e.validate();
    const double cav = e.delta_a - e.delta_F;
    const double mag = e.delta_m_tilde + e.delta_K;
    const double mag_y = e.delta_m_tilde + 3.0 * e.delta_K;
    const double g = e.g_ma;
    const double G2 = 2.0 * e.G_mb;
    DriftMatrix A;
    A.frequency_scale = e.frequency_scale();
    // clang-format off
    A.matrix <<
        -e.kappa_a,  cav,         0.0,        g,          0.0,        0.0,
        -cav,        -e.kappa_a,  -g,         0.0,        0.0,        0.0,
        0.0,         g,           -e.kappa_m, mag,        0.0,        0.0,
        -g,          0.0,         -mag_y,     -e.kappa_m, -G2,        0.0,
        0.0,         0.0,         0.0,        0.0,        -e.kappa_b, e.omega_b,
        0.0,         0.0,         -G2,        0.0,        -e.omega_b, -e.kappa_b;
    // clang-format on
    return A;
}

inline Matrix6 build_diffusion(const EffectiveParams& e) {
    e.validate();
    const auto& n = e.occupations;
    Vector6 d;
    d << e.kappa_a * (2.0 * n.n_a + 1.0), e.kappa_a * (2.0 * n.n_a + 1.0), e.kappa_m * (2.0 * n.n_m + 1.0),
        e.kappa_m * (2.0 * n.n_m + 1.0), e.kappa_b * (2.0 * n.n_b + 1.0), e.kappa_b * (2.0 * n.n_b + 1.0);
    return d.asDiagonal();
}

/// Spectral test standing in for Routh-Hurwitz: stable iff every eigenvalue has real part
/// below -1e-9 in units of omega_b.
inline StabilityReport is_stable(const DriftMatrix& A) {
    Eigen::EigenSolver<Matrix6> solver(A.matrix, false);
    if (solver.info() != Eigen::Success) throw Error(ErrorCode::EigenFailure, "eigen-solver did not converge");
    StabilityReport r;
    r.eigenvalues = solver.eigenvalues();
    r.spectral_abscissa = r.eigenvalues.real().maxCoeff();
    r.stable = r.spectral_abscissa < -1e-9 * A.frequency_scale;
    return r;
}

/// Column-stacking vectorization turns A V + V A^T = -D into (I (x) A + A (x) I) vec V = -vec D.
inline Eigen::Matrix<double, 36, 36> lyapunov_operator(const Matrix6& A) {
    Eigen::Matrix<double, 36, 36> K = Eigen::Matrix<double, 36, 36>::Zero();
    for (int j = 0; j < 6; ++j) {
        for (int i = 0; i < 6; ++i) {
            const int row = j * 6 + i;  // V(i, j)
            for (int k = 0; k < 6; ++k) {
                K(row, j * 6 + k) += A(i, k);  // (A V)(i, j) = A(i, k) V(k, j)
                K(row, k * 6 + i) += A(j, k);  // (V A^T)(i, j) = V(i, k) A(j, k)
            }
        }
    }
    return K;
}

inline double lyapunov_residual(const Matrix6& A, const Matrix6& V, const Matrix6& D) {
    return (A * V + V * A.transpose() + D).cwiseAbs().maxCoeff();
}

/// Steady-state covariance. Throws Unstable when the drift matrix fails the spectral test.
inline CovarianceMatrix solve_lyapunov(const DriftMatrix& A, const Matrix6& D) {
    if (!is_stable(A).stable) throw Error(ErrorCode::Unstable, "drift matrix is not stable");
    const auto K = lyapunov_operator(A.matrix);
    Eigen::PartialPivLU<Eigen::Matrix<double, 36, 36>> lu(K);
    if (!(lu.rcond() > 1e-14)) throw Error(ErrorCode::SingularSystem, "Lyapunov operator is numerically singular");
    const Eigen::Matrix<double, 36, 1> rhs = -Eigen::Map<const Eigen::Matrix<double, 36, 1>>(D.data());
    Eigen::Matrix<double, 36, 1> v = lu.solve(rhs);
    // one step of iterative refinement keeps the residual at the rounding floor
    v += lu.solve(rhs - K * v);
    CovarianceMatrix cov;
    cov.matrix = Eigen::Map<const Matrix6>(v.data());
    cov.matrix = 0.5 * (cov.matrix + cov.matrix.transpose()).eval();
    return cov;
}

/// Block-diagonal symplectic form over `modes` two-dimensional blocks.
template <int N>
Eigen::Matrix<double, 2 * N, 2 * N> symplectic_form() {
    Eigen::Matrix<double, 2 * N, 2 * N> omega = Eigen::Matrix<double, 2 * N, 2 * N>::Zero();
    for (int k = 0; k < N; ++k) {
        omega(2 * k, 2 * k + 1) = 1.0;
        omega(2 * k + 1, 2 * k) = -1.0;
    }
    return omega;
}

/// Smallest eigenvalue of the Hermitian matrix V + (i/2) Omega; non-negative for physical states.
inline double physicality_margin(const Matrix6& V) {
    const Eigen::Matrix<std::complex<double>, 6, 6> H =
        V.cast<std::complex<double>>() + std::complex<double>(0.0, 0.5) * symplectic_form<3>().cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<std::complex<double>, 6, 6>> solver(H, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

}  // namespace cmm
