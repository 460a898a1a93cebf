#pragma once

// Bipartite logarithmic negativity of two modes picked out of the 6x6 covariance.
//
// With V4 = [[A, C], [C^T, B]], Sigma = det A + det B - 2 det C and
// eta^- = 2^{-1/2} [Sigma - (Sigma^2 - 4 det V4)^{1/2}]^{1/2} is the smallest symplectic
// eigenvalue of the partial transpose. E_N = max(0, -ln 2 eta^-).

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <string_view>

#include "cmm/error.hpp"
#include "cmm/linearized.hpp"

namespace cmm {

using Matrix4 = Eigen::Matrix4d;
using Matrix2 = Eigen::Matrix2d;

enum class Mode { Cavity = 0, Magnon = 1, Mechanical = 2 };

inline char mode_letter(Mode m) {
    switch (m) {
        case Mode::Cavity: return 'a';
        case Mode::Magnon: return 'm';
        case Mode::Mechanical: return 'b';
    }
    return '?';
}

struct Bipartition {
    Mode first = Mode::Cavity;
    Mode second = Mode::Mechanical;

    Bipartition() = default;
    Bipartition(Mode a, Mode b) : first(a), second(b) {
        detail::require(a != b, "bipartition needs two different modes");
    }

    /// Parses two mode letters, e.g. "ab", "mb", "am".
    static Bipartition parse(std::string_view text) {
        auto mode = [&](char c) {
            switch (c) {
                case 'a': return Mode::Cavity;
                case 'm': return Mode::Magnon;
                case 'b': return Mode::Mechanical;
                default: throw Error(ErrorCode::InvalidArgument, "unknown mode letter in '" + std::string(text) + "'");
            }
        };
        detail::require(text.size() == 2, "bipartition must be two letters from {a, m, b}");
        return {mode(text[0]), mode(text[1])};
    }

    std::string label() const { return {mode_letter(first), mode_letter(second)}; }
};

struct TwoModeBlock {
    Matrix4 matrix = Matrix4::Identity() * 0.5;

    Matrix2 A() const { return matrix.topLeftCorner<2, 2>(); }
    Matrix2 B() const { return matrix.bottomRightCorner<2, 2>(); }
    Matrix2 C() const { return matrix.topRightCorner<2, 2>(); }
};

struct NegativityResult {
    double E_N = 0.0;
    double eta_minus = 0.5;
    double sigma = 0.0;
    double det_V4 = 0.0;
    bool stable = true;
};

inline TwoModeBlock extract_v4(const CovarianceMatrix& V, const Bipartition& pair) {
    const int idx[4] = {2 * static_cast<int>(pair.first), 2 * static_cast<int>(pair.first) + 1,
                        2 * static_cast<int>(pair.second), 2 * static_cast<int>(pair.second) + 1};
    TwoModeBlock out;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) out.matrix(i, j) = V.matrix(idx[i], idx[j]);
    return out;
}

/// Smallest symplectic eigenvalue of the partial transpose (Y of the second mode flipped),
/// computed from the symmetric matrix -(S Omega S)^2 with S = sqrt(V~); its eigenvalues
/// are the squared symplectic eigenvalues.
inline double symplectic_eta_minus(const Matrix4& V4) {
    Matrix4 pt = V4;
    pt.row(3) *= -1.0;
    pt.col(3) *= -1.0;
    Eigen::SelfAdjointEigenSolver<Matrix4> root(pt);
    if (root.info() != Eigen::Success || root.eigenvalues().minCoeff() <= 0.0) {
        throw Error(ErrorCode::UnphysicalInput, "partially transposed block is not positive definite");
    }
    const Matrix4 S = root.operatorSqrt();
    const Matrix4 K = S * symplectic_form<2>() * S;
    const Matrix4 KtK = K.transpose() * K;
    Eigen::SelfAdjointEigenSolver<Matrix4> sq(KtK, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, sq.eigenvalues().minCoeff()));
}

inline NegativityResult log_negativity(const TwoModeBlock& v4) {
    const Matrix2 A = v4.A();
    const Matrix2 B = v4.B();
    const Matrix2 C = v4.C();
    NegativityResult r;
    const double det_a = A.determinant();
    const double det_b = B.determinant();
    r.sigma = det_a + det_b - 2.0 * C.determinant();
    r.det_V4 = v4.matrix.determinant();
    const double disc = r.sigma * r.sigma - 4.0 * r.det_V4;
    if (disc < -1e-10) {
        throw Error(ErrorCode::UnphysicalInput, "Sigma^2 - 4 det V4 = " + std::to_string(disc) + " < 0");
    }
    const double root = std::sqrt(std::max(0.0, disc));

    double eta_sq = 0.0;
    if (C.isZero(0.0)) {
        // product state: (Sigma - |det A - det B|)/2 = min(det A, det B)
        eta_sq = std::min(det_a, det_b);
    } else if (disc <= 1e-8 * r.sigma * r.sigma) {
        const double eta = symplectic_eta_minus(v4.matrix);
        eta_sq = eta * eta;
    } else {
        // Sigma - sqrt(disc) rewritten as 4 det V4 / (Sigma + sqrt(disc)) to avoid cancellation
        eta_sq = 2.0 * r.det_V4 / (r.sigma + root);
    }
    if (!(eta_sq > 0.0)) {
        throw Error(ErrorCode::UnphysicalInput, "eta^- radicand is not positive");
    }
    r.eta_minus = std::sqrt(eta_sq);
    r.E_N = std::max(0.0, -std::log(2.0 * r.eta_minus));
    return r;
}

inline NegativityResult entanglement_from_covariance(const CovarianceMatrix& V, const Bipartition& pair) {
    return log_negativity(extract_v4(V, pair));
}

struct EntanglementSolution {
    StabilityReport stability;
    CovarianceMatrix covariance;
    NegativityResult negativity;
};

/// Full pipeline: drift, stability, diffusion, Lyapunov, negativity. Unstable
/// configurations come back flagged with E_N = 0 instead of throwing.
inline EntanglementSolution solve_entanglement(const EffectiveParams& eff, const Bipartition& pair) {
    EntanglementSolution s;
    const DriftMatrix A = build_drift(eff);
    s.stability = is_stable(A);
    if (!s.stability.stable) {
        s.negativity.stable = false;
        return s;
    }
    s.covariance = solve_lyapunov(A, build_diffusion(eff));
    s.negativity = entanglement_from_covariance(s.covariance, pair);
    return s;
}

inline NegativityResult entanglement_of(const EffectiveParams& eff, const Bipartition& pair) {
    return solve_entanglement(eff, pair).negativity;
}

namespace detail {

inline void require_kerr_mirror(const EffectiveParams& plus, const EffectiveParams& minus) {
    EffectiveParams flipped = minus;
    flipped.delta_K = -minus.delta_K;
    if (!(flipped == plus)) {
        throw Error(ErrorCode::MismatchedConfigs, "configurations must differ only in the sign of delta_K");
    }
}

}  // namespace detail

/// |E_N(Delta_K > 0) - E_N(Delta_K < 0)|.
inline double delta_e_ab(const EffectiveParams& plus, const EffectiveParams& minus,
                         const Bipartition& pair = {Mode::Cavity, Mode::Mechanical}) {
    detail::require_kerr_mirror(plus, minus);
    if (plus == minus) return 0.0;
    return std::abs(entanglement_of(plus, pair).E_N - entanglement_of(minus, pair).E_N);
}

/// Same measure from already-solved covariance matrices.
inline double delta_e_ab(const CovarianceMatrix& plus, const CovarianceMatrix& minus,
                         const Bipartition& pair = {Mode::Cavity, Mode::Mechanical}) {
    return std::abs(entanglement_from_covariance(plus, pair).E_N - entanglement_from_covariance(minus, pair).E_N);
}

}  // namespace cmm
