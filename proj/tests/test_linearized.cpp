#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <complex>
#include <random>

#include "cmm/linearized.hpp"

using namespace cmm;
using cd = std::complex<double>;

namespace {

EffectiveParams fig3_point(double delta_K, double delta_F) {
    EffectiveParams e;
    e.delta_a = -1.0;
    e.delta_m_tilde = 1.0;
    e.delta_K = delta_K;
    e.delta_F = delta_F;
    e.g_ma = 0.2;
    e.G_mb = 0.2;
    e.kappa_a = e.kappa_m = 0.1;
    e.kappa_b = 1e-5;
    e.occupations = {1e-20, 1e-20, 20.34};
    return e;
}

EffectiveParams random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    EffectiveParams e;
    e.delta_a = -2.0 * u(rng);
    e.delta_m_tilde = 2.0 * u(rng);
    e.delta_K = 0.4 * (u(rng) - 0.5);
    e.delta_F = 0.4 * (u(rng) - 0.5);
    e.g_ma = 0.5 * u(rng);
    e.G_mb = 0.3 * u(rng);
    e.kappa_a = 0.05 + 0.5 * u(rng);
    e.kappa_m = 0.05 + 0.5 * u(rng);
    e.kappa_b = std::pow(10.0, -5.0 + 4.0 * u(rng));
    e.occupations = {u(rng), u(rng), 100.0 * u(rng)};
    return e;
}

// Fluctuation equations in the (a, a+, m, m+, b, b+) basis, converted to quadratures by
// d = (X + iY)/sqrt(2). The magnon Kerr term linearizes to 2 Delta_K dm + Delta_K dm+.
Matrix6 drift_from_ladder_form(const EffectiveParams& e) {
    const cd i{0.0, 1.0};
    Eigen::Matrix<cd, 6, 6> L = Eigen::Matrix<cd, 6, 6>::Zero();
    const double G = e.G_mb;
    // da
    L(0, 0) = -(e.kappa_a + i * (e.delta_a - e.delta_F));
    L(0, 2) = -i * e.g_ma;
    // dm
    L(2, 2) = -(e.kappa_m + i * (e.delta_m_tilde + 2.0 * e.delta_K));
    L(2, 3) = -i * e.delta_K;
    L(2, 0) = -i * e.g_ma;
    L(2, 4) = L(2, 5) = -i * G;
    // db
    L(4, 4) = -(e.kappa_b + i * e.omega_b);
    L(4, 2) = L(4, 3) = -i * G;
    // conjugate rows
    for (int r : {0, 2, 4}) {
        for (int c = 0; c < 6; ++c) {
            const int cc = c % 2 == 0 ? c + 1 : c - 1;
            L(r + 1, cc) = std::conj(L(r, c));
        }
    }
    // ladder = T quadrature with d = (X + iY)/sqrt(2), d+ = (X - iY)/sqrt(2)
    Eigen::Matrix<cd, 6, 6> T = Eigen::Matrix<cd, 6, 6>::Zero();
    const double s = 1.0 / std::sqrt(2.0);
    for (int k = 0; k < 3; ++k) {
        T(2 * k, 2 * k) = s;
        T(2 * k, 2 * k + 1) = i * s;
        T(2 * k + 1, 2 * k) = s;
        T(2 * k + 1, 2 * k + 1) = -i * s;
    }
    const Eigen::Matrix<cd, 6, 6> A = T.inverse() * L * T;
    EXPECT_LE(A.imag().cwiseAbs().maxCoeff(), 1e-14);
    return A.real();
}

// Diagonalization route: A = P diag(l) P^-1 gives V = P W P^T with W_ij = -F_ij / (l_i + l_j).
Matrix6 lyapunov_by_eigenbasis(const Matrix6& A, const Matrix6& D) {
    Eigen::EigenSolver<Matrix6> es(A);
    const Eigen::Matrix<cd, 6, 6> P = es.eigenvectors();
    const Eigen::Matrix<cd, 6, 6> Pinv = P.inverse();
    const Eigen::Matrix<cd, 6, 6> F = Pinv * D.cast<cd>() * Pinv.transpose();
    Eigen::Matrix<cd, 6, 6> W;
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c) W(r, c) = -F(r, c) / (es.eigenvalues()(r) + es.eigenvalues()(c));
    return (P * W * P.transpose()).real();
}

}  // namespace

TEST(Drift, MatchesLadderOperatorDerivation) {
    std::mt19937_64 rng(1);
    for (int k = 0; k < 200; ++k) {
        const auto e = random_params(rng);
        const Matrix6 expected = drift_from_ladder_form(e);
        EXPECT_LE((build_drift(e).matrix - expected).cwiseAbs().maxCoeff(), 1e-14) << "case " << k;
    }
}

TEST(Drift, UncoupledSpectrum) {
    EffectiveParams e = fig3_point(0.0, 0.0);
    e.g_ma = 0.0;
    e.G_mb = 0.0;
    const auto r = is_stable(build_drift(e));
    EXPECT_TRUE(r.stable);
    EXPECT_NEAR(r.spectral_abscissa, -1e-5, 1e-15);
    std::vector<double> imag;
    for (int k = 0; k < 6; ++k) imag.push_back(std::abs(r.eigenvalues(k).imag()));
    std::sort(imag.begin(), imag.end());
    for (int k = 0; k < 6; ++k) EXPECT_NEAR(imag[k], 1.0, 1e-12);
}

TEST(Drift, RejectsInvalidInput) {
    EffectiveParams e = fig3_point(0.0, 0.0);
    e.kappa_a = 0.0;
    EXPECT_THROW(build_drift(e), Error);
    e = fig3_point(0.0, 0.0);
    e.G_mb = std::nan("");
    EXPECT_THROW(build_drift(e), Error);
}

TEST(Stability, StrongBlueCouplingIsUnstable) {
    // blue-detuned magnon with strong coupling drives parametric amplification
    EffectiveParams e = fig3_point(0.0, 0.0);
    e.delta_m_tilde = -1.0;
    e.G_mb = 0.3;
    EXPECT_FALSE(is_stable(build_drift(e)).stable);
    EXPECT_THROW(solve_lyapunov(build_drift(e), build_diffusion(e)), Error);
}

TEST(Stability, Fig3OperatingPointIsStable) {
    for (double dk : {-0.1, 0.0, 0.1})
        for (double df : {-0.1, 0.0, 0.1}) EXPECT_TRUE(is_stable(build_drift(fig3_point(dk, df))).stable);
}

TEST(Lyapunov, ResidualAndAgreementWithEigenbasisSolution) {
    std::mt19937_64 rng(2);
    int solved = 0;
    for (int k = 0; k < 300; ++k) {
        const auto e = random_params(rng);
        const auto A = build_drift(e);
        if (!is_stable(A).stable) continue;
        ++solved;
        const Matrix6 D = build_diffusion(e);
        const auto V = solve_lyapunov(A, D);
        EXPECT_LE(lyapunov_residual(A.matrix, V.matrix, D), 1e-10 * D.cwiseAbs().maxCoeff()) << "case " << k;
        const Matrix6 ref = lyapunov_by_eigenbasis(A.matrix, D);
        EXPECT_LE((V.matrix - ref).cwiseAbs().maxCoeff(), 1e-7 * ref.cwiseAbs().maxCoeff()) << "case " << k;
        EXPECT_EQ(V.matrix, V.matrix.transpose());
        Eigen::SelfAdjointEigenSolver<Matrix6> es(V.matrix);
        EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
        EXPECT_GE(physicality_margin(V.matrix), -1e-9 * V.matrix.cwiseAbs().maxCoeff());
    }
    EXPECT_GT(solved, 100);
}

TEST(Lyapunov, DecoupledModesAreThermal) {
    EffectiveParams e = fig3_point(0.0, 0.1);
    e.g_ma = 0.0;
    e.G_mb = 0.0;
    e.occupations = {0.3, 2.5, 20.34};
    const auto V = solve_lyapunov(build_drift(e), build_diffusion(e));
    const double n[3] = {0.3, 2.5, 20.34};
    for (int k = 0; k < 6; ++k) {
        EXPECT_NEAR(V.matrix(k, k), n[k / 2] + 0.5, 1e-12 * (n[k / 2] + 0.5));
        for (int j = 0; j < 6; ++j)
            if (j != k) EXPECT_LE(std::abs(V.matrix(k, j)), 1e-12);
    }
}

TEST(Lyapunov, KerrSqueezesIsolatedMagnon) {
    EffectiveParams e = fig3_point(0.05, 0.0);
    e.g_ma = e.G_mb = 0.0;
    e.occupations = {};
    const auto V = solve_lyapunov(build_drift(e), build_diffusion(e));
    const Eigen::Matrix2d mag = V.matrix.block<2, 2>(2, 2);
    // still a physical state, but with unequal quadrature noise
    EXPECT_GT(mag.determinant(), 0.25 - 1e-12);
    EXPECT_GT(std::abs(mag(0, 0) - mag(1, 1)) + std::abs(mag(0, 1)), 1e-3);
}

TEST(Lyapunov, VacuumBath) {
    EffectiveParams e = fig3_point(0.0, 0.0);
    e.g_ma = e.G_mb = 0.0;
    e.occupations = {};
    const auto V = solve_lyapunov(build_drift(e), build_diffusion(e));
    EXPECT_LE((V.matrix - 0.5 * Matrix6::Identity()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Lyapunov, OperatorIsColumnStacked) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n;
    Matrix6 A, V;
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c) {
            A(r, c) = n(rng);
            V(r, c) = n(rng);
        }
    const Matrix6 direct = A * V + V * A.transpose();
    const Eigen::Matrix<double, 36, 1> vec = lyapunov_operator(A) * Eigen::Map<const Eigen::Matrix<double, 36, 1>>(V.data());
    EXPECT_LE((Eigen::Map<const Matrix6>(vec.data()) - direct).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Effective, FromSteadyState) {
    auto p = presets::with_kerr_ratio(0.1).scaled(presets::mechanical_frequency);
    p.epsilon_d = 300.0;
    const auto st = steady_states(p).front();
    const auto e = EffectiveParams::from_steady_state(p, st, {0.0, 0.0, 20.0});
    EXPECT_EQ(e.delta_a, p.delta_a());
    EXPECT_EQ(e.delta_F, p.delta_F);
    EXPECT_EQ(e.delta_K, st.delta_k);
    EXPECT_NEAR(e.G_mb, p.g_mb * std::sqrt(st.magnon_number), 1e-12 * e.G_mb);
    EXPECT_EQ(e.occupations.n_b, 20.0);
}

TEST(Effective, DriveForCouplingReproducesMagnonAmplitude) {
    const auto base = presets::baseline().scaled(presets::mechanical_frequency);
    auto e = fig3_point(0.1, 0.1);
    const double eps = drive_for_effective(e, base.g_mb);
    // place the same detunings and drive in a system description, with K0 fixed so that the
    // Kerr shift matches, and recover |m_s|
    const double m = e.G_mb / base.g_mb;
    SystemParams p = SystemParams::from_detunings(1000.0, e.delta_a, 0.0, 1.0);
    p.kappa_a = e.kappa_a;
    p.kappa_m = e.kappa_m;
    p.kappa_b = e.kappa_b;
    p.g_ma = e.g_ma;
    p.g_mb = base.g_mb;
    p.delta_F = e.delta_F;
    p.K0 = e.delta_K / (2.0 * m * m);
    p.epsilon_d = eps;
    // choose omega_m so that the dressed detuning equals delta_m_tilde at this amplitude
    const double shift = -2.0 * mechanical_factor(p) * p.omega_b * m * m;
    p.omega_m = p.omega_d + e.delta_m_tilde - shift;
    const auto st = mean_fields(p, m * m);
    EXPECT_NEAR(st.delta_m_tilde, e.delta_m_tilde, 1e-9);
    EXPECT_NEAR(linearization_validity(p, st), effective_validity(e, base.g_mb), 1e-9 * m * m);
    EXPECT_GT(effective_validity(e, base.g_mb), 1.0);
}
