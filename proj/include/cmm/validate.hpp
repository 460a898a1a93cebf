#pragma once

// Self-checks shared by the test suites and the `validate` subcommand: randomized
// configurations, the time-integration oracle, and random physical two-mode states.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "cmm/entanglement.hpp"
#include "cmm/linearized.hpp"
#include "cmm/meanfield_ode.hpp"
#include "cmm/steady_state.hpp"

namespace cmm::validation {

struct OracleCase {
    SystemParams params;  // omega_b = 1 units
    double M_algebraic = 0.0;
    double M_ode = 0.0;
    double relative_error = 0.0;
    bool converged = false;
};

/// Random single-root configurations in omega_b = 1 units whose steady state passes the
/// drift-matrix stability test. kappa_b is kept >= 0.05 so full integration stays cheap.
inline std::vector<SystemParams> random_stable_configurations(std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto between = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };
    std::vector<SystemParams> out;
    for (std::size_t attempt = 0; out.size() < count && attempt < 200 * count; ++attempt) {
        const double da = between(-2.0, 0.0);
        const double dm = between(0.0, 2.0);
        SystemParams p = SystemParams::from_detunings(1000.0, da, dm, 1.0);
        p.kappa_a = between(0.05, 0.5);
        p.kappa_m = between(0.05, 0.5);
        p.kappa_b = between(0.05, 0.5);
        p.g_ma = between(0.02, 0.5);
        p.g_mb = std::pow(10.0, between(-4.0, -2.0));
        p.delta_F = between(-0.3, 0.3);
        p.K0 = mechanical_factor(p) * between(-2.0, 3.0);
        p.epsilon_d = std::pow(10.0, between(0.0, 2.5));
        try {
            const auto states = steady_states(p);
            if (states.size() != 1) continue;
            const auto eff = EffectiveParams::from_steady_state(p, states.front(), {});
            if (!is_stable(build_drift(eff)).stable) continue;
            out.push_back(p);
        } catch (const Error&) {
            continue;
        }
    }
    return out;
}

/// Integrates from the empty state and compares |m|^2 with the algebraic root. The horizon
/// covers 50 decay times of the slowest linearized mode, which can be far slower than
/// the slowest damping rate.
inline OracleCase ode_oracle(const SystemParams& p, const IntegrationOptions& opt = {}) {
    OracleCase c;
    c.params = p;
    c.M_algebraic = solve_magnon_number(reduced_coefficients(p), p.epsilon_d).front().M;
    double t_max = default_t_max(p, opt.two_timescale);
    const auto eff = EffectiveParams::from_steady_state(p, mean_fields(p, c.M_algebraic), {});
    const auto report = is_stable(build_drift(eff));
    if (report.stable) t_max = std::max(t_max, 50.0 / -report.spectral_abscissa);
    const auto rec = integrate_meanfield(p, {}, t_max, 0.02 / p.omega_b, opt);
    c.converged = rec.converged;
    c.M_ode = std::norm(rec.final_state.m);
    c.relative_error = c.M_algebraic > 0.0 ? std::abs(c.M_ode - c.M_algebraic) / c.M_algebraic : std::abs(c.M_ode);
    return c;
}

/// S diag(nu, nu, mu, mu) S^T with nu, mu >= 1/2 and S a random two-mode symplectic matrix
/// built from local rotations, local squeezers and a beam splitter and two-mode squeezer.
inline Matrix4 random_physical_v4(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto rot = [&](int k) {
        const double t = 2.0 * std::numbers::pi * u(rng);
        Matrix4 R = Matrix4::Identity();
        R.block<2, 2>(2 * k, 2 * k) << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
        return R;
    };
    auto squeeze = [&](int k) {
        const double r = 1.5 * (u(rng) - 0.5);
        Matrix4 S = Matrix4::Identity();
        S(2 * k, 2 * k) = std::exp(r);
        S(2 * k + 1, 2 * k + 1) = std::exp(-r);
        return S;
    };
    auto splitter = [&] {
        const double t = 2.0 * std::numbers::pi * u(rng);
        Matrix4 B = Matrix4::Zero();
        B.block<2, 2>(0, 0) = B.block<2, 2>(2, 2) = Matrix2::Identity() * std::cos(t);
        B.block<2, 2>(0, 2) = Matrix2::Identity() * std::sin(t);
        B.block<2, 2>(2, 0) = -Matrix2::Identity() * std::sin(t);
        return B;
    };
    auto two_mode = [&] {
        const double r = 1.2 * u(rng);
        Matrix4 T = Matrix4::Zero();
        T.block<2, 2>(0, 0) = T.block<2, 2>(2, 2) = Matrix2::Identity() * std::cosh(r);
        Matrix2 z;
        z << std::sinh(r), 0.0, 0.0, -std::sinh(r);
        T.block<2, 2>(0, 2) = T.block<2, 2>(2, 0) = z;
        return T;
    };
    const Matrix4 S = rot(0) * rot(1) * squeeze(0) * squeeze(1) * splitter() * two_mode() * rot(0) * squeeze(1);
    Eigen::Vector4d d;
    const double nu = 0.5 + 2.0 * u(rng) * u(rng);
    const double mu = 0.5 + 2.0 * u(rng) * u(rng);
    d << nu, nu, mu, mu;
    return S * d.asDiagonal() * S.transpose();
}

/// Two-mode squeezed vacuum with squeezing r; its log-negativity is 2r.
inline Matrix4 two_mode_squeezed_vacuum(double r) {
    const double c = 0.5 * std::cosh(2.0 * r);
    const double s = 0.5 * std::sinh(2.0 * r);
    Matrix4 V;
    // clang-format off
    V << c,   0.0, s,   0.0,
         0.0, c,   0.0, -s,
         s,   0.0, c,   0.0,
         0.0, -s,  0.0, c;
    // clang-format on
    return V;
}

}  // namespace cmm::validation
