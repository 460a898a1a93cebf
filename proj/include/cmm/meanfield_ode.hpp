#pragma once

// Brute-force time integration of the nonlinear mean-field equations
//
//   da/dt = -[kappa_a + i(Delta_a - Delta_F)] a - i g_ma m + epsilon_d
//   db/dt = -(kappa_b + i omega_b) b - i g_mb |m|^2
//   dm/dt = -[kappa_m + i(Delta_m + 2 g_mb Re b + 2 K0 |m|^2)] m - i g_ma a
//
// used as an independent oracle for the algebraic steady state. Integration runs in
// units of 1/omega_b; the recorded time grid is in seconds.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "cmm/error.hpp"
#include "cmm/model.hpp"
#include "cmm/steady_state.hpp"

namespace cmm {

struct FieldTriple {
    complex a;
    complex b;
    complex m;

    FieldTriple operator+(const FieldTriple& o) const { return {a + o.a, b + o.b, m + o.m}; }
    FieldTriple operator-(const FieldTriple& o) const { return {a - o.a, b - o.b, m - o.m}; }
    FieldTriple operator*(double s) const { return {a * s, b * s, m * s}; }
    double max_abs() const { return std::max({std::abs(a), std::abs(b), std::abs(m)}); }
};

struct TrajectoryRecord {
    std::vector<double> time;  // s
    std::vector<FieldTriple> fields;
    bool converged = false;
    double final_residual = 0.0;
    FieldTriple final_state;
};

struct IntegrationOptions {
    double step_tolerance = 1e-10;         // local error per step, relative to max(|y|, 1)
    double convergence_tolerance = 1e-10;  // max|dy/dt| / max(|y|, 1)
    std::size_t max_records = 20000;
    /// Slave b to its instantaneous fixed point b = -i g_mb |m|^2 / (kappa_b + i omega_b)
    /// until (a, m) settle, then release it for the confirmation window. Avoids the 1/kappa_b
    /// mechanical ring-down; leave off for validation runs.
    bool two_timescale = false;
    /// With two_timescale, keep b slaved to the end instead of releasing it. The run then
    /// follows the reduced (a, m) dynamics, whose fixed points are the same but whose
    /// stability ignores the mechanical mode.
    bool release_b = true;
};

namespace detail {

struct MeanfieldRhs {
    SystemParams p;  // scaled to omega_b = 1
    bool slave_b = false;

    complex adiabatic_b(const complex& m) const {
        return complex(0.0, -1.0) * p.g_mb * std::norm(m) / complex(p.kappa_b, p.omega_b);
    }

    FieldTriple operator()(const FieldTriple& y) const {
        const complex i{0.0, 1.0};
        const complex b = slave_b ? adiabatic_b(y.m) : y.b;
        FieldTriple d;
        d.a = -complex(p.kappa_a, p.delta_a_shifted()) * y.a - i * p.g_ma * y.m + p.epsilon_d;
        d.b = slave_b ? complex{} : -complex(p.kappa_b, p.omega_b) * y.b - i * p.g_mb * std::norm(y.m);
        const double shift = p.delta_m() + 2.0 * p.g_mb * b.real() + 2.0 * p.K0 * std::norm(y.m);
        d.m = -complex(p.kappa_m, shift) * y.m - i * p.g_ma * y.a;
        return d;
    }

    double residual(const FieldTriple& y) const {
        FieldTriple state = y;
        if (slave_b) state.b = adiabatic_b(y.m);
        return (*this)(state).max_abs() / std::max(1.0, state.max_abs());
    }
};

inline FieldTriple rk4_step(const MeanfieldRhs& f, const FieldTriple& y, double h) {
    const FieldTriple k1 = f(y);
    const FieldTriple k2 = f(y + k1 * (0.5 * h));
    const FieldTriple k3 = f(y + k2 * (0.5 * h));
    const FieldTriple k4 = f(y + k3 * h);
    return y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
}

inline double fastest_linear_rate(const SystemParams& q) {
    return std::max({q.kappa_a + std::abs(q.delta_a_shifted()), q.kappa_m + std::abs(q.delta_m()),
                     q.kappa_b + q.omega_b, std::abs(q.g_ma)});
}

struct Integrator {
    MeanfieldRhs rhs;
    IntegrationOptions opt;
    double nominal_h = 0.0;
    double h = 0.0;

    // one accepted step of size <= h with step-doubling error control; returns the step taken
    double step(FieldTriple& y) {
        for (int attempt = 0; attempt < 60; ++attempt) {
            const FieldTriple full = rk4_step(rhs, y, h);
            const FieldTriple half = rk4_step(rhs, rk4_step(rhs, y, 0.5 * h), 0.5 * h);
            const double err = (half - full).max_abs() / 15.0 / std::max(1.0, y.max_abs());
            if (err <= opt.step_tolerance || h < nominal_h * 1e-9) {
                const double taken = h;
                y = half;
                if (err < opt.step_tolerance / 64.0 && h < nominal_h) h = std::min(nominal_h, 2.0 * h);
                return taken;
            }
            h *= 0.5;
        }
        throw Error(ErrorCode::NonConvergence, "step size underflow in mean-field integration");
    }
};

}  // namespace detail

/// Default integration horizon in seconds: 50 / min(kappa), leaving kappa_b out when the
/// mechanical mode is slaved.
inline double default_t_max(const SystemParams& p, bool two_timescale = false) {
    const double slowest = two_timescale ? std::min(p.kappa_a, p.kappa_m) : std::min({p.kappa_a, p.kappa_m, p.kappa_b});
    return 50.0 / slowest;
}

/// Fixed-step classical RK4 with error-triggered step halving. Stops early once the
/// convergence criterion has held over a full window of max(5% t_max, 1000 steps).
/// A run that does not settle (unstable branch, limit cycle) is returned with
/// converged = false rather than thrown.
inline TrajectoryRecord integrate_meanfield(const SystemParams& params, const FieldTriple& initial, double t_max,
                                            double dt, const IntegrationOptions& opt = {}) {
    params.validate();
    detail::require(dt > 0.0 && std::isfinite(dt), "dt must be positive");
    detail::require(t_max > dt, "t_max must exceed dt");
    const double unit = params.omega_b;
    const SystemParams q = params.scaled(unit);
    const double h0 = dt * unit;
    const double tau_max = t_max * unit;
    detail::require(h0 * detail::fastest_linear_rate(q) < 0.1, "dt * max rate must be < 0.1");

    detail::Integrator integ{{q, opt.two_timescale}, opt, h0, h0};
    const double window = std::max(0.05 * tau_max, 1000.0 * h0);
    const std::size_t stride =
        std::max<std::size_t>(1, static_cast<std::size_t>(tau_max / h0) / std::max<std::size_t>(1, opt.max_records));

    TrajectoryRecord rec;
    FieldTriple y = initial;
    double tau = 0.0;
    double settled_since = -1.0;
    std::size_t steps = 0;
    rec.time.push_back(0.0);
    rec.fields.push_back(y);

    auto release_b = [&] {
        y.b = integ.rhs.adiabatic_b(y.m);
        integ.rhs.slave_b = false;
        settled_since = -1.0;
    };

    while (tau < tau_max) {
        integ.h = std::min(integ.h, tau_max - tau);
        if (integ.h <= 0.0) break;
        tau += integ.step(y);
        ++steps;
        if (steps % stride == 0) {
            rec.time.push_back(tau / unit);
            rec.fields.push_back(y);
        }
        const double r = integ.rhs.residual(y);
        if (!std::isfinite(r)) break;
        if (r < opt.convergence_tolerance) {
            if (settled_since < 0.0) settled_since = tau;
            if (integ.rhs.slave_b && opt.release_b) {
                release_b();
                continue;
            }
            if (tau - settled_since >= window) break;
        } else {
            settled_since = -1.0;
        }
    }
    if (integ.rhs.slave_b) y.b = integ.rhs.adiabatic_b(y.m);
    rec.final_state = y;
    rec.final_residual = integ.rhs.residual(y);
    rec.converged = (!integ.rhs.slave_b || !opt.release_b) && settled_since >= 0.0 && rec.final_residual < opt.convergence_tolerance &&
                    tau - settled_since >= window;
    if (rec.time.back() != tau / unit) {
        rec.time.push_back(tau / unit);
        rec.fields.push_back(y);
    }
    return rec;
}

struct SettleOptions {
    std::optional<double> t_max;  // s; default_t_max() when empty
    std::optional<double> dt;     // s; 0.02 / omega_b when empty
    IntegrationOptions integration;
};

/// Integrates to a fixed point and converts it into a SteadyState (m_s rotated real).
/// Throws NonConvergence when the run does not settle.
inline SteadyState settle(const SystemParams& p, const FieldTriple& seed, const SettleOptions& opt = {}) {
    const double dt = opt.dt.value_or(0.02 / p.omega_b);
    const double t_max = opt.t_max.value_or(default_t_max(p, opt.integration.two_timescale));
    const auto rec = integrate_meanfield(p, seed, t_max, dt, opt.integration);
    if (!rec.converged) {
        throw Error(ErrorCode::NonConvergence, "mean-field integration did not settle (residual " +
                                                   std::to_string(rec.final_residual) + ")");
    }
    const FieldTriple& y = rec.final_state;
    const double M = std::norm(y.m);
    const auto coeffs = reduced_coefficients(p);
    if (detail::relative_residual(coeffs, M, p.epsilon_d) > 1e-6 && M > 0.0) {
        throw Error(ErrorCode::InconsistentRoot, "settled state does not satisfy the magnon-number cubic");
    }

    SteadyState st;
    const double mag = std::abs(y.m);
    const complex phase = mag > 0.0 ? std::conj(y.m) / mag : complex{1.0, 0.0};
    st.m_s = complex{mag, 0.0};
    st.a_s = y.a * phase;
    st.b_s = y.b;
    st.magnon_number = M;
    st.delta_k = 2.0 * p.K0 * M;
    st.delta_m_tilde = p.delta_m() + 2.0 * p.g_mb * y.b.real();

    const auto roots = solve_magnon_number(coeffs, p.epsilon_d);
    const auto nearest = std::min_element(roots.begin(), roots.end(), [&](const MagnonRoot& l, const MagnonRoot& r) {
        return std::abs(l.M - M) < std::abs(r.M - M);
    });
    st.branch = nearest->branch;
    st.stable = true;
    return st;
}

}  // namespace cmm
