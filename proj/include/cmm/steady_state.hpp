#pragma once

// Classical steady state of the driven system.
//
// Eliminating a_s and b_s from the mean-field balance equations leaves a cubic in
// the mean magnon number M = |m_s|^2,
//
//     [kappa_m'^2 + (Delta_m' + K0' M)^2] M = eta_a epsilon_d^2,
//
// whose reduced coefficients are built by reduced_coefficients(). The cubic can
// have three positive roots (bistability). Mean fields are reconstructed from a
// root with the drive phase chosen so that m_s is real and non-negative.

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "cmm/cubic.hpp"
#include "cmm/error.hpp"
#include "cmm/model.hpp"

namespace cmm {

using complex = std::complex<double>;

struct ReducedCoefficients {
    double kappa_m_prime = 0.0;
    double delta_m_prime = 0.0;
    double k0_prime = 0.0;
    double eta_a = 0.0;
    double eta_b = 0.0;

    /// Left-hand side of the magnon-number cubic minus its right-hand side.
    double residual(double M, double epsilon_d) const {
        const double shifted = delta_m_prime + k0_prime * M;
        return (kappa_m_prime * kappa_m_prime + shifted * shifted) * M - eta_a * epsilon_d * epsilon_d;
    }

    /// Drive amplitude that makes M a root.
    double drive_for(double M) const {
        const double shifted = delta_m_prime + k0_prime * M;
        return std::sqrt((kappa_m_prime * kappa_m_prime + shifted * shifted) * M / eta_a);
    }
};

enum class Branch { Lower, Middle, Upper, Unique };

inline const char* to_string(Branch b) {
    switch (b) {
        case Branch::Lower: return "lower";
        case Branch::Middle: return "middle";
        case Branch::Upper: return "upper";
        case Branch::Unique: return "unique";
    }
    return "?";
}

struct MagnonRoot {
    double M = 0.0;
    Branch branch = Branch::Unique;
};

struct SteadyState {
    complex a_s;
    complex b_s;
    complex m_s;
    double magnon_number = 0.0;
    double delta_k = 0.0;
    double delta_m_tilde = 0.0;
    Branch branch = Branch::Unique;
    bool stable = true;  // slope pre-label only; the drift-matrix spectrum is authoritative
};

struct BistabilityReport {
    std::vector<double> turning_points;    // M values with d(epsilon_d)/dM = 0, ascending
    std::vector<double> turning_drives;    // epsilon_d at each turning point
    bool bistable = false;
    std::optional<double> epsilon_d_critical;
};

inline ReducedCoefficients reduced_coefficients(const SystemParams& p) {
    p.validate();
    const double detuning = p.delta_a_shifted();
    ReducedCoefficients c;
    c.eta_a = p.g_ma * p.g_ma / (p.kappa_a * p.kappa_a + detuning * detuning);
    c.eta_b = mechanical_factor(p);
    c.kappa_m_prime = p.kappa_m + c.eta_a * p.kappa_a;
    c.delta_m_prime = p.delta_m() - c.eta_a * detuning;
    const double balance = c.eta_b * p.omega_b;
    c.k0_prime = 2.0 * (p.K0 - balance);
    // K0 set to eta_b omega_b but off by rounding still means no net Kerr term
    if (std::abs(c.k0_prime) <= 1e-12 * std::abs(balance)) c.k0_prime = 0.0;
    return c;
}

namespace detail {

inline double relative_residual(const ReducedCoefficients& c, double M, double epsilon_d) {
    const double rhs = c.eta_a * epsilon_d * epsilon_d;
    return std::abs(c.residual(M, epsilon_d)) / (rhs > 0.0 ? rhs : 1.0);
}

inline double polish_root(const ReducedCoefficients& c, double M, double epsilon_d) {
    for (int i = 0; i < 4; ++i) {
        if (relative_residual(c, M, epsilon_d) <= 1e-13) break;
        const double s = c.delta_m_prime + c.k0_prime * M;
        const double slope = c.kappa_m_prime * c.kappa_m_prime + s * s + 2.0 * c.k0_prime * M * s;
        if (slope == 0.0) break;
        const double next = M - c.residual(M, epsilon_d) / slope;
        if (!(std::abs(c.residual(next, epsilon_d)) < std::abs(c.residual(M, epsilon_d)))) break;
        M = next;
    }
    return M;
}

}  // namespace detail

/// All real non-negative roots of the magnon-number cubic, ascending and labelled.
inline std::vector<MagnonRoot> solve_magnon_number(const ReducedCoefficients& c, double epsilon_d) {
    detail::require_nonnegative(epsilon_d, "epsilon_d");
    if (epsilon_d == 0.0 || c.eta_a == 0.0) return {{0.0, Branch::Unique}};

    const double rhs = c.eta_a * epsilon_d * epsilon_d;
    const double kk = c.kappa_m_prime * c.kappa_m_prime + c.delta_m_prime * c.delta_m_prime;
    if (c.k0_prime == 0.0) return {{rhs / kk, Branch::Unique}};

    // x = K0' M / s turns the cubic monic with O(1) coefficients
    const double s = std::max(std::abs(c.delta_m_prime), c.kappa_m_prime);
    const double d = c.delta_m_prime / s;
    const cubic::Monic poly{2.0 * d, kk / (s * s), -c.k0_prime * rhs / (s * s * s)};
    const auto roots = cubic::solve(poly);

    std::vector<double> ms;
    for (double x : roots.values) {
        const double M = detail::polish_root(c, x * s / c.k0_prime, epsilon_d);
        if (M >= 0.0 && std::isfinite(M)) ms.push_back(M);
    }
    if (ms.empty()) {
        throw Error(ErrorCode::NoPhysicalRoot, "no non-negative real root for epsilon_d = " + std::to_string(epsilon_d));
    }
    std::sort(ms.begin(), ms.end());
    std::vector<MagnonRoot> out;
    if (ms.size() == 3) {
        out = {{ms[0], Branch::Lower}, {ms[1], Branch::Middle}, {ms[2], Branch::Upper}};
    } else {
        // a lone root, or a pair left after a negative root was discarded (cannot happen for
        // epsilon_d > 0 since every real root is positive, but keep the largest to be safe)
        out = {{ms.back(), Branch::Unique}};
    }
    return out;
}

/// Drive at which the two switching points coalesce, sqrt(-8 kappa_m'^2 Delta_m' / (9 eta_a K0')).
/// Only defined when K0' Delta_m' < 0.
inline std::optional<double> critical_drive(const ReducedCoefficients& c) {
    if (c.k0_prime == 0.0 || c.eta_a <= 0.0) return std::nullopt;
    if (c.k0_prime * c.delta_m_prime >= 0.0) return std::nullopt;
    return std::sqrt(-8.0 * c.kappa_m_prime * c.kappa_m_prime * c.delta_m_prime / (9.0 * c.eta_a * c.k0_prime));
}

/// Switching points from 3 K0'^2 M^2 + 4 K0' Delta_m' M + kappa_m'^2 + Delta_m'^2 = 0.
inline BistabilityReport bistability(const ReducedCoefficients& c) {
    BistabilityReport r;
    r.epsilon_d_critical = critical_drive(c);
    if (c.k0_prime == 0.0) return r;
    const double kp2 = c.kappa_m_prime * c.kappa_m_prime;
    const double dp = c.delta_m_prime;
    double disc = dp * dp - 3.0 * kp2;
    if (std::abs(disc) <= 1e-12 * (dp * dp + 3.0 * kp2)) disc = 0.0;
    if (disc < 0.0) return r;
    const double root = std::sqrt(disc);
    std::vector<double> ms;
    if (disc == 0.0) {
        ms = {-2.0 * dp / (3.0 * c.k0_prime)};
    } else {
        // stable pairing: q = -(2 dp + sign(dp) root), roots q/(3K) and (kp2+dp^2)/(K q)
        const double q = -(2.0 * dp + std::copysign(root, dp));
        ms = {q / (3.0 * c.k0_prime), (kp2 + dp * dp) / (c.k0_prime * q)};
    }
    for (double M : ms) {
        if (M > 0.0) r.turning_points.push_back(M);
    }
    std::sort(r.turning_points.begin(), r.turning_points.end());
    if (c.eta_a > 0.0) {
        for (double M : r.turning_points) r.turning_drives.push_back(c.drive_for(M));
    }
    r.bistable = disc > 0.0 && r.turning_points.size() == 2;
    return r;
}

/// Reconstructs a_s, b_s, m_s from a magnon-number root.
inline SteadyState mean_fields(const SystemParams& p, double M, Branch branch = Branch::Unique) {
    p.validate();
    detail::require_nonnegative(M, "M");
    const complex i{0.0, 1.0};
    SteadyState st;
    st.magnon_number = M;
    st.branch = branch;
    st.stable = branch != Branch::Middle;

    st.b_s = -i * p.g_mb * M / complex(p.kappa_b, p.omega_b);
    const double delta_m_tilde = p.delta_m() + 2.0 * p.g_mb * st.b_s.real();
    const double delta_k = 2.0 * p.K0 * M;
    const complex cavity{p.kappa_a, p.delta_a_shifted()};
    const complex magnon{p.kappa_m, delta_m_tilde + delta_k};
    const complex m = -i * p.g_ma * p.epsilon_d / (cavity * magnon + p.g_ma * p.g_ma);

    // global drive phase making m_s real and non-negative; b_s depends on |m_s|^2 only
    const double mag = std::abs(m);
    const complex phase = mag > 0.0 ? std::conj(m) / mag : complex{1.0, 0.0};
    st.m_s = complex{mag, 0.0};
    st.a_s = (p.epsilon_d * phase - i * p.g_ma * st.m_s) / cavity;

    const double closure = std::abs(std::norm(st.m_s) - M);
    if (closure > 1e-9 * std::max(M, 1e-300) && !(M == 0.0 && closure == 0.0)) {
        throw Error(ErrorCode::InconsistentRoot,
                    "|m_s|^2 = " + std::to_string(std::norm(st.m_s)) + " does not reproduce M = " + std::to_string(M));
    }
    st.delta_k = 2.0 * p.K0 * std::norm(st.m_s);
    st.delta_m_tilde = p.delta_m() + 2.0 * p.g_mb * st.b_s.real();
    return st;
}

/// Every steady state at the configured drive.
inline std::vector<SteadyState> steady_states(const SystemParams& p) {
    const auto roots = solve_magnon_number(reduced_coefficients(p), p.epsilon_d);
    std::vector<SteadyState> out;
    out.reserve(roots.size());
    for (const auto& r : roots) out.push_back(mean_fields(p, r.M, r.branch));
    return out;
}

/// epsilon_d^2 g_ma^2 / |[kappa_m + i(Delta~_m + Delta_K)][kappa_a + i(Delta_a - Delta_F)] + g_ma^2|^2.
/// Values much larger than one justify linearizing around the mean fields.
inline double linearization_validity(const SystemParams& p, const SteadyState& st) {
    const complex magnon{p.kappa_m, st.delta_m_tilde + st.delta_k};
    const complex cavity{p.kappa_a, p.delta_a_shifted()};
    const double denom = std::norm(magnon * cavity + p.g_ma * p.g_ma);
    return p.epsilon_d * p.epsilon_d * p.g_ma * p.g_ma / denom;
}

struct HysteresisTrace {
    std::vector<double> epsilon_d;
    std::vector<double> M_up;
    std::vector<double> M_down;
    std::vector<Branch> branch_up;
    std::vector<Branch> branch_down;
};

namespace detail {

inline MagnonRoot nearest_stable(const std::vector<MagnonRoot>& roots, double previous) {
    const MagnonRoot* best = nullptr;
    for (const auto& r : roots) {
        if (r.branch == Branch::Middle) continue;
        if (!best || std::abs(r.M - previous) < std::abs(best->M - previous)) best = &r;
    }
    return best ? *best : roots.front();
}

}  // namespace detail

/// Adiabatic up- and down-sweeps of the drive. Each trace keeps to the stable root nearest
/// its previous value, so it jumps only when its branch ceases to exist.
inline HysteresisTrace hysteresis_sweep(const SystemParams& p, const std::vector<double>& epsilon_grid) {
    if (epsilon_grid.empty()) return {};
    for (std::size_t k = 0; k < epsilon_grid.size(); ++k) {
        detail::require_nonnegative(epsilon_grid[k], "epsilon_grid");
        if (k > 0) detail::require(epsilon_grid[k] >= epsilon_grid[k - 1], "epsilon_grid must be ascending");
    }
    const auto coeffs = reduced_coefficients(p);
    const std::size_t n = epsilon_grid.size();
    std::vector<std::vector<MagnonRoot>> roots(n);
    for (std::size_t k = 0; k < n; ++k) roots[k] = solve_magnon_number(coeffs, epsilon_grid[k]);

    HysteresisTrace t;
    t.epsilon_d = epsilon_grid;
    t.M_up.resize(n);
    t.M_down.resize(n);
    t.branch_up.resize(n);
    t.branch_down.resize(n);

    MagnonRoot cur = roots.front().front();
    for (std::size_t k = 0; k < n; ++k) {
        cur = k == 0 ? roots[k].front() : detail::nearest_stable(roots[k], cur.M);
        t.M_up[k] = cur.M;
        t.branch_up[k] = cur.branch;
    }
    for (std::size_t k = n; k-- > 0;) {
        cur = k == n - 1 ? roots[k].back() : detail::nearest_stable(roots[k], cur.M);
        t.M_down[k] = cur.M;
        t.branch_down[k] = cur.branch;
    }
    return t;
}

namespace presets {

/// Reference drive used to normalize epsilon_d axes: the critical drive of the bistable
/// clockwise configuration (K0 = 0.1 eta_b omega_b, delta_F = +0.2 omega_b).
inline double drive_reference() {
    return *critical_drive(reduced_coefficients(with_kerr_ratio(0.1, DriveDirection::Clockwise)));
}

}  // namespace presets

}  // namespace cmm
