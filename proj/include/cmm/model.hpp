#pragma once

// Domain types and physical helpers for the driven Kerr-magnon / spinning-cavity /
// mechanical system.
//
// Units: every frequency, rate and coupling is an angular frequency in rad/s.
// The mean fields a_s, b_s, m_s are dimensionless amplitudes (square roots of
// quanta), so the drive epsilon_d is a rate: the photon flux convention
// epsilon_d = sqrt(2 kappa_a P / (hbar omega_d)) gives rad/s directly.
//
// Every formula downstream is homogeneous of degree one in the rates, so any
// consistent frequency unit works. SystemParams::scaled() divides all rates by
// a common unit (usually omega_b) for well-conditioned numerics; temperatures
// and thermal occupations must be computed from the unscaled SI values.

#include <cmath>
#include <numbers>
#include <string>

#include "cmm/error.hpp"

namespace cmm {

namespace constants {
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double hbar = 1.054571817e-34;       // J s
inline constexpr double k_boltzmann = 1.380649e-23;   // J / K
inline constexpr double speed_of_light = 299792458.0; // m / s
}  // namespace constants

/// Converts an ordinary frequency in Hz to rad/s.
constexpr double from_hz(double hz) { return constants::two_pi * hz; }
constexpr double to_hz(double rad_per_s) { return rad_per_s / constants::two_pi; }

namespace detail {
inline void require_finite(double value, const char* name) {
    if (!std::isfinite(value)) throw Error(ErrorCode::InvalidArgument, std::string(name) + " must be finite");
}
inline void require_positive(double value, const char* name) {
    require_finite(value, name);
    if (!(value > 0.0)) throw Error(ErrorCode::InvalidArgument, std::string(name) + " must be > 0");
}
inline void require_nonnegative(double value, const char* name) {
    require_finite(value, name);
    if (!(value >= 0.0)) throw Error(ErrorCode::InvalidArgument, std::string(name) + " must be >= 0");
}
}  // namespace detail

struct SystemParams {
    double omega_a = 0.0;
    double omega_b = 0.0;
    double omega_m = 0.0;
    double omega_d = 0.0;
    double kappa_a = 0.0;
    double kappa_b = 0.0;
    double kappa_m = 0.0;
    double g_ma = 0.0;
    double g_mb = 0.0;
    double K0 = 0.0;
    double delta_F = 0.0;
    double epsilon_d = 0.0;
    double temperature = 0.0;

    double delta_a() const { return omega_a - omega_d; }
    double delta_m() const { return omega_m - omega_d; }
    /// Cavity detuning including the Sagnac shift, Delta_a - Delta_F.
    double delta_a_shifted() const { return delta_a() - delta_F; }

    void validate() const {
        using namespace detail;
        require_positive(omega_a, "omega_a");
        require_positive(omega_b, "omega_b");
        require_positive(omega_m, "omega_m");
        require_positive(omega_d, "omega_d");
        require_positive(kappa_a, "kappa_a");
        require_positive(kappa_b, "kappa_b");
        require_positive(kappa_m, "kappa_m");
        require_finite(g_ma, "g_ma");
        require_finite(g_mb, "g_mb");
        require_finite(K0, "K0");
        require_finite(delta_F, "delta_F");
        require_nonnegative(epsilon_d, "epsilon_d");
        require_nonnegative(temperature, "temperature");
        require_finite(delta_a(), "delta_a");
        require_finite(delta_m(), "delta_m");
    }

    /// All rates divided by `unit`; temperature is left untouched.
    SystemParams scaled(double unit) const {
        detail::require_positive(unit, "unit");
        SystemParams s = *this;
        for (double* f : {&s.omega_a, &s.omega_b, &s.omega_m, &s.omega_d, &s.kappa_a, &s.kappa_b,
                          &s.kappa_m, &s.g_ma, &s.g_mb, &s.K0, &s.delta_F, &s.epsilon_d}) {
            *f /= unit;
        }
        return s;
    }

    /// Builds a parameter set from detunings. The drive sits at omega_a - delta_a and the
    /// Kittel mode at omega_d + delta_m.
    static SystemParams from_detunings(double omega_a, double delta_a, double delta_m, double omega_b) {
        SystemParams p;
        p.omega_a = omega_a;
        p.omega_d = omega_a - delta_a;
        p.omega_m = p.omega_d + delta_m;
        p.omega_b = omega_b;
        return p;
    }

    /// Updates omega_d and omega_m so that the detunings take the given values with omega_a fixed.
    void set_detunings(double delta_a, double delta_m) {
        omega_d = omega_a - delta_a;
        omega_m = omega_d + delta_m;
    }
};

enum class DriveDirection { Clockwise, Counterclockwise };

struct SpinningCavitySpec {
    double angular_velocity = 0.0;  // rad/s, signed by spin direction
    double refractive_index = 1.0;
    double radius = 0.0;            // m
    double wavelength = 0.0;        // m
    double dispersion = 0.0;        // dn/dlambda, 1/m
    DriveDirection drive_direction = DriveDirection::Clockwise;

    void validate() const {
        using namespace detail;
        require_finite(angular_velocity, "angular_velocity");
        require_positive(refractive_index, "refractive_index");
        require_positive(radius, "radius");
        require_positive(wavelength, "wavelength");
        require_finite(dispersion, "dispersion");
    }
};

struct ThermalOccupations {
    double n_a = 0.0;
    double n_m = 0.0;
    double n_b = 0.0;

    void validate() const {
        detail::require_nonnegative(n_a, "n_a");
        detail::require_nonnegative(n_m, "n_m");
        detail::require_nonnegative(n_b, "n_b");
    }

    bool operator==(const ThermalOccupations&) const = default;
};

/// Sagnac-Fizeau shift of the cavity resonance. Positive for a clockwise drive when the
/// resonator spins clockwise (positive angular_velocity).
inline double sagnac_shift(const SpinningCavitySpec& spec, double omega_a) {
    spec.validate();
    detail::require_finite(omega_a, "omega_a");
    const double n = spec.refractive_index;
    const double sign = spec.drive_direction == DriveDirection::Clockwise ? 1.0 : -1.0;
    const double index_factor = 1.0 - 1.0 / (n * n) - (spec.wavelength / n) * spec.dispersion;
    return sign * spec.angular_velocity * (n * spec.radius * omega_a / constants::speed_of_light) * index_factor;
}

/// Bose-Einstein occupation 1 / (exp(hbar omega / k_B T) - 1); zero at T = 0.
inline double thermal_occupation(double omega, double temperature) {
    detail::require_positive(omega, "omega");
    detail::require_nonnegative(temperature, "temperature");
    if (temperature == 0.0) return 0.0;
    const double x = constants::hbar * omega / (constants::k_boltzmann * temperature);
    return 1.0 / std::expm1(x);
}

inline ThermalOccupations thermal_occupations(double omega_a, double omega_m, double omega_b, double temperature) {
    return {thermal_occupation(omega_a, temperature), thermal_occupation(omega_m, temperature),
            thermal_occupation(omega_b, temperature)};
}

inline ThermalOccupations thermal_occupations(const SystemParams& p) {
    return thermal_occupations(p.omega_a, p.omega_m, p.omega_b, p.temperature);
}

/// Drive Rabi frequency sqrt(2 kappa_a P / (hbar omega_d)) in rad/s for input power P in W.
inline double drive_amplitude_from_power(double power, double kappa_a, double omega_d) {
    detail::require_nonnegative(power, "power");
    detail::require_positive(kappa_a, "kappa_a");
    detail::require_positive(omega_d, "omega_d");
    return std::sqrt(2.0 * kappa_a * power / (constants::hbar * omega_d));
}

/// eta_b = g_mb^2 / (kappa_b^2 + omega_b^2).
inline double mechanical_factor(const SystemParams& p) {
    return p.g_mb * p.g_mb / (p.kappa_b * p.kappa_b + p.omega_b * p.omega_b);
}

namespace presets {

inline constexpr double default_mode_frequency = from_hz(10e9);
inline constexpr double mechanical_frequency = from_hz(10e6);

/// Parameter set shared by the bistability and entanglement figures:
/// omega_b/2pi = 10 MHz, kappa_a = kappa_m = 0.1 omega_b, kappa_b/2pi = 100 Hz,
/// g_ma = 0.2 omega_b, g_mb = 1e-3 omega_b, |delta_F| = 0.2 omega_b,
/// delta_a = -omega_b, delta_m = omega_b. K0 defaults to eta_b omega_b (linear regime).
inline SystemParams baseline(DriveDirection direction = DriveDirection::Clockwise) {
    const double wb = mechanical_frequency;
    SystemParams p = SystemParams::from_detunings(default_mode_frequency, -wb, wb, wb);
    p.kappa_a = 0.1 * wb;
    p.kappa_m = 0.1 * wb;
    p.kappa_b = from_hz(100.0);
    p.g_ma = 0.2 * wb;
    p.g_mb = 1e-3 * wb;
    p.delta_F = (direction == DriveDirection::Clockwise ? 0.2 : -0.2) * wb;
    p.K0 = mechanical_factor(p) * wb;
    p.temperature = 0.01;
    return p;
}

/// Baseline with K0 = ratio * eta_b * omega_b (ratio 1: linear response, 0.1: bistable).
inline SystemParams with_kerr_ratio(double ratio, DriveDirection direction = DriveDirection::Clockwise) {
    SystemParams p = baseline(direction);
    p.K0 = ratio * mechanical_factor(p) * p.omega_b;
    return p;
}

}  // namespace presets

}  // namespace cmm
