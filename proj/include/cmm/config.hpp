#pragma once

// JSON configuration.
//
// Rates and frequencies are read in units of omega_b. Any rate key also accepts a
// `<key>_hz` form in Hz (converted with 2 pi). The unit itself is set by `omega_b_hz`
// (default 10 MHz). Unknown keys are rejected so typos do not silently fall back to
// defaults.

#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "cmm/error.hpp"
#include "cmm/linearized.hpp"
#include "cmm/model.hpp"
#include "cmm/steady_state.hpp"
#include "cmm/sweep.hpp"
#include "json.hpp"

namespace cmm::config {

namespace detail {

inline void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
    if (!j.is_object()) throw Error(ErrorCode::ConfigError, where + " must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) throw Error(ErrorCode::ConfigError, "unknown key '" + key + "' in " + where);
    }
}

inline double number(const json& j, const std::string& key) {
    if (!j.at(key).is_number()) throw Error(ErrorCode::ConfigError, "'" + key + "' must be a number");
    return j.at(key).get<double>();
}

/// Reads `key` (omega_b units) or `key_hz` (Hz) and returns rad/s. Both forms together are an error.
inline std::optional<double> rate(const json& j, const std::string& key, double unit) {
    const bool plain = j.contains(key);
    const bool hz = j.contains(key + "_hz");
    if (plain && hz) throw Error(ErrorCode::ConfigError, "give either '" + key + "' or '" + key + "_hz', not both");
    if (plain) return number(j, key) * unit;
    if (hz) return from_hz(number(j, key + "_hz"));
    return std::nullopt;
}

inline std::set<std::string> with_hz(std::initializer_list<std::string> keys) {
    std::set<std::string> out;
    for (const auto& k : keys) {
        out.insert(k);
        out.insert(k + "_hz");
    }
    return out;
}

inline double unit_of(const json& j) {
    if (j.contains("omega_b")) {
        throw Error(ErrorCode::ConfigError, "'omega_b' is the unit; set 'omega_b_hz' to change it");
    }
    const double unit = j.contains("omega_b_hz") ? from_hz(number(j, "omega_b_hz")) : presets::mechanical_frequency;
    cmm::detail::require_positive(unit, "omega_b_hz");
    return unit;
}

inline DriveDirection direction(const std::string& s) {
    if (s == "cw" || s == "clockwise") return DriveDirection::Clockwise;
    if (s == "ccw" || s == "counterclockwise") return DriveDirection::Counterclockwise;
    throw Error(ErrorCode::ConfigError, "direction must be 'cw' or 'ccw', got '" + s + "'");
}

}  // namespace detail

inline json read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
    }
}

/// Drive-level parameters in SI (rad/s). Missing keys keep the bistability-figure defaults.
///
///   omega_b_hz, omega_a_hz, delta_a, delta_m, kappa_a, kappa_b, kappa_m, g_ma, g_mb,
///   K0 | K0_eta_b_ratio, delta_F | spinning_cavity{...}, epsilon_d | drive_power_w,
///   temperature (K)
inline SystemParams system_from_json(const json& j) {
    auto known = detail::with_hz({"omega_a", "delta_a", "delta_m", "kappa_a", "kappa_b", "kappa_m", "g_ma", "g_mb",
                                  "K0", "delta_F", "epsilon_d"});
    known.insert({"omega_b_hz", "K0_eta_b_ratio", "spinning_cavity", "drive_power_w", "temperature"});
    detail::reject_unknown(j, known, "system parameters");
    const double unit = detail::unit_of(j);

    const SystemParams defaults = presets::baseline();
    const double scale = unit / defaults.omega_b;
    const double omega_a = detail::rate(j, "omega_a", unit).value_or(defaults.omega_a);
    SystemParams p = SystemParams::from_detunings(omega_a, detail::rate(j, "delta_a", unit).value_or(defaults.delta_a() * scale),
                                                  detail::rate(j, "delta_m", unit).value_or(defaults.delta_m() * scale), unit);
    p.kappa_a = detail::rate(j, "kappa_a", unit).value_or(defaults.kappa_a * scale);
    p.kappa_b = detail::rate(j, "kappa_b", unit).value_or(defaults.kappa_b);
    p.kappa_m = detail::rate(j, "kappa_m", unit).value_or(defaults.kappa_m * scale);
    p.g_ma = detail::rate(j, "g_ma", unit).value_or(defaults.g_ma * scale);
    p.g_mb = detail::rate(j, "g_mb", unit).value_or(defaults.g_mb * scale);
    p.temperature = j.contains("temperature") ? detail::number(j, "temperature") : defaults.temperature;

    const auto k0 = detail::rate(j, "K0", unit);
    if (k0 && j.contains("K0_eta_b_ratio")) throw Error(ErrorCode::ConfigError, "give either 'K0' or 'K0_eta_b_ratio'");
    p.K0 = k0.value_or(
        (j.contains("K0_eta_b_ratio") ? detail::number(j, "K0_eta_b_ratio") : 1.0) * mechanical_factor(p) * p.omega_b);

    const auto df = detail::rate(j, "delta_F", unit);
    if (df && j.contains("spinning_cavity")) throw Error(ErrorCode::ConfigError, "give either 'delta_F' or 'spinning_cavity'");
    if (j.contains("spinning_cavity")) {
        const json& s = j.at("spinning_cavity");
        detail::reject_unknown(s, {"angular_velocity_hz", "refractive_index", "radius_m", "wavelength_m", "dispersion_per_m", "direction"},
                               "spinning_cavity");
        SpinningCavitySpec spec;
        spec.angular_velocity = from_hz(detail::number(s, "angular_velocity_hz"));
        spec.refractive_index = s.contains("refractive_index") ? detail::number(s, "refractive_index") : 1.48;
        spec.radius = detail::number(s, "radius_m");
        spec.wavelength = s.contains("wavelength_m") ? detail::number(s, "wavelength_m")
                                                     : constants::speed_of_light / to_hz(p.omega_a);
        spec.dispersion = s.contains("dispersion_per_m") ? detail::number(s, "dispersion_per_m") : 0.0;
        spec.drive_direction = detail::direction(s.value("direction", std::string("cw")));
        p.delta_F = sagnac_shift(spec, p.omega_a);
    } else {
        p.delta_F = df.value_or(defaults.delta_F * scale);
    }

    const auto eps = detail::rate(j, "epsilon_d", unit);
    if (eps && j.contains("drive_power_w")) throw Error(ErrorCode::ConfigError, "give either 'epsilon_d' or 'drive_power_w'");
    if (j.contains("drive_power_w")) {
        p.epsilon_d = drive_amplitude_from_power(detail::number(j, "drive_power_w"), p.kappa_a, p.omega_d);
    } else {
        p.epsilon_d = eps.value_or(0.0);
    }
    try {
        p.validate();
    } catch (const Error& e) {
        throw Error(ErrorCode::ConfigError, e.what());
    }
    return p;
}

/// Effective parameters in omega_b units and the bath they sit in.
///
///   delta_a, delta_F, delta_m_tilde, delta_K, g_ma, G_mb, kappa_a, kappa_b, kappa_m,
///   temperature (K), omega_a_hz, omega_m_hz, omega_b_hz
inline std::pair<EffectiveParams, Bath> effective_from_json(const json& j) {
    auto known = detail::with_hz({"delta_a", "delta_F", "delta_m_tilde", "delta_K", "g_ma", "G_mb", "kappa_a",
                                  "kappa_b", "kappa_m", "omega_a", "omega_m"});
    known.insert({"temperature", "omega_b_hz"});
    detail::reject_unknown(j, known, "effective parameters");
    const double unit = detail::unit_of(j);
    EffectiveParams e = figures::caption_base();
    Bath bath;
    bath.omega_b = unit;
    e.kappa_b = presets::baseline().kappa_b / unit;
    auto set = [&](const char* key, double& field) {
        if (auto v = detail::rate(j, key, unit)) field = *v / unit;
    };
    set("delta_a", e.delta_a);
    set("delta_F", e.delta_F);
    set("delta_m_tilde", e.delta_m_tilde);
    set("delta_K", e.delta_K);
    set("g_ma", e.g_ma);
    set("G_mb", e.G_mb);
    set("kappa_a", e.kappa_a);
    set("kappa_b", e.kappa_b);
    set("kappa_m", e.kappa_m);
    if (auto v = detail::rate(j, "omega_a", unit)) bath.omega_a = *v;
    if (auto v = detail::rate(j, "omega_m", unit)) bath.omega_m = *v;
    if (j.contains("temperature")) bath.temperature = detail::number(j, "temperature");
    try {
        cmm::detail::require_nonnegative(bath.temperature, "temperature");
        e.occupations = bath.occupations(std::abs(e.omega_b));
        e.validate();
    } catch (const Error& err) {
        throw Error(ErrorCode::ConfigError, err.what());
    }
    return {e, bath};
}

inline Axis axis_from_json(const json& j) {
    detail::reject_unknown(j, {"field", "min", "max", "count", "scale"}, "axis");
    Axis a;
    a.field = j.at("field").get<std::string>();
    a.min = detail::number(j, "min");
    a.max = detail::number(j, "max");
    a.count = j.at("count").get<std::size_t>();
    const std::string scale = j.value("scale", std::string("linear"));
    if (scale == "log") a.scale = Scale::Log;
    else if (scale != "linear") throw Error(ErrorCode::ConfigError, "axis scale must be 'linear' or 'log'");
    return a;
}

/// Arbitrary grid:
///   {"id", "kind": entanglement|delta_e|hysteresis, "base": {...effective...},
///    "system": {...drive-level...}, "axes": [...], "variants": [{"label", "overrides"}],
///    "pair": "ab", "self_consistent": false, "g_mb": 1e-3}
inline SweepSpec sweep_from_json(const json& j) {
    detail::reject_unknown(j, {"id", "description", "kind", "base", "system", "axes", "variants", "pair",
                               "self_consistent", "g_mb"},
                           "sweep spec");
    SweepSpec s;
    try {
        s.id = j.value("id", std::string("sweep"));
        s.description = j.value("description", std::string());
        const std::string kind = j.value("kind", std::string("entanglement"));
        if (kind == "entanglement") s.kind = SweepKind::Entanglement;
        else if (kind == "delta_e") s.kind = SweepKind::DeltaE;
        else if (kind == "hysteresis") s.kind = SweepKind::Hysteresis;
        else throw Error(ErrorCode::ConfigError, "unknown sweep kind '" + kind + "'");

        if (s.kind == SweepKind::Hysteresis) {
            const SystemParams p = system_from_json(j.value("system", json::object()));
            s.system = p.scaled(p.omega_b);
        } else {
            std::tie(s.base, s.bath) = effective_from_json(j.value("base", json::object()));
        }
        if (!j.contains("axes") || !j.at("axes").is_array()) throw Error(ErrorCode::ConfigError, "'axes' must be an array");
        for (const auto& a : j.at("axes")) s.axes.push_back(axis_from_json(a));
        if (j.contains("variants")) {
            for (const auto& v : j.at("variants")) {
                detail::reject_unknown(v, {"label", "overrides"}, "variant");
                Variant var;
                var.label = v.at("label").get<std::string>();
                const json overrides = v.value("overrides", json::object());
                for (const auto& [k, val] : overrides.items()) var.overrides.emplace_back(k, val.get<double>());
                s.variants.push_back(var);
            }
        } else {
            s.variants = {{"base", {}}};
        }
        s.pair = Bipartition::parse(j.value("pair", std::string("ab")));
        s.self_consistent = j.value("self_consistent", false);
        if (j.contains("g_mb")) s.g_mb = detail::number(j, "g_mb");
        else s.g_mb = presets::baseline().g_mb / presets::mechanical_frequency;
        s.validate();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("sweep spec: ") + e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ConfigError) throw;
        throw Error(ErrorCode::ConfigError, std::string("sweep spec: ") + e.what());
    }
    return s;
}

}  // namespace cmm::config
