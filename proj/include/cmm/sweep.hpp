#pragma once

// Parameter grids and the per-figure pipelines.
//
// A sweep evaluates one or two axes for each of several variants (fixed overrides such
// as the signs of Delta_K and Delta_F). Effective-parameter sweeps are in units of
// omega_b; thermal occupations come from the bath temperature and the SI mode
// frequencies. Results serialize to CSV (`<axis>,...,<variant>:<quantity>`) plus a JSON
// sidecar with the full parameter echo.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "cmm/entanglement.hpp"
#include "cmm/error.hpp"
#include "cmm/linearized.hpp"
#include "cmm/model.hpp"
#include "cmm/steady_state.hpp"
#include "json.hpp"

#ifndef CMM_VERSION
#define CMM_VERSION "0.0.0"
#endif

namespace cmm {

using json = nlohmann::ordered_json;

inline constexpr const char* version = CMM_VERSION;

inline const char* convention_notes() {
    return "quadratures X=(d+d^dag)/sqrt2, Y=i(d^dag-d)/sqrt2; covariance V_ij=<u_i u_j+u_j u_i>/2 (vacuum I/2); "
           "log-negativity uses the natural log; rates in units of omega_b unless suffixed _hz";
}

enum class Scale { Linear, Log };

struct Axis {
    std::string field;
    double min = 0.0;
    double max = 1.0;
    std::size_t count = 2;
    Scale scale = Scale::Linear;

    std::vector<double> values() const {
        std::vector<double> v(count);
        for (std::size_t k = 0; k < count; ++k) {
            const double t = static_cast<double>(k) / static_cast<double>(count - 1);
            v[k] = scale == Scale::Linear ? min + (max - min) * t
                                          : std::exp(std::log(min) + (std::log(max) - std::log(min)) * t);
        }
        if (count > 1) v.back() = max;
        return v;
    }
};

struct Variant {
    std::string label;
    std::vector<std::pair<std::string, double>> overrides;
};

/// SI frequencies used for thermal occupations; the sweep itself runs in omega_b units.
struct Bath {
    double temperature = 0.01;  // K
    double omega_a = presets::default_mode_frequency;
    double omega_m = presets::default_mode_frequency;
    double omega_b = presets::mechanical_frequency;

    ThermalOccupations occupations(double omega_b_units = 1.0) const {
        return thermal_occupations(omega_a, omega_m, omega_b * omega_b_units, temperature);
    }
};

enum class SweepKind { Entanglement, DeltaE, Hysteresis };

inline const char* to_string(SweepKind k) {
    switch (k) {
        case SweepKind::Entanglement: return "entanglement";
        case SweepKind::DeltaE: return "delta_e";
        case SweepKind::Hysteresis: return "hysteresis";
    }
    return "?";
}

struct SweepSpec {
    std::string id = "sweep";
    std::string description;
    SweepKind kind = SweepKind::Entanglement;
    EffectiveParams base;  // Entanglement and DeltaE
    Bath bath;
    SystemParams system;  // Hysteresis, omega_b = 1 units
    std::vector<Axis> axes;
    std::vector<Variant> variants;
    Bipartition pair{Mode::Cavity, Mode::Mechanical};
    bool self_consistent = false;
    double g_mb = 1e-3;  // bare magnomechanical coupling, for drive and validity bookkeeping

    void validate() const;
};

struct Series {
    std::string variant;  // empty for columns that belong to the grid itself
    std::string quantity;
    std::vector<double> values;

    std::string name() const { return variant.empty() ? quantity : variant + ":" + quantity; }
};

struct SweepResult {
    std::string id;
    std::vector<std::string> axis_names;
    std::vector<std::vector<double>> axis_values;
    std::vector<Series> series;
    json metadata;

    std::size_t cells() const {
        std::size_t n = 1;
        for (const auto& a : axis_values) n *= a.size();
        return n;
    }

    const Series& find(const std::string& variant, const std::string& quantity) const {
        for (const auto& s : series)
            if (s.variant == variant && s.quantity == quantity) return s;
        throw Error(ErrorCode::InvalidArgument, "no series " + variant + ":" + quantity + " in " + id);
    }

    /// Axis coordinates of a flat cell index; the first axis varies slowest.
    std::vector<double> coordinates(std::size_t cell) const {
        std::vector<double> c(axis_values.size());
        for (std::size_t k = axis_values.size(); k-- > 0;) {
            c[k] = axis_values[k][cell % axis_values[k].size()];
            cell /= axis_values[k].size();
        }
        return c;
    }

    /// Cell with the largest value of a series; ties resolve to the first cell.
    std::size_t argmax(const std::string& variant, const std::string& quantity = "E_N") const {
        const auto& v = find(variant, quantity).values;
        return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
    }
};

namespace detail {

struct GridPoint {
    EffectiveParams eff;
    double temperature = 0.0;
};

inline void set_effective_field(GridPoint& pt, const std::string& name, double v) {
    EffectiveParams& e = pt.eff;
    if (name == "delta_a") e.delta_a = v;
    else if (name == "delta_F") e.delta_F = v;
    else if (name == "delta_m_tilde") e.delta_m_tilde = v;
    else if (name == "delta_K") e.delta_K = v;
    else if (name == "g_ma") e.g_ma = v;
    else if (name == "G_mb") e.G_mb = v;
    else if (name == "omega_b") e.omega_b = v;
    else if (name == "kappa_a") e.kappa_a = v;
    else if (name == "kappa_b") e.kappa_b = v;
    else if (name == "kappa_m") e.kappa_m = v;
    else if (name == "temperature") pt.temperature = v;
    else if (name == "G_mb_over_g_ma") e.G_mb = v * e.g_ma;
    else if (name == "kappa_m_over_kappa_a") e.kappa_m = v * e.kappa_a;
    else throw Error(ErrorCode::InvalidArgument, "unknown sweep field '" + name + "'");
}

inline void set_system_field(SystemParams& p, const std::string& name, double v) {
    if (name == "epsilon_d") p.epsilon_d = v;
    else if (name == "delta_F") p.delta_F = v;
    else if (name == "K0") p.K0 = v;
    else if (name == "K0_eta_b_ratio") p.K0 = v * mechanical_factor(p) * p.omega_b;
    else if (name == "kappa_a") p.kappa_a = v;
    else if (name == "kappa_b") p.kappa_b = v;
    else if (name == "kappa_m") p.kappa_m = v;
    else if (name == "g_ma") p.g_ma = v;
    else if (name == "g_mb") p.g_mb = v;
    else if (name == "delta_a") p.set_detunings(v, p.delta_m());
    else if (name == "delta_m") p.set_detunings(p.delta_a(), v);
    else throw Error(ErrorCode::InvalidArgument, "unknown hysteresis field '" + name + "'");
}

inline bool is_effective_field(const std::string& name) {
    try {
        GridPoint pt;
        set_effective_field(pt, name, 0.0);
        return true;
    } catch (const Error&) {
        return false;
    }
}

inline std::string format_double(double v) {
    if (v == 0.0) return "0";  // also folds -0
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string timestamp_utc() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Runs body(i) for i in [0, n) on `jobs` threads. Each index is claimed once, so any
/// body that writes only its own slot gives results independent of scheduling.
template <class F>
void parallel_for(std::size_t n, unsigned jobs, F&& body) {
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (unsigned t = 0; t < jobs; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace detail

inline void SweepSpec::validate() const {
    detail::require(!axes.empty() && axes.size() <= 2, "a sweep needs one or two axes");
    detail::require(!variants.empty(), "a sweep needs at least one variant");
    for (const auto& a : axes) {
        detail::require(std::isfinite(a.min) && std::isfinite(a.max), "axis '" + a.field + "' bounds must be finite");
        detail::require(a.count >= 2, "axis '" + a.field + "' needs at least two points");
        if (a.scale == Scale::Log) detail::require(a.min > 0.0 && a.max > 0.0, "log axis '" + a.field + "' must be positive");
    }
    if (kind == SweepKind::Hysteresis) {
        detail::require(axes.size() == 1 && axes[0].field == "epsilon_d", "hysteresis sweeps run over epsilon_d only");
        detail::require(axes[0].min >= 0.0 && axes[0].max > axes[0].min, "epsilon_d axis must be ascending and non-negative");
        SystemParams probe = system;
        for (const auto& v : variants)
            for (const auto& [name, value] : v.overrides) detail::set_system_field(probe, name, value);
        probe.validate();
        return;
    }
    for (const auto& a : axes) {
        detail::require(detail::is_effective_field(a.field), "unknown sweep field '" + a.field + "'");
    }
    for (const auto& v : variants) {
        for (const auto& o : v.overrides) {
            detail::require(detail::is_effective_field(o.first), "unknown variant field '" + o.first + "'");
        }
    }
    detail::require(std::abs(g_mb) > 0.0 || !self_consistent, "self-consistent mode needs g_mb");
    if (kind == SweepKind::DeltaE) detail::require(pair.first != pair.second, "bipartition modes must differ");
    base.validate();
}

/// Maps an effective operating point back to a drive-level configuration (bare magnon
/// frequency, Kerr coefficient and drive chosen to reproduce it), solves the steady
/// state and linearizes around the root closest to the intended magnon number.
inline std::pair<EffectiveParams, SteadyState> self_consistent_effective(const EffectiveParams& e, double g_mb) {
    const double m = e.G_mb / std::abs(g_mb);
    SystemParams p = SystemParams::from_detunings(1000.0 * std::abs(e.omega_b), e.delta_a, 0.0, e.omega_b);
    p.kappa_a = e.kappa_a;
    p.kappa_m = e.kappa_m;
    p.kappa_b = e.kappa_b;
    p.g_ma = e.g_ma;
    p.g_mb = std::abs(g_mb);
    p.delta_F = e.delta_F;
    p.K0 = m > 0.0 ? e.delta_K / (2.0 * m * m) : 0.0;
    p.epsilon_d = m > 0.0 ? drive_for_effective(e, g_mb) : 0.0;
    p.omega_m = p.omega_d + e.delta_m_tilde + 2.0 * mechanical_factor(p) * p.omega_b * m * m;
    const auto states = steady_states(p);
    const auto best = std::min_element(states.begin(), states.end(), [&](const SteadyState& l, const SteadyState& r) {
        return std::abs(l.magnon_number - m * m) < std::abs(r.magnon_number - m * m);
    });
    return {EffectiveParams::from_steady_state(p, *best, e.occupations), *best};
}

namespace detail {

inline double branch_code(Branch b) { return static_cast<double>(static_cast<int>(b)); }

inline SweepResult run_hysteresis(const SweepSpec& spec) {
    SweepResult r;
    r.id = spec.id;
    r.axis_names = {"epsilon_d"};
    r.axis_values = {spec.axes[0].values()};
    const auto& grid = r.axis_values[0];
    const double reference = presets::drive_reference() / presets::mechanical_frequency;
    std::vector<double> normalized(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) normalized[k] = grid[k] / reference;
    r.series.push_back({"", "epsilon_d_normalized", normalized});

    json variants = json::array();
    for (const auto& v : spec.variants) {
        SystemParams p = spec.system;
        for (const auto& [name, value] : v.overrides) set_system_field(p, name, value);
        const auto trace = hysteresis_sweep(p, grid);
        std::vector<double> bu(grid.size()), bd(grid.size()), su(grid.size()), sd(grid.size());
        for (std::size_t k = 0; k < grid.size(); ++k) {
            bu[k] = branch_code(trace.branch_up[k]);
            bd[k] = branch_code(trace.branch_down[k]);
            auto stable_at = [&](double M, Branch b) {
                SystemParams q = p;
                q.epsilon_d = grid[k];
                const auto eff = EffectiveParams::from_steady_state(q, mean_fields(q, M, b), {});
                return is_stable(build_drift(eff)).stable ? 1.0 : 0.0;
            };
            su[k] = stable_at(trace.M_up[k], trace.branch_up[k]);
            sd[k] = stable_at(trace.M_down[k], trace.branch_down[k]);
        }
        r.series.push_back({v.label, "M_up", trace.M_up});
        r.series.push_back({v.label, "M_down", trace.M_down});
        r.series.push_back({v.label, "branch_up", bu});
        r.series.push_back({v.label, "branch_down", bd});
        r.series.push_back({v.label, "stable_up", su});
        r.series.push_back({v.label, "stable_down", sd});

        const auto coeffs = reduced_coefficients(p);
        const auto rep = bistability(coeffs);
        json jv{{"label", v.label}, {"overrides", json::object()}};
        for (const auto& [name, value] : v.overrides) jv["overrides"][name] = value;
        jv["eta_a"] = coeffs.eta_a;
        jv["kappa_m_prime"] = coeffs.kappa_m_prime;
        jv["delta_m_prime"] = coeffs.delta_m_prime;
        jv["k0_prime"] = coeffs.k0_prime;
        jv["slope"] = coeffs.eta_a / (coeffs.kappa_m_prime * coeffs.kappa_m_prime + coeffs.delta_m_prime * coeffs.delta_m_prime);
        jv["turning_drives"] = rep.turning_drives;
        jv["epsilon_d_critical"] = rep.epsilon_d_critical ? json(*rep.epsilon_d_critical) : json(nullptr);
        variants.push_back(jv);
    }
    r.metadata["variants"] = variants;
    r.metadata["branch_codes"] = {{"lower", 0}, {"middle", 1}, {"upper", 2}, {"unique", 3}};
    r.metadata["epsilon_d_reference"] = reference;
    return r;
}

inline GridPoint point_at(const SweepSpec& spec, const Variant& v, const std::vector<double>& coords) {
    GridPoint pt{spec.base, spec.bath.temperature};
    for (const auto& [name, value] : v.overrides) set_effective_field(pt, name, value);
    for (std::size_t k = 0; k < spec.axes.size(); ++k) set_effective_field(pt, spec.axes[k].field, coords[k]);
    Bath bath = spec.bath;
    bath.temperature = pt.temperature;
    pt.eff.occupations = bath.occupations(std::abs(pt.eff.omega_b));
    return pt;
}

struct CellValue {
    double value = 0.0;
    double status = 0.0;  // 1 stable, 0 unstable, -1 evaluation error
};

inline CellValue evaluate_entanglement(const SweepSpec& spec, EffectiveParams e) {
    try {
        if (spec.self_consistent && e.G_mb > 0.0) e = self_consistent_effective(e, spec.g_mb).first;
        const auto s = solve_entanglement(e, spec.pair);
        return {s.stability.stable ? s.negativity.E_N : 0.0, s.stability.stable ? 1.0 : 0.0};
    } catch (const Error&) {
        return {0.0, -1.0};
    }
}

inline CellValue evaluate_delta_e(const SweepSpec& spec, const EffectiveParams& e) {
    EffectiveParams plus = e, minus = e;
    plus.delta_K = std::abs(e.delta_K);
    minus.delta_K = -std::abs(e.delta_K);
    const CellValue p = evaluate_entanglement(spec, plus);
    const CellValue m = evaluate_entanglement(spec, minus);
    if (p.status < 0.0 || m.status < 0.0) return {0.0, -1.0};
    const bool both = p.status > 0.0 && m.status > 0.0;
    double d = 0.0;
    if (both && !spec.self_consistent) {
        d = delta_e_ab(plus, minus, spec.pair);
    } else if (both) {
        d = std::abs(p.value - m.value);
    }
    return {d, both ? 1.0 : 0.0};
}

}  // namespace detail

inline SweepResult run_sweep(const SweepSpec& spec, unsigned jobs = 1) {
    spec.validate();
    SweepResult r;
    if (spec.kind == SweepKind::Hysteresis) {
        r = detail::run_hysteresis(spec);
    } else {
        r.id = spec.id;
        for (const auto& a : spec.axes) {
            r.axis_names.push_back(a.field);
            r.axis_values.push_back(a.values());
        }
        const std::size_t cells = r.cells();
        const std::size_t nv = spec.variants.size();
        std::vector<detail::CellValue> out(cells * nv);
        detail::parallel_for(cells * nv, jobs, [&](std::size_t idx) {
            const std::size_t variant = idx / cells;
            const std::size_t cell = idx % cells;
            const auto pt = detail::point_at(spec, spec.variants[variant], r.coordinates(cell));
            out[idx] = spec.kind == SweepKind::DeltaE ? detail::evaluate_delta_e(spec, pt.eff)
                                                      : detail::evaluate_entanglement(spec, pt.eff);
        });
        const char* quantity = spec.kind == SweepKind::DeltaE ? "delta_E" : "E_N";
        json variants = json::array();
        double margin_min = INFINITY, margin_max = 0.0, drive_min = INFINITY, drive_max = 0.0;
        for (std::size_t v = 0; v < nv; ++v) {
            Series val{spec.variants[v].label, quantity, std::vector<double>(cells)};
            Series st{spec.variants[v].label, "stable", std::vector<double>(cells)};
            for (std::size_t c = 0; c < cells; ++c) {
                val.values[c] = out[v * cells + c].value;
                st.values[c] = out[v * cells + c].status;
                const auto pt = detail::point_at(spec, spec.variants[v], r.coordinates(c));
                if (pt.eff.G_mb > 0.0 && pt.eff.g_ma != 0.0) {
                    const double margin = effective_validity(pt.eff, spec.g_mb);
                    const double drive = drive_for_effective(pt.eff, spec.g_mb);
                    margin_min = std::min(margin_min, margin);
                    margin_max = std::max(margin_max, margin);
                    drive_min = std::min(drive_min, drive);
                    drive_max = std::max(drive_max, drive);
                }
            }
            r.series.push_back(std::move(val));
            r.series.push_back(std::move(st));
            json jv{{"label", spec.variants[v].label}, {"overrides", json::object()}};
            for (const auto& [name, value] : spec.variants[v].overrides) jv["overrides"][name] = value;
            variants.push_back(jv);
        }
        r.metadata["variants"] = variants;
        if (drive_max > 0.0) {
            r.metadata["linearization"] = {{"g_mb", spec.g_mb},
                                           {"validity_margin_min", margin_min},
                                           {"validity_margin_max", margin_max},
                                           {"epsilon_d_min", drive_min},
                                           {"epsilon_d_max", drive_max}};
        }
    }

    json meta;
    meta["id"] = spec.id;
    meta["description"] = spec.description;
    meta["kind"] = to_string(spec.kind);
    meta["mode"] = spec.self_consistent ? "self-consistent" : "effective";
    meta["units"] = "omega_b";
    json axes = json::array();
    for (const auto& a : spec.axes) {
        axes.push_back({{"field", a.field},
                        {"min", a.min},
                        {"max", a.max},
                        {"count", a.count},
                        {"scale", a.scale == Scale::Linear ? "linear" : "log"}});
    }
    meta["axes"] = axes;
    if (spec.kind == SweepKind::Hysteresis) {
        const auto& p = spec.system;
        meta["system"] = {{"delta_a", p.delta_a()}, {"delta_m", p.delta_m()}, {"omega_b", p.omega_b},
                          {"kappa_a", p.kappa_a},   {"kappa_b", p.kappa_b},   {"kappa_m", p.kappa_m},
                          {"g_ma", p.g_ma},         {"g_mb", p.g_mb},         {"K0", p.K0},
                          {"delta_F", p.delta_F}};
    } else {
        const auto& e = spec.base;
        meta["base"] = {{"delta_a", e.delta_a},   {"delta_F", e.delta_F}, {"delta_m_tilde", e.delta_m_tilde},
                        {"delta_K", e.delta_K},   {"g_ma", e.g_ma},       {"G_mb", e.G_mb},
                        {"omega_b", e.omega_b},   {"kappa_a", e.kappa_a}, {"kappa_b", e.kappa_b},
                        {"kappa_m", e.kappa_m}};
        meta["bath"] = {{"temperature_K", spec.bath.temperature},
                        {"omega_a_rad_s", spec.bath.omega_a},
                        {"omega_m_rad_s", spec.bath.omega_m},
                        {"omega_b_rad_s", spec.bath.omega_b}};
        meta["bipartition"] = spec.pair.label();
        meta["stable_codes"] = {{"stable", 1}, {"unstable", 0}, {"error", -1}};
    }
    for (auto& [k, v] : r.metadata.items()) meta[k] = v;
    meta["columns"] = json::array();
    for (const auto& n : r.axis_names) meta["columns"].push_back(n);
    for (const auto& s : r.series) meta["columns"].push_back(s.name());
    meta["version"] = version;
    meta["conventions"] = convention_notes();
    meta["generated_at"] = detail::timestamp_utc();
    r.metadata = std::move(meta);
    return r;
}

inline std::string to_csv(const SweepResult& r) {
    std::string out;
    for (std::size_t k = 0; k < r.axis_names.size(); ++k) out += (k ? "," : "") + r.axis_names[k];
    for (const auto& s : r.series) out += "," + s.name();
    out += "\n";
    const std::size_t cells = r.cells();
    for (std::size_t c = 0; c < cells; ++c) {
        const auto coords = r.coordinates(c);
        for (std::size_t k = 0; k < coords.size(); ++k) out += (k ? "," : "") + detail::format_double(coords[k]);
        for (const auto& s : r.series) out += "," + detail::format_double(s.values[c]);
        out += "\n";
    }
    return out;
}

/// Writes `<dir>/<id>.csv` and `<dir>/<id>.meta.json`; returns the CSV path.
inline std::filesystem::path write_result(const SweepResult& r, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const auto csv = dir / (r.id + ".csv");
    const auto meta = dir / (r.id + ".meta.json");
    std::ofstream(csv, std::ios::binary) << to_csv(r);
    std::ofstream(meta, std::ios::binary) << r.metadata.dump(2) << "\n";
    if (!std::filesystem::exists(csv) || !std::filesystem::exists(meta)) {
        throw Error(ErrorCode::ConfigError, "could not write results to " + dir.string());
    }
    return csv;
}

// ---------------------------------------------------------------------------------------
// Figure catalog

namespace figures {

/// Operating point used wherever a figure fixes the detunings: Delta_a = -omega_b,
/// Delta~_m = omega_b.
inline EffectiveParams caption_base() {
    EffectiveParams e;
    e.delta_a = -1.0;
    e.delta_m_tilde = 1.0;
    e.delta_K = 0.1;
    e.delta_F = 0.1;
    e.g_ma = 0.2;
    e.G_mb = 0.2;
    e.omega_b = 1.0;
    e.kappa_a = 0.1;
    e.kappa_m = 0.1;
    e.kappa_b = presets::baseline().kappa_b / presets::mechanical_frequency;
    return e;
}

inline std::string sign_label(double v) {
    if (v == 0.0) return "0";
    return (v > 0.0 ? "+" : "-") + detail::format_double(std::abs(v));
}

inline Variant kerr_sagnac(double dk, double df) {
    return {"dK" + sign_label(dk) + "_dF" + sign_label(df), {{"delta_K", dk}, {"delta_F", df}}};
}

inline Variant sagnac_only(double df) { return {"dF" + sign_label(df), {{"delta_F", df}}}; }

inline const std::vector<std::string>& ids() {
    static const std::vector<std::string> all = {"fig2a", "fig2b", "fig3a", "fig3b", "fig3c", "fig3d", "fig4a",
                                                 "fig4b", "fig4c", "fig5a", "fig5b", "fig5c", "fig5d", "fig6a",
                                                 "fig6b", "fig6c", "fig6d", "fig7a", "fig7b", "fig7c", "fig7d"};
    return all;
}

struct FigureOptions {
    std::optional<std::size_t> resolution;  // points per axis
    bool self_consistent = false;
};

inline SweepSpec spec(const std::string& id, const FigureOptions& opt = {}) {
    if (std::find(ids().begin(), ids().end(), id) == ids().end()) {
        throw Error(ErrorCode::InvalidArgument, "unknown figure id '" + id + "'");
    }
    const std::size_t n1 = opt.resolution.value_or(201);
    const std::size_t n2 = opt.resolution.value_or(101);
    const double F = 0.1, K = 0.1;
    SweepSpec s;
    s.id = id;
    s.base = caption_base();
    s.bath.temperature = 0.01;
    s.self_consistent = opt.self_consistent;
    s.g_mb = presets::baseline().g_mb / presets::mechanical_frequency;
    const char panel = id.back();
    const std::string fig = id.substr(0, 4);

    if (fig == "fig2") {
        const double ratio = panel == 'a' ? 1.0 : 0.1;
        s.kind = SweepKind::Hysteresis;
        s.description = "mean magnon number vs drive amplitude, up and down sweeps, K0 = " +
                        detail::format_double(ratio) + " eta_b omega_b";
        s.system = presets::with_kerr_ratio(ratio).scaled(presets::mechanical_frequency);
        s.axes = {{"epsilon_d", 0.0, 2500.0, opt.resolution.value_or(501), Scale::Linear}};
        s.variants = {{"cw", {{"delta_F", 0.2}}}, {"ccw", {{"delta_F", -0.2}}}};
        return s;
    }
    if (fig == "fig3") {
        const double dk = (panel == 'a' || panel == 'b') ? K : -K;
        const double df = (panel == 'a' || panel == 'c') ? F : -F;
        s.description = "E_ab over (delta_a, delta_m_tilde)";
        s.axes = {{"delta_a", -2.0, 0.0, n2, Scale::Linear}, {"delta_m_tilde", 0.0, 2.0, n2, Scale::Linear}};
        s.variants = {kerr_sagnac(dk, df)};
        return s;
    }
    if (id == "fig4a" || id == "fig4b") {
        const double df = panel == 'a' ? F : -F;
        s.description = "E_ab vs delta_m_tilde at delta_a = -omega_b, with and without Kerr shift";
        s.axes = {{"delta_m_tilde", 0.0, 2.0, n1, Scale::Linear}};
        s.variants = {kerr_sagnac(K, df), kerr_sagnac(0.0, df), kerr_sagnac(-K, df)};
        return s;
    }
    if (id == "fig4c") {
        s.description = "E_ab over (delta_K, delta_F) at delta_a = -omega_b, delta_m_tilde = omega_b";
        s.axes = {{"delta_K", -0.2, 0.2, n2, Scale::Linear}, {"delta_F", -0.2, 0.2, n2, Scale::Linear}};
        s.variants = {{"grid", {}}};
        return s;
    }

    // figs 5-7: panels a-c fix Delta_K = 0, > 0, < 0 and overlay the Sagnac variants;
    // panel d gives |E(+|Delta_K|) - E(-|Delta_K|)| with and without the Sagnac shift
    Axis axis;
    if (fig == "fig5") {
        axis = {"G_mb_over_g_ma", 0.0, 2.0, n1, Scale::Linear};
        s.description = "vs G_mb / g_ma";
    } else if (fig == "fig6") {
        axis = {"kappa_m_over_kappa_a", 0.05, 20.0, n1, Scale::Log};
        s.description = "vs kappa_m / kappa_a";
    } else {
        axis = {"temperature", 0.0, 5.0, n1, Scale::Linear};
        s.description = "vs bath temperature (K)";
    }
    s.axes = {axis};
    if (panel == 'd') {
        s.kind = SweepKind::DeltaE;
        s.base.delta_K = K;
        s.description = "Kerr-induced nonreciprocity delta_E " + s.description;
        s.variants = {sagnac_only(F), sagnac_only(0.0), sagnac_only(-F)};
        return s;
    }
    const double dk = panel == 'a' ? 0.0 : (panel == 'b' ? K : -K);
    s.description = "E_ab with delta_K = " + sign_label(dk) + " " + s.description;
    s.variants = {kerr_sagnac(dk, F), kerr_sagnac(dk, 0.0), kerr_sagnac(dk, -F)};
    return s;
}

inline SweepResult run(const std::string& id, const FigureOptions& opt = {}, unsigned jobs = 1) {
    return run_sweep(spec(id, opt), jobs);
}

}  // namespace figures

}  // namespace cmm
