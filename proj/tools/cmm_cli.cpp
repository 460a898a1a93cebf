#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cmm/cmm.hpp"

namespace {

using namespace cmm;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::filesystem::path output_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("CMM_OUTPUT_DIR"); env && *env) return env;
    return ".";
}

json complex_json(const complex& z) { return json::array({z.real(), z.imag()}); }

json load_json(const std::string& path) { return path.empty() ? json::object() : config::read_file(path); }

// Drive-level parameters, scaled to omega_b = 1; the SI set is kept for thermal occupations.
struct SystemInput {
    SystemParams si;
    SystemParams scaled;
};

SystemInput load_system(const std::string& path) {
    json j = load_json(path);
    if (j.contains("system")) j = j.at("system");
    const SystemParams si = config::system_from_json(j);
    return {si, si.scaled(si.omega_b)};
}

Branch parse_branch(const std::string& s) {
    if (s == "lower") return Branch::Lower;
    if (s == "middle") return Branch::Middle;
    if (s == "upper") return Branch::Upper;
    throw UsageError("branch must be lower, middle or upper");
}

// Effective parameters either given directly or derived from a drive-level steady state
// (config with a "system" object; --branch picks the root when there are three).
EffectiveParams load_effective(const std::string& path, const std::string& branch) {
    const json j = load_json(path);
    if (!j.contains("system")) return config::effective_from_json(j).first;
    for (const auto& [key, value] : j.items()) {
        if (key != "system") throw Error(ErrorCode::ConfigError, "unknown key '" + key + "' next to 'system'");
    }
    const auto in = load_system(path);
    const auto states = steady_states(in.scaled);
    const SteadyState* chosen = &states.front();
    if (states.size() == 3) {
        const Branch want = branch.empty() ? Branch::Lower : parse_branch(branch);
        for (const auto& s : states)
            if (s.branch == want) chosen = &s;
    }
    return EffectiveParams::from_steady_state(in.scaled, *chosen, thermal_occupations(in.si));
}

int cmd_steady(const std::string& path) {
    const auto in = load_system(path);
    const auto& p = in.scaled;
    const auto coeffs = reduced_coefficients(p);
    json out{{"units", "omega_b"}, {"epsilon_d", p.epsilon_d}, {"roots", json::array()}};
    for (const auto& st : steady_states(p)) {
        const auto eff = EffectiveParams::from_steady_state(p, st, thermal_occupations(in.si));
        const auto stab = is_stable(build_drift(eff));
        out["roots"].push_back({{"M", st.magnon_number},
                                {"branch", to_string(st.branch)},
                                {"residual", detail::relative_residual(coeffs, st.magnon_number, p.epsilon_d)},
                                {"validity_margin", linearization_validity(p, st)},
                                {"a_s", complex_json(st.a_s)},
                                {"b_s", complex_json(st.b_s)},
                                {"m_s", complex_json(st.m_s)},
                                {"delta_K", st.delta_k},
                                {"delta_m_tilde", st.delta_m_tilde},
                                {"G_mb", eff.G_mb},
                                {"slope_stable", st.stable},
                                {"stable", stab.stable},
                                {"spectral_abscissa", stab.spectral_abscissa}});
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_bistability(const std::string& path) {
    const auto p = load_system(path).scaled;
    const auto c = reduced_coefficients(p);
    const auto rep = bistability(c);
    json out{{"units", "omega_b"},
             {"kappa_m_prime", c.kappa_m_prime},
             {"delta_m_prime", c.delta_m_prime},
             {"k0_prime", c.k0_prime},
             {"eta_a", c.eta_a},
             {"eta_b", c.eta_b},
             {"turning_points", rep.turning_points},
             {"turning_drives", rep.turning_drives},
             {"bistable", rep.bistable},
             {"epsilon_d_critical", rep.epsilon_d_critical ? json(*rep.epsilon_d_critical) : json(nullptr)}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_hysteresis(const std::string& path, double lo, double hi, std::size_t count, const std::string& out_path) {
    if (count < 2 || !(hi > lo) || lo < 0.0) throw UsageError("need 0 <= --min < --max and --count >= 2");
    const auto p = load_system(path).scaled;
    const auto grid = Axis{"epsilon_d", lo, hi, count, Scale::Linear}.values();
    const auto t = hysteresis_sweep(p, grid);
    const double ref = presets::drive_reference() / presets::mechanical_frequency;
    std::ostringstream csv;
    csv << "epsilon_d,epsilon_d_normalized,M_up,M_down,branch_up,branch_down\n";
    for (std::size_t k = 0; k < grid.size(); ++k) {
        csv << detail::format_double(grid[k]) << "," << detail::format_double(grid[k] / ref) << ","
            << detail::format_double(t.M_up[k]) << "," << detail::format_double(t.M_down[k]) << ","
            << to_string(t.branch_up[k]) << "," << to_string(t.branch_down[k]) << "\n";
    }
    if (out_path.empty() || out_path == "-") {
        std::cout << csv.str();
    } else {
        std::ofstream(out_path, std::ios::binary) << csv.str();
        std::cerr << "wrote " << out_path << "\n";
    }
    return 0;
}

FieldTriple parse_seed(const std::string& text) {
    if (text.empty()) return {};
    std::vector<double> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            v.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw UsageError("--seed expects six numbers: Re a, Im a, Re b, Im b, Re m, Im m");
        }
    }
    if (v.size() != 6) throw UsageError("--seed expects six numbers: Re a, Im a, Re b, Im b, Re m, Im m");
    return {{v[0], v[1]}, {v[2], v[3]}, {v[4], v[5]}};
}

int cmd_settle(const std::string& path, const std::string& seed, double tmax, double dt, bool two_timescale,
               const std::string& trajectory) {
    const auto in = load_system(path);
    const SystemParams& p = in.si;
    // seeds are amplitudes in the same frame as the scaled steady-state output
    const FieldTriple y0 = parse_seed(seed);
    IntegrationOptions opt;
    opt.two_timescale = two_timescale;
    const double t_max = tmax > 0.0 ? tmax : default_t_max(p, two_timescale);
    const double step = dt > 0.0 ? dt : 0.02 / p.omega_b;
    // integrate in omega_b = 1 units so amplitudes match `steady`
    const double unit = p.omega_b;
    const auto rec = integrate_meanfield(in.scaled, y0, t_max * unit, step * unit, opt);
    if (!trajectory.empty()) {
        std::ofstream out(trajectory, std::ios::binary);
        out << "t,re_a,im_a,re_b,im_b,re_m,im_m\n";
        for (std::size_t k = 0; k < rec.time.size(); ++k) {
            const auto& f = rec.fields[k];
            out << detail::format_double(rec.time[k] / unit) << "," << detail::format_double(f.a.real()) << ","
                << detail::format_double(f.a.imag()) << "," << detail::format_double(f.b.real()) << ","
                << detail::format_double(f.b.imag()) << "," << detail::format_double(f.m.real()) << ","
                << detail::format_double(f.m.imag()) << "\n";
        }
    }
    const auto& y = rec.final_state;
    const double M = std::norm(y.m);
    json out{{"units", "omega_b"},
             {"converged", rec.converged},
             {"final_residual", rec.final_residual},
             {"t_end_s", rec.time.back() / unit},
             {"M", M},
             {"a", complex_json(y.a)},
             {"b", complex_json(y.b)},
             {"m", complex_json(y.m)}};
    if (rec.converged) {
        const auto coeffs = reduced_coefficients(in.scaled);
        out["cubic_residual"] = detail::relative_residual(coeffs, M, in.scaled.epsilon_d);
        const auto roots = solve_magnon_number(coeffs, in.scaled.epsilon_d);
        const auto nearest = std::min_element(roots.begin(), roots.end(), [&](const MagnonRoot& l, const MagnonRoot& r) {
            return std::abs(l.M - M) < std::abs(r.M - M);
        });
        out["branch"] = to_string(nearest->branch);
    }
    std::cout << out.dump(2) << "\n";
    if (!rec.converged) {
        std::cerr << "error: " << to_string(ErrorCode::NonConvergence) << ": integration did not settle\n";
        return 1;
    }
    return 0;
}

json stability_json(const StabilityReport& r) {
    json eig = json::array();
    for (int k = 0; k < r.eigenvalues.size(); ++k) eig.push_back(complex_json(r.eigenvalues(k)));
    return {{"stable", r.stable}, {"spectral_abscissa", r.spectral_abscissa}, {"eigenvalues", eig}};
}

int cmd_stability(const std::string& path, const std::string& branch) {
    const auto e = load_effective(path, branch);
    const auto r = is_stable(build_drift(e));
    json out = stability_json(r);
    out["units"] = "omega_b";
    std::cout << out.dump(2) << "\n";
    return r.stable ? 0 : 1;
}

int cmd_covariance(const std::string& path, const std::string& branch, const std::string& out_path) {
    const auto e = load_effective(path, branch);
    const auto A = build_drift(e);
    const auto V = solve_lyapunov(A, build_diffusion(e));
    std::ostringstream csv;
    csv << "# order X_a,Y_a,X_m,Y_m,X_b,Y_b; V_ij = <u_i u_j + u_j u_i>/2, vacuum I/2\n";
    csv << "X_a,Y_a,X_m,Y_m,X_b,Y_b\n";
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) csv << (j ? "," : "") << detail::format_double(V.matrix(i, j));
        csv << "\n";
    }
    if (out_path.empty() || out_path == "-") {
        std::cout << csv.str();
    } else {
        std::ofstream(out_path, std::ios::binary) << csv.str();
        std::cerr << "wrote " << out_path << "\n";
    }
    return 0;
}

int cmd_entangle(const std::string& path, const std::string& branch, const std::string& pair_text) {
    const auto e = load_effective(path, branch);
    const auto pair = Bipartition::parse(pair_text);
    const auto s = solve_entanglement(e, pair);
    json out{{"pair", pair.label()},
             {"E_N", s.negativity.E_N},
             {"eta_minus", s.negativity.eta_minus},
             {"sigma", s.negativity.sigma},
             {"det_V4", s.negativity.det_V4},
             {"stability", stability_json(s.stability)}};
    std::cout << out.dump(2) << "\n";
    if (!s.stability.stable) {
        std::cerr << "error: " << to_string(ErrorCode::Unstable) << ": drift matrix is not stable\n";
        return 1;
    }
    return 0;
}

int cmd_sweep(const std::string& spec_path, const std::string& out, unsigned jobs) {
    const auto spec = config::sweep_from_json(config::read_file(spec_path));
    const auto r = run_sweep(spec, jobs);
    std::cerr << "wrote " << write_result(r, output_dir(out)).string() << "\n";
    return 0;
}

int cmd_figure(const std::vector<std::string>& ids_in, const std::string& out, std::size_t resolution,
               bool self_consistent, unsigned jobs, bool quiet) {
    std::vector<std::string> ids;
    for (const auto& id : ids_in) {
        if (id == "all") ids.insert(ids.end(), figures::ids().begin(), figures::ids().end());
        else ids.push_back(id);
    }
    figures::FigureOptions opt;
    if (resolution > 0) {
        if (resolution < 2) throw UsageError("--resolution must be at least 2");
        opt.resolution = resolution;
    }
    opt.self_consistent = self_consistent;
    const auto dir = output_dir(out);
    std::vector<SweepSpec> specs;
    for (const auto& id : ids) {
        try {
            specs.push_back(figures::spec(id, opt));
        } catch (const Error& e) {
            throw UsageError(e.what());
        }
    }
    for (std::size_t k = 0; k < specs.size(); ++k) {
        const auto path = write_result(run_sweep(specs[k], jobs), dir);
        if (!quiet) std::cerr << "[" << k + 1 << "/" << specs.size() << "] " << path.string() << "\n";
    }
    return 0;
}

struct Tally {
    int pass = 0;
    int fail = 0;

    void check(bool ok, const std::string& what, bool verbose) {
        (ok ? pass : fail)++;
        if (!ok || verbose) std::cout << (ok ? "pass  " : "FAIL  ") << what << "\n";
    }
};

int cmd_validate(std::size_t ode_cases, bool verbose) {
    Tally t;
    std::mt19937_64 rng(20240611);

    // cubic roots vs bracketing
    {
        std::uniform_real_distribution<double> u(-5.0, 5.0);
        int bad = 0;
        for (int k = 0; k < 1000; ++k) {
            const cubic::Monic f{u(rng), u(rng), u(rng)};
            const auto a = cubic::solve(f).values;
            const auto b = cubic::roots_by_bisection(f);
            if (a.size() != b.size()) {
                ++bad;
                continue;
            }
            for (std::size_t i = 0; i < a.size(); ++i)
                if (std::abs(a[i] - b[i]) > 1e-8 * std::max(1.0, std::abs(b[i]))) ++bad;
        }
        t.check(bad == 0, "cubic closed form vs bisection on 1000 random cubics", verbose);
    }

    // time integration oracle
    {
        const auto configs = validation::random_stable_configurations(ode_cases, 7);
        double worst = 0.0;
        int unconverged = 0;
        for (const auto& p : configs) {
            const auto c = validation::ode_oracle(p);
            worst = std::max(worst, c.relative_error);
            unconverged += !c.converged;
        }
        std::ostringstream msg;
        msg << "time integration vs algebraic magnon number on " << configs.size()
            << " stable configurations (worst relative error " << worst << ")";
        t.check(configs.size() == ode_cases && unconverged == 0 && worst <= 1e-6, msg.str(), verbose);
    }

    // Lyapunov residual and positivity on random effective parameters
    {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        int solved = 0, bad = 0;
        for (int k = 0; k < 500; ++k) {
            EffectiveParams e = figures::caption_base();
            e.delta_a = -2.0 * u(rng);
            e.delta_m_tilde = 2.0 * u(rng);
            e.delta_K = 0.4 * (u(rng) - 0.5);
            e.delta_F = 0.4 * (u(rng) - 0.5);
            e.G_mb = 0.4 * u(rng);
            e.kappa_m = 0.05 + 0.5 * u(rng);
            e.occupations = thermal_occupations(presets::default_mode_frequency, presets::default_mode_frequency,
                                                presets::mechanical_frequency, 0.5 * u(rng));
            const auto A = build_drift(e);
            if (!is_stable(A).stable) continue;
            ++solved;
            const Matrix6 D = build_diffusion(e);
            const auto V = solve_lyapunov(A, D);
            Eigen::SelfAdjointEigenSolver<Matrix6> es(V.matrix, Eigen::EigenvaluesOnly);
            if (lyapunov_residual(A.matrix, V.matrix, D) > 1e-10 * D.cwiseAbs().maxCoeff() ||
                es.eigenvalues().minCoeff() <= 0.0)
                ++bad;
        }
        t.check(bad == 0 && solved > 0,
                "Lyapunov residual and positivity on " + std::to_string(solved) + " stable random sets", verbose);
    }

    // log-negativity closed form vs symplectic spectrum, TMSV, product states
    {
        int bad = 0;
        for (int k = 0; k < 1000; ++k) {
            const Matrix4 V = validation::random_physical_v4(rng);
            const double closed = log_negativity(TwoModeBlock{V}).eta_minus;
            const double direct = symplectic_eta_minus(V);
            if (std::abs(closed - direct) > 1e-10 * std::max(1.0, direct)) ++bad;
        }
        t.check(bad == 0, "log-negativity closed form vs symplectic spectrum on 1000 random states", verbose);
        double worst = 0.0;
        for (int k = 0; k <= 40; ++k) {
            const double r = 0.05 * k;
            worst = std::max(worst, std::abs(log_negativity(TwoModeBlock{validation::two_mode_squeezed_vacuum(r)}).E_N - 2.0 * r));
        }
        t.check(worst <= 1e-10, "two-mode squeezed vacuum gives E_N = 2r", verbose);
        Matrix4 th = Matrix4::Zero();
        th.diagonal() << 2.5, 2.5, 0.5, 0.5;
        t.check(log_negativity(TwoModeBlock{}).E_N == 0.0 && log_negativity(TwoModeBlock{th}).E_N == 0.0,
                "vacuum and thermal product states give E_N = 0", verbose);
    }

    // mechanics decoupled
    {
        EffectiveParams e = figures::caption_base();
        e.G_mb = 0.0;
        e.occupations = Bath{}.occupations();
        t.check(entanglement_of(e, {}).E_N <= 1e-12, "G_mb = 0 leaves cavity and mechanics unentangled", verbose);
    }

    // sweep determinism
    {
        const auto s = figures::spec("fig3a", {{31}});
        const unsigned hw = std::max(2u, std::thread::hardware_concurrency());
        t.check(to_csv(run_sweep(s, 1)) == to_csv(run_sweep(s, hw)), "sweep output independent of worker count", verbose);
    }

    std::cout << t.pass << " passed, " << t.fail << " failed\n";
    return t.fail == 0 ? 0 : 1;
}

const char* config_schema =
    "config keys (rates in omega_b units; append _hz for Hz):\n"
    "  drive level: omega_a, omega_b_hz, delta_a, delta_m, kappa_a, kappa_b, kappa_m, g_ma, g_mb,\n"
    "    K0 | K0_eta_b_ratio, delta_F | spinning_cavity{angular_velocity_hz, radius_m, refractive_index,\n"
    "    wavelength_m, dispersion_per_m, direction}, epsilon_d | drive_power_w, temperature (K)\n"
    "  effective: delta_a, delta_F, delta_m_tilde, delta_K, g_ma, G_mb, kappa_a, kappa_b, kappa_m,\n"
    "    temperature (K), omega_a_hz, omega_m_hz, omega_b_hz; or {\"system\": {drive level}}\n"
    "  sweep: id, description, kind (entanglement|delta_e|hysteresis), base, system,\n"
    "    axes[{field, min, max, count, scale}], variants[{label, overrides}], pair, self_consistent, g_mb\n";

std::string version_text() {
    return std::string("cmm ") + version + "\n" + convention_notes();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Steady states, fluctuations and entanglement of a driven cavity-magnon-phonon system"};
    app.set_version_flag("--version", version_text());
    app.require_subcommand(1);
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    app.add_option("--jobs,-j", jobs, "worker threads for sweeps")->check(CLI::PositiveNumber);

    std::string config_path, branch, out, pair = "ab", seed, trajectory, spec_path;
    double tmax = 0.0, dt = 0.0, eps_min = 0.0, eps_max = 2500.0;
    std::size_t count = 501, resolution = 0, ode_cases = 200;
    bool two_timescale = false, self_consistent = false, quiet = false, verbose = false;
    std::vector<std::string> figure_ids;

    auto with_config = [&](CLI::App* sub, const char* what) {
        sub->add_option("--config,-c", config_path, what)->check(CLI::ExistingFile);
    };
    const char* system_help = "JSON with drive-level parameters (omega_b units, *_hz for Hz)";
    const char* effective_help =
        "JSON with effective parameters, or {\"system\": {...}} to linearize around a steady state";

    auto* steady = app.add_subcommand("steady", "all steady-state roots with branch labels, residuals and validity");
    with_config(steady, system_help);
    auto* bist = app.add_subcommand("bistability", "switching points and critical drive");
    with_config(bist, system_help);
    auto* hyst = app.add_subcommand("hysteresis", "up/down drive sweep as CSV");
    with_config(hyst, system_help);
    hyst->add_option("--min", eps_min, "lowest epsilon_d (omega_b units)");
    hyst->add_option("--max", eps_max, "highest epsilon_d (omega_b units)");
    hyst->add_option("--count", count, "grid points");
    hyst->add_option("--out,-o", out, "CSV path (default stdout)");
    auto* settle_cmd = app.add_subcommand("settle", "integrate the mean-field equations to a fixed point");
    with_config(settle_cmd, system_help);
    settle_cmd->add_option("--seed", seed, "initial Re a,Im a,Re b,Im b,Re m,Im m (default 0)");
    settle_cmd->add_option("--tmax", tmax, "integration horizon in s (default 50/min kappa)");
    settle_cmd->add_option("--dt", dt, "step in s (default 0.02/omega_b)");
    settle_cmd->add_flag("--two-timescale", two_timescale, "slave b while (a, m) settle, then release it");
    settle_cmd->add_option("--trajectory", trajectory, "write t,Re a,Im a,Re b,Im b,Re m,Im m CSV");
    auto* stab = app.add_subcommand("stability", "drift-matrix spectrum; exit 1 when unstable");
    with_config(stab, effective_help);
    stab->add_option("--branch", branch, "lower|middle|upper when the drive is bistable");
    auto* cov = app.add_subcommand("covariance", "6x6 steady-state covariance as CSV");
    with_config(cov, effective_help);
    cov->add_option("--branch", branch, "lower|middle|upper when the drive is bistable");
    cov->add_option("--out,-o", out, "CSV path (default stdout)");
    auto* ent = app.add_subcommand("entangle", "logarithmic negativity of one mode pair");
    with_config(ent, effective_help);
    ent->add_option("--branch", branch, "lower|middle|upper when the drive is bistable");
    ent->add_option("--pair", pair, "mode pair from {a, m, b}, e.g. ab");
    auto* sweep = app.add_subcommand("sweep", "run an arbitrary grid from a JSON spec");
    sweep->add_option("--spec", spec_path, "sweep spec JSON")->required()->check(CLI::ExistingFile);
    sweep->add_option("--out,-o", out, "output directory (default $CMM_OUTPUT_DIR or .)");
    auto* fig = app.add_subcommand("figure", "regenerate figure data: fig2a ... fig7d, or all");
    fig->add_option("ids", figure_ids, "figure ids")->required();
    fig->add_option("--out,-o", out, "output directory (default $CMM_OUTPUT_DIR or .)");
    fig->add_option("--resolution", resolution, "points per axis");
    fig->add_flag("--self-consistent", self_consistent, "linearize around drive-level steady states");
    fig->add_flag("--quiet,-q", quiet, "no progress lines");
    auto* val = app.add_subcommand("validate", "run the invariant and oracle checks");
    val->add_option("--ode-cases", ode_cases, "random configurations for the time-integration oracle");
    val->add_flag("--verbose,-v", verbose, "list every check");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (*steady) return cmd_steady(config_path);
        if (*bist) return cmd_bistability(config_path);
        if (*hyst) return cmd_hysteresis(config_path, eps_min, eps_max, count, out);
        if (*settle_cmd) return cmd_settle(config_path, seed, tmax, dt, two_timescale, trajectory);
        if (*stab) return cmd_stability(config_path, branch);
        if (*cov) return cmd_covariance(config_path, branch, out);
        if (*ent) return cmd_entangle(config_path, branch, pair);
        if (*sweep) return cmd_sweep(spec_path, out, jobs);
        if (*fig) return cmd_figure(figure_ids, out, resolution, self_consistent, jobs, quiet);
        if (*val) return cmd_validate(ode_cases, verbose);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        if (e.code() == ErrorCode::ConfigError) std::cerr << "\n" << config_schema;
        return e.code() == ErrorCode::ConfigError || e.code() == ErrorCode::InvalidArgument ? 2 : 1;
    }
    return 2;
}
