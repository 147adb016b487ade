// Command-line front end: spectra, slow light, storage, four-wave mixing,
// parameter fitting and preset scenarios. Outputs are CSV for curves and
// JSON for scalars; exit codes: 0 ok, 2 validation, 3 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>

#include "eitmem/estimation.hpp"
#include "eitmem/fwm.hpp"
#include "eitmem/propagation.hpp"
#include "eitmem/scenario.hpp"
#include "eitmem/spectra.hpp"
#include "eitmem/storage.hpp"

namespace em = eitmem;
using em::config::Json;

namespace {

struct GlobalArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 1;
    int jobs = 1;
};

em::scenario::RunContext context(const GlobalArgs& g) {
    return {g.out_dir, g.seed, g.jobs};
}

em::config::Config load_or_default(const GlobalArgs& g) {
    if (g.config_path.empty()) return em::config::Config{};
    return em::config::load_config(g.config_path);
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

// --grid min:max:n
em::ArrayXd parse_grid_arg(const std::string& s) {
    double lo = 0.0, hi = 0.0;
    int n = 0;
    if (std::sscanf(s.c_str(), "%lf:%lf:%d", &lo, &hi, &n) != 3 || n < 2 || hi <= lo)
        throw em::ValidationError("spectrum: --grid expects min:max:n with n >= 2");
    return em::ArrayXd::LinSpaced(n, lo, hi);
}

em::ArrayXd read_csv_columns(const std::string& path, std::vector<em::ArrayXd>& cols);

// load a two-or-three-column CSV: delta_p, transmission[, sigma]
void load_spectrum_csv(const std::string& path, em::fit::MeasuredDataset& ds) {
    std::vector<em::ArrayXd> cols;
    read_csv_columns(path, cols);
    if (cols.size() < 2)
        throw em::ValidationError("fit: spectrum CSV needs columns delta_p,transmission");
    ds.delta_p = cols[0];
    ds.transmission = cols[1];
    ds.sigma = cols.size() > 2 ? em::ArrayXd(cols[2])
                               : em::ArrayXd(em::ArrayXd::Constant(cols[0].size(), 1.0));
}

void load_trace_csv(const std::string& path, em::fit::TraceData& trace) {
    std::vector<em::ArrayXd> cols;
    read_csv_columns(path, cols);
    if (cols.size() < 3)
        throw em::ValidationError("fit: trace CSV needs columns t,input,output");
    trace.t = cols[0];
    trace.input_intensity = cols[1];
    trace.output_intensity = cols[2];
}

em::ArrayXd read_csv_columns(const std::string& path, std::vector<em::ArrayXd>& cols) {
    std::ifstream in(path);
    if (!in) throw em::ValidationError("cannot open '" + path + "'");
    std::string line;
    std::vector<std::vector<double>> data;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::size_t pos = 0;
        bool numeric = true;
        while (pos <= line.size()) {
            const std::size_t next = line.find(',', pos);
            const std::string cell = line.substr(pos, next == std::string::npos
                                                          ? std::string::npos
                                                          : next - pos);
            try {
                row.push_back(std::stod(cell));
            } catch (...) {
                numeric = false;
                break;
            }
            if (next == std::string::npos) break;
            pos = next + 1;
        }
        if (first && !numeric) {  // header line
            first = false;
            continue;
        }
        first = false;
        if (numeric && !row.empty()) data.push_back(row);
    }
    if (data.empty()) throw em::ValidationError("'" + path + "' contains no data rows");
    const std::size_t width = data[0].size();
    cols.assign(width, em::ArrayXd(data.size()));
    for (std::size_t r = 0; r < data.size(); ++r) {
        if (data[r].size() != width)
            throw em::ValidationError("'" + path + "' has ragged rows");
        for (std::size_t c = 0; c < width; ++c) cols[c][r] = data[r][c];
    }
    return cols[0];
}

int run_spectrum(const GlobalArgs& g, const std::string& scheme_arg,
                 const std::string& grid_arg) {
    em::config::Config cfg = load_or_default(g);
    if (!scheme_arg.empty()) cfg.medium.scheme = em::scheme_from_string(scheme_arg);
    const em::ArrayXd grid = grid_arg.empty()
                                 ? em::spectra::default_grid(cfg.medium, cfg.field)
                                 : parse_grid_arg(grid_arg);
    const auto s = cfg.medium.resolved().scheme == em::Scheme::NTypeD2
                       ? em::spectra::ntype_spectrum(grid, cfg.medium, cfg.field)
                       : em::spectra::eit_spectrum(grid, cfg.medium, cfg.field);
    std::vector<em::scenario::Row> rows;
    for (Eigen::Index i = 0; i < grid.size(); ++i)
        rows.push_back({grid[i], s.transmission[i]});
    em::scenario::write_csv_atomic(g.out_dir + "/spectrum.csv",
                                   {"delta_p_over_Gamma", "transmission"}, rows);
    Json j = em::scenario::run_summary(cfg, context(g));
    j["peak_transparency"] = s.peak_transparency;
    j["fwhm_eit"] = s.fwhm_eit;
    em::scenario::write_json_atomic(g.out_dir + "/spectrum_summary.json", j);
    return 0;
}

int run_slowlight(const GlobalArgs& g) {
    em::config::Config cfg = load_or_default(g);
    if (!cfg.pulse) throw em::ValidationError("slowlight: config needs a pulse block");
    Json j = cfg.raw;
    j["name"] = "slowlight";
    j["target"] = "slowlight";
    em::scenario::run_scenario(j, context(g));
    return 0;
}

int run_store(const GlobalArgs& g, double t_off, double t_on, const std::string& ramp,
              double tau_us) {
    em::config::Config cfg = load_or_default(g);
    if (!cfg.pulse) throw em::ValidationError("store: config needs a pulse block");
    Json j = cfg.raw;
    if (!j.contains("protocol")) j["protocol"] = Json::object();
    if (t_off == t_off) j["protocol"]["t_off"] = t_off;  // NaN = not set
    if (t_on == t_on) j["protocol"]["t_on"] = t_on;
    if (!ramp.empty()) j["protocol"]["ramp"] = ramp;
    if (tau_us == tau_us) {
        if (!j.contains("decay")) j["decay"] = Json::object();
        j["decay"]["tau_us"] = tau_us;
        if (!j["decay"].contains("A")) j["decay"]["A"] = 1.0;
    }
    j["name"] = "store";
    j["target"] = "store";
    em::scenario::run_scenario(j, context(g));
    return 0;
}

int run_fwm(const GlobalArgs& g, const std::string& mode, double theta_deg,
            double delta_p_lo, double delta_p_hi, int n_points) {
    em::config::Config cfg = load_or_default(g);
    em::MediumParams medium = cfg.medium;
    if (medium.epsilon_fwm == 0.0) medium.epsilon_fwm = em::epsilon_fwm_default();
    if (medium.delta_hf == 0.0)
        medium.delta_hf = em::MediumParams::double_lambda_fwm(0.0).delta_hf;

    em::fwm::FwmParams f;
    f.omega_c = cfg.field.omega_c;
    f.omega_d = cfg.field.omega_d != 0.0 ? cfg.field.omega_d
                                         : medium.epsilon_fwm * cfg.field.omega_c;
    f.delta_c = cfg.field.delta_c;
    f.delta_d = cfg.field.delta_d != 0.0 ? cfg.field.delta_d : -medium.delta_hf;
    f.theta = theta_deg == theta_deg ? theta_deg * em::kPi / 180.0 : cfg.field.theta;
    f.transition = cfg.transition;

    if (mode == "steady") {
        std::vector<em::scenario::Row> rows;
        for (int k = 0; k < n_points; ++k) {
            const double dp = delta_p_lo + (delta_p_hi - delta_p_lo) * k /
                                               std::max(1, n_points - 1);
            const auto r = em::fwm::fwm_gain_steady(dp, f.theta, f, medium);
            rows.push_back({em::fwm::delta_p_report_sign * dp, r.probe_gain,
                            r.relative_gain - 1.0, r.idler_conv});
        }
        em::scenario::write_csv_atomic(g.out_dir + "/fwm_steady.csv",
                                       {"delta_p_over_Gamma", "probe_transmission",
                                        "fwm_gain", "idler_conversion"},
                                       rows);
        Json j = em::scenario::run_summary(cfg, context(g));
        const auto probe = em::fwm::fwm_gain_steady(0.0, f.theta, f, medium);
        j["delta_kz_per_m"] = probe.detail.delta_kz;
        j["n_c_minus_1"] = probe.detail.n_c - 1.0;
        em::scenario::write_json_atomic(g.out_dir + "/fwm_summary.json", j);
        return 0;
    }
    if (mode == "pulse") {
        if (!cfg.pulse) throw em::ValidationError("fwm pulse: config needs a pulse block");
        em::fwm::PulseGainOptions opts;
        opts.jobs = g.jobs;
        std::vector<double> od_list;
        for (double d = 100.0; d <= 1000.0; d += 150.0) od_list.push_back(d);
        const auto rows_raw = em::fwm::fwm_gain_pulse(*cfg.pulse, od_list, f, medium, opts);
        std::vector<em::scenario::Row> rows;
        for (const auto& r : rows_raw)
            rows.push_back({r.optical_depth, r.eta_with_fwm, r.eta_without_fwm, r.gain});
        em::scenario::write_csv_atomic(g.out_dir + "/fwm_pulse.csv",
                                       {"od", "eta_with_fwm", "eta_without_fwm", "gain"},
                                       rows);
        return 0;
    }
    if (mode == "pump-scan") {
        const em::UnitSystem u(cfg.transition);
        em::fwm::PumpScanOptions opts;
        opts.jobs = g.jobs;
        std::vector<double> detunings;
        for (double ghz = 1.5; ghz <= 9.51; ghz += 0.25)
            detunings.push_back(u.freq_ghz_to_gamma(ghz));
        const auto rows_raw = em::fwm::pump_probe_scan(detunings, f, medium, opts);
        std::vector<em::scenario::Row> rows;
        for (const auto& r : rows_raw)
            rows.push_back({u.gamma_to_freq_mhz(r.delta_pump) * 1e-3, r.peak_transmission,
                            r.peak_no_pump});
        em::scenario::write_csv_atomic(g.out_dir + "/fwm_pump_scan.csv",
                                       {"delta_pump_ghz", "peak_transmission",
                                        "peak_no_pump"},
                                       rows);
        return 0;
    }
    throw em::ValidationError("fwm: --mode must be steady, pulse or pump-scan");
}

int run_fit(const GlobalArgs& g, const std::string& spectrum_csv,
            const std::string& trace_csv, const std::string& scheme_arg,
            const std::vector<std::string>& fixes, double t_p_ns) {
    em::fit::MeasuredDataset ds;
    load_spectrum_csv(spectrum_csv, ds);
    ds.scheme = scheme_arg.empty() ? em::Scheme::LambdaD1
                                   : em::scheme_from_string(scheme_arg);

    em::fit::FitConfig fc;
    fc.seed = g.seed;
    if (ds.scheme == em::Scheme::NTypeD2) {
        const em::MediumParams m = em::MediumParams::ntype_d2(0.0);
        fc.delta_s = m.delta_s;
        fc.epsilon_switch = m.epsilon_switch;
    }
    for (const std::string& fx : fixes) {
        const auto eq = fx.find('=');
        if (eq == std::string::npos)
            throw em::ValidationError("fit: --fix expects name=value");
        const std::string key = fx.substr(0, eq);
        const double value = std::stod(fx.substr(eq + 1));
        if (key == "gamma31") {
            fc.fix_gamma31 = value;
            fc.gamma31_assumed = value;
        } else {
            throw em::ValidationError("fit: unsupported --fix parameter '" + key + "'");
        }
    }

    Json j;
    j["tool"] = em::scenario::kToolVersion;
    if (!trace_csv.empty()) {
        load_trace_csv(trace_csv, ds.trace);
        const em::UnitSystem u(ds.scheme == em::Scheme::NTypeD2
                                   ? em::Transition::cesium_d2()
                                   : em::Transition::cesium_d1());
        ds.t_p = t_p_ns == t_p_ns ? u.time_ns_to_gamma(t_p_ns) : 0.0;
        const em::fit::FitResult r = em::fit::fit_joint(ds, fc);
        auto iv = [](const em::fit::ValueInterval& v) {
            return Json{{"value", v.value}, {"two_sigma", v.two_sigma}};
        };
        j["optical_depth"] = iv(r.optical_depth);
        j["omega_c"] = iv(r.omega_c);
        j["gamma21"] = iv(r.gamma21);
        j["delta_c"] = iv(r.delta_c);
        j["gamma31"] = iv(r.gamma31);
        j["d_gamma21"] = r.d_gamma21;
        j["d_gamma31"] = r.d_gamma31;
        j["consistency"] = r.consistency;
        j["chi2"] = r.chi2;
        j["trace"] = {{"t_d", r.trace_t_d}, {"beta", r.trace_beta}, {"eta", r.trace_eta}};
        j["warnings"] = r.warnings;
        print_warnings(r.warnings);
    } else {
        const em::fit::SpectrumFit r = em::fit::fit_spectrum(ds, fc);
        auto iv = [](const em::fit::ValueInterval& v) {
            return Json{{"value", v.value}, {"two_sigma", v.two_sigma}};
        };
        j["omega_c"] = iv(r.omega_c);
        j["delta_c"] = iv(r.delta_c);
        j["d_gamma21"] = iv(r.d_gamma21);
        j["d_gamma31"] = iv(r.d_gamma31);
        j["chi2"] = r.chi2;
        j["gamma31_assumed"] = fc.gamma31_assumed;
        j["warnings"] = r.warnings;
        print_warnings(r.warnings);
    }
    em::scenario::write_json_atomic(g.out_dir + "/fit_result.json", j);
    return 0;
}

int run_preset(const GlobalArgs& g, const std::string& name) {
    const em::scenario::Scenario* p = em::scenario::find_preset(name);
    if (!p) throw em::ValidationError("unknown preset '" + name + "'");
    p->run(context(g));
    Json j;
    j["tool"] = em::scenario::kToolVersion;
    j["preset"] = p->name;
    j["figure"] = p->figure;
    j["description"] = p->description;
    j["notes"] = p->notes;
    j["seed"] = g.seed;
    em::scenario::write_json_atomic(g.out_dir + "/" + p->name + "_meta.json", j);
    return 0;
}

int list_presets(bool as_json) {
    if (as_json) {
        Json list = Json::array();
        for (const auto& p : em::scenario::preset_catalog())
            list.push_back({{"name", p.name},
                            {"figure", p.figure},
                            {"description", p.description},
                            {"notes", p.notes}});
        std::cout << list.dump(2) << "\n";
        return 0;
    }
    for (const auto& p : em::scenario::preset_catalog())
        std::cout << p.name << "\t[" << p.figure << "]\t" << p.description << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"EIT optical-memory simulation and parameter-estimation toolkit"};
    app.require_subcommand(1);

    GlobalArgs g;
    app.add_option("--config", g.config_path, "JSON parameter file")->capture_default_str();
    app.add_option("--out", g.out_dir, "output directory")->capture_default_str();
    app.add_option("--seed", g.seed, "seed for stochastic operations")
        ->capture_default_str();
    app.add_option("--jobs", g.jobs, "worker threads for sweeps")->capture_default_str();

    auto* sc_spectrum = app.add_subcommand("spectrum", "steady-state transmission spectrum");
    std::string scheme_arg, grid_arg;
    sc_spectrum->add_option("--scheme", scheme_arg,
                            "lambda-d1 | ntype-d2 (default from config)");
    sc_spectrum->add_option("--grid", grid_arg, "detuning grid min:max:n (Gamma units)");

    auto* sc_slow = app.add_subcommand("slowlight", "pulse propagation through the medium");

    auto* sc_store = app.add_subcommand("store", "storage-and-retrieval simulation");
    double t_off = std::numeric_limits<double>::quiet_NaN();
    double t_on = std::numeric_limits<double>::quiet_NaN();
    double tau_us = std::numeric_limits<double>::quiet_NaN();
    std::string ramp;
    sc_store->add_option("--t-off", t_off, "switch-off time (1/Gamma)");
    sc_store->add_option("--t-on", t_on, "switch-on time (1/Gamma)");
    sc_store->add_option("--ramp", ramp, "step | smooth");
    sc_store->add_option("--tau-us", tau_us, "motional decay time (us)");

    auto* sc_fwm = app.add_subcommand("fwm", "four-wave-mixing scans");
    std::string fwm_mode = "steady";
    double theta_deg = std::numeric_limits<double>::quiet_NaN();
    double dp_lo = -0.2, dp_hi = 0.2;
    int n_points = 201;
    sc_fwm->add_option("--mode", fwm_mode, "steady | pulse | pump-scan")
        ->capture_default_str();
    sc_fwm->add_option("--theta-deg", theta_deg, "control-probe angle (degrees)");
    sc_fwm->add_option("--delta-p-min", dp_lo, "scan start (Gamma)")->capture_default_str();
    sc_fwm->add_option("--delta-p-max", dp_hi, "scan end (Gamma)")->capture_default_str();
    sc_fwm->add_option("--points", n_points, "scan points")->capture_default_str();

    auto* sc_fit = app.add_subcommand("fit", "parameter extraction from measured data");
    std::string spectrum_csv, trace_csv, fit_scheme;
    std::vector<std::string> fixes;
    double t_p_ns = std::numeric_limits<double>::quiet_NaN();
    sc_fit->add_option("--spectrum", spectrum_csv, "CSV: delta_p,transmission[,sigma]")
        ->required();
    sc_fit->add_option("--trace", trace_csv, "CSV: t,input_intensity,output_intensity");
    sc_fit->add_option("--scheme", fit_scheme, "lambda-d1 | ntype-d2");
    sc_fit->add_option("--fix", fixes, "pin a parameter, e.g. gamma31=0.8");
    sc_fit->add_option("--t-p-ns", t_p_ns, "input-pulse FWHM for the joint fit (ns)");

    auto* sc_preset = app.add_subcommand("preset", "run a named preset scenario");
    std::string preset_name;
    sc_preset->add_option("name", preset_name, "preset name")->required();

    auto* sc_list = app.add_subcommand("list-presets", "show the preset catalog");
    bool list_json = false;
    sc_list->add_flag("--json", list_json, "emit JSON");

    auto* sc_run = app.add_subcommand("run", "run a scenario config file");
    std::string scenario_path;
    sc_run->add_option("config", scenario_path, "scenario JSON")->required();

    try {
        app.parse(argc, argv);
        if (sc_spectrum->parsed()) return run_spectrum(g, scheme_arg, grid_arg);
        if (sc_slow->parsed()) return run_slowlight(g);
        if (sc_store->parsed()) return run_store(g, t_off, t_on, ramp, tau_us);
        if (sc_fwm->parsed()) return run_fwm(g, fwm_mode, theta_deg, dp_lo, dp_hi, n_points);
        if (sc_fit->parsed())
            return run_fit(g, spectrum_csv, trace_csv, fit_scheme, fixes, t_p_ns);
        if (sc_preset->parsed()) return run_preset(g, preset_name);
        if (sc_list->parsed()) return list_presets(list_json);
        if (sc_run->parsed()) {
            em::scenario::run_scenario(em::config::load_json_file(scenario_path),
                                       context(g));
            return 0;
        }
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const em::ValidationError& e) {
        nlohmann::json err{{"error", {{"type", "validation"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 2;
    } catch (const em::NumericalError& e) {
        nlohmann::json err{{"error", {{"type", "numerical"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 3;
    } catch (const std::exception& e) {
        nlohmann::json err{{"error", {{"type", "internal"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 1;
    }
    return 0;
}
