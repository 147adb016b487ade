#include "eitmem/config.hpp"

#include <fstream>
#include <set>

namespace eitmem::config {

namespace {

void check_keys(const Json& j, const std::string& where,
                const std::set<std::string>& known) {
    if (!j.is_object())
        throw ValidationError("config: '" + where + "' must be an object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!known.count(key))
            throw ValidationError("config: unknown key '" + where + "." + key + "'");
    }
}

double num(const Json& j, const std::string& where) {
    if (!j.is_number())
        throw ValidationError("config: '" + where + "' must be a number");
    return j.get<double>();
}

// fetch a value given in Gamma units or in an SI variant, not both
std::optional<double> dual_unit(const Json& j, const std::string& where,
                                const std::string& key, const std::string& si_suffix,
                                double si_to_gamma) {
    const std::string si_key = key + si_suffix;
    const bool has_plain = j.contains(key);
    const bool has_si = j.contains(si_key);
    if (has_plain && has_si)
        throw ValidationError("config: '" + where + "' sets both '" + key + "' and '" +
                              si_key + "'");
    if (has_plain) return num(j.at(key), where + "." + key);
    if (has_si) return num(j.at(si_key), where + "." + si_key) * si_to_gamma;
    return std::nullopt;
}

}  // namespace

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot open '" + path + "'");
    Json j;
    try {
        in >> j;
    } catch (const Json::parse_error& e) {
        throw ValidationError("config: parse error in '" + path + "': " + e.what());
    }
    return j;
}

Config parse_config(const Json& j) {
    check_keys(j, "", {"transition", "scheme", "medium", "field", "pulse", "grid",
                       "protocol", "decay"});
    Config c;
    c.raw = j;

    if (j.contains("transition")) {
        const Json& t = j.at("transition");
        if (t.is_string()) {
            const std::string name = t.get<std::string>();
            if (name == "cs-d1") {
                c.transition = Transition::cesium_d1();
            } else if (name == "cs-d2") {
                c.transition = Transition::cesium_d2();
            } else {
                throw ValidationError("config: unknown transition preset '" + name + "'");
            }
            c.transition_name = name;
        } else {
            check_keys(t, "transition", {"gamma_mhz", "wavelength_nm"});
            c.transition.gamma_sp = 2.0 * kPi * 1e6 * num(t.at("gamma_mhz"),
                                                          "transition.gamma_mhz");
            c.transition.wavelength = 1e-9 * num(t.at("wavelength_nm"),
                                                 "transition.wavelength_nm");
            c.transition_name = "custom";
        }
    }
    c.transition.validate();
    const UnitSystem units(c.transition);
    const double mhz = units.freq_mhz_to_gamma(1.0);
    const double ghz = units.freq_ghz_to_gamma(1.0);
    const double ns = units.time_ns_to_gamma(1.0);
    const double us = units.time_us_to_gamma(1.0);

    Scheme scheme = Scheme::LambdaD1;
    if (j.contains("scheme")) scheme = scheme_from_string(j.at("scheme").get<std::string>());
    switch (scheme) {
        case Scheme::LambdaD1: c.medium = MediumParams::lambda_d1(0.0); break;
        case Scheme::NTypeD2: c.medium = MediumParams::ntype_d2(0.0); break;
        case Scheme::DoubleLambdaFWM: c.medium = MediumParams::double_lambda_fwm(0.0); break;
    }

    if (j.contains("medium")) {
        const Json& m = j.at("medium");
        check_keys(m, "medium",
                   {"optical_depth", "length_mm", "gamma21", "gamma31", "gamma32",
                    "gamma41", "gamma42", "gamma43", "Gamma31", "Gamma32", "Gamma41",
                    "Gamma42", "delta_s", "delta_s_mhz", "delta_hf", "delta_hf_ghz",
                    "epsilon_switch", "epsilon_fwm"});
        auto get = [&](const char* key, double& dst) {
            if (m.contains(key)) dst = num(m.at(key), std::string("medium.") + key);
        };
        get("optical_depth", c.medium.optical_depth);
        if (m.contains("length_mm"))
            c.medium.length = 1e-3 * num(m.at("length_mm"), "medium.length_mm");
        get("gamma21", c.medium.gamma21);
        get("gamma31", c.medium.gamma31);
        get("gamma32", c.medium.gamma32);
        get("gamma41", c.medium.gamma41);
        get("gamma42", c.medium.gamma42);
        get("gamma43", c.medium.gamma43);
        get("Gamma31", c.medium.Gamma31);
        get("Gamma32", c.medium.Gamma32);
        get("Gamma41", c.medium.Gamma41);
        get("Gamma42", c.medium.Gamma42);
        if (auto v = dual_unit(m, "medium", "delta_s", "_mhz", mhz)) c.medium.delta_s = *v;
        if (auto v = dual_unit(m, "medium", "delta_hf", "_ghz", ghz)) c.medium.delta_hf = *v;
        get("epsilon_switch", c.medium.epsilon_switch);
        get("epsilon_fwm", c.medium.epsilon_fwm);
    }
    c.medium.validate();

    if (j.contains("field")) {
        const Json& f = j.at("field");
        check_keys(f, "field",
                   {"omega_c", "omega_c_mhz", "delta_c", "delta_c_mhz", "delta_p",
                    "delta_p_mhz", "omega_d", "omega_d_mhz", "delta_d", "delta_d_ghz",
                    "theta_deg"});
        if (auto v = dual_unit(f, "field", "omega_c", "_mhz", mhz)) c.field.omega_c = *v;
        if (auto v = dual_unit(f, "field", "delta_c", "_mhz", mhz)) c.field.delta_c = *v;
        if (auto v = dual_unit(f, "field", "delta_p", "_mhz", mhz)) c.field.delta_p = *v;
        if (auto v = dual_unit(f, "field", "omega_d", "_mhz", mhz)) c.field.omega_d = *v;
        if (auto v = dual_unit(f, "field", "delta_d", "_ghz", ghz)) c.field.delta_d = *v;
        if (f.contains("theta_deg"))
            c.field.theta = num(f.at("theta_deg"), "field.theta_deg") * kPi / 180.0;
    }
    c.field.validate();

    if (j.contains("pulse")) {
        const Json& p = j.at("pulse");
        check_keys(p, "pulse", {"omega_p0", "t_p", "t_p_ns", "t0", "t0_ns"});
        GaussianPulse pulse;
        if (p.contains("omega_p0")) pulse.omega_p0 = num(p.at("omega_p0"), "pulse.omega_p0");
        if (auto v = dual_unit(p, "pulse", "t_p", "_ns", ns)) pulse.t_p = *v;
        if (auto v = dual_unit(p, "pulse", "t0", "_ns", ns)) pulse.t0 = *v;
        pulse.validate();
        c.pulse = pulse;
    }

    if (j.contains("grid")) {
        const Json& g = j.at("grid");
        check_keys(g, "grid", {"n", "window"});
        if (g.contains("n")) c.grid.n_samples = static_cast<int>(num(g.at("n"), "grid.n"));
        if (g.contains("window")) c.grid.window = num(g.at("window"), "grid.window");
    }

    if (j.contains("protocol")) {
        const Json& pr = j.at("protocol");
        check_keys(pr, "protocol",
                   {"t_off", "t_off_ns", "kappa", "t_on", "t_on_ns", "hold", "hold_us",
                    "ramp", "ramp_duration", "ramp_duration_ns"});
        storage::StorageProtocol proto;
        bool have_off = false;
        if (auto v = dual_unit(pr, "protocol", "t_off", "_ns", ns)) {
            proto.t_off = *v;
            have_off = true;
        }
        if (pr.contains("kappa")) {
            if (have_off)
                throw ValidationError("config: protocol sets both t_off and kappa");
            if (!c.pulse)
                throw ValidationError("config: protocol.kappa needs a pulse block");
            proto.t_off = num(pr.at("kappa"), "protocol.kappa") * c.pulse->t_p;
        }
        if (auto v = dual_unit(pr, "protocol", "t_on", "_ns", ns)) proto.t_on = *v;
        if (pr.contains("hold") || pr.contains("hold_us")) {
            if (pr.contains("t_on") || pr.contains("t_on_ns"))
                throw ValidationError("config: protocol sets both t_on and hold");
            const double hold = pr.contains("hold")
                                    ? num(pr.at("hold"), "protocol.hold")
                                    : num(pr.at("hold_us"), "protocol.hold_us") * us;
            proto.t_on = proto.t_off + hold;
        }
        if (pr.contains("ramp")) {
            const std::string ramp = pr.at("ramp").get<std::string>();
            if (ramp == "step")
                proto.ramp = storage::RampShape::Step;
            else if (ramp == "smooth")
                proto.ramp = storage::RampShape::Smooth;
            else
                throw ValidationError("config: protocol.ramp must be 'step' or 'smooth'");
        }
        if (auto v = dual_unit(pr, "protocol", "ramp_duration", "_ns", ns))
            proto.ramp_duration = *v;
        proto.validate();
        c.protocol = proto;
    }

    if (j.contains("decay")) {
        const Json& d = j.at("decay");
        check_keys(d, "decay", {"A", "tau", "tau_us", "gamma21"});
        storage::DecayModel decay;
        if (d.contains("A")) decay.A = num(d.at("A"), "decay.A");
        if (auto v = dual_unit(d, "decay", "tau", "_us", us)) decay.tau = *v;
        if (d.contains("gamma21")) decay.gamma21 = num(d.at("gamma21"), "decay.gamma21");
        decay.validate();
        c.decay = decay;
    }
    return c;
}

Config load_config(const std::string& path) { return parse_config(load_json_file(path)); }

Json describe(const Config& c) {
    const MediumParams m = c.medium.resolved();
    Json j;
    j["transition"] = {{"name", c.transition_name},
                       {"gamma_rad_per_s", c.transition.gamma_sp},
                       {"wavelength_m", c.transition.wavelength}};
    j["scheme"] = to_string(m.scheme);
    j["medium"] = {{"optical_depth", m.optical_depth}, {"length_m", m.length},
                   {"gamma21", m.gamma21},  {"gamma31", m.gamma31},
                   {"gamma32", m.gamma32},  {"gamma41", m.gamma41},
                   {"gamma42", m.gamma42},  {"gamma43", m.gamma43},
                   {"Gamma31", m.Gamma31},  {"Gamma32", m.Gamma32},
                   {"Gamma41", m.Gamma41},  {"Gamma42", m.Gamma42},
                   {"delta_s", m.delta_s},  {"delta_hf", m.delta_hf},
                   {"epsilon_switch", m.epsilon_switch},
                   {"epsilon_fwm", m.epsilon_fwm}};
    j["field"] = {{"omega_c", c.field.omega_c}, {"delta_c", c.field.delta_c},
                  {"delta_p", c.field.delta_p}, {"omega_d", c.field.omega_d},
                  {"delta_d", c.field.delta_d}, {"theta_rad", c.field.theta}};
    if (c.pulse)
        j["pulse"] = {{"omega_p0", c.pulse->omega_p0}, {"t_p", c.pulse->t_p},
                      {"t0", c.pulse->t0}};
    if (c.protocol)
        j["protocol"] = {{"t_off", c.protocol->t_off}, {"t_on", c.protocol->t_on},
                         {"ramp", c.protocol->ramp == storage::RampShape::Step ? "step"
                                                                               : "smooth"},
                         {"ramp_duration", c.protocol->ramp_duration}};
    if (c.decay)
        j["decay"] = {{"A", c.decay->A}, {"tau", c.decay->tau},
                      {"gamma21", c.decay->gamma21}};
    return j;
}

}  // namespace eitmem::config
