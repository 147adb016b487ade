#pragma once

// Semi-classical four-wave mixing for the double-Lambda configuration:
// zero-order populations, first-order susceptibilities, control refractive
// index, phase-mismatched coupled-mode gain and time-domain pulse gain.
//
// Internal sign convention: detunings enter the coherence poles exactly as
// in the Lambda modules (xi_31 = i delta_p - gamma_31, ...), so the
// zero-pump limit of the probe channel reproduces lambda_response with the
// same numeric detunings. Published FWM treatments often flip the probe
// detuning axis; the CLI applies `delta_p_report_sign` when labelling
// output columns.

#include "eitmem/units.hpp"

namespace eitmem::fwm {

// Sign applied to internal probe detunings when reporting FWM scans, so
// that printed axes follow the usual slow-light convention.
inline constexpr double delta_p_report_sign = 1.0;

struct FwmParams {
    double omega_c = 0.0;   // control Rabi frequency (Gamma)
    double omega_d = 0.0;   // pump Rabi frequency (Gamma)
    double delta_p = 0.0;   // probe detuning (Gamma)
    double delta_c = 0.0;   // control detuning (Gamma)
    double delta_d = 0.0;   // pump detuning (Gamma); red of the probe line is negative
    double theta = 0.0;     // control-probe angle (rad)
    double k_p = 0.0;       // vacuum wavenumbers (1/m); 0 = derive from transition
    double k_c = 0.0;
    double k_i = 0.0;
    bool exact_k = false;   // split k's by the ground hyperfine interval
    Transition transition = Transition::cesium_d1();

    double epsilon() const { return omega_c != 0.0 ? omega_d / omega_c : 0.0; }
    void validate() const;
};

// Zero-order populations (pump and control on, probe and idler off).
struct Populations {
    double n1 = 1.0, n2 = 0.0, n3 = 0.0, n4 = 0.0;

    static Populations probe_ground() { return {1.0, 0.0, 0.0, 0.0}; }
    double sum() const { return n1 + n2 + n3 + n4; }
};

// Steady-state zero-order populations as printed in the reference
// treatment. Note: their weak-pump limit concentrates population in
// state |2>, which reflects a state-labelling difference; gain pipelines
// default to Populations::probe_ground() instead (all population in the
// probe ground state, the configuration the index-of-refraction argument
// assumes).
Populations fwm_zero_order(const FwmParams& params, const MediumParams& medium);

struct FwmResult {
    Complex chi_pp, chi_pi, chi_ip, chi_ii;  // OD-normalized susceptibilities
    Complex denom_D;                         // shared first-order denominator
    double n_c = 1.0;                        // control refractive index
    double delta_kz = 0.0;                   // 1/m
    double probe_gain = 0.0;                 // |E_p(L)/E_p0|^2
    double idler_conv = 0.0;                 // |E_i(L)/E_p0|^2
    // single-pass exponents of the (Omega_p, Omega_i*) coupled system
    Complex a_pp, a_pi, a_ip, a_ii;
};

// First-order susceptibilities; chi_ii and chi_ip are the coefficients of
// the conjugated idler equation. (i k_p/2) chi_pp L is the OD-normalized
// single-pass probe exponent.
FwmResult fwm_susceptibilities(const FwmParams& params, const MediumParams& medium,
                               const Populations& pops = Populations::probe_ground());

// n_c = 1 + chi_c/2 from the far-detuned two-level response of the
// control on the probe transition.
double control_index(const FwmParams& params, const MediumParams& medium);

// 2 n_c k_c - (k_p + k_i) cos(theta). literal_formula switches to the
// printed variant with a sin(theta) on the idler term.
double delta_kz(const FwmParams& params, const MediumParams& medium,
                bool literal_formula = false);

struct SteadyGain {
    double probe_gain = 0.0;
    double idler_conv = 0.0;
    double transmission_no_fwm = 0.0;  // same medium with the cross channels off
    double relative_gain = 0.0;        // probe_gain / transmission_no_fwm
    FwmResult detail;
};

SteadyGain fwm_gain_steady(double delta_p, double theta, const FwmParams& params,
                           const MediumParams& medium,
                           const Populations& pops = Populations::probe_ground(),
                           bool literal_delta_kz = false);

struct PulseGainRow {
    double optical_depth = 0.0;
    double omega_c = 0.0;
    double eta_with_fwm = 0.0;
    double eta_without_fwm = 0.0;
    double gain = 0.0;  // eta_with / eta_without - 1
};

struct PulseGainOptions {
    double zeta = 2.7;
    int nz = 160;
    int n_record = 1024;
    double omega_p0 = 1e-3;
    int jobs = 1;
};

// Time-domain gain under perfect phase matching: full four-level density
// matrix plus the two coupled Maxwell equations, run with and without the
// pump channel for every optical depth.
std::vector<PulseGainRow> fwm_gain_pulse(const GaussianPulse& pulse,
                                         const std::vector<double>& od_list,
                                         const FwmParams& params, const MediumParams& medium,
                                         const PulseGainOptions& opts = {});

struct PumpScanRow {
    double delta_pump = 0.0;       // magnitude of the pump detuning (Gamma)
    double peak_transmission = 0.0;
    double peak_no_pump = 0.0;
};

struct PumpScanOptions {
    double power_ratio = 0.5;  // pump power / control power
    double span = 0.6;         // probe-detuning search half width (Gamma)
    int n_probe = 241;
    int jobs = 1;
};

// Peak probe transmission versus pump detuning (steady state, phase
// mismatch included through theta).
std::vector<PumpScanRow> pump_probe_scan(const std::vector<double>& pump_detunings,
                                         const FwmParams& params, const MediumParams& medium,
                                         const PumpScanOptions& opts = {});

}  // namespace eitmem::fwm
