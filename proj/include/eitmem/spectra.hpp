#pragma once

// Steady-state probe transmission for the Lambda three-level and N-type
// four-level schemes, with the derived quantities used throughout:
// EIT bandwidth, effective decoherence and the power-dependent resonance
// shift of the N-type system.

#include "eitmem/units.hpp"

namespace eitmem::spectra {

// Single-pass field-exponent contribution f of the Lambda medium at
// sideband frequency omega; exp(f) is the field transfer factor at z = L
// (vacuum phase excluded). Transmission spectra use exp(2 Re f).
Complex lambda_response(double omega, const MediumParams& medium,
                        const FieldParams& field);

// Same quantity for the N-type four-level medium (control also drives the
// switching transition with Rabi frequency epsilon_switch * omega_c).
Complex ntype_response(double omega, const MediumParams& medium,
                       const FieldParams& field);

struct SpectrumResult {
    ArrayXd delta_p;       // probe detunings (Gamma)
    ArrayXd transmission;  // intensity transmission
    double peak_transparency = 0.0;
    double fwhm_eit = std::numeric_limits<double>::quiet_NaN();
};

SpectrumResult eit_spectrum(const ArrayXd& delta_p_grid, const MediumParams& medium,
                            const FieldParams& field);

SpectrumResult ntype_spectrum(const ArrayXd& delta_p_grid, const MediumParams& medium,
                              const FieldParams& field);

struct Bandwidth {
    double closed_form = 0.0;  // sqrt(ln2/2) omega_c^2 / sqrt(D gamma31)
    double numeric_fwhm = 0.0; // FWHM of the computed transparency window
};

Bandwidth eit_bandwidth(const MediumParams& medium, const FieldParams& field);

struct NTypeEffective {
    double delta2_eff = 0.0;   // two-photon detuning incl. ac Stark shift
    double gamma21_eff = 0.0;  // decoherence incl. photon-switching loss
    std::vector<std::string> warnings;
};

// Effective two-photon quantities of the N-type system for a given
// control Rabi frequency, evaluated at delta2 = delta_c = 0.
NTypeEffective ntype_effective(const MediumParams& medium, double omega_c);

// Default detuning grid: 801 points over [-6, 6] Gamma with extra samples
// packed around the transparency window.
ArrayXd default_grid(const MediumParams& medium, const FieldParams& field);

// Position of the transparency peak, argmax refined by a parabola fit.
double resonance_shift(const SpectrumResult& spectrum);

}  // namespace eitmem::spectra
