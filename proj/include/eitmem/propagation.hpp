#pragma once

// Probe-pulse propagation through the EIT medium: exact spectral-domain
// solution, analytic Gaussian slow-light solution, and the slow-light
// energy transmission eta_tran.

#include "eitmem/spectra.hpp"
#include "eitmem/units.hpp"

namespace eitmem::prop {

struct PropagationOptions {
    bool include_vacuum_delay = false;  // iwL/c phase; negligible, off by default
    GridOptions grid;
    double alias_tail_fraction = 0.05;      // last part of the window checked
    double alias_energy_tolerance = 1e-4;   // max energy fraction in the tail
};

struct PropagationResult {
    SampledWaveform output;
    double t_d = 0.0;       // centroid group delay (1/Gamma)
    double beta = 1.0;      // rms intensity-width ratio out/in
    double eta_tran = 0.0;  // energy transmission
    double zeta = 0.0;      // t_d / t_p (t_p from rms width of the input)
    std::vector<std::string> warnings;
};

// Single-pass complex field factor exp(g(omega)) at z = L for every
// frequency of the grid. Lambda and N-type media share the same entry
// point; the scheme of `medium` selects the response.
ArrayXcd transfer_function(const ArrayXd& omega_grid, const MediumParams& medium,
                           const FieldParams& field,
                           const PropagationOptions& opts = {});

// Spectral-domain propagation: FFT, multiply by the transfer function,
// inverse FFT. Energies by trapezoid rule, delay as centroid shift.
PropagationResult propagate_pulse(const SampledWaveform& input, const MediumParams& medium,
                                  const FieldParams& field,
                                  const PropagationOptions& opts = {});

// Convenience: build the grid, sample the pulse, propagate.
PropagationResult propagate_gaussian(const GaussianPulse& pulse, const MediumParams& medium,
                                     const FieldParams& field,
                                     const PropagationOptions& opts = {});

// Closed-form Gaussian output (quadratic dispersion), valid on two-photon
// resonance with the control well above the residual decoherence scale.
PropagationResult analytic_slow_light(const GaussianPulse& pulse, const MediumParams& medium,
                                      const FieldParams& field,
                                      const PropagationOptions& opts = {});

// Slow-light energy transmission; evaluates both equivalent closed forms
// (broadening-factor and bandwidth form) and checks they agree.
double eta_tran(double optical_depth, double zeta, double gamma21, double gamma31,
                double t_p);

}  // namespace eitmem::prop
