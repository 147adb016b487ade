#pragma once

// Storage-and-retrieval: time-domain Maxwell-Bloch solver with a switched
// control field, the edge-cutoff compression efficiency, storage-time
// decay and the time-bandwidth product.

#include <functional>
#include <optional>

#include "eitmem/units.hpp"

namespace eitmem::storage {

enum class RampShape { Step, Smooth };

// Control switching protocol. Times are relative to the instant the pulse
// peak enters the medium (t = pulse.t0).
struct StorageProtocol {
    double t_off = 0.0;          // switch-off time t_c (1/Gamma)
    double t_on = 0.0;           // retrieval switch-on time (1/Gamma)
    RampShape ramp = RampShape::Smooth;
    double ramp_duration = -1.0; // < 0: default 0.1 t_p at simulation time
    bool enabled = true;         // false: control stays on (slow-light run)

    double kappa(double t_p) const { return t_off / t_p; }
    void validate() const;
};

// SE-vs-storage-time model, A exp(-t^2/tau^2) exp(-2 gamma21 t).
struct DecayModel {
    double A = 1.0;
    double tau = 0.0;      // Gaussian decay time (1/Gamma)
    double gamma21 = 0.0;  // optional exponential component (Gamma); 0 = off

    void validate() const;
};

struct StorageResult {
    double eta_total = 0.0;
    double eta_tran = 0.0;    // from a control-held-on run of the same solver
    double eta_comp = 0.0;    // stored excitation fraction at switch-off
    double eta_stored = 1.0;  // coherence surviving the hold interval
    double tbp = std::numeric_limits<double>::quiet_NaN();
    SampledWaveform retrieved;
    SampledWaveform leaked;   // transmission before the hold interval
    ArrayXcd spinwave;        // sigma21(xi) snapshot at the start of the hold
    double trace_error_per_step = 0.0;  // full-OBE mode diagnostics
    std::vector<std::string> warnings;
};

// Fraction of the pulse compressed into the medium at switch-off,
// 1/2 [erf(2 sqrt(ln2) kappa) + erf(2 sqrt(ln2) (zeta - kappa)/beta)].
double eta_comp(double kappa, double zeta, double beta);

// Remaining efficiency after a hold of t_storage.
double eta_stored(double t_storage, const DecayModel& decay);

struct TbpResult {
    double analytic = 0.0;  // tau sqrt(ln(2A)) / t_p
    double numeric = 0.0;   // root of eta_stored = 1/2
};

TbpResult tbp_at_half(const DecayModel& decay, double t_p);

enum class ObeMode { FirstOrder, FullObe };

struct StorageOptions {
    int nz = 200;                   // spatial cells
    ObeMode mode = ObeMode::FirstOrder;
    double rel_tol = 1e-8;
    int n_record = 4096;            // output samples (power of two)
    double t_end_margin = -1.0;     // extra window after retrieval; < 0: auto
    std::optional<DecayModel> hold_decay;  // motional decay applied to the spin wave
};

StorageResult simulate_storage(const GaussianPulse& pulse, const MediumParams& medium,
                               const FieldParams& field, const StorageProtocol& protocol,
                               const StorageOptions& opts = {});

struct OdSweepRow {
    double optical_depth = 0.0;
    double omega_c = 0.0;
    double gamma21_eff = 0.0;
    double gamma31 = 0.0;
    double eta = 0.0;
};

// gamma31(D) model; for the N-type branch it is also used as gamma41(D).
using GammaModel = std::function<double(double)>;

// Storage efficiency versus optical depth at fixed zeta and t_p: the
// control is solved from zeta t_p = D/omega_c^2, the efficiency from the
// closed-form transmission; the N-type branch uses the effective
// power-dependent decoherence rate.
std::vector<OdSweepRow> se_vs_od_sweep(const std::vector<double>& od_list, Scheme scheme,
                                       double t_p, double zeta, const GammaModel& gamma31_of_d,
                                       double gamma0, double delta_s, double epsilon_switch);

}  // namespace eitmem::storage
