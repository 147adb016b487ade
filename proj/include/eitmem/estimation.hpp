#pragma once

// Parameter extraction: joint fitting of EIT spectra and slow-light
// traces, plus the empirical gamma31(D) models.

#include <optional>

#include <Eigen/Dense>

#include "eitmem/units.hpp"

namespace eitmem::fit {

using Eigen::MatrixXd;

// Empirical optical-coherence decay rate versus optical depth; the N-type
// branch shares the value between gamma31 and gamma41.
double gamma31_model(double optical_depth, Scheme scheme);

struct TraceData {
    ArrayXd t;
    ArrayXd input_intensity;
    ArrayXd output_intensity;
};

struct MeasuredDataset {
    ArrayXd delta_p;       // spectrum abscissa (Gamma)
    ArrayXd transmission;  // spectrum ordinate
    ArrayXd sigma;         // per-point standard deviation
    TraceData trace;
    Scheme scheme = Scheme::LambdaD1;
    double t_p = 0.0;      // input-pulse intensity FWHM (1/Gamma)

    void validate() const;
};

struct ValueInterval {
    double value = 0.0;
    double two_sigma = 0.0;

    bool contains(double x) const { return std::abs(x - value) <= two_sigma; }
};

// How the N-type fit treats the power-dependent resonance shift: either
// delta_c floats inside the four-level lineshape, or it is extracted with
// the Lambda lineshape first and the four-level fit runs with delta_c = 0.
enum class NTypeShiftMode { ShiftInModel, LambdaShiftThenZero };

struct FitConfig {
    double gamma31_assumed = 0.8;  // spectrum-only fits determine products D*gamma
    std::optional<double> fix_gamma31;  // pin gamma31 in the joint fit
    double delta_s = 0.0;          // required for N-type
    double epsilon_switch = 0.0;
    NTypeShiftMode ntype_shift = NTypeShiftMode::LambdaShiftThenZero;
    int multistart = 5;
    std::uint64_t seed = 1;
};

struct SpectrumFit {
    ValueInterval omega_c, delta_c, d_gamma21, d_gamma31;
    MatrixXd covariance;  // of (omega_c, delta_c, d_gamma21, d_gamma31)
    double chi2 = 0.0;
    std::vector<std::string> warnings;
};

SpectrumFit fit_spectrum(const MeasuredDataset& data, const FitConfig& cfg = {});

struct FitResult {
    ValueInterval optical_depth, omega_c, gamma21, delta_c, gamma31;
    double d_gamma21 = 0.0;   // products from the joint solution
    double d_gamma31 = 0.0;
    double consistency = 0.0; // relative D*gamma31 discrepancy between routes
    SpectrumFit stage1;
    double trace_t_d = 0.0, trace_beta = 0.0, trace_eta = 0.0;
    double chi2 = 0.0;
    std::vector<std::string> warnings;
};

// Stage 1: spectral fit. Stage 2: (T_d, beta, eta_tran) from the trace,
// inverted for (D, gamma21, gamma31) against the full spectral-propagation
// model. Stage 3: D*gamma31 consistency check (15% advisory threshold).
FitResult fit_joint(const MeasuredDataset& dataset, const FitConfig& cfg = {});

struct NoiseModel {
    double sigma_transmission = 0.0;   // absolute, per spectrum point
    double sigma_trace_rel = 0.0;      // relative to the trace intensity peak
};

struct TrueParams {
    double optical_depth = 0.0;
    double omega_c = 0.0;
    double gamma21 = 0.0;
    double delta_c = 0.0;
    double gamma31 = 0.0;
    double t_p = 0.0;
    Scheme scheme = Scheme::LambdaD1;
    double delta_s = 0.0;
    double epsilon_switch = 0.0;
};

// Forward-model dataset with seeded Gaussian noise; bit-reproducible for
// a fixed seed.
MeasuredDataset synth_dataset(const TrueParams& params, const NoiseModel& noise,
                              std::uint64_t seed);

// Slow-light trace features used by the joint fit.
struct TraceFeatures {
    double t_d = 0.0;
    double beta = 0.0;
    double eta = 0.0;
    double sigma_t_d = 0.0;
    double sigma_beta = 0.0;
    double sigma_eta = 0.0;
};

TraceFeatures extract_trace_features(const TraceData& trace);

}  // namespace eitmem::fit
