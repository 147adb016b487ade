#pragma once

// Parameter containers and unit normalization.
//
// All internal math runs in Gamma-normalized units: rates and Rabi
// frequencies in units of the excited-state decay rate Gamma, times in
// units of 1/Gamma. SI values appear only at the config/report boundary.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "eitmem/errors.hpp"

namespace eitmem {

using Complex = std::complex<double>;
using Eigen::ArrayXcd;
using Eigen::ArrayXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kLn2 = 0.69314718055994530942;

inline double sqr(double x) { return x * x; }

// Relative dipole strength of the switching transition (N-type D2 scheme).
inline double epsilon_switch_default() { return std::sqrt(48.0 / 7.0); }
// Pump/control Rabi ratio for the double-Lambda FWM configuration.
inline double epsilon_fwm_default() { return -std::sqrt(7.0); }

enum class Scheme { LambdaD1, NTypeD2, DoubleLambdaFWM };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& name);

// One optical line: spontaneous decay rate (rad/s) and wavelength (m).
struct Transition {
    double gamma_sp = 0.0;
    double wavelength = 0.0;

    static Transition cesium_d1();  // Gamma = 2pi x 4.575 MHz, 894.6 nm
    static Transition cesium_d2();  // Gamma = 2pi x 5.234 MHz, 852 nm

    void validate() const;
};

// Converts between SI and Gamma-normalized units for a given transition.
// Frequencies are divided by Gamma, times multiplied by Gamma; the
// round trip is exact up to floating-point rounding.
class UnitSystem {
public:
    explicit UnitSystem(Transition t) : tr_(t) { tr_.validate(); }

    const Transition& transition() const { return tr_; }
    double gamma() const { return tr_.gamma_sp; }          // rad/s
    double time_unit_s() const { return 1.0 / tr_.gamma_sp; }

    double freq_mhz_to_gamma(double mhz) const { return 2.0 * kPi * mhz * 1e6 / tr_.gamma_sp; }
    double freq_ghz_to_gamma(double ghz) const { return freq_mhz_to_gamma(ghz * 1e3); }
    double gamma_to_freq_mhz(double w) const { return w * tr_.gamma_sp / (2.0 * kPi * 1e6); }

    double time_ns_to_gamma(double ns) const { return ns * 1e-9 * tr_.gamma_sp; }
    double time_us_to_gamma(double us) const { return us * 1e-6 * tr_.gamma_sp; }
    double gamma_time_to_ns(double t) const { return t / tr_.gamma_sp * 1e9; }
    double gamma_time_to_us(double t) const { return t / tr_.gamma_sp * 1e6; }

private:
    Transition tr_;
};

// Medium parameters in Gamma units. Decay branches Gamma_ij are
// population decay rates; gamma_ij are coherence decay rates. Fields
// left negative pick up their documented defaults in resolved().
struct MediumParams {
    double optical_depth = 0.0;  // D
    double length = 0.014;       // m; FWM phase matching only
    double gamma21 = 0.0;
    double gamma31 = 0.5;
    double gamma32 = -1.0;  // default: gamma31
    double gamma41 = -1.0;  // default: gamma31
    double gamma42 = -1.0;  // default: gamma41
    double gamma43 = -1.0;  // default: (Gamma3 + Gamma4)/2
    double Gamma31 = 0.5;   // branching defaults 1:1
    double Gamma32 = 0.5;
    double Gamma41 = 0.5;
    double Gamma42 = 0.5;
    Scheme scheme = Scheme::LambdaD1;
    double delta_s = 0.0;    // switching detuning; D2 preset: -2pi x 251.09 MHz
    double delta_hf = 0.0;   // ground hyperfine splitting (9.192 GHz)
    double epsilon_switch = 0.0;
    double epsilon_fwm = 0.0;

    double Gamma3() const { return Gamma31 + Gamma32; }
    double Gamma4() const { return Gamma41 + Gamma42; }

    // Copy with unset rates filled in from the defaulting rules.
    MediumParams resolved() const;
    void validate() const;

    // Presets with scheme-appropriate splittings for the given transition.
    static MediumParams lambda_d1(double optical_depth);
    static MediumParams ntype_d2(double optical_depth);
    static MediumParams double_lambda_fwm(double optical_depth);
};

struct FieldParams {
    double omega_c = 0.0;  // control Rabi frequency (Gamma)
    double delta_c = 0.0;  // control detuning (Gamma)
    double delta_p = 0.0;  // probe carrier detuning (Gamma)
    double omega_d = 0.0;  // pump Rabi frequency (Gamma)
    double delta_d = 0.0;  // pump detuning (Gamma)
    double theta = 0.0;    // control-probe angle (rad)

    void validate() const;
};

// Input probe pulse, Omega_p(t) = omega_p0 * exp(-2 ln2 (t-t0)^2 / t_p^2);
// t_p is the intensity FWHM.
struct GaussianPulse {
    double omega_p0 = 0.0;
    double t_p = 0.0;
    double t0 = 0.0;

    double amplitude(double t) const {
        const double u = (t - t0) / t_p;
        return omega_p0 * std::exp(-2.0 * kLn2 * u * u);
    }
    double energy() const {  // integral of |Omega_p|^2
        return omega_p0 * omega_p0 * t_p * std::sqrt(kPi / (4.0 * kLn2));
    }
    void validate() const;
};

// Discretized complex envelope on a uniform time grid.
struct SampledWaveform {
    ArrayXd t;
    ArrayXcd amplitude;

    double dt() const { return t.size() > 1 ? t[1] - t[0] : 0.0; }
    double energy() const;    // trapezoid of |amplitude|^2
    double centroid() const;  // intensity-weighted mean time
    void validate() const;
};

struct GridOptions {
    int n_samples = 0;             // 0: choose automatically (power of two)
    double window = 0.0;           // 0: choose automatically
    double resolution_factor = 50.0;  // freq resolution <= eit bandwidth / this
    double nyquist_factor = 20.0;     // nyquist >= this x pulse spectral fwhm
};

struct TimeGrid {
    ArrayXd t;
    ArrayXd omega;  // conjugate FFT frequencies, standard ordering
    double dt = 0.0;
    double domega = 0.0;
};

// Time/frequency grid sized for spectral propagation: the window covers
// [t0 - 4 t_p, t0 + t_d + 4 beta t_p], the frequency resolution resolves
// the EIT window and the Nyquist limit clears the pulse spectrum.
TimeGrid make_grid(const GaussianPulse& pulse, const MediumParams& medium,
                   const FieldParams& field, const GridOptions& opts = {});

// Sample the analytic pulse onto a grid.
SampledWaveform sample_pulse(const GaussianPulse& pulse, const ArrayXd& t);

double next_pow2(double n);

}  // namespace eitmem
