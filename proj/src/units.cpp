#include "eitmem/units.hpp"

#include <algorithm>
#include <cmath>

namespace eitmem {

std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::LambdaD1: return "lambda-d1";
        case Scheme::NTypeD2: return "ntype-d2";
        case Scheme::DoubleLambdaFWM: return "double-lambda-fwm";
    }
    return "?";
}

Scheme scheme_from_string(const std::string& name) {
    if (name == "lambda-d1") return Scheme::LambdaD1;
    if (name == "ntype-d2") return Scheme::NTypeD2;
    if (name == "double-lambda-fwm") return Scheme::DoubleLambdaFWM;
    throw ValidationError("unknown scheme '" + name +
                          "' (expected lambda-d1, ntype-d2 or double-lambda-fwm)");
}

Transition Transition::cesium_d1() {
    return Transition{2.0 * kPi * 4.575e6, 894.6e-9};
}

Transition Transition::cesium_d2() {
    return Transition{2.0 * kPi * 5.234e6, 852.0e-9};
}

void Transition::validate() const {
    if (!(gamma_sp > 0.0)) throw ValidationError("transition: gamma_sp must be > 0");
    if (!(wavelength > 0.0)) throw ValidationError("transition: wavelength must be > 0");
}

MediumParams MediumParams::resolved() const {
    MediumParams p = *this;
    if (p.gamma32 < 0.0) p.gamma32 = p.gamma31;
    if (p.gamma41 < 0.0) p.gamma41 = p.gamma31;
    if (p.gamma42 < 0.0) p.gamma42 = p.gamma41;
    if (p.gamma43 < 0.0) p.gamma43 = 0.5 * (p.Gamma3() + p.Gamma4());
    return p;
}

void MediumParams::validate() const {
    auto nonneg = [](double v, const char* name) {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw ValidationError(std::string("medium: ") + name + " must be >= 0");
    };
    nonneg(optical_depth, "optical_depth");
    nonneg(gamma21, "gamma21");
    nonneg(gamma31, "gamma31");
    if (gamma32 >= 0.0) nonneg(gamma32, "gamma32");
    if (gamma41 >= 0.0) nonneg(gamma41, "gamma41");
    nonneg(Gamma31, "Gamma31");
    nonneg(Gamma32, "Gamma32");
    nonneg(Gamma41, "Gamma41");
    nonneg(Gamma42, "Gamma42");
    if (!(length > 0.0)) throw ValidationError("medium: length must be > 0");
    if (scheme == Scheme::NTypeD2 && delta_s == 0.0)
        throw ValidationError("medium: delta_s must be nonzero for the N-type scheme");
}

namespace {
// Switching detuning of the D2 scheme in units of Gamma_D2. The control
// sits 251.09 MHz red of the switching transition, hence the sign.
double d2_delta_s() {
    return -2.0 * kPi * 251.09e6 / Transition::cesium_d2().gamma_sp;
}
}  // namespace

MediumParams MediumParams::lambda_d1(double optical_depth) {
    MediumParams p;
    p.optical_depth = optical_depth;
    p.scheme = Scheme::LambdaD1;
    p.delta_hf = 2.0 * kPi * 9.192631770e9 / Transition::cesium_d1().gamma_sp;
    return p;
}

MediumParams MediumParams::ntype_d2(double optical_depth) {
    MediumParams p;
    p.optical_depth = optical_depth;
    p.scheme = Scheme::NTypeD2;
    p.gamma31 = 0.8;
    p.delta_s = d2_delta_s();
    p.delta_hf = 2.0 * kPi * 9.192631770e9 / Transition::cesium_d2().gamma_sp;
    p.epsilon_switch = epsilon_switch_default();
    return p;
}

MediumParams MediumParams::double_lambda_fwm(double optical_depth) {
    MediumParams p = lambda_d1(optical_depth);
    p.scheme = Scheme::DoubleLambdaFWM;
    p.epsilon_fwm = epsilon_fwm_default();
    return p;
}

void FieldParams::validate() const {
    if (!(omega_c >= 0.0)) throw ValidationError("field: omega_c must be >= 0");
    if (!(theta >= 0.0 && theta < kPi / 2.0))
        throw ValidationError("field: theta must lie in [0, pi/2)");
}

void GaussianPulse::validate() const {
    if (!(t_p > 0.0)) throw ValidationError("pulse: t_p must be > 0");
    if (!(omega_p0 >= 0.0)) throw ValidationError("pulse: omega_p0 must be >= 0");
}

double SampledWaveform::energy() const {
    if (t.size() < 2) return 0.0;
    const ArrayXd intensity = amplitude.abs2();
    double sum = intensity.sum() - 0.5 * (intensity[0] + intensity[intensity.size() - 1]);
    return sum * dt();
}

double SampledWaveform::centroid() const {
    const ArrayXd intensity = amplitude.abs2();
    const double norm = intensity.sum();
    if (norm <= 0.0) throw NumericalError("waveform centroid of zero-energy signal");
    return (t * intensity).sum() / norm;
}

void SampledWaveform::validate() const {
    const auto n = t.size();
    if (n < 2 || n != amplitude.size())
        throw ValidationError("waveform: grid and amplitude sizes mismatch");
    if ((n & (n - 1)) != 0)
        throw ValidationError("waveform: length must be a power of two");
    const double step = t[1] - t[0];
    for (Eigen::Index i = 1; i < n; ++i) {
        if (std::abs((t[i] - t[i - 1]) - step) > 1e-9 * std::max(1.0, std::abs(step)))
            throw ValidationError("waveform: time grid must be uniform");
    }
}

double next_pow2(double n) {
    double p = 2.0;
    while (p < n) p *= 2.0;
    return p;
}

TimeGrid make_grid(const GaussianPulse& pulse, const MediumParams& medium,
                   const FieldParams& field, const GridOptions& opts) {
    pulse.validate();
    const MediumParams p = medium.resolved();
    const double D = p.optical_depth;
    const double wc2 = sqr(field.omega_c);

    double t_d = 0.0, beta = 1.0;
    if (D > 0.0 && wc2 > 0.0) {
        t_d = D / wc2;
        beta = std::sqrt(1.0 + 32.0 * kLn2 * D * p.gamma31 / (sqr(pulse.t_p) * sqr(wc2)));
    }

    double window = (4.0 + 4.0 * beta) * pulse.t_p + t_d;
    if (D > 0.0 && wc2 > 0.0 && p.gamma31 > 0.0) {
        // resolve the transparency window in frequency space
        const double bw = std::sqrt(kLn2 / 2.0) * wc2 / std::sqrt(D * p.gamma31);
        window = std::max(window, 2.0 * kPi * opts.resolution_factor / bw);
    }
    if (opts.window > 0.0) {
        if (opts.window < window)
            throw ValidationError("grid: requested window too short for pulse + delay");
        window = opts.window;
    }

    const double dt_max = kPi * pulse.t_p / (opts.nyquist_factor * 4.0 * kLn2);
    int n = opts.n_samples;
    if (n == 0) {
        n = static_cast<int>(next_pow2(std::max(64.0, window / dt_max)));
    } else {
        if ((n & (n - 1)) != 0) throw ValidationError("grid: n_samples must be a power of two");
        if (window / n > dt_max)
            throw ValidationError("grid: n_samples too small for the required window and "
                                  "Nyquist margin");
    }

    TimeGrid g;
    g.dt = window / n;
    g.domega = 2.0 * kPi / window;
    const double t_start = pulse.t0 - 4.0 * pulse.t_p;
    g.t = t_start + g.dt * ArrayXd::LinSpaced(n, 0, n - 1);
    g.omega.resize(n);
    for (int k = 0; k < n; ++k) {
        const int kk = (k <= n / 2) ? k : k - n;
        g.omega[k] = kk * g.domega;
    }
    return g;
}

SampledWaveform sample_pulse(const GaussianPulse& pulse, const ArrayXd& t) {
    SampledWaveform w;
    w.t = t;
    w.amplitude.resize(t.size());
    for (Eigen::Index i = 0; i < t.size(); ++i)
        w.amplitude[i] = Complex(pulse.amplitude(t[i]), 0.0);
    return w;
}

}  // namespace eitmem
