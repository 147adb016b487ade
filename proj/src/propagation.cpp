#include "eitmem/propagation.hpp"

#include <unsupported/Eigen/FFT>

namespace eitmem::prop {

namespace {

constexpr double kSpeedOfLight = 2.99792458e8;  // m/s

double rms_width(const SampledWaveform& w) {
    const ArrayXd intensity = w.amplitude.abs2();
    const double norm = intensity.sum();
    if (norm <= 0.0) return 0.0;
    const double c = (w.t * intensity).sum() / norm;
    return std::sqrt(((w.t - c).square() * intensity).sum() / norm);
}

}  // namespace

ArrayXcd transfer_function(const ArrayXd& omega_grid, const MediumParams& medium,
                           const FieldParams& field, const PropagationOptions& opts) {
    const MediumParams p = medium.resolved();
    ArrayXcd h(omega_grid.size());
    const bool ntype = p.scheme == Scheme::NTypeD2;
    for (Eigen::Index k = 0; k < omega_grid.size(); ++k) {
        const double w = omega_grid[k];
        Complex g = ntype ? spectra::ntype_response(w, p, field)
                          : spectra::lambda_response(w, p, field);
        if (opts.include_vacuum_delay) {
            // L/c in Gamma-normalized time would need the unit system; the
            // grid carries Gamma units, so express the vacuum delay there.
            // Callers enabling this must set medium.length in meters and use
            // Gamma from the D1 line unless stated otherwise.
            const double gamma_rad = Transition::cesium_d1().gamma_sp;
            const double lc = p.length / kSpeedOfLight * gamma_rad;
            g += Complex(0.0, w * lc);
        }
        h[k] = std::exp(g);
    }
    return h;
}

PropagationResult propagate_pulse(const SampledWaveform& input, const MediumParams& medium,
                                  const FieldParams& field, const PropagationOptions& opts) {
    input.validate();
    medium.validate();
    field.validate();

    const Eigen::Index n = input.t.size();
    const double dt = input.dt();
    const double domega = 2.0 * kPi / (n * dt);

    // Transfer factor at the negated FFT bin frequencies: the medium response
    // is written for e^{+i w t} spectral kernels, the FFT uses e^{-i w t}.
    ArrayXd neg_omega(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double kk = (k <= n / 2) ? static_cast<double>(k) : static_cast<double>(k - n);
        neg_omega[k] = -kk * domega;
    }
    const ArrayXcd h = transfer_function(neg_omega, medium, field, opts);

    Eigen::FFT<double> fft;
    Eigen::VectorXcd time_in = input.amplitude.matrix();
    Eigen::VectorXcd freq(n);
    fft.fwd(freq, time_in);
    freq.array() *= h;
    Eigen::VectorXcd time_out(n);
    fft.inv(time_out, freq);

    PropagationResult r;
    r.output.t = input.t;
    r.output.amplitude = time_out.array();

    const double e_in = input.energy();
    const double e_out = r.output.energy();
    if (e_in <= 0.0) throw ValidationError("propagate_pulse: zero-energy input");
    r.eta_tran = e_out / e_in;

    // aliasing guard: energy piling up at the window end means the grid is
    // too short for the delayed pulse
    const Eigen::Index tail = std::max<Eigen::Index>(1,
        static_cast<Eigen::Index>(opts.alias_tail_fraction * n));
    const ArrayXd intensity = r.output.amplitude.abs2();
    const double tail_energy = intensity.tail(tail).sum() * dt;
    if (e_out > 0.0 && tail_energy > opts.alias_energy_tolerance * e_out)
        throw NumericalError("propagate_pulse: output energy reaches the window "
                             "edge; enlarge the time window");

    r.t_d = r.output.centroid() - input.centroid();
    const double w_in = rms_width(input);
    const double w_out = rms_width(r.output);
    r.beta = w_in > 0.0 ? w_out / w_in : 1.0;
    // intensity FWHM of a Gaussian = sqrt(8 ln2) x rms width
    const double t_p_eff = w_in * std::sqrt(8.0 * kLn2);
    r.zeta = t_p_eff > 0.0 ? r.t_d / t_p_eff : 0.0;
    return r;
}

PropagationResult propagate_gaussian(const GaussianPulse& pulse, const MediumParams& medium,
                                     const FieldParams& field,
                                     const PropagationOptions& opts) {
    const TimeGrid g = make_grid(pulse, medium, field, opts.grid);
    PropagationResult r = propagate_pulse(sample_pulse(pulse, g.t), medium, field, opts);
    if (field.omega_c > 0.0 && pulse.omega_p0 > 0.1 * field.omega_c)
        r.warnings.push_back("weak-probe assumption strained: omega_p0 > 0.1 omega_c");
    return r;
}

PropagationResult analytic_slow_light(const GaussianPulse& pulse, const MediumParams& medium,
                                      const FieldParams& field,
                                      const PropagationOptions& opts) {
    pulse.validate();
    const MediumParams p = medium.resolved();
    if (field.delta_p != 0.0 || field.delta_c != 0.0)
        throw ValidationError("analytic_slow_light: requires delta_p = delta_c = 0");
    if (!(field.omega_c > 0.0))
        throw ValidationError("analytic_slow_light: requires a nonzero control field "
                              "(no EIT window otherwise)");

    PropagationResult r;
    const double wc2 = sqr(field.omega_c);
    if (wc2 < 100.0 * 4.0 * p.gamma21 * p.gamma31)
        r.warnings.push_back("analytic_slow_light: omega_c^2 not >> 4 gamma21 gamma31");

    r.t_d = p.optical_depth / wc2;
    if (opts.include_vacuum_delay) {
        const double gamma_rad = Transition::cesium_d1().gamma_sp;
        r.t_d += p.length / kSpeedOfLight * gamma_rad;
    }
    r.beta = std::sqrt(1.0 + 32.0 * kLn2 * p.optical_depth * p.gamma31 /
                              (sqr(pulse.t_p) * sqr(wc2)));
    r.zeta = r.t_d / pulse.t_p;
    r.eta_tran = std::exp(-2.0 * p.gamma21 * p.optical_depth / wc2) / r.beta;

    const TimeGrid g = make_grid(pulse, medium, field, opts.grid);
    r.output.t = g.t;
    r.output.amplitude.resize(g.t.size());
    const double amp0 = pulse.omega_p0 / r.beta *
                        std::exp(-p.gamma21 * p.optical_depth / wc2);
    for (Eigen::Index i = 0; i < g.t.size(); ++i) {
        const double u = (g.t[i] - pulse.t0 - r.t_d) / (r.beta * pulse.t_p);
        r.output.amplitude[i] = Complex(amp0 * std::exp(-2.0 * kLn2 * u * u), 0.0);
    }
    return r;
}

double eta_tran(double optical_depth, double zeta, double gamma21, double gamma31,
                double t_p) {
    if (!(optical_depth > 0.0))
        throw ValidationError("eta_tran: optical depth must be > 0");
    const double t_d = zeta * t_p;
    const double beta2 = 1.0 + 32.0 * kLn2 * gamma31 * sqr(zeta) / optical_depth;
    const double form_a = std::exp(-2.0 * gamma21 * t_d) / std::sqrt(beta2);

    // same result through the EIT-bandwidth identity
    const double omega_c2 = optical_depth / t_d;
    const double bw = std::sqrt(kLn2 / 2.0) * omega_c2 / std::sqrt(optical_depth * gamma31);
    const double q = 4.0 * kLn2 / (t_p * bw);
    const double form_b = std::exp(-2.0 * gamma21 * t_d) / std::sqrt(1.0 + q * q);
    if (std::abs(form_a - form_b) > 1e-9 * std::max(form_a, form_b))
        throw NumericalError("eta_tran: closed forms disagree");
    return form_a;
}

}  // namespace eitmem::prop
