#include "eitmem/storage.hpp"

#include <unsupported/Eigen/FFT>

#include "eitmem/ode.hpp"

namespace eitmem::storage {

void StorageProtocol::validate() const {
    if (enabled && !(t_on > t_off))
        throw ValidationError("protocol: t_on must be later than t_off");
}

void DecayModel::validate() const {
    if (!(A >= 0.0 && A <= 1.0)) throw ValidationError("decay: A must lie in [0, 1]");
    if (!(tau > 0.0)) throw ValidationError("decay: tau must be > 0");
    if (!(gamma21 >= 0.0)) throw ValidationError("decay: gamma21 must be >= 0");
}

double eta_comp(double kappa, double zeta, double beta) {
    if (!(beta >= 1.0)) throw ValidationError("eta_comp: beta must be >= 1");
    const double s = 2.0 * std::sqrt(kLn2);
    // leading edge already transmitted, trailing edge not yet inside
    return 0.5 * (std::erf(s * kappa) + std::erf(s * (zeta - kappa) / beta));
}

double eta_stored(double t_storage, const DecayModel& decay) {
    decay.validate();
    if (!(t_storage >= 0.0)) throw ValidationError("eta_stored: t_storage must be >= 0");
    const double g = t_storage / decay.tau;
    return decay.A * std::exp(-g * g) * std::exp(-2.0 * decay.gamma21 * t_storage);
}

TbpResult tbp_at_half(const DecayModel& decay, double t_p) {
    decay.validate();
    if (!(t_p > 0.0)) throw ValidationError("tbp_at_half: t_p must be > 0");
    if (!(decay.A > 0.5))
        throw ValidationError("tbp_at_half: 50% efficiency unreachable with A <= 0.5");
    TbpResult r;
    const double t_half = decay.tau * std::sqrt(std::log(2.0 * decay.A));
    r.analytic = t_half / t_p;

    // with the exponential component on, solve eta_stored(t) = 1/2 by bisection
    double lo = 0.0, hi = t_half;
    while (eta_stored(hi, decay) > 0.5) hi *= 1.5;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (eta_stored(mid, decay) > 0.5 ? lo : hi) = mid;
    }
    r.numeric = 0.5 * (lo + hi) / t_p;
    return r;
}

namespace {

constexpr Complex kI(0.0, 1.0);

using ControlFn = std::function<double(double)>;

// Semi-discrete Maxwell-Bloch system in the retarded frame. The field is
// slaved to the coherences: Omega_p(xi) follows from the boundary value by
// trapezoid integration of i (D/2) sigma31 along the medium.
class StorageSim {
public:
    StorageSim(const GaussianPulse& pulse, const MediumParams& medium,
               const FieldParams& field, const StorageOptions& opts)
        : pulse_(pulse), p_(medium.resolved()), f_(field), opts_(opts), nz_(opts.nz) {
        dxi_ = 1.0 / nz_;
        omega_p_.resize(nz_ + 1);
        trace_prev_ = ArrayXd::Ones(nz_ + 1);
    }

    int state_size() const {
        return opts_.mode == ObeMode::FirstOrder ? 2 * (nz_ + 1) : 6 * (nz_ + 1);
    }

    void set_control(ControlFn fn) { control_ = std::move(fn); }
    void set_input_on(bool on) { input_on_ = on; }

    Complex input(double t) const {
        return input_on_ ? Complex(pulse_.amplitude(t), 0.0) : Complex(0.0, 0.0);
    }

    void field_from_state(const ode::State& y, double t) {
        const auto s31 = sigma31(y);
        omega_p_[0] = input(t);
        const Complex k = kI * 0.5 * p_.optical_depth * 0.5 * dxi_;
        for (int j = 0; j < nz_; ++j)
            omega_p_[j + 1] = omega_p_[j] + k * (s31[j] + s31[j + 1]);
    }

    Eigen::Map<const ArrayXcd> sigma31(const ode::State& y) const {
        const int off = opts_.mode == ObeMode::FirstOrder ? 0 : 4 * (nz_ + 1);
        return {y.data() + off, nz_ + 1};
    }
    Eigen::Map<const ArrayXcd> sigma21(const ode::State& y) const {
        const int off = opts_.mode == ObeMode::FirstOrder ? (nz_ + 1) : 3 * (nz_ + 1);
        return {y.data() + off, nz_ + 1};
    }

    void rhs(double t, const ode::State& y, ode::State& dy) {
        if (dy.size() != y.size()) dy.resize(y.size());
        field_from_state(y, t);
        const double wc = control_(t);
        const int n = nz_ + 1;
        const double d2 = f_.delta_p - f_.delta_c;
        if (opts_.mode == ObeMode::FirstOrder) {
            auto s31 = y.segment(0, n);
            auto s21 = y.segment(n, n);
            dy.segment(0, n) = (kI * f_.delta_p - p_.gamma31) * s31 +
                               (kI * 0.5 * wc) * s21 + kI * 0.5 * omega_p_;
            dy.segment(n, n) = (kI * d2 - p_.gamma21) * s21 + (kI * 0.5 * wc) * s31;
        } else {
            auto r11 = y.segment(0 * n, n);
            auto r22 = y.segment(1 * n, n);
            auto r33 = y.segment(2 * n, n);
            auto r21 = y.segment(3 * n, n);
            auto r31 = y.segment(4 * n, n);
            auto r32 = y.segment(5 * n, n);
            const ArrayXcd& wp = omega_p_;
            const ArrayXcd wpc = wp.conjugate();
            dy.segment(0 * n, n) =
                p_.Gamma31 * r33 + kI * 0.5 * (wpc * r31 - wp * r31.conjugate());
            dy.segment(1 * n, n) =
                p_.Gamma32 * r33 + kI * 0.5 * wc * (r32 - r32.conjugate());
            dy.segment(2 * n, n) = -p_.Gamma3() * r33 +
                                   kI * 0.5 * (wp * r31.conjugate() - wpc * r31 +
                                               wc * (r32.conjugate() - r32));
            dy.segment(3 * n, n) = (kI * d2 - p_.gamma21) * r21 +
                                   kI * 0.5 * (wc * r31 - wp * r32.conjugate());
            dy.segment(4 * n, n) = (kI * f_.delta_p - p_.gamma31) * r31 +
                                   kI * 0.5 * (wp * (r11 - r33) + wc * r21);
            dy.segment(5 * n, n) = (kI * f_.delta_c - p_.gamma32) * r32 +
                                   kI * 0.5 * (wp * r21.conjugate() + wc * (r22 - r33));
        }
    }

    ode::State initial_state() const {
        ode::State y = ode::State::Zero(state_size());
        if (opts_.mode == ObeMode::FullObe) y.segment(0, nz_ + 1) = Complex(1.0, 0.0);
        return y;
    }

    Complex output_field(const ode::State& y, double t) {
        field_from_state(y, t);
        return omega_p_[nz_];
    }

    // analytic evolution across the hold interval: only the ground-state
    // coherence survives; everything optical rings down
    void hold_update(ode::State& y, double dt_hold, double storage_time) {
        const int n = nz_ + 1;
        const double d2 = f_.delta_p - f_.delta_c;
        Complex m21 = std::exp((kI * d2 - p_.gamma21) * dt_hold);
        if (opts_.hold_decay) {
            const double g = storage_time / opts_.hold_decay->tau;
            m21 *= std::exp(-0.5 * g * g);
            m21 *= std::exp(-opts_.hold_decay->gamma21 * storage_time);
        }
        const Complex m31 = std::exp((kI * f_.delta_p - p_.gamma31) * dt_hold);
        if (opts_.mode == ObeMode::FirstOrder) {
            y.segment(0, n) *= m31;
            y.segment(n, n) *= m21;
        } else {
            const double e3 = std::exp(-p_.Gamma3() * dt_hold);
            const double g3 = p_.Gamma3();
            const double f31 = g3 > 0.0 ? p_.Gamma31 / g3 * (1.0 - e3) : 0.0;
            const double f32 = g3 > 0.0 ? p_.Gamma32 / g3 * (1.0 - e3) : 0.0;
            y.segment(0, n) += f31 * y.segment(2 * n, n);
            y.segment(1 * n, n) += f32 * y.segment(2 * n, n);
            y.segment(2 * n, n) *= e3;
            y.segment(3 * n, n) *= m21;
            y.segment(4 * n, n) *= m31;
            y.segment(5 * n, n) *= std::exp((kI * f_.delta_c - p_.gamma32) * dt_hold);
        }
        hold_multiplier_sq_ = std::norm(m21);
    }

    // field-equivalent excitation stored in the medium
    double stored_excitation(const ode::State& y) const {
        const ArrayXd a = sigma31(y).abs2() + sigma21(y).abs2();
        const double s = (a.sum() - 0.5 * (a[0] + a[nz_])) * dxi_;
        return p_.optical_depth * s;
    }

    double hold_multiplier_sq() const { return hold_multiplier_sq_; }
    double max_trace_step() const { return max_trace_step_; }

    // integrate [t0, t1] recording the output field on `times`
    void run_segment(double t0, double t1, ode::State& y, const ArrayXd& times,
                     ArrayXcd& out, double max_dt) {
        if (t1 <= t0) return;
        ode::AdaptiveOptions aopts;
        aopts.rel_tol = opts_.rel_tol;
        aopts.abs_tol = opts_.rel_tol * 1e-2 * std::max(1e-6, pulse_.omega_p0);
        aopts.h_init = std::min(max_dt, 1e-3);
        aopts.h_max = max_dt;
        auto f = [this](double t, const ode::State& s, ode::State& ds) { rhs(t, s, ds); };
        std::function<void(double, const ode::State&)> observe;
        if (opts_.mode == ObeMode::FullObe) {
            const int n = nz_ + 1;
            observe = [this, n](double, const ode::State& s) {
                const ArrayXd tr = s.segment(0, n).real() + s.segment(n, n).real() +
                                   s.segment(2 * n, n).real();
                max_trace_step_ =
                    std::max(max_trace_step_, (tr - trace_prev_).abs().maxCoeff());
                trace_prev_ = tr;
            };
        }
        double t = t0;
        for (Eigen::Index i = 0; i < times.size(); ++i) {
            if (times[i] < t0 || times[i] > t1) continue;
            if (times[i] > t) {
                ode::dormand_prince(f, t, times[i], y, aopts, observe);
                t = times[i];
            }
            out[i] = output_field(y, t);
        }
        if (t < t1) ode::dormand_prince(f, t, t1, y, aopts, observe);
    }

private:
    GaussianPulse pulse_;
    MediumParams p_;
    FieldParams f_;
    StorageOptions opts_;
    int nz_;
    bool input_on_ = true;
    double dxi_ = 0.0;
    ArrayXcd omega_p_;
    ControlFn control_ = [](double) { return 0.0; };
    double hold_multiplier_sq_ = 1.0;
    double max_trace_step_ = 0.0;
    ArrayXd trace_prev_;
};

ArrayXd linspace(double a, double b, int n) { return ArrayXd::LinSpaced(n, a, b); }

double spectral_tail_fraction(const SampledWaveform& w, double cutoff) {
    if (w.t.size() < 2 || w.energy() <= 0.0) return 0.0;
    Eigen::FFT<double> fft;
    Eigen::VectorXcd freq(w.t.size());
    Eigen::VectorXcd time = w.amplitude.matrix();
    fft.fwd(freq, time);
    const double domega = 2.0 * kPi / (w.dt() * w.t.size());
    double total = 0.0, tail = 0.0;
    for (Eigen::Index k = 0; k < freq.size(); ++k) {
        const double kk = (k <= freq.size() / 2) ? double(k) : double(k - freq.size());
        const double e = std::norm(freq[k]);
        total += e;
        if (std::abs(kk * domega) > cutoff) tail += e;
    }
    return total > 0.0 ? tail / total : 0.0;
}

// half-cosine switch-off/on profiles
ControlFn ramp_down(double wc, double t_start, double duration) {
    return [=](double t) {
        if (t <= t_start) return wc;
        if (t >= t_start + duration) return 0.0;
        return wc * 0.5 * (1.0 + std::cos(kPi * (t - t_start) / duration));
    };
}

ControlFn ramp_up(double wc, double t_start, double duration) {
    return [=](double t) {
        if (t <= t_start) return 0.0;
        if (t >= t_start + duration) return wc;
        return wc * 0.5 * (1.0 - std::cos(kPi * (t - t_start) / duration));
    };
}

ControlFn constant(double wc) {
    return [=](double) { return wc; };
}

}  // namespace

StorageResult simulate_storage(const GaussianPulse& pulse, const MediumParams& medium,
                               const FieldParams& field, const StorageProtocol& protocol,
                               const StorageOptions& opts) {
    pulse.validate();
    medium.validate();
    field.validate();
    protocol.validate();
    if (opts.hold_decay) opts.hold_decay->validate();

    const MediumParams p = medium.resolved();
    const double wc = field.omega_c;
    const double t_d = (wc > 0.0) ? p.optical_depth / sqr(wc) : 0.0;
    const double beta = (wc > 0.0)
        ? std::sqrt(1.0 + 32.0 * kLn2 * p.optical_depth * p.gamma31 /
                          (sqr(pulse.t_p) * sqr(sqr(wc))))
        : 1.0;

    StorageResult res;
    if (wc > 0.0 && pulse.omega_p0 > 0.1 * wc)
        res.warnings.push_back("weak-probe assumption strained: omega_p0 > 0.1 omega_c");

    double ramp = protocol.ramp_duration;
    if (ramp < 0.0) ramp = protocol.ramp == RampShape::Smooth ? 0.1 * pulse.t_p : 0.0;
    if (protocol.ramp == RampShape::Step) ramp = 0.0;

    const double max_dt =
        std::min(pulse.t_p / 200.0, 0.02 / std::max({wc, p.gamma31, 1e-30}));

    const double t_start = pulse.t0 - 4.5 * pulse.t_p;
    const double margin = opts.t_end_margin >= 0.0 ? opts.t_end_margin : 2.0 * pulse.t_p;

    StorageSim sim(pulse, p, field, opts);

    if (!protocol.enabled) {
        // slow-light run: control held on for the whole window
        const double t_end = pulse.t0 + t_d + (4.0 * beta) * pulse.t_p + margin;
        ArrayXd times = linspace(t_start, t_end, opts.n_record);
        ArrayXcd out = ArrayXcd::Zero(opts.n_record);
        ode::State y = sim.initial_state();
        sim.set_control(constant(wc));
        sim.run_segment(t_start, t_end, y, times, out, max_dt);
        res.retrieved.t = times;
        res.retrieved.amplitude = out;
        res.eta_tran = res.retrieved.energy() / pulse.energy();
        res.eta_total = res.eta_tran;
        res.eta_comp = std::numeric_limits<double>::quiet_NaN();
        res.trace_error_per_step = sim.max_trace_step();
        return res;
    }

    const double t_off_abs = pulse.t0 + protocol.t_off;
    const double t_on_abs = pulse.t0 + protocol.t_on;
    if (t_off_abs <= t_start)
        throw ValidationError("protocol: t_off precedes the simulation window");
    // let the optical coherence ring down and the input tail pass before
    // freezing the spin wave
    const double settle = (p.gamma31 > 0.0) ? 5.0 / p.gamma31 : 0.0;
    double t_freeze = std::max(t_off_abs + ramp + settle, pulse.t0 + 4.0 * pulse.t_p);
    if (t_freeze > t_on_abs) t_freeze = t_on_abs;
    const double t_end = t_on_abs + ramp + t_d + (4.0 * beta) * pulse.t_p + margin;

    ode::State y = sim.initial_state();

    // write-in, switch-off, settling; output recorded as leakage
    ArrayXd t_leak = linspace(t_start, t_freeze, opts.n_record);
    ArrayXcd leak = ArrayXcd::Zero(opts.n_record);
    sim.set_control(constant(wc));
    sim.run_segment(t_start, t_off_abs, y, t_leak, leak, max_dt);
    if (ramp > 0.0) {
        sim.set_control(ramp_down(wc, t_off_abs, ramp));
        sim.run_segment(t_off_abs, std::min(t_off_abs + ramp, t_freeze), y, t_leak, leak,
                        max_dt);
    }
    sim.set_control(constant(0.0));
    sim.run_segment(std::min(t_off_abs + ramp, t_freeze), t_freeze, y, t_leak, leak,
                    max_dt);
    res.leaked.t = t_leak;
    res.leaked.amplitude = leak;

    res.spinwave = sim.sigma21(y);
    const double e_in = pulse.energy();
    res.eta_comp = sim.stored_excitation(y) / e_in;

    // hold interval, analytic
    sim.hold_update(y, t_on_abs - t_freeze, protocol.t_on - protocol.t_off);
    res.eta_stored = sim.hold_multiplier_sq();

    // retrieval
    sim.set_input_on(false);
    ArrayXd t_read = linspace(t_on_abs, t_end, opts.n_record);
    ArrayXcd read = ArrayXcd::Zero(opts.n_record);
    if (ramp > 0.0) {
        sim.set_control(ramp_up(wc, t_on_abs, ramp));
        sim.run_segment(t_on_abs, t_on_abs + ramp, y, t_read, read, max_dt);
    }
    sim.set_control(constant(wc));
    sim.run_segment(t_on_abs + ramp, t_end, y, t_read, read, max_dt);
    res.retrieved.t = t_read;
    res.retrieved.amplitude = read;

    res.eta_total = res.retrieved.energy() / e_in;
    res.trace_error_per_step = sim.max_trace_step();

    // eta_tran reference from a no-switch run of the same solver
    {
        StorageProtocol off = protocol;
        off.enabled = false;
        res.eta_tran = simulate_storage(pulse, medium, field, off, opts).eta_tran;
    }

    if (opts.hold_decay && opts.hold_decay->A > 0.5)
        res.tbp = tbp_at_half(*opts.hold_decay, pulse.t_p).numeric;

    if (wc > 0.0 && p.optical_depth > 0.0 && p.gamma31 > 0.0) {
        const double bw = std::sqrt(kLn2 / 2.0) * sqr(wc) / std::sqrt(p.optical_depth * p.gamma31);
        if (spectral_tail_fraction(res.retrieved, 2.0 * bw) > 0.01)
            res.warnings.push_back("non-adiabatic switching: retrieved spectrum has > 1% "
                                   "energy outside the transparency window");
    }
    return res;
}

std::vector<OdSweepRow> se_vs_od_sweep(const std::vector<double>& od_list, Scheme scheme,
                                       double t_p, double zeta, const GammaModel& gamma31_of_d,
                                       double gamma0, double delta_s, double epsilon_switch) {
    if (!(t_p > 0.0) || !(zeta > 0.0))
        throw ValidationError("se_vs_od_sweep: t_p and zeta must be > 0");
    if (scheme == Scheme::NTypeD2 && delta_s == 0.0)
        throw ValidationError("se_vs_od_sweep: delta_s required for the N-type branch");
    std::vector<OdSweepRow> table;
    table.reserve(od_list.size());
    const double t_d = zeta * t_p;
    for (double d : od_list) {
        if (!(d > 0.0)) throw ValidationError("se_vs_od_sweep: optical depth must be > 0");
        OdSweepRow row;
        row.optical_depth = d;
        row.omega_c = std::sqrt(d / t_d);
        row.gamma31 = gamma31_of_d(d);
        row.gamma21_eff = gamma0;
        if (scheme == Scheme::NTypeD2) {
            const double omega_s = epsilon_switch * row.omega_c;
            row.gamma21_eff += sqr(omega_s) * row.gamma31 / (4.0 * sqr(delta_s));
        }
        row.eta = std::exp(-2.0 * row.gamma21_eff * t_d) /
                  std::sqrt(1.0 + 32.0 * kLn2 * row.gamma31 * sqr(zeta) / d);
        table.push_back(row);
    }
    return table;
}

}  // namespace eitmem::storage
