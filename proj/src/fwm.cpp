#include "eitmem/fwm.hpp"

#include "eitmem/ode.hpp"
#include "eitmem/util.hpp"

namespace eitmem::fwm {

namespace {

constexpr Complex kI(0.0, 1.0);

struct Xi {
    Complex x21, x31, x32, x41, x42, x43;
};

Xi make_xi(const FwmParams& f, const MediumParams& p) {
    const double d2 = f.delta_p - f.delta_c;
    Xi x;
    x.x21 = kI * d2 - p.gamma21;
    x.x31 = kI * f.delta_p - p.gamma31;
    x.x32 = kI * f.delta_c - p.gamma32;
    x.x41 = kI * f.delta_d - p.gamma41;
    x.x42 = kI * (f.delta_d - d2) - p.gamma42;
    x.x43 = kI * (f.delta_d - f.delta_p) - p.gamma43;
    return x;
}

void default_ks(FwmParams& f, const MediumParams& p) {
    if (f.k_p <= 0.0) f.k_p = 2.0 * kPi / f.transition.wavelength;
    if (f.k_c <= 0.0) {
        if (f.exact_k && p.delta_hf > 0.0) {
            // control sits one ground hyperfine interval below the probe
            const double dk = p.delta_hf * f.transition.gamma_sp / 2.99792458e8;
            f.k_c = f.k_p - dk;
        } else {
            f.k_c = f.k_p;
        }
    }
    if (f.k_i <= 0.0) f.k_i = f.exact_k ? 2.0 * f.k_c - f.k_p : f.k_p;
}

}  // namespace

void FwmParams::validate() const {
    if (!(omega_c >= 0.0) || !(omega_d >= 0.0))
        throw ValidationError("fwm: Rabi frequencies must be >= 0");
    if (!(theta >= 0.0 && theta < kPi / 2.0))
        throw ValidationError("fwm: theta must lie in [0, pi/2)");
    transition.validate();
}

Populations fwm_zero_order(const FwmParams& params, const MediumParams& medium) {
    params.validate();
    const MediumParams p = medium.resolved();
    if (!(params.omega_c > 0.0) || !(params.omega_d > 0.0))
        throw ValidationError("fwm_zero_order: the printed expressions divide by both "
                              "field intensities; take the documented limit instead of "
                              "passing zero fields");
    if (!(p.gamma32 > 0.0) || !(p.gamma41 > 0.0) || !(p.Gamma31 > 0.0))
        throw ValidationError("fwm_zero_order: gamma32, gamma41 and Gamma31 must be > 0");
    const Xi x = make_xi(params, p);
    const double wc2 = sqr(params.omega_c);
    const double wd2 = sqr(params.omega_d);
    const double r = p.Gamma42 / p.Gamma31;
    const double tc = p.Gamma3() * std::norm(x.x32) / (p.gamma32 * wc2);
    const double td = p.Gamma4() * std::norm(x.x41) / (p.gamma41 * wd2);
    const double b = 2.0 * (1.0 + r + r * tc + td);
    Populations n;
    n.n1 = r * (1.0 + 2.0 * tc) / b;
    n.n2 = (1.0 + 2.0 * td) / b;
    n.n3 = r / b;
    n.n4 = 1.0 / b;
    return n;
}

FwmResult fwm_susceptibilities(const FwmParams& params_in, const MediumParams& medium,
                               const Populations& pops) {
    FwmParams f = params_in;
    f.validate();
    const MediumParams p = medium.resolved();
    default_ks(f, p);
    if (!(f.omega_c > 0.0))
        throw ValidationError("fwm_susceptibilities: omega_c must be > 0");

    const Xi x = make_xi(f, p);
    const Complex c21 = std::conj(x.x21), c31 = std::conj(x.x31), c32 = std::conj(x.x32),
                  c41 = std::conj(x.x41), c42 = std::conj(x.x42), c43 = std::conj(x.x43);
    (void)c21;
    (void)c31;
    const double eps = f.epsilon();        // field amplitude ratio Omega_d / Omega_c
    const double e2 = eps * eps;
    const double q = 0.25 * sqr(f.omega_c);  // |Omega_c|^2 / 4

    const Complex denom = x.x31 * c42 * x.x21 * c43 / q + c43 * (c42 + e2 * x.x31) +
                          x.x21 * (e2 * c42 + x.x31) + q * sqr(e2 - 1.0);
    if (denom == Complex(0.0, 0.0))
        throw NumericalError("fwm_susceptibilities: pole in the first-order denominator");

    const double d13 = pops.n3 - pops.n1;
    const double d23 = pops.n3 - pops.n2;
    const double d14 = pops.n4 - pops.n1;
    const double d24 = pops.n4 - pops.n2;

    // first-order response coefficients of (sigma31, conj(sigma42)) to the
    // drive pair (Omega_p, conj(Omega_i))
    const Complex c_pp = kI / (2.0 * denom) *
        (d13 * (x.x21 + e2 * c43 + x.x21 * c42 * c43 / q) +
         d14 * e2 * (q * (1.0 - e2) - x.x21 * c42) / c41 -
         d23 * (q * (1.0 - e2) + c42 * c43) / c32);
    const Complex c_pi = kI * eps / (2.0 * denom) *
        (-d14 * (q * (1.0 - e2) + c42 * c43) / x.x41 +
         d23 * (q * (1.0 - e2) - x.x21 * c42) / x.x32 -
         d24 * (x.x21 + c43));
    const Complex u_p = kI * eps / (2.0 * denom) *
        (d13 * (x.x21 + c43) +
         d14 * (q * (1.0 - e2) + x.x21 * x.x31) / c41 -
         d23 * (q * (1.0 - e2) - x.x31 * c43) / c32);
    const Complex u_i = kI / (2.0 * denom) *
        (d14 * e2 * (x.x31 * c43 - q * (1.0 - e2)) / x.x41 +
         d23 * (q * (1.0 - e2) + x.x21 * x.x31) / x.x32 -
         d24 * (c43 + e2 * x.x21 + x.x21 * x.x31 * c43 / q));

    // dipole ratio of the idler transition to the probe transition is
    // fixed by the level scheme, independent of the pump amplitude
    const double eps_cg = (p.epsilon_fwm != 0.0) ? p.epsilon_fwm : epsilon_fwm_default();
    const double kappa = (f.k_i / f.k_p) / sqr(eps_cg);

    const double D = p.optical_depth;
    FwmResult r;
    r.denom_D = denom;
    r.a_pp = kI * 0.5 * D * c_pp;
    r.a_pi = (f.omega_d != 0.0) ? kI * 0.5 * D * c_pi : Complex(0.0, 0.0);
    r.a_ii = -kI * 0.5 * D * kappa * u_i;
    r.a_ip = (f.omega_d != 0.0) ? -kI * 0.5 * D * kappa * u_p : Complex(0.0, 0.0);

    const Complex half_ikpl = kI * 0.5 * f.k_p * p.length;
    const Complex half_ikil = kI * 0.5 * f.k_i * p.length;
    r.chi_pp = r.a_pp / half_ikpl;
    r.chi_pi = r.a_pi / half_ikpl;
    r.chi_ii = r.a_ii / half_ikil;
    r.chi_ip = r.a_ip / half_ikil;

    r.n_c = control_index(f, p);
    r.delta_kz = delta_kz(f, p);
    return r;
}

double control_index(const FwmParams& params_in, const MediumParams& medium) {
    FwmParams f = params_in;
    const MediumParams p = medium.resolved();
    default_ks(f, p);
    const double dd = f.delta_d;
    const double g4 = p.Gamma4();
    // two-level response of the control on the probe transition, OD units
    const double chi_c = -(p.optical_depth / (2.0 * p.length * f.k_p)) * dd /
                         (sqr(dd) + 0.25 * sqr(g4));
    return 1.0 + 0.5 * chi_c;
}

double delta_kz(const FwmParams& params_in, const MediumParams& medium,
                bool literal_formula) {
    FwmParams f = params_in;
    const MediumParams p = medium.resolved();
    default_ks(f, p);
    const double n_c = control_index(f, p);
    if (literal_formula)
        return 2.0 * n_c * f.k_c - f.k_p * std::cos(f.theta) - f.k_i * std::sin(f.theta);
    return 2.0 * n_c * f.k_c - (f.k_p + f.k_i) * std::cos(f.theta);
}

namespace {

// closed-form solution of the constant-coefficient 2x2 system on
// (Omega_p, Omega_i* e^{i dk z}) over one medium length
void coupled_mode_solution(const FwmResult& chi, double dkl, Complex& ep_out,
                           Complex& ei_conj_out) {
    const Complex app = chi.a_pp;
    const Complex aii = chi.a_ii + kI * dkl;
    const Complex mu = 0.5 * (app + aii);
    const Complex dl = 0.5 * (app - aii);
    const Complex xi2 = dl * dl + chi.a_pi * chi.a_ip;
    const Complex xi = std::sqrt(xi2);
    Complex ch, shx;  // cosh(xi), sinh(xi)/xi
    if (std::abs(xi) < 1e-8) {
        ch = 1.0 + xi2 / 2.0;
        shx = 1.0 + xi2 / 6.0;
    } else {
        ch = std::cosh(xi);
        shx = std::sinh(xi) / xi;
    }
    const Complex e_mu = std::exp(mu);
    ep_out = e_mu * (ch + dl * shx);
    ei_conj_out = e_mu * chi.a_ip * shx;
}

}  // namespace

SteadyGain fwm_gain_steady(double delta_p, double theta, const FwmParams& params,
                           const MediumParams& medium, const Populations& pops,
                           bool literal_delta_kz) {
    FwmParams f = params;
    f.delta_p = delta_p;
    f.theta = theta;
    const MediumParams p = medium.resolved();
    default_ks(f, p);

    SteadyGain g;
    g.detail = fwm_susceptibilities(f, p, pops);
    g.detail.delta_kz = delta_kz(f, p, literal_delta_kz);
    const double dkl = g.detail.delta_kz * p.length;

    Complex ep, eic;
    coupled_mode_solution(g.detail, dkl, ep, eic);
    g.probe_gain = std::norm(ep);
    const double eps_cg = (p.epsilon_fwm != 0.0) ? p.epsilon_fwm : epsilon_fwm_default();
    g.idler_conv = sqr(eps_cg) * std::norm(eic);
    g.detail.probe_gain = g.probe_gain;
    g.detail.idler_conv = g.idler_conv;

    FwmResult bare = g.detail;
    bare.a_pi = bare.a_ip = Complex(0.0, 0.0);
    Complex ep0, ei0;
    coupled_mode_solution(bare, dkl, ep0, ei0);
    g.transmission_no_fwm = std::norm(ep0);
    g.relative_gain = g.transmission_no_fwm > 0.0 ? g.probe_gain / g.transmission_no_fwm : 0.0;
    return g;
}

namespace {

// Four-level density matrix + two Maxwell equations on a (xi, t) lattice,
// perfect phase matching. Field blocks are slaved to the coherences as in
// the storage solver.
class FourLevelSim {
public:
    FourLevelSim(const GaussianPulse& pulse, const MediumParams& p, const FwmParams& f,
                 int nz, double kappa)
        : pulse_(pulse), p_(p), f_(f), nz_(nz), kappa_(kappa) {
        dxi_ = 1.0 / nz_;
        wp_.resize(nz_ + 1);
        wi_.resize(nz_ + 1);
    }

    int state_size() const { return 10 * (nz_ + 1); }

    ode::State initial_state() const {
        ode::State y = ode::State::Zero(state_size());
        y.segment(0, nz_ + 1) = Complex(1.0, 0.0);  // rho11
        if (f_.omega_d != 0.0) {
            const Complex x41 = kI * f_.delta_d - p_.gamma41;
            y.segment(7 * (nz_ + 1), nz_ + 1) = -(kI * 0.5 * f_.omega_d) / x41;  // rho41
        }
        return y;
    }

    void fields_from_state(const ode::State& y, double t) {
        const int n = nz_ + 1;
        auto r31 = y.segment(5 * n, n);
        auto r42 = y.segment(8 * n, n);
        wp_[0] = Complex(pulse_.amplitude(t), 0.0);
        wi_[0] = Complex(0.0, 0.0);
        const Complex kp = kI * 0.5 * p_.optical_depth * 0.5 * dxi_;
        const Complex ki = kp * kappa_;
        for (int j = 0; j < nz_; ++j) {
            wp_[j + 1] = wp_[j] + kp * (r31[j] + r31[j + 1]);
            wi_[j + 1] = wi_[j] + ki * (r42[j] + r42[j + 1]);
        }
    }

    void rhs(double t, const ode::State& y, ode::State& dy) {
        if (dy.size() != y.size()) dy.resize(y.size());
        fields_from_state(y, t);
        const int n = nz_ + 1;
        const double wc = f_.omega_c, wd = f_.omega_d;
        const double d2 = f_.delta_p - f_.delta_c;
        auto r11 = y.segment(0 * n, n);
        auto r22 = y.segment(1 * n, n);
        auto r33 = y.segment(2 * n, n);
        auto r44 = y.segment(3 * n, n);
        auto r21 = y.segment(4 * n, n);
        auto r31 = y.segment(5 * n, n);
        auto r32 = y.segment(6 * n, n);
        auto r41 = y.segment(7 * n, n);
        auto r42 = y.segment(8 * n, n);
        auto r43 = y.segment(9 * n, n);
        const ArrayXcd& wp = wp_;
        const ArrayXcd& wi = wi_;
        const ArrayXcd wpc = wp.conjugate();
        const ArrayXcd wic = wi.conjugate();

        dy.segment(0 * n, n) = p_.Gamma31 * r33 + p_.Gamma41 * r44 +
            kI * 0.5 * (wpc * r31 + wd * r41 - wp * r31.conjugate() - wd * r41.conjugate());
        dy.segment(1 * n, n) = p_.Gamma32 * r33 + p_.Gamma42 * r44 +
            kI * 0.5 * (wc * r32 + wic * r42 - wc * r32.conjugate() - wi * r42.conjugate());
        dy.segment(2 * n, n) = -p_.Gamma3() * r33 +
            kI * 0.5 * (wp * r31.conjugate() + wc * r32.conjugate() - wpc * r31 - wc * r32);
        dy.segment(3 * n, n) = -p_.Gamma4() * r44 +
            kI * 0.5 * (wd * r41.conjugate() + wi * r42.conjugate() - wd * r41 - wic * r42);
        dy.segment(4 * n, n) = (kI * d2 - p_.gamma21) * r21 +
            kI * 0.5 * (wc * r31 + wic * r41 - wp * r32.conjugate() - wd * r42.conjugate());
        dy.segment(5 * n, n) = (kI * f_.delta_p - p_.gamma31) * r31 +
            kI * 0.5 * (wp * (r11 - r33) + wc * r21 - wd * r43.conjugate());
        dy.segment(6 * n, n) = (kI * f_.delta_c - p_.gamma32) * r32 +
            kI * 0.5 * (wp * r21.conjugate() + wc * (r22 - r33) - wi * r43.conjugate());
        dy.segment(7 * n, n) = (kI * f_.delta_d - p_.gamma41) * r41 +
            kI * 0.5 * (wd * (r11 - r44) + wi * r21 - wp * r43);
        dy.segment(8 * n, n) = (kI * (f_.delta_d - d2) - p_.gamma42) * r42 +
            kI * 0.5 * (wi * (r22 - r44) + wd * r21.conjugate() - wc * r43);
        dy.segment(9 * n, n) = (kI * (f_.delta_d - f_.delta_p) - p_.gamma43) * r43 +
            kI * 0.5 * (wd * r31.conjugate() + wi * r32.conjugate() - wpc * r41 - wc * r42);
    }

    Complex probe_out(const ode::State& y, double t) {
        fields_from_state(y, t);
        return wp_[nz_];
    }

private:
    GaussianPulse pulse_;
    MediumParams p_;
    FwmParams f_;
    int nz_;
    double kappa_;
    double dxi_ = 0.0;
    ArrayXcd wp_, wi_;
};

double pulse_run_eta(const GaussianPulse& pulse, const MediumParams& p, const FwmParams& f,
                     const PulseGainOptions& opts, double kappa) {
    FourLevelSim sim(pulse, p, f, opts.nz, kappa);
    const double wc2 = sqr(f.omega_c);
    const double t_d = wc2 > 0.0 ? p.optical_depth / wc2 : 0.0;
    const double beta = wc2 > 0.0
        ? std::sqrt(1.0 + 32.0 * kLn2 * p.optical_depth * p.gamma31 /
                          (sqr(pulse.t_p) * sqr(wc2)))
        : 1.0;
    const double t_start = pulse.t0 - 4.5 * pulse.t_p;
    const double t_end = pulse.t0 + t_d + (4.0 * beta + 2.0) * pulse.t_p;

    // explicit stepping must resolve the far-detuned pump oscillation
    const double fast = std::abs(f.delta_d) + f.omega_d + f.omega_c + 1.0;
    const double dt = std::min({2.0 / fast, pulse.t_p / 400.0, 0.02});

    const ArrayXd times = ArrayXd::LinSpaced(opts.n_record, t_start, t_end);
    ArrayXcd out(opts.n_record);
    ode::State y = sim.initial_state();
    ode::State k1, k2, k3, k4, tmp;
    auto frhs = [&sim](double t, const ode::State& s, ode::State& ds) { sim.rhs(t, s, ds); };
    double t = t_start;
    out[0] = sim.probe_out(y, t);
    for (Eigen::Index i = 1; i < times.size(); ++i) {
        const double t1 = times[i];
        const int nsub = std::max(1, static_cast<int>(std::ceil((t1 - t) / dt)));
        const double h = (t1 - t) / nsub;
        for (int s = 0; s < nsub; ++s)
            ode::rk4_step(frhs, t + s * h, h, y, k1, k2, k3, k4, tmp);
        t = t1;
        out[i] = sim.probe_out(y, t);
    }

    SampledWaveform w;
    w.t = times;
    w.amplitude = out;
    return w.energy() / pulse.energy();
}

}  // namespace

std::vector<PulseGainRow> fwm_gain_pulse(const GaussianPulse& pulse,
                                         const std::vector<double>& od_list,
                                         const FwmParams& params, const MediumParams& medium,
                                         const PulseGainOptions& opts) {
    params.validate();
    pulse.validate();
    const MediumParams p = medium.resolved();
    const double eps_cg = (p.epsilon_fwm != 0.0) ? p.epsilon_fwm : epsilon_fwm_default();
    const double kappa = 1.0 / sqr(eps_cg);

    std::vector<PulseGainRow> rows(od_list.size());
    util::parallel_for(od_list.size(), opts.jobs, [&](std::size_t i) {
        const double d = od_list[i];
        if (!(d > 0.0)) throw ValidationError("fwm_gain_pulse: optical depth must be > 0");
        MediumParams pm = p;
        pm.optical_depth = d;
        FwmParams f = params;
        f.omega_c = std::sqrt(d / (opts.zeta * pulse.t_p));
        f.omega_d = eps_cg * f.omega_c;
        GaussianPulse pl = pulse;
        pl.omega_p0 = opts.omega_p0;

        PulseGainRow row;
        row.optical_depth = d;
        row.omega_c = f.omega_c;
        row.eta_with_fwm = pulse_run_eta(pl, pm, f, opts, kappa);
        FwmParams f0 = f;
        f0.omega_d = 0.0;
        row.eta_without_fwm = pulse_run_eta(pl, pm, f0, opts, kappa);
        row.gain = row.eta_with_fwm / row.eta_without_fwm - 1.0;
        rows[i] = row;
    });
    return rows;
}

std::vector<PumpScanRow> pump_probe_scan(const std::vector<double>& pump_detunings,
                                         const FwmParams& params, const MediumParams& medium,
                                         const PumpScanOptions& opts) {
    params.validate();
    const MediumParams p = medium.resolved();
    const double eps_cg = (p.epsilon_fwm != 0.0) ? p.epsilon_fwm : epsilon_fwm_default();
    const double omega_pump = std::abs(eps_cg) * params.omega_c * std::sqrt(opts.power_ratio);

    // no-pump reference peak over the same probe scan
    auto peak_transmission = [&](const FwmParams& f) {
        double best = 0.0;
        for (int k = 0; k < opts.n_probe; ++k) {
            const double dp = -opts.span + 2.0 * opts.span * k / (opts.n_probe - 1);
            const SteadyGain g = fwm_gain_steady(dp, f.theta, f, p,
                                                 Populations::probe_ground());
            best = std::max(best, g.probe_gain);
        }
        return best;
    };

    FwmParams ref = params;
    ref.omega_d = 0.0;
    const double peak0 = peak_transmission(ref);

    std::vector<PumpScanRow> rows(pump_detunings.size());
    util::parallel_for(pump_detunings.size(), opts.jobs, [&](std::size_t i) {
        FwmParams f = params;
        f.omega_d = omega_pump;
        f.delta_d = -std::abs(pump_detunings[i]);  // pump red of the probe line
        PumpScanRow row;
        row.delta_pump = std::abs(pump_detunings[i]);
        row.peak_no_pump = peak0;
        row.peak_transmission = peak_transmission(f);
        rows[i] = row;
    });
    return rows;
}

}  // namespace eitmem::fwm
