#include "eitmem/estimation.hpp"

#include <algorithm>
#include <cmath>

#include "eitmem/least_squares.hpp"
#include "eitmem/propagation.hpp"
#include "eitmem/spectra.hpp"
#include "eitmem/util.hpp"

namespace eitmem::fit {

double gamma31_model(double optical_depth, Scheme scheme) {
    if (!(optical_depth >= 0.0))
        throw ValidationError("gamma31_model: optical depth must be >= 0");
    const double d = optical_depth;
    if (scheme == Scheme::NTypeD2)
        return 0.70 + 3.90e-4 * d + 1.47e-6 * d * d;
    return 0.70 + 4.20e-5 * d + 4.87e-7 * d * d;
}

void MeasuredDataset::validate() const {
    if (delta_p.size() < 20)
        throw ValidationError("dataset: need at least 20 spectrum points");
    if (delta_p.size() != transmission.size() || delta_p.size() != sigma.size())
        throw ValidationError("dataset: spectrum column sizes mismatch");
    if ((sigma <= 0.0).any())
        throw ValidationError("dataset: per-point sigma must be > 0");
    Eigen::Index imax = 0;
    transmission.maxCoeff(&imax);
    if (imax == 0 || imax == transmission.size() - 1)
        throw ValidationError("dataset: transparency window must lie inside the grid");
}

namespace {

struct GaussFit {
    double amp = 0.0, center = 0.0, fwhm = 0.0;
    double sigma_center = 0.0, sigma_fwhm = 0.0;
    double resid_rms = 0.0;
};

// Single-Gaussian refit of an intensity trace, seeded by moments.
GaussFit fit_gaussian(const ArrayXd& t, const ArrayXd& intensity) {
    const double norm = intensity.sum();
    if (!(norm > 0.0)) throw ValidationError("trace: zero-intensity signal");
    const double c0 = (t * intensity).sum() / norm;
    const double var = ((t - c0).square() * intensity).sum() / norm;
    const double w0 = std::sqrt(std::max(var, 1e-300) * 8.0 * kLn2);
    const double a0 = intensity.maxCoeff();

    auto residual = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd r(t.size());
        for (Eigen::Index i = 0; i < t.size(); ++i) {
            const double u = (t[i] - x[1]) / x[2];
            r[i] = x[0] * std::exp(-4.0 * kLn2 * u * u) - intensity[i];
        }
        return r;
    };
    Eigen::VectorXd x0(3);
    x0 << a0, c0, w0;
    const lsq::Result res = lsq::levenberg_marquardt(residual, x0);

    GaussFit g;
    g.amp = res.x[0];
    g.center = res.x[1];
    g.fwhm = std::abs(res.x[2]);
    g.sigma_center = std::sqrt(std::max(0.0, res.covariance(1, 1)));
    g.sigma_fwhm = std::sqrt(std::max(0.0, res.covariance(2, 2)));
    g.resid_rms = std::sqrt(res.chi2 / t.size());
    return g;
}

double trapezoid(const ArrayXd& t, const ArrayXd& y) {
    double s = 0.0;
    for (Eigen::Index i = 1; i < t.size(); ++i)
        s += 0.5 * (y[i] + y[i - 1]) * (t[i] - t[i - 1]);
    return s;
}

// -------- spectrum model ----------------------------------------------

struct SpectrumModel {
    const MeasuredDataset& data;
    const FitConfig& cfg;
    bool fix_delta_c = false;
    double delta_c_fixed = 0.0;

    // parameters: (omega_c, delta_c, d_gamma21, d_gamma31), delta_c dropped
    // when fixed
    ArrayXd evaluate(double omega_c, double delta_c, double a, double b) const {
        const double g31 = cfg.gamma31_assumed;
        const double d = b / g31;
        const double g21 = a / std::max(d, 1e-300);
        MediumParams m;
        m.optical_depth = d;
        m.gamma21 = g21;
        m.gamma31 = g31;
        m.gamma41 = g31;
        m.scheme = data.scheme;
        m.delta_s = cfg.delta_s;
        m.epsilon_switch = cfg.epsilon_switch;
        FieldParams f;
        f.omega_c = std::abs(omega_c);
        f.delta_c = delta_c;
        const spectra::SpectrumResult s =
            data.scheme == Scheme::NTypeD2 ? spectra::ntype_spectrum(data.delta_p, m, f)
                                           : spectra::eit_spectrum(data.delta_p, m, f);
        return s.transmission;
    }

    Eigen::VectorXd operator()(const Eigen::VectorXd& x) const {
        const double wc = x[0];
        const double dc = fix_delta_c ? delta_c_fixed : x[1];
        const double a = x[fix_delta_c ? 1 : 2];
        const double b = x[fix_delta_c ? 2 : 3];
        Eigen::VectorXd r(data.delta_p.size());
        if (!(b > 0.0) || !std::isfinite(a) || !std::isfinite(wc)) {
            r.setConstant(1e9);
            return r;
        }
        const ArrayXd model = evaluate(wc, dc, a, b);
        for (Eigen::Index i = 0; i < r.size(); ++i) {
            const double v = (model[i] - data.transmission[i]) / data.sigma[i];
            r[i] = std::isfinite(v) ? v : 1e9;
        }
        return r;
    }
};

struct SpectrumSeeds {
    double omega_c, delta_c, a, b, window_fwhm;
};

SpectrumSeeds seed_from_data(const MeasuredDataset& data) {
    SpectrumSeeds s{1.0, 0.0, 1e-3, 80.0, 1.0};
    Eigen::Index imax = 0;
    const double peak = data.transmission.maxCoeff(&imax);
    s.delta_c = data.delta_p[imax];

    // absorption wings give D*gamma31
    const auto wing = [&](Eigen::Index i) {
        const double tr = std::clamp(data.transmission[i], 1e-12, 1.0);
        return -std::log(tr) * 2.0 * sqr(data.delta_p[i]);
    };
    const double b0 = 0.5 * (wing(0) + wing(data.delta_p.size() - 1));
    if (b0 > 1e-3 && std::isfinite(b0)) s.b = b0;

    // transparency-window width gives omega_c
    const double half = 0.5 * peak;
    double lo = data.delta_p[imax], hi = data.delta_p[imax];
    for (Eigen::Index i = imax; i > 0; --i)
        if (data.transmission[i] < half) { lo = data.delta_p[i]; break; }
    for (Eigen::Index i = imax; i < data.delta_p.size(); ++i)
        if (data.transmission[i] < half) { hi = data.delta_p[i]; break; }
    const double width = hi - lo;
    if (width > 0.0) {
        s.window_fwhm = width;
        const double wc2 = width * std::sqrt(s.b) / std::sqrt(kLn2 / 2.0);
        if (wc2 > 0.0) s.omega_c = std::sqrt(wc2);
    }
    const double lnpeak = std::log(std::clamp(peak, 1e-12, 2.0));
    s.a = std::max(0.0, -lnpeak * sqr(s.omega_c) / 2.0);
    return s;
}

lsq::Result multistart_lm(const lsq::ResidualFn& fn, const Eigen::VectorXd& x0,
                          int starts, std::uint64_t seed,
                          const Eigen::VectorXd& spread) {
    util::Rng rng(seed);
    lsq::Result best;
    bool have = false;
    for (int s = 0; s < starts; ++s) {
        Eigen::VectorXd x = x0;
        if (s > 0)
            for (Eigen::Index j = 0; j < x.size(); ++j)
                x[j] += spread[j] * rng.normal();
        lsq::Result r = lsq::levenberg_marquardt(fn, x);
        if (!have || r.chi2 < best.chi2) {
            best = r;
            have = true;
        }
    }
    return best;
}

}  // namespace

TraceFeatures extract_trace_features(const TraceData& trace) {
    TraceFeatures f;
    const GaussFit in = fit_gaussian(trace.t, trace.input_intensity);
    const GaussFit out = fit_gaussian(trace.t, trace.output_intensity);
    f.t_d = out.center - in.center;
    f.beta = out.fwhm / in.fwhm;
    const double e_in = trapezoid(trace.t, trace.input_intensity);
    const double e_out = trapezoid(trace.t, trace.output_intensity);
    if (!(e_in > 0.0)) throw ValidationError("trace: zero input energy");
    f.eta = e_out / e_in;

    f.sigma_t_d = std::sqrt(sqr(in.sigma_center) + sqr(out.sigma_center));
    f.sigma_beta = f.beta * std::sqrt(sqr(in.sigma_fwhm / in.fwhm) +
                                      sqr(out.sigma_fwhm / out.fwhm));
    const double dt = trace.t[1] - trace.t[0];
    const double n = static_cast<double>(trace.t.size());
    const double se_out = out.resid_rms * std::sqrt(n) * dt;
    const double se_in = in.resid_rms * std::sqrt(n) * dt;
    f.sigma_eta = f.eta * std::sqrt(sqr(se_out / e_out) + sqr(se_in / e_in));
    // floors keep the noiseless roundtrip well conditioned
    f.sigma_t_d = std::max(f.sigma_t_d, 1e-9 * std::max(1.0, std::abs(f.t_d)));
    f.sigma_beta = std::max(f.sigma_beta, 1e-9 * f.beta);
    f.sigma_eta = std::max(f.sigma_eta, 1e-9 * f.eta);
    return f;
}

SpectrumFit fit_spectrum(const MeasuredDataset& data, const FitConfig& cfg) {
    data.validate();
    if (data.scheme == Scheme::NTypeD2 && cfg.delta_s == 0.0)
        throw ValidationError("fit_spectrum: delta_s required for the N-type scheme");

    const SpectrumSeeds seeds = seed_from_data(data);
    SpectrumFit out;

    double delta_c_lambda = seeds.delta_c;
    if (data.scheme == Scheme::NTypeD2 &&
        cfg.ntype_shift == NTypeShiftMode::LambdaShiftThenZero) {
        // resonance shift from the Lambda lineshape, then the four-level
        // fit runs with delta_c pinned to zero
        MeasuredDataset lam = data;
        lam.scheme = Scheme::LambdaD1;
        SpectrumModel m{lam, cfg, false, 0.0};
        Eigen::VectorXd x0(4), spread(4);
        x0 << seeds.omega_c, seeds.delta_c, seeds.a, seeds.b;
        spread << 0.2 * seeds.omega_c, 0.2 * seeds.window_fwhm, 0.5 * seeds.a + 1e-5,
            0.2 * seeds.b;
        const lsq::Result r =
            multistart_lm([&m](const Eigen::VectorXd& x) { return m(x); }, x0,
                          cfg.multistart, cfg.seed, spread);
        delta_c_lambda = r.x[1];

        SpectrumModel mn{data, cfg, true, 0.0};
        Eigen::VectorXd y0(3), sp(3);
        y0 << std::abs(r.x[0]), r.x[2], r.x[3];
        sp << 0.2 * y0[0], 0.5 * std::abs(y0[1]) + 1e-5, 0.2 * y0[2];
        const lsq::Result rn =
            multistart_lm([&mn](const Eigen::VectorXd& x) { return mn(x); }, y0,
                          cfg.multistart, cfg.seed + 1, sp);
        if (!rn.converged)
            out.warnings.push_back("fit_spectrum: N-type stage did not fully converge");
        out.omega_c = {std::abs(rn.x[0]), 2.0 * std::sqrt(std::abs(rn.covariance(0, 0)))};
        out.delta_c = {delta_c_lambda, 2.0 * std::sqrt(std::abs(r.covariance(1, 1)))};
        out.d_gamma21 = {rn.x[1], 2.0 * std::sqrt(std::abs(rn.covariance(1, 1)))};
        out.d_gamma31 = {rn.x[2], 2.0 * std::sqrt(std::abs(rn.covariance(2, 2)))};
        out.covariance = rn.covariance;
        out.chi2 = rn.chi2;
        return out;
    }

    SpectrumModel m{data, cfg, false, 0.0};
    Eigen::VectorXd x0(4), spread(4);
    x0 << seeds.omega_c, seeds.delta_c, seeds.a, seeds.b;
    spread << 0.2 * seeds.omega_c, 0.2 * seeds.window_fwhm, 0.5 * seeds.a + 1e-5,
        0.2 * seeds.b;
    const lsq::Result r = multistart_lm([&m](const Eigen::VectorXd& x) { return m(x); },
                                        x0, cfg.multistart, cfg.seed, spread);
    if (!r.converged)
        out.warnings.push_back("fit_spectrum: optimizer did not report convergence");
    out.omega_c = {std::abs(r.x[0]), 2.0 * std::sqrt(std::abs(r.covariance(0, 0)))};
    out.delta_c = {r.x[1], 2.0 * std::sqrt(std::abs(r.covariance(1, 1)))};
    out.d_gamma21 = {r.x[2], 2.0 * std::sqrt(std::abs(r.covariance(2, 2)))};
    out.d_gamma31 = {r.x[3], 2.0 * std::sqrt(std::abs(r.covariance(3, 3)))};
    out.covariance = r.covariance;
    out.chi2 = r.chi2;
    return out;
}

namespace {

// Features of the model trace for candidate (D, gamma21, gamma31); the
// extraction pipeline is shared with the measured trace.
TraceFeatures model_features(double d, double g21, double g31, double omega_c,
                             double delta_c, double t_p, Scheme scheme, double delta_s,
                             double epsilon_switch) {
    MediumParams m;
    m.optical_depth = d;
    m.gamma21 = std::max(g21, 0.0);
    m.gamma31 = g31;
    m.gamma41 = g31;
    m.scheme = scheme;
    m.delta_s = delta_s;
    m.epsilon_switch = epsilon_switch;
    FieldParams f;
    f.omega_c = omega_c;
    f.delta_c = delta_c;
    f.delta_p = 0.0;
    GaussianPulse pulse{1.0, t_p, 0.0};
    const prop::PropagationResult pr = prop::propagate_gaussian(pulse, m, f);
    TraceData td;
    td.t = pr.output.t;
    const SampledWaveform in = sample_pulse(pulse, pr.output.t);
    td.input_intensity = in.amplitude.abs2();
    td.output_intensity = pr.output.amplitude.abs2();
    return extract_trace_features(td);
}

}  // namespace

FitResult fit_joint(const MeasuredDataset& dataset, const FitConfig& cfg) {
    dataset.validate();
    if (!(dataset.t_p > 0.0))
        throw ValidationError("fit_joint: dataset.t_p required for the slow-light stage");
    if (dataset.trace.t.size() < 8)
        throw ValidationError("fit_joint: slow-light trace missing");

    FitResult res;
    res.stage1 = fit_spectrum(dataset, cfg);
    const double omega_c = res.stage1.omega_c.value;
    const double delta_c = res.stage1.delta_c.value;

    const TraceFeatures meas = extract_trace_features(dataset.trace);
    res.trace_t_d = meas.t_d;
    res.trace_beta = meas.beta;
    res.trace_eta = meas.eta;

    // closed-form inversion seeds the exact-model inversion
    const double wc2 = sqr(omega_c);
    double d0 = std::max(meas.t_d * wc2, 1e-3);
    double g31_0 = std::max((sqr(meas.beta) - 1.0) * sqr(dataset.t_p) * sqr(wc2) /
                                (32.0 * kLn2 * d0),
                            1e-3);
    double g21_0 = -std::log(std::min(meas.eta * meas.beta, 2.0)) / (2.0 * meas.t_d);
    g21_0 = std::clamp(g21_0, 0.0, 0.2);
    if (cfg.fix_gamma31) g31_0 = *cfg.fix_gamma31;

    const bool fix31 = cfg.fix_gamma31.has_value();
    auto residual = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd r(3);
        const double d = x[0];
        const double g21 = x[1];
        const double g31 = fix31 ? *cfg.fix_gamma31 : x[2];
        if (!(d > 0.0) || !(g31 > 0.0) || g21 < -1e-3) {
            r.setConstant(1e9);
            return r;
        }
        try {
            const TraceFeatures mf = model_features(d, g21, g31, omega_c, delta_c,
                                                    dataset.t_p, dataset.scheme,
                                                    cfg.delta_s, cfg.epsilon_switch);
            r[0] = (mf.t_d - meas.t_d) / meas.sigma_t_d;
            r[1] = (mf.beta - meas.beta) / meas.sigma_beta;
            r[2] = (mf.eta - meas.eta) / meas.sigma_eta;
        } catch (const Error&) {
            r.setConstant(1e9);
        }
        return r;
    };

    Eigen::VectorXd x0(fix31 ? 2 : 3);
    if (fix31)
        x0 << d0, g21_0;
    else
        x0 << d0, g21_0, g31_0;
    lsq::Options lopts;
    lopts.fd_step = 1e-4;
    lopts.max_iterations = 60;
    const lsq::Result r2 = lsq::levenberg_marquardt(residual, x0, lopts);
    if (!r2.converged)
        res.warnings.push_back("fit_joint: slow-light inversion did not report convergence");

    const double d_fit = r2.x[0];
    const double g21_fit = std::max(r2.x[1], 0.0);
    const double g31_fit = fix31 ? *cfg.fix_gamma31 : r2.x[2];
    res.chi2 = res.stage1.chi2 + r2.chi2;

    // parameter uncertainties: feature noise mapped through the inversion
    // Jacobian, plus the stage-1 omega_c uncertainty through the scaling
    // relations D ~ omega_c^2, gamma_i1 ~ omega_c^2
    Eigen::VectorXd xsol = r2.x;
    const Eigen::MatrixXd jac = lsq::numeric_jacobian(residual, xsol, 1e-4);
    Eigen::MatrixXd cov;
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    cov = jtj.inverse();
    const double s_wc_rel = res.stage1.omega_c.two_sigma / (2.0 * std::max(omega_c, 1e-12));

    auto interval = [&](int idx, double value) {
        double var = idx >= 0 && idx < cov.rows() ? std::max(0.0, cov(idx, idx)) : 0.0;
        var += sqr(2.0 * value * s_wc_rel);
        return ValueInterval{value, 2.0 * std::sqrt(var)};
    };
    res.optical_depth = interval(0, d_fit);
    res.gamma21 = interval(1, g21_fit);
    res.gamma31 = fix31 ? ValueInterval{g31_fit, 0.0} : interval(2, g31_fit);
    res.omega_c = res.stage1.omega_c;
    res.delta_c = res.stage1.delta_c;

    res.d_gamma21 = d_fit * g21_fit;
    res.d_gamma31 = d_fit * g31_fit;
    const double b1 = res.stage1.d_gamma31.value;
    res.consistency = b1 != 0.0 ? std::abs(res.d_gamma31 - b1) / std::abs(b1) : 0.0;
    if (res.consistency > 0.15)
        res.warnings.push_back("fit_joint: D*gamma31 differs from the spectral route by "
                               "more than 15%");
    return res;
}

MeasuredDataset synth_dataset(const TrueParams& params, const NoiseModel& noise,
                              std::uint64_t seed) {
    if (!(params.t_p > 0.0)) throw ValidationError("synth_dataset: t_p must be > 0");
    util::Rng rng(seed);

    MediumParams m;
    m.optical_depth = params.optical_depth;
    m.gamma21 = params.gamma21;
    m.gamma31 = params.gamma31;
    m.gamma41 = params.gamma31;
    m.scheme = params.scheme;
    m.delta_s = params.delta_s;
    m.epsilon_switch = params.epsilon_switch;
    FieldParams f;
    f.omega_c = params.omega_c;
    f.delta_c = params.delta_c;

    MeasuredDataset ds;
    ds.scheme = params.scheme;
    ds.t_p = params.t_p;
    ds.delta_p = spectra::default_grid(m, f);
    const spectra::SpectrumResult s = params.scheme == Scheme::NTypeD2
                                          ? spectra::ntype_spectrum(ds.delta_p, m, f)
                                          : spectra::eit_spectrum(ds.delta_p, m, f);
    ds.transmission = s.transmission;
    ds.sigma = ArrayXd::Constant(ds.delta_p.size(),
                                 noise.sigma_transmission > 0.0 ? noise.sigma_transmission
                                                                : 1.0);
    if (noise.sigma_transmission > 0.0)
        for (Eigen::Index i = 0; i < ds.transmission.size(); ++i)
            ds.transmission[i] += noise.sigma_transmission * rng.normal();

    GaussianPulse pulse{1.0, params.t_p, 0.0};
    FieldParams fres = f;
    fres.delta_p = 0.0;
    const prop::PropagationResult pr = prop::propagate_gaussian(pulse, m, fres);
    ds.trace.t = pr.output.t;
    ds.trace.input_intensity = sample_pulse(pulse, pr.output.t).amplitude.abs2();
    ds.trace.output_intensity = pr.output.amplitude.abs2();
    if (noise.sigma_trace_rel > 0.0) {
        const double s_in = noise.sigma_trace_rel * ds.trace.input_intensity.maxCoeff();
        const double s_out = noise.sigma_trace_rel * ds.trace.output_intensity.maxCoeff();
        for (Eigen::Index i = 0; i < ds.trace.t.size(); ++i) {
            ds.trace.input_intensity[i] += s_in * rng.normal();
            ds.trace.output_intensity[i] += s_out * rng.normal();
        }
    }
    return ds;
}

}  // namespace eitmem::fit
