#include "eitmem/spectra.hpp"

#include <algorithm>
#include <set>

namespace eitmem::spectra {

namespace {

// Interpolated half-maximum width of the transparency peak.
double fwhm_of_peak(const ArrayXd& x, const ArrayXd& y) {
    Eigen::Index imax = 0;
    const double peak = y.maxCoeff(&imax);
    const double half = 0.5 * peak;
    auto cross = [&](Eigen::Index from, int step) -> double {
        for (Eigen::Index i = from; i + step >= 0 && i + step < y.size(); i += step) {
            const Eigen::Index j = i + step;
            if ((y[i] - half) * (y[j] - half) <= 0.0 && y[i] != y[j]) {
                const double f = (half - y[i]) / (y[j] - y[i]);
                return x[i] + f * (x[j] - x[i]);
            }
        }
        return std::numeric_limits<double>::quiet_NaN();
    };
    const double lo = cross(imax, -1);
    const double hi = cross(imax, +1);
    return hi - lo;
}

SpectrumResult assemble(const ArrayXd& grid, const ArrayXd& transmission) {
    SpectrumResult r;
    r.delta_p = grid;
    r.transmission = transmission;
    r.peak_transparency = transmission.maxCoeff();
    r.fwhm_eit = fwhm_of_peak(grid, transmission);
    return r;
}

}  // namespace

Complex lambda_response(double omega, const MediumParams& medium,
                        const FieldParams& field) {
    const MediumParams p = medium.resolved();
    const Complex i(0.0, 1.0);
    const double delta2 = field.delta_p - field.delta_c;
    const Complex num = i * (omega + delta2) - p.gamma21;
    const Complex pole31 = i * (omega + field.delta_p) - p.gamma31;
    if (field.omega_c == 0.0) {
        // two-level limit; the ground-state pole cancels against the numerator
        if (pole31 == Complex(0.0, 0.0))
            throw NumericalError("lambda_response: pole at zero damping");
        return 0.25 * p.optical_depth / pole31;
    }
    const Complex den = pole31 * num + 0.25 * sqr(field.omega_c);
    if (den == Complex(0.0, 0.0))
        throw NumericalError("lambda_response: exact pole on the evaluation grid");
    return 0.25 * p.optical_depth * num / den;
}

Complex ntype_response(double omega, const MediumParams& medium,
                       const FieldParams& field) {
    const MediumParams p = medium.resolved();
    const Complex i(0.0, 1.0);
    const double omega_s = p.epsilon_switch * field.omega_c;
    const double delta2 = field.delta_p - field.delta_c;
    const double delta3 = delta2 + p.delta_s;
    const Complex xi21 = i * (omega + delta2) - p.gamma21;
    const Complex xi31 = i * (omega + field.delta_p) - p.gamma31;
    const Complex xi41 = i * (omega + delta3) - p.gamma41;
    const Complex num = xi21 * xi41 + 0.25 * sqr(omega_s);
    const Complex den = xi31 * num + xi41 * 0.25 * sqr(field.omega_c);
    if (den == Complex(0.0, 0.0))
        throw NumericalError("ntype_response: exact pole on the evaluation grid");
    return 0.25 * p.optical_depth * num / den;
}

SpectrumResult eit_spectrum(const ArrayXd& delta_p_grid, const MediumParams& medium,
                            const FieldParams& field) {
    medium.validate();
    field.validate();
    ArrayXd tr(delta_p_grid.size());
    FieldParams f = field;
    for (Eigen::Index k = 0; k < delta_p_grid.size(); ++k) {
        f.delta_p = delta_p_grid[k];
        tr[k] = std::exp(2.0 * lambda_response(0.0, medium, f).real());
    }
    return assemble(delta_p_grid, tr);
}

SpectrumResult ntype_spectrum(const ArrayXd& delta_p_grid, const MediumParams& medium,
                              const FieldParams& field) {
    medium.validate();
    field.validate();
    const MediumParams p = medium.resolved();
    if (p.scheme == Scheme::NTypeD2 && p.delta_s == 0.0)
        throw ValidationError("ntype_spectrum: delta_s must be nonzero");
    ArrayXd tr(delta_p_grid.size());
    FieldParams f = field;
    for (Eigen::Index k = 0; k < delta_p_grid.size(); ++k) {
        f.delta_p = delta_p_grid[k];
        tr[k] = std::exp(2.0 * ntype_response(0.0, medium, f).real());
    }
    return assemble(delta_p_grid, tr);
}

Bandwidth eit_bandwidth(const MediumParams& medium, const FieldParams& field) {
    const MediumParams p = medium.resolved();
    if (!(p.optical_depth > 0.0))
        throw ValidationError("eit_bandwidth: undefined for zero optical depth");
    if (!(field.omega_c > 0.0))
        throw ValidationError("eit_bandwidth: undefined for zero control field");
    Bandwidth bw;
    bw.closed_form = std::sqrt(kLn2 / 2.0) * sqr(field.omega_c) /
                     std::sqrt(p.optical_depth * p.gamma31);
    const SpectrumResult s = eit_spectrum(default_grid(medium, field), medium, field);
    bw.numeric_fwhm = s.fwhm_eit;
    return bw;
}

NTypeEffective ntype_effective(const MediumParams& medium, double omega_c) {
    const MediumParams p = medium.resolved();
    if (p.delta_s == 0.0)
        throw ValidationError("ntype_effective: delta_s must be nonzero");
    NTypeEffective r;
    const double omega_s = p.epsilon_switch * omega_c;
    if (omega_s != 0.0 && std::abs(p.delta_s) < 10.0 * std::abs(omega_s))
        r.warnings.push_back("ntype_effective: |delta_s| < 10 |omega_s|, "
                             "perturbative expressions degrade");
    r.delta2_eff = -sqr(omega_s) / (4.0 * p.delta_s);
    r.gamma21_eff = p.gamma21 + sqr(omega_s) * p.gamma41 / (4.0 * sqr(p.delta_s));
    return r;
}

ArrayXd default_grid(const MediumParams& medium, const FieldParams& field) {
    const MediumParams p = medium.resolved();
    std::set<double> pts;
    const int n_base = 801;
    for (int k = 0; k < n_base; ++k)
        pts.insert(-6.0 + 12.0 * k / (n_base - 1));
    if (p.optical_depth > 0.0 && field.omega_c > 0.0 && p.gamma31 > 0.0) {
        const double bw = std::sqrt(kLn2 / 2.0) * sqr(field.omega_c) /
                          std::sqrt(p.optical_depth * p.gamma31);
        const double step = bw / 50.0;
        const double center = field.delta_c;
        for (double x = center - 2.0 * bw; x <= center + 2.0 * bw; x += step)
            if (x >= -6.0 && x <= 6.0) pts.insert(x);
    }
    ArrayXd grid(static_cast<Eigen::Index>(pts.size()));
    Eigen::Index i = 0;
    for (double v : pts) grid[i++] = v;
    return grid;
}

double resonance_shift(const SpectrumResult& spectrum) {
    Eigen::Index imax = 0;
    spectrum.transmission.maxCoeff(&imax);
    if (imax == 0 || imax == spectrum.transmission.size() - 1)
        return spectrum.delta_p[imax];
    const double x0 = spectrum.delta_p[imax - 1], x1 = spectrum.delta_p[imax],
                 x2 = spectrum.delta_p[imax + 1];
    const double y0 = spectrum.transmission[imax - 1], y1 = spectrum.transmission[imax],
                 y2 = spectrum.transmission[imax + 1];
    // parabola through three points (grid may be non-uniform)
    const double d0 = x0 - x1, d2 = x2 - x1;
    const double denom = d0 * d2 * (d0 - d2);
    if (denom == 0.0) return x1;
    const double a = (d2 * (y0 - y1) - d0 * (y2 - y1)) / denom;
    const double b = -(d2 * d2 * (y0 - y1) - d0 * d0 * (y2 - y1)) / denom;
    if (a == 0.0) return x1;
    return x1 - 0.5 * b / a;
}

}  // namespace eitmem::spectra
