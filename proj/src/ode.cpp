#include "eitmem/ode.hpp"

#include <algorithm>
#include <cmath>

namespace eitmem::ode {

namespace {

// Dormand-Prince coefficients
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

void dormand_prince(const Rhs& f, double t0, double t1, State& y,
                    const AdaptiveOptions& opts,
                    const std::function<void(double, const State&)>& observe) {
    if (t1 <= t0) return;
    State k1, k2, k3, k4, k5, k6, k7, ytmp, ynew, yerr;
    double t = t0;
    double h = std::min({opts.h_init, t1 - t0, opts.h_max});
    double err_prev = 1.0;
    long steps = 0;
    f(t, y, k1);  // FSAL
    while (t < t1) {
        if (++steps > opts.max_steps)
            throw NumericalError("ode: step limit exceeded");
        h = std::min(h, t1 - t);
        ytmp = y + h * (a21 * k1);
        f(t + c2 * h, ytmp, k2);
        ytmp = y + h * (a31 * k1 + a32 * k2);
        f(t + c3 * h, ytmp, k3);
        ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        f(t + c4 * h, ytmp, k4);
        ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        f(t + c5 * h, ytmp, k5);
        ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        f(t + h, ytmp, k6);
        ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        f(t + h, ynew, k7);
        yerr = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        const double sc_num = yerr.abs().maxCoeff();
        const double scale = opts.abs_tol +
                             opts.rel_tol * std::max(y.abs().maxCoeff(), ynew.abs().maxCoeff());
        const double err = sc_num / scale;
        if (err <= 1.0) {
            t += h;
            y.swap(ynew);
            k1.swap(k7);
            if (observe) observe(t, y);
            const double fac = 0.9 * std::pow(err > 1e-16 ? err : 1e-16, -0.7 / 5.0) *
                               std::pow(err_prev, 0.4 / 5.0);
            h = std::min(opts.h_max, h * std::clamp(fac, 0.2, 6.0));
            err_prev = std::max(err, 1e-16);
        } else {
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            if (h < opts.h_min)
                throw NumericalError("ode: step size underflow (stiffness or a bad grid)");
        }
    }
}

}  // namespace eitmem::ode
