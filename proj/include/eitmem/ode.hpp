#pragma once

// Small ODE toolkit for complex state vectors: classic fixed-step RK4 and
// an adaptive Dormand-Prince 5(4) with PI step control. Deterministic:
// no randomness, step decisions depend only on the state.

#include <Eigen/Dense>
#include <functional>

#include "eitmem/errors.hpp"

namespace eitmem::ode {

using State = Eigen::ArrayXcd;
using Rhs = std::function<void(double t, const State& y, State& dydt)>;

inline void rk4_step(const Rhs& f, double t, double h, State& y, State& k1, State& k2,
                     State& k3, State& k4, State& tmp) {
    f(t, y, k1);
    tmp = y + 0.5 * h * k1;
    f(t + 0.5 * h, tmp, k2);
    tmp = y + 0.5 * h * k2;
    f(t + 0.5 * h, tmp, k3);
    tmp = y + h * k3;
    f(t + h, tmp, k4);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Integrate from t0 to t1 with fixed step <= h; lands exactly on t1.
inline void rk4_integrate(const Rhs& f, double t0, double t1, double h, State& y) {
    if (t1 <= t0) return;
    const int n = std::max(1, static_cast<int>(std::ceil((t1 - t0) / h)));
    const double step = (t1 - t0) / n;
    State k1, k2, k3, k4, tmp;
    double t = t0;
    for (int i = 0; i < n; ++i, t = t0 + (i * (t1 - t0)) / n)
        rk4_step(f, t, step, y, k1, k2, k3, k4, tmp);
}

struct AdaptiveOptions {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double h_init = 1e-2;
    double h_min = 1e-12;
    double h_max = 1e30;
    long max_steps = 200000000L;
};

// Dormand-Prince 5(4). Integrates to exactly t1; `observe`, when set, is
// called after every accepted step.
void dormand_prince(const Rhs& f, double t0, double t1, State& y,
                    const AdaptiveOptions& opts = {},
                    const std::function<void(double, const State&)>& observe = nullptr);

}  // namespace eitmem::ode
