#pragma once

// Damped least squares (Levenberg-Marquardt) on Eigen vectors with a
// central-difference Jacobian. Deterministic and dependency-free; the fit
// problems here are small (a handful of parameters, O(10^3) residuals).

#include <Eigen/Dense>
#include <functional>

#include "eitmem/errors.hpp"

namespace eitmem::lsq {

using Eigen::MatrixXd;
using Eigen::VectorXd;

using ResidualFn = std::function<VectorXd(const VectorXd&)>;

struct Options {
    int max_iterations = 200;
    double xtol = 1e-12;       // step-size convergence
    double ftol = 1e-14;       // relative chi^2 improvement
    double lambda0 = 1e-3;     // initial damping
    double fd_step = 1e-6;     // relative finite-difference step
};

struct Result {
    VectorXd x;
    MatrixXd covariance;  // (J^T J)^-1 scaled by chi^2/dof
    double chi2 = 0.0;
    int iterations = 0;
    bool converged = false;
};

MatrixXd numeric_jacobian(const ResidualFn& f, const VectorXd& x, double rel_step);

Result levenberg_marquardt(const ResidualFn& f, const VectorXd& x0,
                           const Options& opts = {});

}  // namespace eitmem::lsq
