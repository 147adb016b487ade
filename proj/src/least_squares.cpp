#include "eitmem/least_squares.hpp"

#include <cmath>

namespace eitmem::lsq {

MatrixXd numeric_jacobian(const ResidualFn& f, const VectorXd& x, double rel_step) {
    const VectorXd r0 = f(x);
    MatrixXd jac(r0.size(), x.size());
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        const double h = rel_step * std::max(1.0, std::abs(x[j]));
        VectorXd xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        jac.col(j) = (f(xp) - f(xm)) / (2.0 * h);
    }
    return jac;
}

Result levenberg_marquardt(const ResidualFn& f, const VectorXd& x0, const Options& opts) {
    Result res;
    res.x = x0;
    VectorXd r = f(res.x);
    double chi2 = r.squaredNorm();
    double lambda = opts.lambda0;

    for (res.iterations = 0; res.iterations < opts.max_iterations; ++res.iterations) {
        const MatrixXd jac = numeric_jacobian(f, res.x, opts.fd_step);
        const MatrixXd jtj = jac.transpose() * jac;
        const VectorXd g = jac.transpose() * r;

        bool stepped = false;
        for (int tries = 0; tries < 40; ++tries) {
            MatrixXd a = jtj;
            a.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-14);
            const VectorXd dx = a.ldlt().solve(-g);
            const VectorXd xn = res.x + dx;
            const VectorXd rn = f(xn);
            const double cn = rn.squaredNorm();
            if (std::isfinite(cn) && cn <= chi2) {
                const double rel_gain = (chi2 - cn) / std::max(chi2, 1e-300);
                const double step = dx.norm() / std::max(1.0, res.x.norm());
                res.x = xn;
                r = rn;
                chi2 = cn;
                lambda = std::max(lambda * 0.3, 1e-14);
                stepped = true;
                if (step < opts.xtol || rel_gain < opts.ftol) {
                    res.converged = true;
                }
                break;
            }
            lambda *= 8.0;
        }
        if (res.converged) break;
        if (!stepped) {
            // no damping produced an improvement; accept current point
            res.converged = chi2 < 1e-300 || g.lpNorm<Eigen::Infinity>() < 1e-12;
            break;
        }
    }

    res.chi2 = chi2;
    const MatrixXd jac = numeric_jacobian(f, res.x, opts.fd_step);
    MatrixXd jtj = jac.transpose() * jac;
    jtj.diagonal() += VectorXd::Constant(jtj.rows(), 1e-300);
    const double dof = std::max<double>(1.0, static_cast<double>(r.size()) -
                                                 static_cast<double>(res.x.size()));
    res.covariance = jtj.inverse() * (chi2 / dof);
    return res;
}

}  // namespace eitmem::lsq
