#ifndef CAPLB_NELDER_MEAD_HPP
#define CAPLB_NELDER_MEAD_HPP

/// Derivative-free downhill-simplex minimizer (standard Nelder-Mead
/// coefficients: reflect 1, expand 2, contract 1/2, shrink 1/2).

#include <Eigen/Dense>
#include <algorithm>
#include <functional>
#include <vector>

namespace caplb {

struct NelderMeadOptions {
    double initial_step = 0.25;      // simplex edge length around x0
    double spread_tol = 1e-10;       // relative f-spread convergence
    double x_tol = 1e-10;            // simplex extent convergence (covers f -> 0)
    std::size_t max_evals = 100000;
};

struct NelderMeadResult {
    Eigen::VectorXd x;
    double fval = 0.0;
    std::size_t evals = 0;
    bool converged = false;
};

inline NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                                    const Eigen::VectorXd& x0,
                                    const NelderMeadOptions& opt = {}) {
    const int n = static_cast<int>(x0.size());
    std::vector<Eigen::VectorXd> v(n + 1, x0);
    std::vector<double> fv(n + 1);
    std::size_t evals = 0;
    auto eval = [&](const Eigen::VectorXd& p) {
        ++evals;
        return f(p);
    };

    for (int k = 0; k < n; ++k) v[k + 1](k) += opt.initial_step;
    for (int k = 0; k <= n; ++k) fv[k] = eval(v[k]);

    std::vector<int> order(n + 1);
    NelderMeadResult res;
    while (evals < opt.max_evals) {
        for (int k = 0; k <= n; ++k) order[k] = k;
        std::sort(order.begin(), order.end(), [&](int a, int b) { return fv[a] < fv[b]; });
        const int best = order[0], worst = order[n], second = order[n - 1];

        const double spread =
            std::abs(fv[worst] - fv[best]) / (std::abs(fv[best]) + std::abs(fv[worst]) + 1e-300);
        double extent = 0.0;
        for (int k = 0; k <= n; ++k)
            extent = std::max(extent, (v[k] - v[best]).template lpNorm<Eigen::Infinity>());
        if (spread < opt.spread_tol || extent < opt.x_tol) {
            res.converged = true;
            break;
        }

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (int k = 0; k <= n; ++k)
            if (k != worst) centroid += v[k];
        centroid /= double(n);

        const Eigen::VectorXd xr = centroid + (centroid - v[worst]);
        const double fr = eval(xr);
        if (fr < fv[order[0]]) {
            const Eigen::VectorXd xe = centroid + 2.0 * (centroid - v[worst]);
            const double fe = eval(xe);
            if (fe < fr) {
                v[worst] = xe;
                fv[worst] = fe;
            } else {
                v[worst] = xr;
                fv[worst] = fr;
            }
        } else if (fr < fv[second]) {
            v[worst] = xr;
            fv[worst] = fr;
        } else {
            const bool outside = fr < fv[worst];
            const Eigen::VectorXd xc =
                centroid + 0.5 * ((outside ? xr : v[worst]) - centroid);
            const double fc = eval(xc);
            if (fc < (outside ? fr : fv[worst])) {
                v[worst] = xc;
                fv[worst] = fc;
            } else {
                for (int k = 0; k <= n; ++k) {
                    if (k == best) continue;
                    v[k] = v[best] + 0.5 * (v[k] - v[best]);
                    fv[k] = eval(v[k]);
                }
            }
        }
    }

    int best = 0;
    for (int k = 1; k <= n; ++k)
        if (fv[k] < fv[best]) best = k;
    res.x = v[best];
    res.fval = fv[best];
    res.evals = evals;
    return res;
}

}  // namespace caplb

#endif
