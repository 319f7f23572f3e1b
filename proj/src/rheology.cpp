#include "caplb/rheology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "caplb/nelder_mead.hpp"

namespace caplb {

std::vector<ViscositySample> mouse_blood_samples() {
    return {
        {2.0, 18.94e-3, "vogel2003"},  {5.0, 13.33e-3, "vogel2003"},
        {11.0, 10.52e-3, "vogel2003"}, {23.0, 8.07e-3, "vogel2003"},
        {45.0, 6.31e-3, "vogel2003"},  {90.0, 5.96e-3, "vogel2003"},
        {225.0, 4.91e-3, "vogel2003"}, {450.0, 3.85e-3, "vogel2003"},
        {0.7, 13.36e-3, "windberger2003"},
        {2.4, 10.56e-3, "windberger2003"},
        {94.0, 4.87e-3, "windberger2003"},
    };
}

RheologyModel RheologyModel::newtonian(double eta_pa_s, double tau_target) {
    if (!(eta_pa_s > 0.0)) throw std::invalid_argument("newtonian: eta must be positive");
    if (!(tau_target > 0.5)) throw std::invalid_argument("newtonian: tau target must exceed 1/2");
    RheologyModel m;
    m.newtonian_ = true;
    m.eta_ = eta_pa_s;
    m.tau0_ = tau_target;
    return m;
}

RheologyModel RheologyModel::carreau_yasuda(const CarreauYasudaParams& p, double tau_inf,
                                            double tau0) {
    p.validate();
    if (!(tau_inf > 0.5) || !(tau0 > tau_inf))
        throw std::invalid_argument("carreau_yasuda: require 0.5 < tau_inf < tau0");
    RheologyModel m;
    m.newtonian_ = false;
    m.cy_ = p;
    m.tau_inf_ = tau_inf;
    m.tau0_ = tau0;
    return m;
}

double RheologyModel::viscosity(double gamma_dot) const {
    if (gamma_dot < 0.0) throw std::invalid_argument("viscosity: negative shear rate");
    return newtonian_ ? eta_ : cy_(gamma_dot);
}

double RheologyModel::tau(double gamma_dot, const UnitBridge& bridge) const {
    if (newtonian_) {
        return UnitBridge::tau_from_nu(bridge.lattice_viscosity(eta_));
    }
    const double eta = cy_(std::max(gamma_dot, 0.0));
    const double frac = (eta - cy_.eta_inf) / (cy_.eta0 - cy_.eta_inf);
    const double tau = tau_inf_ + (tau0_ - tau_inf_) * frac;
    return std::clamp(tau, tau_inf_, tau0_);
}

UnitBridge RheologyModel::make_bridge(double dx_m, double rho_kg_m3) const {
    if (newtonian_) {
        return UnitBridge::from_tau_target(dx_m, eta_, tau0_, rho_kg_m3);
    }
    return UnitBridge::from_tau_target(dx_m, cy_.eta_inf, tau_inf_, rho_kg_m3);
}

CarreauYasudaParams cy_initial_guess(const std::vector<ViscositySample>& samples) {
    if (samples.empty()) throw std::invalid_argument("cy_initial_guess: no samples");
    double lo = samples[0].viscosity, hi = samples[0].viscosity;
    std::vector<double> rates;
    rates.reserve(samples.size());
    for (const auto& s : samples) {
        lo = std::min(lo, s.viscosity);
        hi = std::max(hi, s.viscosity);
        rates.push_back(s.shear_rate);
    }
    std::sort(rates.begin(), rates.end());
    const double median = rates[rates.size() / 2];
    return {hi, lo, median > 0.0 ? 1.0 / median : 1.0, 2.0, 0.5};
}

namespace {

// Transform enforcing the CY constraints structurally:
// x = (ln eta_inf, ln(eta0 - eta_inf), ln lambda, ln a, logit n).
Eigen::VectorXd cy_to_vec(const CarreauYasudaParams& p) {
    Eigen::VectorXd x(5);
    x << std::log(p.eta_inf), std::log(p.eta0 - p.eta_inf), std::log(p.lambda),
        std::log(p.a), std::log(p.n / (1.0 - p.n));
    return x;
}

CarreauYasudaParams vec_to_cy(const Eigen::VectorXd& x) {
    CarreauYasudaParams p;
    p.eta_inf = std::exp(x(0));
    p.eta0 = p.eta_inf + std::exp(x(1));
    p.lambda = std::exp(x(2));
    p.a = std::exp(x(3));
    p.n = 1.0 / (1.0 + std::exp(-x(4)));
    return p;
}

double sum_sq_residual(const CarreauYasudaParams& p,
                       const std::vector<ViscositySample>& samples) {
    double ss = 0.0;
    for (const auto& s : samples) {
        const double r = p(s.shear_rate) - s.viscosity;
        ss += r * r;
    }
    return ss;
}

CyFitResult make_result(const CarreauYasudaParams& p,
                        const std::vector<ViscositySample>& samples, std::size_t evals,
                        bool converged) {
    CyFitResult r;
    r.params = p;
    r.residuals.reserve(samples.size());
    double ss = 0.0;
    for (const auto& s : samples) {
        const double res = p(s.shear_rate) - s.viscosity;
        r.residuals.push_back(res);
        ss += res * res;
    }
    r.rms = std::sqrt(ss / double(samples.size()));
    r.evals = evals;
    r.converged = converged;
    return r;
}

}  // namespace

CyFitResult fit_cy(const std::vector<ViscositySample>& samples,
                   const CarreauYasudaParams& initial) {
    if (samples.size() < 6)
        throw std::invalid_argument("fit_cy: need at least 6 samples");
    double gmin = samples[0].shear_rate, gmax = samples[0].shear_rate;
    for (const auto& s : samples) {
        if (s.shear_rate < 0.0 || !(s.viscosity > 0.0))
            throw std::invalid_argument("fit_cy: invalid sample");
        gmin = std::min(gmin, s.shear_rate);
        gmax = std::max(gmax, s.shear_rate);
    }
    if (!(gmax >= 100.0 * gmin) || gmin <= 0.0)
        throw std::invalid_argument("fit_cy: samples must span two decades of shear rate");
    initial.validate();

    auto objective = [&](const Eigen::VectorXd& x) {
        return sum_sq_residual(vec_to_cy(x), samples);
    };

    NelderMeadOptions opt;
    opt.initial_step = 0.25;
    opt.spread_tol = 1e-10;
    opt.max_evals = 100000;

    // Restarted simplex cycles: a coarse re-exploration followed by a
    // shrinking-step descent, repeated until a whole cycle no longer
    // improves the optimum. Running to this fixed point makes the fit
    // idempotent on its own output.
    Eigen::VectorXd x = cy_to_vec(initial);
    NelderMeadResult best = nelder_mead(objective, x, opt);
    std::size_t evals = best.evals;
    auto descend = [&](double step, double x_tol) {
        NelderMeadOptions ropt = opt;
        ropt.max_evals = opt.max_evals > evals ? opt.max_evals - evals : 0;
        ropt.initial_step = step;
        ropt.x_tol = x_tol;
        NelderMeadResult r = nelder_mead(objective, best.x, ropt);
        evals += r.evals;
        const bool gained = r.fval < best.fval * (1.0 - 1e-14);
        if (r.fval <= best.fval) {
            const bool conv = best.converged;
            best = r;
            best.converged = conv && r.converged;
        }
        return gained;
    };
    for (int cycle = 0; cycle < 20 && evals < opt.max_evals; ++cycle) {
        bool improved = descend(0.05, opt.x_tol);
        for (double step = 1e-2; step >= 1e-9 && evals < opt.max_evals; step *= 0.1)
            improved |= descend(step, std::min(1e-4 * step, 1e-10));
        if (!improved && best.converged) break;
    }

    CyFitResult result = make_result(vec_to_cy(best.x), samples, evals, best.converged);
    if (!best.converged) {
        throw CyFitError("fit_cy: simplex did not converge within the evaluation budget",
                         result);
    }
    return result;
}

std::vector<ViscositySample> load_viscosity_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open viscosity CSV: " + path);
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("empty viscosity CSV: " + path);
    auto strip = [](std::string s) {
        s.erase(0, s.find_first_not_of(" \t\r"));
        s.erase(s.find_last_not_of(" \t\r") + 1);
        return s;
    };
    if (strip(line) != "shear_rate_per_s,viscosity_mpas,source")
        throw std::runtime_error("viscosity CSV: unexpected header '" + line + "'");
    std::vector<ViscositySample> samples;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (strip(line).empty()) continue;
        std::istringstream ss(line);
        std::string rate, visc, source;
        if (!std::getline(ss, rate, ',') || !std::getline(ss, visc, ','))
            throw std::runtime_error("viscosity CSV: malformed line " + std::to_string(lineno));
        std::getline(ss, source);
        ViscositySample s;
        s.shear_rate = std::stod(rate);
        s.viscosity = std::stod(visc) * 1e-3;  // mPa s -> Pa s
        s.source = strip(source);
        if (s.shear_rate < 0.0 || !(s.viscosity > 0.0))
            throw std::runtime_error("viscosity CSV: invalid values at line " +
                                     std::to_string(lineno));
        samples.push_back(std::move(s));
    }
    return samples;
}

void save_viscosity_csv(const std::string& path, const std::vector<ViscositySample>& samples) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write viscosity CSV: " + path);
    out << "shear_rate_per_s,viscosity_mpas,source\n";
    out.precision(12);
    for (const auto& s : samples)
        out << s.shear_rate << "," << s.viscosity * 1e3 << "," << s.source << "\n";
}

}  // namespace caplb
