#ifndef CAPLB_RHEOLOGY_HPP
#define CAPLB_RHEOLOGY_HPP

/// Blood viscosity models: Newtonian constant or Carreau-Yasuda
/// shear-thinning, plus a least-squares fit of the CY parameters to
/// tabulated viscosity measurements.

#include <stdexcept>
#include <string>
#include <vector>

#include "caplb/units.hpp"

namespace caplb {

/// Five-parameter Carreau-Yasuda law
///   eta(g) = eta_inf + (eta0 - eta_inf) [1 + (lambda g)^a]^((n-1)/a)
/// interpolating between a low-shear plateau eta0 and a high-shear
/// plateau eta_inf.
template <typename Scalar = double>
struct CarreauYasuda {
    Scalar eta0;      // zero-shear viscosity [Pa s]
    Scalar eta_inf;   // infinite-shear viscosity [Pa s]
    Scalar lambda;    // relaxation time [s]
    Scalar a;         // transition exponent
    Scalar n;         // power-law index, shear-thinning requires n in (0,1)

    void validate() const {
        if (!(eta0 > eta_inf) || !(eta_inf > Scalar(0)))
            throw std::invalid_argument("CarreauYasuda: require eta0 > eta_inf > 0");
        if (!(lambda > Scalar(0)) || !(a > Scalar(0)))
            throw std::invalid_argument("CarreauYasuda: require lambda > 0 and a > 0");
        if (!(n > Scalar(0)) || !(n < Scalar(1)))
            throw std::invalid_argument("CarreauYasuda: require 0 < n < 1");
    }

    Scalar operator()(Scalar gamma_dot) const {
        if (gamma_dot < Scalar(0))
            throw std::invalid_argument("CarreauYasuda: negative shear rate");
        using std::pow;
        const Scalar bracket = Scalar(1) + pow(lambda * gamma_dot, a);
        return eta_inf + (eta0 - eta_inf) * pow(bracket, (n - Scalar(1)) / a);
    }
};

using CarreauYasudaParams = CarreauYasuda<double>;

/// Mouse blood fit used throughout (eta in Pa s).
inline CarreauYasudaParams mouse_blood_cy() {
    return {14.49e-3, 3.265e-3, 0.1839, 2.707, 0.4136};
}

struct ViscositySample {
    double shear_rate;   // 1/s
    double viscosity;    // Pa s
    std::string source;
};

/// Viscosity measurements compiled for mice (shear rate 1/s, eta Pa s).
std::vector<ViscositySample> mouse_blood_samples();

/// One viscosity law handed to the solver. A Newtonian model maps to a
/// single relaxation time through the unit bridge; a Carreau-Yasuda model
/// maps its plateau viscosities onto a configured [tau_inf, tau0] range,
/// affinely in viscosity, so that both plateaus land on their target
/// relaxation times exactly.
class RheologyModel {
public:
    static RheologyModel newtonian(double eta_pa_s, double tau_target = 0.8);
    static RheologyModel carreau_yasuda(const CarreauYasudaParams& p,
                                        double tau_inf = 0.6, double tau0 = 0.992);

    bool is_newtonian() const { return newtonian_; }
    const CarreauYasudaParams& cy() const { return cy_; }
    double tau_inf() const { return tau_inf_; }
    double tau0() const { return tau0_; }

    /// Dynamic viscosity [Pa s] at a physical shear rate [1/s].
    double viscosity(double gamma_dot) const;

    /// Relaxation time for the collision operator. Clamped to
    /// [tau_inf, tau0] for the shear-thinning model.
    double tau(double gamma_dot, const UnitBridge& bridge) const;

    /// Timestep that realises this model's relaxation-time targets at
    /// voxel size dx: Newtonian anchors eta at tau0 (= its single tau
    /// target); Carreau-Yasuda anchors eta_inf at tau_inf.
    UnitBridge make_bridge(double dx_m, double rho_kg_m3 = 1000.0) const;

private:
    RheologyModel() = default;
    bool newtonian_ = true;
    double eta_ = 0.0;
    CarreauYasudaParams cy_{};
    double tau_inf_ = 0.6;
    double tau0_ = 0.992;
};

struct CyFitResult {
    CarreauYasudaParams params;
    std::vector<double> residuals;   // model - sample, per sample [Pa s]
    double rms = 0.0;                // root-mean-square residual [Pa s]
    std::size_t evals = 0;
    bool converged = false;
};

/// Thrown when the simplex search exhausts its evaluation budget; carries
/// the best parameters found so far.
struct CyFitError : std::runtime_error {
    CyFitError(const std::string& what, const CyFitResult& best_so_far)
        : std::runtime_error(what), best(best_so_far) {}
    CyFitResult best;
};

/// Unweighted least-squares Carreau-Yasuda fit (Nelder-Mead in transformed
/// parameter space: logs for the positive parameters, logit for n).
/// Requires at least 6 samples spanning two decades of shear rate.
CyFitResult fit_cy(const std::vector<ViscositySample>& samples,
                   const CarreauYasudaParams& initial);

/// Data-driven initial guess: plateaus from the sample extremes,
/// lambda from the median shear rate, a = 2, n = 0.5.
CarreauYasudaParams cy_initial_guess(const std::vector<ViscositySample>& samples);

/// CSV with header `shear_rate_per_s,viscosity_mpas,source`.
std::vector<ViscositySample> load_viscosity_csv(const std::string& path);
void save_viscosity_csv(const std::string& path, const std::vector<ViscositySample>& samples);

}  // namespace caplb

#endif
