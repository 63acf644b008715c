#ifndef PRCLAB_MODELS_HPP
#define PRCLAB_MODELS_HPP

#include "prclab/model.hpp"

namespace prclab {

/// Dimensionless Goodwin oscillator (K_e = K_p = tau_m = kappa = 1):
///   dm/dt = -m + K / (1 + (p+u)^nu)
///   de/dt = (m - e)/tau
///   dp/dt = (e - p)/tau,   y = m.
/// Free parameters lambda = (K, tau); the Hill exponent nu stays fixed.
struct GoodwinParams {
    double K = 2.5;
    double tau = 1.0;
    double nu = 20.0;
    void validate() const;
};
ModelDef goodwin_model(const GoodwinParams& params);

/// Morris-Lecar membrane model; the applied current receives the input u.
/// Units: mV, ms, uF/cm^2, mS/cm^2, uA/cm^2.
struct MorrisLecarParams {
    double C = 20.0;
    double g_Ca = 4.0, g_K = 8.0, g_L = 2.0;
    double V_Ca = 120.0, V_K = -80.0, V_L = -60.0;
    double V1 = -1.2, V2 = 18.0, V3 = 12.0, V4 = 17.4;
    double phi = 1.0 / 15.0;
    double I_app = 45.0;
    void validate() const;
};

/// Sweep parameters exposed in lambda; the remaining constants are frozen into
/// the callbacks. Default pair is (I_app, g_Ca). Supported names:
/// I_app, g_Ca, g_K, g_L, C, phi.
ModelDef morris_lecar_model(const MorrisLecarParams& params,
                            const std::vector<std::string>& sweep = {"I_app", "g_Ca"});

/// Planar clock with radial isochrons: the asymptotic phase is atan2(y,x), so
/// q(theta) = -g*sin(theta) exactly. lambda = (omega0, kappa, gain).
///   dx/dt = kappa*x*(1-x^2-y^2) - omega0*y + gain*u
///   dy/dt = kappa*y*(1-x^2-y^2) + omega0*x,   y_out = x.
struct RadialClockParams {
    double omega0 = two_pi;
    double kappa = 1.0;
    double gain = 1.0;
    void validate() const;
};
ModelDef radial_clock_model(const RadialClockParams& params);

/// Nominal parameter vector the factory bakes its defaults from.
Vec nominal_lambda(const GoodwinParams& p);
Vec nominal_lambda(const MorrisLecarParams& p, const std::vector<std::string>& sweep);
Vec nominal_lambda(const RadialClockParams& p);

}  // namespace prclab

#endif
