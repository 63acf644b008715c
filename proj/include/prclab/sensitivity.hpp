#ifndef PRCLAB_SENSITIVITY_HPP
#define PRCLAB_SENSITIVITY_HPP

#include "prclab/prc.hpp"

namespace prclab {

/// Parametric sensitivities of the discrete orbit, gradient curve and
/// infinitesimal PRC, one entry per model parameter.
struct SensitivityBundle {
    Vec S_omega;               // l
    std::vector<Mat> S_x;      // n x (N+1) per parameter
    std::vector<Mat> S_p;      // n x (N+1) per parameter
    std::vector<PhaseSignal> S_q;  // N samples per parameter
    bool relative_scaled = false;
};

struct SensitivityOptions {
    OdeOptions ode{1e-11, 1e-13};
    double fd_step_rel = 1e-6;  // shooting-scheme d(Phi)/dlambda finite difference
    double residual_tol = 1e-8; // sanity bound on linear-system residuals
};

/// Solves the orbit's bordered system (one factorization) for the right-hand
/// sides of every requested parameter; returns (S_omega_j, S_x_j) pairs.
void orbit_sensitivity(const ModelDef& model, const PeriodicOrbit& orbit,
                       const std::vector<int>& params, SensitivityBundle& out,
                       const SensitivityOptions& opts = {});

/// Solves the bordered adjoint system for S_p and contracts to S_q; requires
/// orbit_sensitivity results for the same parameters in `bundle`.
void prc_sensitivity(const ModelDef& model, const PeriodicOrbit& orbit,
                     const AdjointResult& adjoint, const std::vector<int>& params,
                     SensitivityBundle& bundle, const SensitivityOptions& opts = {});

/// Full bundle for all parameters: orbit_sensitivity + prc_sensitivity.
SensitivityBundle sensitivity_bundle(const ModelDef& model, const PeriodicOrbit& orbit,
                                     const AdjointResult& adjoint,
                                     const SensitivityOptions& opts = {});

/// S_T = -T * S_omega / omega.
double period_sensitivity(double S_omega, double omega);

/// Relative sensitivity lambda_j/||c|| * S^c for a scalar characteristic.
double relative_sensitivity(double c_norm, double S_c, double lambda_j);

/// Relative sensitivity of a signal characteristic; c_norm is the norm of the
/// characteristic in its own space.
PhaseSignal relative_sensitivity(double c_norm, const PhaseSignal& S_c, double lambda_j);

}  // namespace prclab

#endif
