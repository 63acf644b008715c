#ifndef PRCLAB_INTEGRATE_HPP
#define PRCLAB_INTEGRATE_HPP

#include <functional>

#include "prclab/model.hpp"

namespace prclab {

struct OdeOptions {
    double rtol = 1e-9;
    double atol = 1e-11;
    long max_steps = 20'000'000;
    double initial_step = 0.0;  // 0: choose automatically
};

using OdeRhs = std::function<void(double, const Vec&, Vec&)>;
using StepObserver = std::function<void(double, const Vec&)>;

/// Adaptive Dormand-Prince 5(4) from t0 to t1 (t1 >= t0). The observer, when
/// given, sees every accepted step including the initial and final states.
Vec ode_solve(const OdeRhs& rhs, double t0, double t1, const Vec& y0, const OdeOptions& opts,
              const StepObserver& observer = nullptr);

/// Integrates once and records the state at each requested time (ascending,
/// within [t0, t1]); steps land exactly on the sample times.
std::vector<Vec> ode_solve_samples(const OdeRhs& rhs, double t0, double t1, const Vec& y0,
                                   const std::vector<double>& times, const OdeOptions& opts);

/// Input signal u(t); a null function means u = 0.
using InputSignal = std::function<double(double)>;

enum FlowBlocks : unsigned {
    FlowStateOnly = 0,
    FlowFundamental = 1u << 0,  // Phi = dphi/dx0
    FlowParamJacobian = 1u << 1,  // dphi/dlambda
    FlowEndVelocity = 1u << 2,  // f(x_end)
};

struct FlowResult {
    Vec x_end;
    Mat Phi;        // n x n, when requested
    Mat dphi_dlam;  // n x l, when requested
    Vec f_end;      // when requested
};

/// Flow phi(t, x0, u) of the model, with the variational and parameter-
/// sensitivity blocks integrated jointly with the state when requested.
FlowResult flow(const ModelDef& model, double t, const Vec& x0, const InputSignal& u,
                const Vec& lam, const OdeOptions& opts, unsigned blocks = FlowStateOnly);

/// Dirac impulse u = alpha*delta realized as the state jump x0 + alpha*dfdu,
/// followed by zero-input flow for t_after.
Vec impulse_flow(const ModelDef& model, const Vec& x0, double alpha, const Vec& lam,
                 double t_after = 0.0, const OdeOptions& opts = {});

}  // namespace prclab

#endif
