#ifndef PRCLAB_PRC_HPP
#define PRCLAB_PRC_HPP

#include <variant>

#include "prclab/orbit.hpp"

namespace prclab {

/// Gradient of the asymptotic phase map along the orbit, p(theta_i).
struct GradientCurve {
    CirclePartition partition;
    Mat p;  // n x (N+1), p.col(N) == p.col(0)
    double omega = 0.0;
    Scheme scheme = Scheme::MultipleShooting;
};

struct AdjointResult {
    GradientCurve gradient;
    PhaseSignal q;      // N samples, q_i = <p_i, dfdu(x_i)>
    double border_xi;   // bordering variable, ~0 at a consistent solution
};

struct AdjointOptions {
    OdeOptions ode{1e-11, 1e-13};
    double singular_threshold = 1e12;
    double xi_tol = 1e-6;  // relative to omega
};

/// Solves the bordered adjoint system matched to the orbit's scheme and grid;
/// requires a uniform partition.
AdjointResult adjoint_prc(const ModelDef& model, const PeriodicOrbit& orbit,
                          const AdjointOptions& opts = {});

struct ImpulseInput {
    double alpha = 0.0;
};
struct SignalInput {
    InputSignal u;
    double duration = 0.0;  // support of u: [0, duration]
    std::string label;
};
using PrcInput = std::variant<ImpulseInput, SignalInput>;

struct FinitePrc {
    Vec phases;        // sample phases theta_i
    Vec delta_theta;   // shifts in [-pi, pi)
    std::string input_desc;
    double alpha = std::numeric_limits<double>::quiet_NaN();  // impulse amplitude if applicable
    double eps = 0.0;  // convergence tolerance used
};

struct DirectPrcOptions {
    double eps_rel = 1e-6;   // convergence distance, relative to orbit diameter
    int max_periods = 50;
    OdeOptions ode{1e-11, 1e-13};
};

/// Direct method: perturb from x^gamma(theta_i), integrate until the
/// trajectory returns within eps of the orbit, estimate the asymptotic phase
/// by a Newton-refined argmin over the trigonometric orbit interpolant.
FinitePrc direct_prc(const ModelDef& model, const PeriodicOrbit& orbit, const PrcInput& input,
                     const Vec& phases, const DirectPrcOptions& opts = {});

/// Phase transition samples theta_i^+ = theta_i + delta_theta_i (mod 2*pi).
Vec ptc_from_prc(const FinitePrc& prc);

/// Convolution approximation PRC(theta) ~ integral q(omega*s + theta) u(s) ds.
double convolution_prc(const PhaseSignal& q, double omega, const PrcInput& input, double theta);

struct PhaseTrajectory {
    Vec t;
    Vec theta;  // wrapped to [0, 2*pi)
    Vec y;      // empty when no output map is given
};

/// Reduced phase model dtheta/dt = omega + q(theta) u(t), y = h~(theta).
/// h_tilde holds samples of h(x^gamma(theta)) and may be empty.
PhaseTrajectory simulate_phase_model(double omega, const PhaseSignal& q, const PhaseSignal& h_tilde,
                                     const InputSignal& u, double theta0, double t_end,
                                     double dt_out, const OdeOptions& opts = {});

struct HybridTrajectory {
    Vec t;           // output sample times
    Vec theta;       // wrapped phase at samples
    Vec jump_times;  // accepted impulse times
    Vec theta_pre, theta_post;
};

/// Hybrid phase model: dtheta/dt = omega between impulses, jump
/// theta+ = theta + PRC(theta) at each t_k. The PRC is interpolated
/// trigonometrically from its samples.
HybridTrajectory simulate_hybrid_phase_model(double omega, const Vec& prc_phases,
                                             const Vec& prc_values, const Vec& impulse_times,
                                             double theta0, double t_end, double dt_out);

/// Output samples h(x^gamma(theta_i), lambda) on the orbit's grid (length N).
PhaseSignal output_signal(const ModelDef& model, const PeriodicOrbit& orbit);

}  // namespace prclab

#endif
