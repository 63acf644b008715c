#ifndef PRCLAB_ORBIT_HPP
#define PRCLAB_ORBIT_HPP

#include "prclab/fourier.hpp"
#include "prclab/integrate.hpp"

namespace prclab {

enum class Scheme { MultipleShooting, Trapezoidal };

const char* scheme_name(Scheme s);

/// Anchor Psi(x_0) = 0 fixing the phase origin on the orbit.
struct PhaseCondition {
    enum class Kind { ComponentAnchor, Orthogonality };
    Kind kind = Kind::ComponentAnchor;
    int component = 0;   // ComponentAnchor
    double level = 0.0;  // ComponentAnchor
    Vec ref_point;       // Orthogonality
    Vec tangent;         // Orthogonality

    double value(const Vec& x0) const;
    Vec gradient(int n) const;
};

struct PeriodicOrbit {
    CirclePartition partition;
    Mat x;  // n x (N+1) node states, x.col(N) == x.col(0)
    double omega = 0.0;
    Scheme scheme = Scheme::MultipleShooting;
    double residual_norm = 0.0;
    Vec lambda;
    PhaseCondition phase;

    int n() const { return static_cast<int>(x.rows()); }
    int N() const { return partition.segments(); }
    double period() const { return two_pi / omega; }
    /// Sup over nodes and components of the oscillation amplitude.
    double diameter() const;
    CurveInterp interpolant() const { return CurveInterp(x); }
};

struct GuessOptions {
    double settle_time = 100.0;
    double observe_time = 0.0;  // 0: same as settle_time
    int N = 256;
    OdeOptions ode;
    double min_amplitude = 1e-6;  // relative to 1 + |mean(y)|
};

/// Simulates past transients, detects one cycle by upward crossings of the
/// output through its midrange, and resamples it on the partition phases.
/// Throws NoCycleDetected when the trajectory settles to a fixed point or no
/// complete cycle fits the observation window.
PeriodicOrbit initial_guess(const ModelDef& model, const Vec& lam, const Vec& x_seed,
                            const GuessOptions& opts);

/// Component anchor at the guess's initial node: the component of largest
/// oscillation amplitude, unless the cycle crosses its level tangentially
/// there, in which case the most transversal component takes over.
PhaseCondition anchor_from_guess(const ModelDef& model, const PeriodicOrbit& guess);

/// Orthogonality condition <x_0 - ref, f(ref)> = 0 at the guess's initial node.
PhaseCondition orthogonality_from_guess(const ModelDef& model, const PeriodicOrbit& guess,
                                        const Vec& lam);

struct NewtonOptions {
    double tol = 1e-10;  // on the sup-norm of the residual
    int max_iter = 30;
    double min_damping = 9.5367431640625e-07;  // 2^-20
    double singular_threshold = 1e12;          // 1-norm condition estimate
    OdeOptions ode{1e-11, 1e-13};
};

/// Newton's method on the discretized periodic BVP with the bordered linear
/// solve; returns the converged orbit (closure x_N = x_0 exact).
PeriodicOrbit newton_orbit(const ModelDef& model, const Vec& lam, const PeriodicOrbit& guess,
                           Scheme scheme, const PhaseCondition& phase, const NewtonOptions& opts);

/// Periodic reinterpolation onto N_new segments (trigonometric on uniform
/// grids, periodic cubic otherwise); the result is a guess for newton_orbit.
PeriodicOrbit resample_orbit(const PeriodicOrbit& orbit, int N_new);

/// initial_guess + anchor + newton_orbit.
PeriodicOrbit solve_orbit(const ModelDef& model, const Vec& lam, const Vec& x_seed,
                          const GuessOptions& gopts, Scheme scheme, const NewtonOptions& nopts);

}  // namespace prclab

#endif
