#ifndef PRCLAB_ANALYSIS_HPP
#define PRCLAB_ANALYSIS_HPP

#include "prclab/metrics.hpp"
#include "prclab/sensitivity.hpp"

namespace prclab {

// ---- robustness ----

struct RobustnessReport {
    std::vector<std::string> labels;
    Vec R_omega, R_q;      // scalar robustness measures per parameter
    Vec rho_omega, rho_q;  // max-normalized variants
    bool normalized_omega = true, normalized_q = true;  // false when R == 0
    PrcSpace space = PrcSpace::D;
    bool relative = true;
    std::vector<int> ranking_q;      // parameter indices, most influential first
    std::vector<int> ranking_omega;
};

/// R^omega_j = |S^omega_j|, R^q_j = ||P^h S^q_j||_q; relative scaling
/// multiplies by lambda_j and divides by the characteristic norm.
RobustnessReport robustness(const ModelDef& model, const PeriodicOrbit& orbit,
                            const AdjointResult& adjoint, const SensitivityBundle& bundle,
                            PrcSpace space, bool relative);

// ---- gradient-descent identification ----

struct CostGradient {
    double cost = 0.0;      // 1/2 dist^2
    double dist = 0.0;
    Vec grad;               // d cost / d lambda_j
    double sigma_star = 0.0;  // alignment shift used in C/D
    bool antipodal = false;   // arccos derivative singular (dist == pi)
};

/// Cost 1/2 dist(q(lambda), q_ref)^2 and its parameter gradient through the
/// horizontal projections; sigma* enters as a constant by the envelope
/// argument.
CostGradient grad_cost(PrcSpace space, const PhaseSignal& q, const PhaseSignal& q_ref,
                       const std::vector<PhaseSignal>& S_q);

struct IdentifyOptions {
    PrcSpace space = PrcSpace::D;
    int max_iter = 100;
    double grad_tol = 1e-8;
    double cost_tol = 1e-14;     // stop when an accepted step improves less than this
    double armijo_c1 = 1e-4;
    double backtrack = 0.5;
    double initial_move = 0.0;   // first trial ||delta lambda||; 0: 5% of ||lambda0||
    int N = 256;
    Scheme scheme = Scheme::Trapezoidal;
    GuessOptions guess;          // used on the first solve and after failures
    NewtonOptions newton;
    SensitivityOptions sens;
};

struct IdentifyTracePoint {
    Vec lambda;
    double cost;
    double grad_norm;
    double step;
};

enum class IdentifyStatus { GradientConverged, CostConverged, MaxIterations, BoundaryReached };

struct IdentifyState {
    Vec lambda;
    double cost = 0.0;
    double dist = 0.0;
    Vec grad;
    int iterations = 0;
    IdentifyStatus status = IdentifyStatus::MaxIterations;
    std::vector<IdentifyTracePoint> trace;  // accepted iterates, cost non-increasing
};

/// Armijo-backtracked gradient descent on the PRC-matching cost; each iterate
/// re-solves orbit, adjoint and per-parameter sensitivities. Orbit failures at
/// trial points backtrack; when every damping fails the descent stops with
/// BoundaryReached (the oscillation region boundary).
IdentifyState identify(const ModelDef& model, const PhaseSignal& q_ref, const Vec& lambda0,
                       const Vec& x_seed, const IdentifyOptions& opts);

// ---- classification ----

struct Classification {
    enum class Label { ClassQ1, ClassQ2, Tie };
    Label label = Label::Tie;
    double d1 = 0.0, d2 = 0.0;
};

const char* classification_name(Classification::Label l);

/// Canonical curves on an N-grid.
PhaseSignal canonical_q1(int N);  // 1 - cos(theta)
PhaseSignal canonical_q2(int N);  // sin(theta + pi)

/// Distance-based label against the canonical curves (space D by default).
Classification classify(const PhaseSignal& q, PrcSpace space = PrcSpace::D,
                        double tie_tol = 1e-9);

}  // namespace prclab

#endif
