#ifndef PRCLAB_DETAIL_BORDERED_HPP
#define PRCLAB_DETAIL_BORDERED_HPP

#include "prclab/orbit.hpp"

namespace prclab::detail {

/// Per-segment blocks of the discretized periodic BVP at a given point
/// (x_Pi, omega, lambda). Rows of the (N+1)n x (N+1)n matrix A are
/// [G_i, -H_i] for i < N plus the closure row [-I, ..., I]; the bordered
/// column is b = dr/domega.
struct OrbitBlocks {
    std::vector<Mat> G, H;   // N entries each
    std::vector<Vec> b;      // N entries
    std::vector<Vec> r;      // N residuals
    std::vector<Mat> Phi;    // shooting: fundamental matrix per segment
    std::vector<Mat> dphi_dlam;  // shooting, on request: n x l per segment
    std::vector<Vec> f_node;     // f(x_i, 0, lambda) at the N+1 nodes
};

OrbitBlocks orbit_blocks(const ModelDef& model, const CirclePartition& part, const Mat& x,
                         double omega, const Vec& lam, Scheme scheme, const OdeOptions& ode,
                         bool with_param_jacobian);

/// Dense bordered Jacobian [[A, b], [dPsi/dx0, 0]] of size (N+1)n+1.
Mat assemble_orbit_matrix(const OrbitBlocks& blocks, const PhaseCondition& phase, int n, int N);

/// Stacked residual (r_0..r_{N-1}, x_N - x_0, Psi(x_0)).
Vec assemble_orbit_residual(const OrbitBlocks& blocks, const PhaseCondition& phase, const Mat& x);

/// Adjoint matrix A~ with rows [G~_i, -H~_i] and closure [-I, ..., I],
/// bordered by b^p = v_Pi, c^p = P^T v_Pi, d^p = 1.
struct AdjointSystem {
    Mat bordered;   // (N+1)n+1 square
    Vec weights;    // node quadrature weights of P (length N+1, already /2pi or /(N+1))
    Vec v_stacked;  // v_Pi
};

AdjointSystem adjoint_system(const ModelDef& model, const PeriodicOrbit& orbit,
                             const OrbitBlocks& blocks);

/// Higham/Hager 1-norm condition estimate from a factorization.
double condition_estimate_1norm(const Eigen::PartialPivLU<Mat>& lu, double anorm1, int size);

}  // namespace prclab::detail

#endif
