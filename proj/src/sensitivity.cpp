#include "prclab/sensitivity.hpp"

#include "prclab/detail/bordered.hpp"
#include "prclab/parallel.hpp"

namespace prclab {

namespace {

void require_converged(const PeriodicOrbit& orbit) {
    if (!(orbit.residual_norm < 1e-4))
        throw std::invalid_argument("sensitivity: orbit is not converged");
}

}  // namespace

void orbit_sensitivity(const ModelDef& model, const PeriodicOrbit& orbit,
                       const std::vector<int>& params, SensitivityBundle& out,
                       const SensitivityOptions& opts) {
    require_converged(orbit);
    const int n = orbit.n();
    const int N = orbit.N();
    const CirclePartition& part = orbit.partition;
    const bool shooting = orbit.scheme == Scheme::MultipleShooting;

    const detail::OrbitBlocks blocks = detail::orbit_blocks(
        model, part, orbit.x, orbit.omega, orbit.lambda, orbit.scheme, opts.ode, shooting);
    const Mat J = detail::assemble_orbit_matrix(blocks, orbit.phase, n, N);
    const Eigen::PartialPivLU<Mat> lu(J);

    if (out.S_omega.size() != model.l) out.S_omega = Vec::Zero(model.l);
    out.S_x.resize(static_cast<size_t>(model.l));

    std::vector<Mat> dfdl;
    if (!shooting) {
        dfdl.resize(static_cast<size_t>(N + 1));
        for (int i = 0; i <= N; ++i)
            dfdl[static_cast<size_t>(i)] = model.dfdlam(orbit.x.col(i), 0.0, orbit.lambda);
    }

    for (int j : params) {
        if (j < 0 || j >= model.l)
            throw std::invalid_argument("orbit_sensitivity: parameter index out of range");
        Vec rhs = Vec::Zero(J.rows());
        for (int i = 0; i < N; ++i) {
            if (shooting) {
                rhs.segment(i * n, n) = -blocks.dphi_dlam[static_cast<size_t>(i)].col(j);
            } else {
                const double c = 0.5 * part.h(i) / orbit.omega;
                rhs.segment(i * n, n) = c * (dfdl[static_cast<size_t>(i)].col(j) +
                                             dfdl[static_cast<size_t>(i + 1)].col(j));
            }
        }
        // closure and phase rows: both our phase conditions are lambda-free
        const Vec sol = lu.solve(rhs);
        const double res = (J * sol - rhs).lpNorm<Eigen::Infinity>();
        if (!(res <= opts.residual_tol * (1 + rhs.lpNorm<Eigen::Infinity>())))
            throw NumericalError("orbit sensitivity solve residual too large");
        Mat Sx(n, N + 1);
        for (int i = 0; i <= N; ++i) Sx.col(i) = sol.segment(i * n, n);
        Sx.col(N) = Sx.col(0);
        out.S_x[static_cast<size_t>(j)] = std::move(Sx);
        out.S_omega[j] = sol[sol.size() - 1];
    }
}

void prc_sensitivity(const ModelDef& model, const PeriodicOrbit& orbit,
                     const AdjointResult& adjoint, const std::vector<int>& params,
                     SensitivityBundle& bundle, const SensitivityOptions& opts) {
    require_converged(orbit);
    const int n = orbit.n();
    const int N = orbit.N();
    const CirclePartition& part = orbit.partition;
    const Vec& lam = orbit.lambda;
    const double omega = orbit.omega;
    const bool shooting = orbit.scheme == Scheme::MultipleShooting;
    const Mat& p = adjoint.gradient.p;

    const detail::OrbitBlocks blocks =
        detail::orbit_blocks(model, part, orbit.x, omega, lam, orbit.scheme, opts.ode, false);
    const detail::AdjointSystem sys = detail::adjoint_system(model, orbit, blocks);
    const Eigen::PartialPivLU<Mat> lu(sys.bordered);

    std::vector<Mat> A(static_cast<size_t>(N + 1));
    std::vector<Mat> dfdl(static_cast<size_t>(N + 1));
    for (int i = 0; i <= N; ++i) {
        A[static_cast<size_t>(i)] = model.dfdx(orbit.x.col(i), 0.0, lam);
        dfdl[static_cast<size_t>(i)] = model.dfdlam(orbit.x.col(i), 0.0, lam);
    }

    bundle.S_p.resize(static_cast<size_t>(model.l));
    bundle.S_q.resize(static_cast<size_t>(model.l));

    OdeOptions fd_ode = opts.ode;
    fd_ode.rtol = std::min(fd_ode.rtol, 1e-13);
    fd_ode.atol = std::min(fd_ode.atol, 1e-15);

    for (int j : params) {
        if (bundle.S_x.size() <= static_cast<size_t>(j) ||
            bundle.S_x[static_cast<size_t>(j)].size() == 0)
            throw std::invalid_argument("prc_sensitivity: run orbit_sensitivity for parameter first");
        const Mat& Sx = bundle.S_x[static_cast<size_t>(j)];
        const double Som = bundle.S_omega[j];

        Vec rhs = Vec::Zero(sys.bordered.rows());
        if (shooting) {
            // d(Phi_i)/dlambda_j by a central difference along the solution path
            const double delta = opts.fd_step_rel * std::max(std::abs(lam[j]), 1.0);
            parallel_for(N, [&](int i) {
                Vec lp = lam, lm = lam;
                lp[j] += delta;
                lm[j] -= delta;
                const double om_p = omega + delta * Som, om_m = omega - delta * Som;
                const Vec xp = orbit.x.col(i) + delta * Sx.col(i);
                const Vec xm = orbit.x.col(i) - delta * Sx.col(i);
                const Mat Phi_p =
                    flow(model, part.h(i) / om_p, xp, nullptr, lp, fd_ode, FlowFundamental).Phi;
                const Mat Phi_m =
                    flow(model, part.h(i) / om_m, xm, nullptr, lm, fd_ode, FlowFundamental).Phi;
                const Mat dPhi = (Phi_p - Phi_m) / (2 * delta);
                rhs.segment(i * n, n) = dPhi.transpose() * p.col(i + 1);
            });
        } else {
            std::vector<Mat> Ep(static_cast<size_t>(N + 1));
            for (int i = 0; i <= N; ++i) {
                Ep[static_cast<size_t>(i)] =
                    model.d2fdxdx_dot(orbit.x.col(i), 0.0, lam, Sx.col(i)) +
                    model.d2fdxdlam(orbit.x.col(i), 0.0, lam, j) -
                    (Som / omega) * A[static_cast<size_t>(i)];
            }
            for (int i = 0; i < N; ++i) {
                const double c = 0.5 * part.h(i) / omega;
                rhs.segment(i * n, n) =
                    -c * (Ep[static_cast<size_t>(i)].transpose() * p.col(i) +
                          Ep[static_cast<size_t>(i + 1)].transpose() * p.col(i + 1));
            }
        }
        // normalization row: E^p_omega = S^omega - S_v^T P p
        double corr = 0;
        for (int i = 0; i <= N; ++i) {
            const Vec Sv = A[static_cast<size_t>(i)] * Sx.col(i) + dfdl[static_cast<size_t>(i)].col(j);
            corr += sys.weights[i] * Sv.dot(p.col(i));
        }
        rhs[rhs.size() - 1] = Som - corr;

        const Vec sol = lu.solve(rhs);
        const double res = (sys.bordered * sol - rhs).lpNorm<Eigen::Infinity>();
        if (!(res <= opts.residual_tol * (1 + rhs.lpNorm<Eigen::Infinity>())))
            throw NumericalError("PRC sensitivity solve residual too large");

        Mat Sp(n, N + 1);
        for (int i = 0; i <= N; ++i) Sp.col(i) = sol.segment(i * n, n);
        Sp.col(N) = Sp.col(0);

        PhaseSignal Sq(N);
        for (int i = 0; i < N; ++i) {
            const Vec dfdu_i = model.dfdu(orbit.x.col(i), 0.0, lam);
            const Vec mixed = model.d2fdxdu(orbit.x.col(i), 0.0, lam) * Sx.col(i) +
                              model.d2fdlamdu(orbit.x.col(i), 0.0, lam).col(j);
            Sq[i] = Sp.col(i).dot(dfdu_i) + p.col(i).dot(mixed);
        }
        bundle.S_p[static_cast<size_t>(j)] = std::move(Sp);
        bundle.S_q[static_cast<size_t>(j)] = std::move(Sq);
    }
}

SensitivityBundle sensitivity_bundle(const ModelDef& model, const PeriodicOrbit& orbit,
                                     const AdjointResult& adjoint,
                                     const SensitivityOptions& opts) {
    std::vector<int> all(static_cast<size_t>(model.l));
    for (int j = 0; j < model.l; ++j) all[static_cast<size_t>(j)] = j;
    SensitivityBundle bundle;
    orbit_sensitivity(model, orbit, all, bundle, opts);
    prc_sensitivity(model, orbit, adjoint, all, bundle, opts);
    return bundle;
}

double period_sensitivity(double S_omega, double omega) {
    if (!(omega > 0)) throw std::invalid_argument("period_sensitivity: omega must be > 0");
    const double T = two_pi / omega;
    return -T * S_omega / omega;
}

double relative_sensitivity(double c_norm, double S_c, double lambda_j) {
    if (!(c_norm > 0)) throw ZeroSignal("relative_sensitivity: zero-norm characteristic");
    if (lambda_j == 0) throw std::invalid_argument("relative_sensitivity: lambda_j must be nonzero");
    return lambda_j * S_c / c_norm;
}

PhaseSignal relative_sensitivity(double c_norm, const PhaseSignal& S_c, double lambda_j) {
    if (!(c_norm > 0)) throw ZeroSignal("relative_sensitivity: zero-norm characteristic");
    if (lambda_j == 0) throw std::invalid_argument("relative_sensitivity: lambda_j must be nonzero");
    return (lambda_j / c_norm) * S_c;
}

}  // namespace prclab
