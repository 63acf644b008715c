#include "prclab/detail/bordered.hpp"

#include "prclab/parallel.hpp"

namespace prclab::detail {

OrbitBlocks orbit_blocks(const ModelDef& model, const CirclePartition& part, const Mat& x,
                         double omega, const Vec& lam, Scheme scheme, const OdeOptions& ode,
                         bool with_param_jacobian) {
    const int n = model.n;
    const int N = part.segments();
    OrbitBlocks bl;
    bl.G.resize(N);
    bl.H.resize(N);
    bl.b.resize(N);
    bl.r.resize(N);
    bl.f_node.resize(N + 1);
    for (int i = 0; i <= N; ++i) bl.f_node[i] = model.f(x.col(i), 0.0, lam);

    if (scheme == Scheme::Trapezoidal) {
        std::vector<Mat> A(N + 1);
        for (int i = 0; i <= N; ++i) A[i] = model.dfdx(x.col(i), 0.0, lam);
        for (int i = 0; i < N; ++i) {
            const double c = 0.5 * part.h(i) / omega;
            bl.r[i] = x.col(i + 1) - x.col(i) - c * (bl.f_node[i] + bl.f_node[i + 1]);
            bl.G[i] = -Mat::Identity(n, n) - c * A[i];
            bl.H[i] = -Mat::Identity(n, n) + c * A[i + 1];
            bl.b[i] = (c / omega) * (bl.f_node[i] + bl.f_node[i + 1]);
        }
        return bl;
    }

    bl.Phi.resize(N);
    if (with_param_jacobian) bl.dphi_dlam.resize(N);
    parallel_for(N, [&](int i) {
        const unsigned blocks =
            FlowFundamental | FlowEndVelocity | (with_param_jacobian ? FlowParamJacobian : 0u);
        const FlowResult fr = flow(model, part.h(i) / omega, x.col(i), nullptr, lam, ode, blocks);
        bl.r[i] = fr.x_end - x.col(i + 1);
        bl.G[i] = fr.Phi;
        bl.H[i] = Mat::Identity(n, n);
        bl.b[i] = -(part.h(i) / (omega * omega)) * fr.f_end;
        bl.Phi[i] = fr.Phi;
        if (with_param_jacobian) bl.dphi_dlam[i] = fr.dphi_dlam;
    });
    return bl;
}

Mat assemble_orbit_matrix(const OrbitBlocks& blocks, const PhaseCondition& phase, int n, int N) {
    const Eigen::Index dim = static_cast<Eigen::Index>(N + 1) * n + 1;
    Mat J = Mat::Zero(dim, dim);
    for (int i = 0; i < N; ++i) {
        J.block(i * n, i * n, n, n) = blocks.G[i];
        J.block(i * n, (i + 1) * n, n, n) = -blocks.H[i];
        J.block(i * n, dim - 1, n, 1) = blocks.b[i];
    }
    J.block(N * n, 0, n, n) = -Mat::Identity(n, n);
    J.block(N * n, N * n, n, n) = Mat::Identity(n, n);
    J.block(dim - 1, 0, 1, n) = phase.gradient(n).transpose();
    return J;
}

Vec assemble_orbit_residual(const OrbitBlocks& blocks, const PhaseCondition& phase, const Mat& x) {
    const int n = static_cast<int>(x.rows());
    const int N = static_cast<int>(x.cols()) - 1;
    Vec r(static_cast<Eigen::Index>(N + 1) * n + 1);
    for (int i = 0; i < N; ++i) r.segment(i * n, n) = blocks.r[i];
    r.segment(N * n, n) = x.col(N) - x.col(0);
    r[r.size() - 1] = phase.value(x.col(0));
    return r;
}

AdjointSystem adjoint_system(const ModelDef& model, const PeriodicOrbit& orbit,
                             const OrbitBlocks& blocks) {
    const int n = orbit.n();
    const int N = orbit.N();
    const Eigen::Index dim = static_cast<Eigen::Index>(N + 1) * n + 1;
    AdjointSystem sys;
    sys.bordered = Mat::Zero(dim, dim);

    if (orbit.scheme == Scheme::Trapezoidal) {
        std::vector<Mat> A(N + 1);
        for (int i = 0; i <= N; ++i) A[i] = model.dfdx(orbit.x.col(i), 0.0, orbit.lambda);
        for (int i = 0; i < N; ++i) {
            const double c = 0.5 * orbit.partition.h(i) / orbit.omega;
            sys.bordered.block(i * n, i * n, n, n) =
                -Mat::Identity(n, n) + c * A[i].transpose();
            sys.bordered.block(i * n, (i + 1) * n, n, n) =
                Mat::Identity(n, n) + c * A[i + 1].transpose();  // -H~ with H~ = -I - c A^T
        }
    } else {
        for (int i = 0; i < N; ++i) {
            sys.bordered.block(i * n, i * n, n, n) = Mat::Identity(n, n);
            sys.bordered.block(i * n, (i + 1) * n, n, n) = -blocks.Phi[i].transpose();
        }
    }
    sys.bordered.block(N * n, 0, n, n) = -Mat::Identity(n, n);
    sys.bordered.block(N * n, N * n, n, n) = Mat::Identity(n, n);

    // normalization row v^T P and bordering column b^p = v
    sys.weights = Vec(N + 1);
    if (orbit.scheme == Scheme::Trapezoidal) {
        sys.weights[0] = orbit.partition.h(0) / 2;
        for (int i = 1; i < N; ++i)
            sys.weights[i] = (orbit.partition.h(i - 1) + orbit.partition.h(i)) / 2;
        sys.weights[N] = orbit.partition.h(N - 1) / 2;
        sys.weights /= two_pi;
    } else {
        sys.weights.setConstant(1.0 / (N + 1));
    }
    sys.v_stacked = Vec(static_cast<Eigen::Index>(N + 1) * n);
    for (int i = 0; i <= N; ++i) sys.v_stacked.segment(i * n, n) = blocks.f_node[i];
    for (int i = 0; i <= N; ++i) {
        sys.bordered.block(i * n, dim - 1, n, 1) = blocks.f_node[i];
        sys.bordered.block(dim - 1, i * n, 1, n) =
            sys.weights[i] * blocks.f_node[i].transpose();
    }
    sys.bordered(dim - 1, dim - 1) = 1.0;
    return sys;
}

double condition_estimate_1norm(const Eigen::PartialPivLU<Mat>& lu, double anorm1, int size) {
    // Hager's estimator for ||A^{-1}||_1
    Vec x = Vec::Constant(size, 1.0 / size);
    double gamma = 0;
    for (int it = 0; it < 5; ++it) {
        const Vec y = lu.solve(x);
        gamma = y.lpNorm<1>();
        Vec xi(size);
        for (int i = 0; i < size; ++i) xi[i] = (y[i] >= 0) ? 1.0 : -1.0;
        const Vec z = lu.transpose().solve(xi);
        Eigen::Index j = 0;
        z.cwiseAbs().maxCoeff(&j);
        if (std::abs(z[j]) <= z.dot(x)) break;
        x.setZero();
        x[j] = 1.0;
    }
    return anorm1 * gamma;
}

}  // namespace prclab::detail
