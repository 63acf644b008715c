#include "prclab/prc.hpp"

#include "prclab/detail/bordered.hpp"
#include "prclab/parallel.hpp"

namespace prclab {

AdjointResult adjoint_prc(const ModelDef& model, const PeriodicOrbit& orbit,
                          const AdjointOptions& opts) {
    if (!orbit.partition.uniform())
        throw GridMismatch("adjoint_prc: orbit must live on a uniform partition");
    if (!(orbit.residual_norm < 1e-4))
        throw std::invalid_argument("adjoint_prc: orbit is not converged");
    const int n = orbit.n();
    const int N = orbit.N();

    const detail::OrbitBlocks blocks = detail::orbit_blocks(
        model, orbit.partition, orbit.x, orbit.omega, orbit.lambda, orbit.scheme, opts.ode, false);
    const detail::AdjointSystem sys = detail::adjoint_system(model, orbit, blocks);

    Eigen::PartialPivLU<Mat> lu(sys.bordered);
    const double cond = detail::condition_estimate_1norm(
        lu, sys.bordered.cwiseAbs().colwise().sum().maxCoeff(),
        static_cast<int>(sys.bordered.rows()));
    if (!std::isfinite(cond) || cond > opts.singular_threshold)
        throw SingularBorderedSystem("adjoint system doubly singular (non-hyperbolic orbit)");

    Vec rhs = Vec::Zero(sys.bordered.rows());
    rhs[rhs.size() - 1] = orbit.omega;
    const Vec sol = lu.solve(rhs);
    const double xi = sol[sol.size() - 1];
    if (std::abs(xi) > opts.xi_tol * orbit.omega)
        throw NumericalError("adjoint bordering variable did not vanish");

    AdjointResult res;
    res.gradient.partition = orbit.partition;
    res.gradient.omega = orbit.omega;
    res.gradient.scheme = orbit.scheme;
    res.gradient.p.resize(n, N + 1);
    for (int i = 0; i <= N; ++i) res.gradient.p.col(i) = sol.segment(i * n, n);
    res.gradient.p.col(N) = res.gradient.p.col(0);
    res.border_xi = xi;
    res.q.resize(N);
    for (int i = 0; i < N; ++i)
        res.q[i] = res.gradient.p.col(i).dot(model.dfdu(orbit.x.col(i), 0.0, orbit.lambda));
    return res;
}

namespace {

/// Newton-refined argmin_theta ||x - gamma(theta)||, seeded at the nearest node.
std::pair<double, double> nearest_phase(const CurveInterp& interp, const PeriodicOrbit& orbit,
                                        const Vec& x) {
    const int N = orbit.N();
    int ibest = 0;
    double dbest = (x - orbit.x.col(0)).squaredNorm();
    for (int i = 1; i < N; ++i) {
        const double d = (x - orbit.x.col(i)).squaredNorm();
        if (d < dbest) {
            dbest = d;
            ibest = i;
        }
    }
    const double dtheta = two_pi / N;
    double theta = orbit.partition.theta[ibest];
    bool ok = false;
    double th = theta;
    for (int it = 0; it < 40; ++it) {
        const Vec g = interp.eval(th), gp = interp.derivative(th);
        const Vec r = x - g;
        const double D1 = -2.0 * r.dot(gp);
        const double D2 = 2.0 * (gp.squaredNorm() - r.dot(interp.second_derivative(th)));
        if (D2 <= 0) break;
        const double step = D1 / D2;
        th -= step;
        if (std::abs(step) < 1e-15) {
            ok = true;
            break;
        }
        if (std::abs(wrap_pi(th - theta)) > 2 * dtheta) break;  // left the seeded basin
    }
    if (!ok || std::abs(wrap_pi(th - theta)) > 2 * dtheta) {
        // golden-section fallback around the seed
        const double gr = 0.6180339887498949;
        double a = theta - dtheta, b = theta + dtheta;
        double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
        double f1 = (x - interp.eval(c1)).squaredNorm();
        double f2 = (x - interp.eval(c2)).squaredNorm();
        for (int it = 0; it < 90; ++it) {
            if (f1 < f2) {
                b = c2; c2 = c1; f2 = f1;
                c1 = b - gr * (b - a);
                f1 = (x - interp.eval(c1)).squaredNorm();
            } else {
                a = c1; c1 = c2; f1 = f2;
                c2 = a + gr * (b - a);
                f2 = (x - interp.eval(c2)).squaredNorm();
            }
        }
        th = 0.5 * (a + b);
    }
    th = wrap_2pi(th);
    return {th, (x - interp.eval(th)).norm()};
}

}  // namespace

FinitePrc direct_prc(const ModelDef& model, const PeriodicOrbit& orbit, const PrcInput& input,
                     const Vec& phases, const DirectPrcOptions& opts) {
    if (!(opts.eps_rel > 0)) throw std::invalid_argument("direct_prc: eps must be > 0");
    const double diam = orbit.diameter();
    const double eps = opts.eps_rel * diam;
    if (eps < 50 * (opts.ode.atol + opts.ode.rtol * diam))
        throw std::invalid_argument("direct_prc: eps is below the integrator accuracy floor");

    const CurveInterp interp = orbit.interpolant();
    const double T = orbit.period();
    const Vec& lam = orbit.lambda;

    FinitePrc out;
    out.phases = phases;
    out.delta_theta.resize(phases.size());
    out.eps = eps;
    if (std::holds_alternative<ImpulseInput>(input)) {
        out.alpha = std::get<ImpulseInput>(input).alpha;
        out.input_desc = "impulse";
    } else {
        out.input_desc = std::get<SignalInput>(input).label.empty()
                             ? "signal"
                             : std::get<SignalInput>(input).label;
    }

    parallel_for(static_cast<int>(phases.size()), [&](int idx) {
        const double theta_i = phases[idx];
        const Vec x_start = interp.eval(theta_i);
        Vec x;
        double t0 = 0.0;
        if (std::holds_alternative<ImpulseInput>(input)) {
            x = x_start + std::get<ImpulseInput>(input).alpha * model.dfdu(x_start, 0.0, lam);
        } else {
            const SignalInput& sig = std::get<SignalInput>(input);
            if (!(sig.duration > 0))
                throw std::invalid_argument("direct_prc: signal input needs a positive duration");
            x = flow(model, sig.duration, x_start, sig.u, lam, opts.ode).x_end;
            t0 = sig.duration;
        }
        double theta_star = 0.0;
        bool converged = false;
        for (int k = 1; k <= opts.max_periods; ++k) {
            x = flow(model, T, x, nullptr, lam, opts.ode).x_end;
            const auto [th, dist] = nearest_phase(interp, orbit, x);
            if (dist < eps) {
                theta_star = th;
                converged = true;
                break;
            }
        }
        if (!converged)
            throw NotPhaseResetting("direct_prc: trajectory did not return to the orbit within " +
                                    std::to_string(opts.max_periods) + " periods");
        // omega*t* mod 2*pi == omega*t0 mod 2*pi because the tail is an integer period count
        out.delta_theta[idx] = wrap_pi(theta_star - orbit.omega * t0 - theta_i);
    });
    return out;
}

Vec ptc_from_prc(const FinitePrc& prc) {
    Vec out(prc.phases.size());
    for (Eigen::Index i = 0; i < prc.phases.size(); ++i)
        out[i] = wrap_2pi(prc.phases[i] + prc.delta_theta[i]);
    return out;
}

double convolution_prc(const PhaseSignal& q, double omega, const PrcInput& input, double theta) {
    const TrigInterp qi(q);
    if (std::holds_alternative<ImpulseInput>(input))
        return std::get<ImpulseInput>(input).alpha * qi(theta);  // sifting property
    const SignalInput& sig = std::get<SignalInput>(input);
    if (!(sig.duration > 0))
        throw std::invalid_argument("convolution_prc: signal input needs a positive duration");
    // composite Simpson on [0, duration]
    const int M = 4096;
    const double h = sig.duration / M;
    double s = 0;
    for (int k = 0; k <= M; ++k) {
        const double t = k * h;
        const double w = (k == 0 || k == M) ? 1.0 : (k % 2 ? 4.0 : 2.0);
        s += w * qi(wrap_2pi(omega * t + theta)) * sig.u(t);
    }
    return s * h / 3.0;
}

PhaseTrajectory simulate_phase_model(double omega, const PhaseSignal& q, const PhaseSignal& h_tilde,
                                     const InputSignal& u, double theta0, double t_end,
                                     double dt_out, const OdeOptions& opts) {
    if (!(t_end > 0)) throw std::invalid_argument("simulate_phase_model: t_end must be > 0");
    const TrigInterp qi(q);
    auto rhs = [&](double t, const Vec& y, Vec& dy) {
        dy.resize(1);
        dy[0] = omega + qi(wrap_2pi(y[0])) * (u ? u(t) : 0.0);
    };
    const int M = std::max(1, static_cast<int>(std::ceil(t_end / dt_out)));
    std::vector<double> times(static_cast<size_t>(M + 1));
    for (int i = 0; i <= M; ++i) times[static_cast<size_t>(i)] = t_end * i / M;
    Vec y0(1);
    y0[0] = theta0;
    const std::vector<Vec> path = ode_solve_samples(rhs, 0.0, t_end, y0, times, opts);

    PhaseTrajectory traj;
    traj.t.resize(M + 1);
    traj.theta.resize(M + 1);
    const bool with_y = h_tilde.size() > 0;
    if (with_y) traj.y.resize(M + 1);
    const TrigInterp hi = with_y ? TrigInterp(h_tilde) : TrigInterp();
    for (int i = 0; i <= M; ++i) {
        traj.t[i] = times[static_cast<size_t>(i)];
        traj.theta[i] = wrap_2pi(path[static_cast<size_t>(i)][0]);
        if (with_y) traj.y[i] = hi(traj.theta[i]);
    }
    return traj;
}

HybridTrajectory simulate_hybrid_phase_model(double omega, const Vec& prc_phases,
                                             const Vec& prc_values, const Vec& impulse_times,
                                             double theta0, double t_end, double dt_out) {
    for (Eigen::Index k = 1; k < impulse_times.size(); ++k)
        if (impulse_times[k] <= impulse_times[k - 1])
            throw std::invalid_argument("hybrid model: impulse times must be strictly increasing");

    // trigonometric interpolant of the PRC samples; non-uniform samples are
    // first carried to a uniform grid by the periodic cubic in resample form
    TrigInterp prc;
    {
        const int M = static_cast<int>(prc_phases.size());
        bool uniform = true;
        for (int i = 0; i < M; ++i)
            if (std::abs(prc_phases[i] - two_pi * i / M) > 1e-12) uniform = false;
        if (uniform) {
            prc = TrigInterp(prc_values);
        } else {
            Mat row(1, M + 1);
            row.leftCols(M) = prc_values.transpose();
            row(0, M) = prc_values[0];
            // nonuniform: reuse the orbit resampler's periodic cubic through a tiny orbit shim
            PeriodicOrbit shim;
            shim.partition.theta = Vec(M + 1);
            shim.partition.theta.head(M) = prc_phases;
            shim.partition.theta[M] = two_pi;
            shim.x = row;
            shim.omega = 1.0;
            const PeriodicOrbit res = resample_orbit(shim, 256);
            prc = TrigInterp(Vec(res.x.row(0).head(256).transpose()));
        }
    }

    HybridTrajectory traj;
    const int M = std::max(1, static_cast<int>(std::ceil(t_end / dt_out)));
    traj.t.resize(M + 1);
    traj.theta.resize(M + 1);
    std::vector<double> jt, th_pre, th_post;

    double t_cur = 0.0, th_cur = theta0;
    Eigen::Index next_jump = 0;
    for (int i = 0; i <= M; ++i) {
        const double t = t_end * i / M;
        while (next_jump < impulse_times.size() && impulse_times[next_jump] <= t) {
            const double tj = impulse_times[next_jump];
            double th = th_cur + omega * (tj - t_cur);
            const double pre = wrap_2pi(th);
            th += prc(pre);
            jt.push_back(tj);
            th_pre.push_back(pre);
            th_post.push_back(wrap_2pi(th));
            th_cur = th;
            t_cur = tj;
            ++next_jump;
        }
        traj.t[i] = t;
        traj.theta[i] = wrap_2pi(th_cur + omega * (t - t_cur));
    }
    traj.jump_times = Eigen::Map<Vec>(jt.data(), static_cast<Eigen::Index>(jt.size()));
    traj.theta_pre = Eigen::Map<Vec>(th_pre.data(), static_cast<Eigen::Index>(th_pre.size()));
    traj.theta_post = Eigen::Map<Vec>(th_post.data(), static_cast<Eigen::Index>(th_post.size()));
    return traj;
}

PhaseSignal output_signal(const ModelDef& model, const PeriodicOrbit& orbit) {
    const int N = orbit.N();
    PhaseSignal y(N);
    for (int i = 0; i < N; ++i) y[i] = model.h(orbit.x.col(i), orbit.lambda);
    return y;
}

}  // namespace prclab
