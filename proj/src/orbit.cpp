#include "prclab/orbit.hpp"

#include "prclab/detail/bordered.hpp"
#include "prclab/parallel.hpp"

namespace prclab {

const char* scheme_name(Scheme s) {
    return s == Scheme::MultipleShooting ? "multiple_shooting" : "trapezoidal";
}

double PhaseCondition::value(const Vec& x0) const {
    if (kind == Kind::ComponentAnchor) return x0[component] - level;
    return (x0 - ref_point).dot(tangent);
}

Vec PhaseCondition::gradient(int n) const {
    if (kind == Kind::ComponentAnchor) {
        Vec g = Vec::Zero(n);
        g[component] = 1.0;
        return g;
    }
    return tangent;
}

double PeriodicOrbit::diameter() const {
    double d = 0;
    for (int i = 0; i < n(); ++i)
        d = std::max(d, x.row(i).maxCoeff() - x.row(i).minCoeff());
    return d;
}

PeriodicOrbit initial_guess(const ModelDef& model, const Vec& lam, const Vec& x_seed,
                            const GuessOptions& opts) {
    if (!(opts.settle_time > 0)) throw std::invalid_argument("initial_guess: settle_time must be > 0");
    const double t_obs = opts.observe_time > 0 ? opts.observe_time : opts.settle_time;
    auto rhs = [&](double, const Vec& x, Vec& dx) { dx = model.f(x, 0.0, lam); };

    Vec x1 = ode_solve(rhs, 0.0, opts.settle_time, x_seed, opts.ode);

    const int M = 4096;
    std::vector<double> times(M + 1);
    for (int i = 0; i <= M; ++i) times[static_cast<size_t>(i)] = t_obs * i / M;
    std::vector<Vec> path = ode_solve_samples(rhs, 0.0, t_obs, x1, times, opts.ode);
    Vec y(M + 1);
    for (int i = 0; i <= M; ++i) y[i] = model.h(path[static_cast<size_t>(i)], lam);

    const double ymax = y.maxCoeff(), ymin = y.minCoeff();
    const double ymean = y.mean();
    if (ymax - ymin < opts.min_amplitude * (1.0 + std::abs(ymean)))
        throw NoCycleDetected("no cycle detected: trajectory settles to a fixed point");

    // upward crossings of the output midline give the cycle section
    const double ym = 0.5 * (ymax + ymin);
    const double dt = t_obs / M;
    std::vector<double> crossings;
    std::vector<int> crossing_idx;
    for (int i = 0; i < M; ++i) {
        if (y[i] < ym && y[i + 1] >= ym) {
            crossings.push_back(dt * i + dt * (ym - y[i]) / (y[i + 1] - y[i]));
            crossing_idx.push_back(i);
        }
    }
    if (crossings.size() < 3)
        throw NoCycleDetected("no cycle detected within the observation horizon");

    const size_t K = std::min<size_t>(crossings.size() - 1, 6);
    double T = 0;
    for (size_t k = crossings.size() - K; k < crossings.size(); ++k)
        T += crossings[k] - crossings[k - 1];
    T /= static_cast<double>(K);

    // state at the last crossing
    const size_t last = crossings.size() - 1;
    const int i0 = crossing_idx[last];
    Vec xc = ode_solve(rhs, dt * i0, crossings[last], path[static_cast<size_t>(i0)], opts.ode);

    // resample one cycle at the partition phases
    CirclePartition part = CirclePartition::make_uniform(opts.N);
    std::vector<double> smp(static_cast<size_t>(opts.N));
    for (int i = 0; i < opts.N; ++i) smp[static_cast<size_t>(i)] = part.theta[i] * T / two_pi;
    std::vector<Vec> nodes = ode_solve_samples(rhs, 0.0, T, xc, smp, opts.ode);

    PeriodicOrbit g;
    g.partition = part;
    g.x.resize(model.n, opts.N + 1);
    for (int i = 0; i < opts.N; ++i) g.x.col(i) = nodes[static_cast<size_t>(i)];
    g.x.col(opts.N) = g.x.col(0);
    g.omega = two_pi / T;
    g.lambda = lam;
    g.residual_norm = std::numeric_limits<double>::infinity();
    g.phase = anchor_from_guess(model, g);
    return g;
}

PhaseCondition anchor_from_guess(const ModelDef& model, const PeriodicOrbit& guess) {
    Vec amp(guess.n());
    for (int i = 0; i < guess.n(); ++i)
        amp[i] = guess.x.row(i).maxCoeff() - guess.x.row(i).minCoeff();
    int k = 0;
    amp.maxCoeff(&k);
    const Vec f0 = model.f(guess.x.col(0), 0.0, guess.lambda);
    if (std::abs(f0[k]) < 0.05 * amp[k] * guess.omega) {
        // the level sits near an extremum of component k; anchor the most
        // transversal component instead
        double best = -1;
        for (int i = 0; i < guess.n(); ++i) {
            const double score = std::abs(f0[i]) / std::max(amp[i], 1e-300);
            if (score > best) {
                best = score;
                k = i;
            }
        }
    }
    PhaseCondition pc;
    pc.kind = PhaseCondition::Kind::ComponentAnchor;
    pc.component = k;
    pc.level = guess.x(k, 0);
    return pc;
}

PhaseCondition orthogonality_from_guess(const ModelDef& model, const PeriodicOrbit& guess,
                                        const Vec& lam) {
    PhaseCondition pc;
    pc.kind = PhaseCondition::Kind::Orthogonality;
    pc.ref_point = guess.x.col(0);
    pc.tangent = model.f(guess.x.col(0), 0.0, lam);
    const double nt = pc.tangent.norm();
    if (nt == 0) throw std::invalid_argument("orthogonality condition at an equilibrium point");
    pc.tangent /= nt;
    return pc;
}

namespace {

/// Residual-only evaluation (no Jacobian blocks); shooting segments in parallel.
Vec orbit_residual(const ModelDef& model, const CirclePartition& part, const Mat& x, double omega,
                   const Vec& lam, Scheme scheme, const PhaseCondition& phase,
                   const OdeOptions& ode) {
    const int n = model.n;
    const int N = part.segments();
    Vec r(static_cast<Eigen::Index>(N + 1) * n + 1);
    if (scheme == Scheme::Trapezoidal) {
        std::vector<Vec> f(static_cast<size_t>(N + 1));
        for (int i = 0; i <= N; ++i) f[static_cast<size_t>(i)] = model.f(x.col(i), 0.0, lam);
        for (int i = 0; i < N; ++i) {
            const double c = 0.5 * part.h(i) / omega;
            r.segment(i * n, n) =
                x.col(i + 1) - x.col(i) - c * (f[static_cast<size_t>(i)] + f[static_cast<size_t>(i + 1)]);
        }
    } else {
        parallel_for(N, [&](int i) {
            const FlowResult fr = flow(model, part.h(i) / omega, x.col(i), nullptr, lam, ode);
            r.segment(i * n, n) = fr.x_end - x.col(i + 1);
        });
    }
    r.segment(N * n, n) = x.col(N) - x.col(0);
    r[r.size() - 1] = phase.value(x.col(0));
    return r;
}

}  // namespace

PeriodicOrbit newton_orbit(const ModelDef& model, const Vec& lam, const PeriodicOrbit& guess,
                           Scheme scheme, const PhaseCondition& phase, const NewtonOptions& opts) {
    guess.partition.validate();
    if (guess.x.cols() != guess.partition.segments() + 1 || guess.x.rows() != model.n)
        throw std::invalid_argument("newton_orbit: guess does not match the partition/model");
    const int n = model.n;
    const int N = guess.partition.segments();
    const CirclePartition& part = guess.partition;

    Mat x = guess.x;
    x.col(N) = x.col(0);
    double omega = guess.omega;
    if (!(omega > 0)) throw std::invalid_argument("newton_orbit: guess omega must be > 0");

    double rn = orbit_residual(model, part, x, omega, lam, scheme, phase, opts.ode)
                    .lpNorm<Eigen::Infinity>();
    bool converged = rn <= opts.tol;

    for (int iter = 0; iter < opts.max_iter && !converged; ++iter) {
        const detail::OrbitBlocks blocks =
            detail::orbit_blocks(model, part, x, omega, lam, scheme, opts.ode, false);
        const Vec r = detail::assemble_orbit_residual(blocks, phase, x);
        rn = r.lpNorm<Eigen::Infinity>();
        if (rn <= opts.tol) {
            converged = true;
            break;
        }
        const Mat J = detail::assemble_orbit_matrix(blocks, phase, n, N);
        Eigen::PartialPivLU<Mat> lu(J);
        const double cond =
            detail::condition_estimate_1norm(lu, J.cwiseAbs().colwise().sum().maxCoeff(),
                                             static_cast<int>(J.rows()));
        if (!std::isfinite(cond) || cond > opts.singular_threshold)
            throw SingularBorderedSystem(
                "singular bordered system (degenerate phase condition or non-hyperbolic orbit)");
        const Vec dz = lu.solve(-r);
        if (!dz.allFinite()) throw SingularBorderedSystem("bordered solve produced non-finite step");

        double s = 1.0;
        bool accepted = false;
        while (s >= opts.min_damping) {
            Mat xt = x;
            for (int i = 0; i <= N; ++i) xt.col(i) += s * dz.segment(i * n, n);
            const double omt = omega + s * dz[dz.size() - 1];
            if (omt > 0) {
                double rt;
                try {
                    rt = orbit_residual(model, part, xt, omt, lam, scheme, phase, opts.ode)
                             .lpNorm<Eigen::Infinity>();
                } catch (const NumericalError&) {
                    rt = std::numeric_limits<double>::infinity();
                }
                if (rt < rn) {
                    x.swap(xt);
                    omega = omt;
                    rn = rt;
                    accepted = true;
                    break;
                }
            }
            s *= 0.5;
        }
        if (!accepted)
            throw NewtonFailure("Newton line search stalled below the minimum damping factor");
        converged = rn <= opts.tol;
    }
    if (!converged)
        throw NewtonFailure("Newton did not reach the residual tolerance within max_iter");

    PeriodicOrbit orbit;
    orbit.partition = part;
    orbit.x = x;
    orbit.x.col(N) = orbit.x.col(0);
    orbit.omega = omega;
    orbit.scheme = scheme;
    orbit.residual_norm = rn;
    orbit.lambda = lam;
    orbit.phase = phase;
    return orbit;
}

namespace {

/// Periodic natural cubic spline through (theta_i, v_i), i = 0..N-1, with
/// period 2*pi; the wrap segment runs from theta_{N-1} to theta_0 + 2*pi.
class PeriodicCubic {
public:
    PeriodicCubic(const Vec& theta, const Vec& v) : th_(theta), v_(v) {
        const int N = static_cast<int>(v.size());
        Vec h(N);
        for (int i = 0; i < N; ++i)
            h[i] = (i + 1 < N ? th_[i + 1] : th_[0] + two_pi) - th_[i];
        // cyclic tridiagonal for second derivatives
        Mat A = Mat::Zero(N, N);
        Vec rhs(N);
        for (int i = 0; i < N; ++i) {
            const int im = (i - 1 + N) % N, ip = (i + 1) % N;
            A(i, im) = h[im];
            A(i, i) = 2 * (h[im] + h[i]);
            A(i, ip) = h[i];
            rhs[i] = 6 * ((v_[ip] - v_[i]) / h[i] - (v_[i] - v_[im]) / h[im]);
        }
        M_ = A.partialPivLu().solve(rhs);
        h_ = h;
    }

    double operator()(double theta) const {
        const int N = static_cast<int>(v_.size());
        const double t = th_[0] + wrap_2pi(theta - th_[0]);
        int i = static_cast<int>(std::upper_bound(th_.data(), th_.data() + N, t) - th_.data()) - 1;
        if (i < 0) i = N - 1;  // only from roundoff at t == th_[0]
        const int ip = (i + 1) % N;
        const double a = t - th_[i];
        const double h = h_[i], b = h - a;
        return (M_[i] * b * b * b + M_[ip] * a * a * a) / (6 * h) +
               (v_[i] / h - M_[i] * h / 6) * b + (v_[ip] / h - M_[ip] * h / 6) * a;
    }

private:
    Vec th_, v_, M_, h_;
};

}  // namespace

PeriodicOrbit resample_orbit(const PeriodicOrbit& orbit, int N_new) {
    if (N_new < 4) throw std::invalid_argument("resample_orbit: N_new must be >= 4");
    PeriodicOrbit out;
    out.partition = CirclePartition::make_uniform(N_new);
    out.x.resize(orbit.n(), N_new + 1);
    if (orbit.partition.uniform()) {
        const CurveInterp interp(orbit.x);
        for (int i = 0; i < N_new; ++i) out.x.col(i) = interp.eval(out.partition.theta[i]);
    } else {
        const int N = orbit.N();
        const Vec th = orbit.partition.theta.head(N);
        for (int c = 0; c < orbit.n(); ++c) {
            const PeriodicCubic spline(th, Vec(orbit.x.row(c).head(N).transpose()));
            for (int i = 0; i < N_new; ++i) out.x(c, i) = spline(out.partition.theta[i]);
        }
    }
    out.x.col(N_new) = out.x.col(0);
    out.omega = orbit.omega;
    out.scheme = orbit.scheme;
    out.residual_norm = std::numeric_limits<double>::infinity();
    out.lambda = orbit.lambda;
    out.phase = orbit.phase;
    return out;
}

PeriodicOrbit solve_orbit(const ModelDef& model, const Vec& lam, const Vec& x_seed,
                          const GuessOptions& gopts, Scheme scheme, const NewtonOptions& nopts) {
    const PeriodicOrbit guess = initial_guess(model, lam, x_seed, gopts);
    try {
        return newton_orbit(model, lam, guess, scheme, guess.phase, nopts);
    } catch (const SingularBorderedSystem&) {
        // retry with the orthogonality condition
        const PhaseCondition pc = orthogonality_from_guess(model, guess, lam);
        return newton_orbit(model, lam, guess, scheme, pc, nopts);
    }
}

}  // namespace prclab
