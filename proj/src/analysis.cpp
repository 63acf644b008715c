#include "prclab/analysis.hpp"

#include <algorithm>
#include <numeric>

namespace prclab {

RobustnessReport robustness(const ModelDef& model, const PeriodicOrbit& orbit,
                            const AdjointResult& adjoint, const SensitivityBundle& bundle,
                            PrcSpace space, bool relative) {
    const int l = model.l;
    if (bundle.S_omega.size() != l || static_cast<int>(bundle.S_q.size()) != l)
        throw std::invalid_argument("robustness: incomplete sensitivity bundle");

    RobustnessReport rep;
    rep.labels = model.param_names;
    rep.space = space;
    rep.relative = relative;
    rep.R_omega.resize(l);
    rep.R_q.resize(l);
    const double q_norm = characteristic_norm(space, adjoint.q);

    for (int j = 0; j < l; ++j) {
        double Rw = std::abs(bundle.S_omega[j]);
        const PhaseSignal Pq = horizontal_project(space, adjoint.q, bundle.S_q[static_cast<size_t>(j)]);
        double Rq = norm_in_space(space, adjoint.q, Pq);
        if (relative) {
            const double lj = std::abs(orbit.lambda[j]);
            Rw *= lj / orbit.omega;
            Rq *= lj / q_norm;
        }
        rep.R_omega[j] = Rw;
        rep.R_q[j] = Rq;
    }

    auto normalize = [l](const Vec& R, bool& flag) {
        const double m = R.maxCoeff();
        flag = m > 0;
        return flag ? Vec(R / m) : R;
    };
    rep.rho_omega = normalize(rep.R_omega, rep.normalized_omega);
    rep.rho_q = normalize(rep.R_q, rep.normalized_q);

    auto ranking = [l](const Vec& rho) {
        std::vector<int> idx(static_cast<size_t>(l));
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return rho[a] > rho[b]; });
        return idx;
    };
    rep.ranking_q = ranking(rep.rho_q);
    rep.ranking_omega = ranking(rep.rho_omega);
    return rep;
}

namespace {

double ray_angle(const PhaseSignal& u, const PhaseSignal& v) {
    return 2.0 * std::asin(std::min(1.0, norm_l2(u - v) / 2.0));
}

/// d/sin(d) with the small-angle series guard.
double arccos_chain_factor(double d) {
    return (d < 1e-6) ? 1.0 + d * d / 6.0 : d / std::sin(d);
}

}  // namespace

CostGradient grad_cost(PrcSpace space, const PhaseSignal& q, const PhaseSignal& q_ref,
                       const std::vector<PhaseSignal>& S_q) {
    CostGradient out;
    out.grad.resize(static_cast<Eigen::Index>(S_q.size()));

    if (space == PrcSpace::A || space == PrcSpace::C) {
        PhaseSignal ref = q_ref;
        if (space == PrcSpace::C) {
            const ShiftResult s = optimal_shift(q, q_ref);
            out.sigma_star = s.sigma;
            ref = circular_shift(q_ref, s.sigma);
        }
        const PhaseSignal diff = q - ref;
        out.dist = norm_l2(diff);
        out.cost = 0.5 * out.dist * out.dist;
        for (size_t j = 0; j < S_q.size(); ++j)
            out.grad[static_cast<Eigen::Index>(j)] =
                inner(diff, horizontal_project(space, q, S_q[j]));
        return out;
    }

    // spaces B and D: V = 1/2 arccos(c)^2 on normalized representatives
    const double nq = norm_l2(q), nr = norm_l2(q_ref);
    if (nq == 0 || nr == 0) throw ZeroSignal("grad_cost: zero signal in space B/D");
    PhaseSignal ref = q_ref;
    if (space == PrcSpace::D) {
        const ShiftResult s = optimal_shift(q, q_ref);
        out.sigma_star = s.sigma;
        ref = circular_shift(q_ref, s.sigma);
    }
    const double c = inner(q, ref) / (nq * nr);
    out.dist = ray_angle(q / nq, ref / nr);
    out.cost = 0.5 * out.dist * out.dist;
    if (out.dist > M_PI - 1e-9) out.antipodal = true;  // arccos derivative singular

    const double gamma = arccos_chain_factor(out.dist);
    const PhaseSignal grad_c = ref / (nq * nr) - (c / (nq * nq)) * q;
    for (size_t j = 0; j < S_q.size(); ++j)
        out.grad[static_cast<Eigen::Index>(j)] =
            -gamma * inner(grad_c, horizontal_project(space, q, S_q[j]));
    return out;
}

namespace {

struct PipelinePoint {
    PeriodicOrbit orbit;
    AdjointResult adjoint;
};

/// Orbit + adjoint at lambda, warm-started from the previous orbit when given.
PipelinePoint eval_point(const ModelDef& model, const Vec& lam, const Vec& x_seed,
                         const IdentifyOptions& opts, const PeriodicOrbit* warm) {
    PipelinePoint pt;
    bool solved = false;
    if (warm) {
        try {
            PeriodicOrbit guess = *warm;
            guess.lambda = lam;
            pt.orbit = newton_orbit(model, lam, guess, opts.scheme, anchor_from_guess(model, guess),
                                    opts.newton);
            solved = true;
        } catch (const NumericalError&) {
            solved = false;  // fall through to a cold start
        }
    }
    if (!solved) {
        GuessOptions g = opts.guess;
        g.N = opts.N;
        const PeriodicOrbit guess = initial_guess(model, lam, x_seed, g);
        pt.orbit = newton_orbit(model, lam, guess, opts.scheme, guess.phase, opts.newton);
    }
    pt.adjoint = adjoint_prc(model, pt.orbit);
    return pt;
}

}  // namespace

IdentifyState identify(const ModelDef& model, const PhaseSignal& q_ref, const Vec& lambda0,
                       const Vec& x_seed, const IdentifyOptions& opts) {
    if (norm_l2(q_ref) == 0) throw ZeroSignal("identify: reference PRC is zero");
    IdentifyState st;
    st.lambda = lambda0;

    PipelinePoint pt = eval_point(model, lambda0, x_seed, opts, nullptr);
    SensitivityBundle bundle = sensitivity_bundle(model, pt.orbit, pt.adjoint, opts.sens);
    CostGradient cg = grad_cost(opts.space, pt.adjoint.q, q_ref, bundle.S_q);

    double step_scale =
        (opts.initial_move > 0 ? opts.initial_move : 0.05 * std::max(1.0, lambda0.norm()));
    double step = step_scale / std::max(cg.grad.norm(), 1e-300);

    st.trace.push_back({st.lambda, cg.cost, cg.grad.norm(), 0.0});

    for (int iter = 0; iter < opts.max_iter; ++iter) {
        st.iterations = iter;
        if (cg.grad.norm() <= opts.grad_tol) {
            st.status = IdentifyStatus::GradientConverged;
            break;
        }
        const double g2 = cg.grad.squaredNorm();
        bool accepted = false;
        bool any_evaluated = false;
        double s = step;
        PipelinePoint pt_trial;
        CostGradient cg_trial;
        Vec lam_trial;
        while (s * cg.grad.norm() > 1e-12 * (1 + st.lambda.norm())) {
            lam_trial = st.lambda - s * cg.grad;
            try {
                pt_trial = eval_point(model, lam_trial, x_seed, opts, &pt.orbit);
                any_evaluated = true;
                const CostGradient probe =
                    grad_cost(opts.space, pt_trial.adjoint.q, q_ref, {});
                if (probe.cost <= cg.cost - opts.armijo_c1 * s * g2) {
                    cg_trial = probe;
                    accepted = true;
                    break;
                }
            } catch (const NumericalError&) {
                // orbit solve failed at the trial point; damp toward the boundary
            }
            s *= opts.backtrack;
        }
        if (!accepted) {
            st.status = any_evaluated ? IdentifyStatus::CostConverged
                                      : IdentifyStatus::BoundaryReached;
            break;
        }
        const double improvement = cg.cost - cg_trial.cost;
        st.lambda = lam_trial;
        pt = std::move(pt_trial);
        bundle = sensitivity_bundle(model, pt.orbit, pt.adjoint, opts.sens);
        cg = grad_cost(opts.space, pt.adjoint.q, q_ref, bundle.S_q);
        st.trace.push_back({st.lambda, cg.cost, cg.grad.norm(), s});
        step = 2.0 * s;  // warm-start the next line search
        st.iterations = iter + 1;
        if (improvement <= opts.cost_tol) {
            st.status = IdentifyStatus::CostConverged;
            break;
        }
        if (iter + 1 == opts.max_iter) st.status = IdentifyStatus::MaxIterations;
    }
    st.cost = cg.cost;
    st.dist = cg.dist;
    st.grad = cg.grad;
    return st;
}

const char* classification_name(Classification::Label l) {
    switch (l) {
        case Classification::Label::ClassQ1: return "class-q_I";
        case Classification::Label::ClassQ2: return "class-q_II";
        default: return "tie";
    }
}

PhaseSignal canonical_q1(int N) {
    PhaseSignal q(N);
    for (int i = 0; i < N; ++i) q[i] = 1.0 - std::cos(two_pi * i / N);
    return q;
}

PhaseSignal canonical_q2(int N) {
    PhaseSignal q(N);
    for (int i = 0; i < N; ++i) q[i] = std::sin(two_pi * i / N + M_PI);
    return q;
}

Classification classify(const PhaseSignal& q, PrcSpace space, double tie_tol) {
    if (norm_l2(q) == 0) throw ZeroSignal("classify: zero PRC");
    const int N = static_cast<int>(q.size());
    Classification cl;
    cl.d1 = distance(space, q, canonical_q1(N));
    cl.d2 = distance(space, q, canonical_q2(N));
    if (std::abs(cl.d1 - cl.d2) <= tie_tol)
        cl.label = Classification::Label::Tie;
    else
        cl.label = (cl.d1 < cl.d2) ? Classification::Label::ClassQ1
                                   : Classification::Label::ClassQ2;
    return cl;
}

}  // namespace prclab
