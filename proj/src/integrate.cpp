#include "prclab/integrate.hpp"

#include <limits>

namespace prclab {

namespace {

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// y5 - y4 error weights
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

double error_norm(const Vec& err, const Vec& y0, const Vec& y1, double atol, double rtol) {
    double s = 0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        const double sc = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        const double q = err[i] / sc;
        s += q * q;
    }
    return std::sqrt(s / static_cast<double>(err.size()));
}

double initial_step(const OdeRhs& rhs, double t0, const Vec& y0, const Vec& f0, double t_span,
                    double atol, double rtol) {
    double d0 = 0, d1 = 0;
    for (Eigen::Index i = 0; i < y0.size(); ++i) {
        const double sc = atol + rtol * std::abs(y0[i]);
        d0 = std::max(d0, std::abs(y0[i]) / sc);
        d1 = std::max(d1, std::abs(f0[i]) / sc);
    }
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 * t_span : 0.01 * d0 / d1;
    h0 = std::min(h0, t_span);
    Vec y1 = y0 + h0 * f0;
    Vec f1(y0.size());
    rhs(t0 + h0, y1, f1);
    double d2 = 0;
    for (Eigen::Index i = 0; i < y0.size(); ++i) {
        const double sc = atol + rtol * std::abs(y0[i]);
        d2 = std::max(d2, std::abs(f1[i] - f0[i]) / sc);
    }
    d2 /= h0;
    double h1;
    if (std::max(d1, d2) <= 1e-15)
        h1 = std::max(1e-6 * t_span, h0 * 1e-3);
    else
        h1 = std::pow(0.01 / std::max(d1, d2), 0.2);
    return std::min({100 * h0, h1, t_span});
}

struct Dp5Stepper {
    const OdeRhs& rhs;
    const OdeOptions& opts;
    double t;
    Vec y;
    Vec k1, k2, k3, k4, k5, k6, k7, ytmp, ynew, err;
    double h = 0;
    long steps = 0;
    bool have_k1 = false;

    Dp5Stepper(const OdeRhs& r, const OdeOptions& o, double t0, const Vec& y0)
        : rhs(r), opts(o), t(t0), y(y0) {
        const Eigen::Index n = y0.size();
        k1.resize(n); k2.resize(n); k3.resize(n); k4.resize(n); k5.resize(n);
        k6.resize(n); k7.resize(n); ytmp.resize(n); ynew.resize(n); err.resize(n);
    }

    void check_finite(const Vec& v) const {
        if (!v.allFinite()) throw NonFiniteState("non-finite state during integration");
    }

    // advances to exactly t_target
    void advance_to(double t_target, const StepObserver& observer) {
        if (t_target <= t) return;
        if (!have_k1) {
            rhs(t, y, k1);
            check_finite(k1);
            have_k1 = true;
        }
        if (h <= 0)
            h = (opts.initial_step > 0)
                    ? opts.initial_step
                    : initial_step(rhs, t, y, k1, t_target - t, opts.atol, opts.rtol);
        bool last_rejected = false;
        while (t < t_target) {
            if (++steps > opts.max_steps)
                throw NumericalError("integrator exceeded the maximum step count");
            const double hmin = 16 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1.0);
            if (h < hmin) throw StepSizeUnderflow("integrator step size underflow");
            bool clipped = false;
            const double h_work = h;
            if (t + h >= t_target) {
                h = t_target - t;
                clipped = true;
            }
            ytmp = y + h * (a21 * k1);
            rhs(t + c2 * h, ytmp, k2);
            ytmp = y + h * (a31 * k1 + a32 * k2);
            rhs(t + c3 * h, ytmp, k3);
            ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
            rhs(t + c4 * h, ytmp, k4);
            ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
            rhs(t + c5 * h, ytmp, k5);
            ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
            rhs(t + h, ytmp, k6);
            ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            rhs(t + h, ynew, k7);
            check_finite(ynew);
            err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            const double en = error_norm(err, y, ynew, opts.atol, opts.rtol);
            if (en <= 1.0) {
                t = clipped ? t_target : t + h;
                y.swap(ynew);
                k1.swap(k7);  // FSAL
                if (observer) observer(t, y);
                if (clipped) {
                    h = h_work;  // resume with the pre-clip step
                } else {
                    double fac = (en == 0.0) ? 5.0 : 0.9 * std::pow(en, -0.2);
                    if (last_rejected) fac = std::min(fac, 1.0);
                    h *= std::clamp(fac, 0.2, 5.0);
                }
                last_rejected = false;
            } else {
                h *= std::clamp(0.9 * std::pow(en, -0.2), 0.1, 0.9);
                last_rejected = true;
            }
        }
    }
};

}  // namespace

Vec ode_solve(const OdeRhs& rhs, double t0, double t1, const Vec& y0, const OdeOptions& opts,
              const StepObserver& observer) {
    if (t1 < t0) throw std::invalid_argument("ode_solve: t1 < t0");
    Dp5Stepper st(rhs, opts, t0, y0);
    if (observer) observer(t0, y0);
    st.advance_to(t1, observer);
    return st.y;
}

std::vector<Vec> ode_solve_samples(const OdeRhs& rhs, double t0, double t1, const Vec& y0,
                                   const std::vector<double>& times, const OdeOptions& opts) {
    Dp5Stepper st(rhs, opts, t0, y0);
    std::vector<Vec> out;
    out.reserve(times.size());
    for (double tt : times) {
        if (tt < t0 - 1e-15 || tt > t1 + 1e-12)
            throw std::invalid_argument("ode_solve_samples: sample time outside [t0, t1]");
        st.advance_to(std::min(tt, t1), nullptr);
        out.push_back(st.y);
    }
    return out;
}

namespace {

OdeRhs make_flow_rhs(const ModelDef& model, const InputSignal& u, const Vec& lam, unsigned blocks) {
    const int n = model.n, l = model.l;
    const bool with_phi = blocks & FlowFundamental;
    const bool with_dlam = blocks & FlowParamJacobian;
    return [=, &model](double t, const Vec& y, Vec& dydt) {
        const double uv = u ? u(t) : 0.0;
        const Vec x = y.head(n);
        dydt.head(n) = model.f(x, uv, lam);
        if (with_phi || with_dlam) {
            const Mat A = model.dfdx(x, uv, lam);
            Eigen::Index off = n;
            if (with_phi) {
                const auto Phi = Eigen::Map<const Mat>(y.data() + off, n, n);
                Eigen::Map<Mat>(dydt.data() + off, n, n) = A * Phi;
                off += n * n;
            }
            if (with_dlam) {
                const auto D = Eigen::Map<const Mat>(y.data() + off, n, l);
                Eigen::Map<Mat>(dydt.data() + off, n, l) = A * D + model.dfdlam(x, uv, lam);
            }
        }
    };
}

}  // namespace

FlowResult flow(const ModelDef& model, double t, const Vec& x0, const InputSignal& u,
                const Vec& lam, const OdeOptions& opts, unsigned blocks) {
    if (t < 0) throw std::invalid_argument("flow: t must be >= 0");
    const int n = model.n, l = model.l;
    const bool with_phi = blocks & FlowFundamental;
    const bool with_dlam = blocks & FlowParamJacobian;
    Eigen::Index dim = n + (with_phi ? n * n : 0) + (with_dlam ? n * l : 0);
    Vec y0 = Vec::Zero(dim);
    y0.head(n) = x0;
    if (with_phi) Eigen::Map<Mat>(y0.data() + n, n, n) = Mat::Identity(n, n);

    Vec y1 = (t == 0) ? y0 : ode_solve(make_flow_rhs(model, u, lam, blocks), 0.0, t, y0, opts);

    FlowResult res;
    res.x_end = y1.head(n);
    Eigen::Index off = n;
    if (with_phi) {
        res.Phi = Eigen::Map<const Mat>(y1.data() + off, n, n);
        off += n * n;
    }
    if (with_dlam) res.dphi_dlam = Eigen::Map<const Mat>(y1.data() + off, n, l);
    if (blocks & FlowEndVelocity) res.f_end = model.f(res.x_end, u ? u(t) : 0.0, lam);
    return res;
}

Vec impulse_flow(const ModelDef& model, const Vec& x0, double alpha, const Vec& lam,
                 double t_after, const OdeOptions& opts) {
    if (!std::isfinite(alpha)) throw std::invalid_argument("impulse_flow: alpha must be finite");
    Vec x = x0 + alpha * model.dfdu(x0, 0.0, lam);
    if (t_after > 0) x = flow(model, t_after, x, nullptr, lam, opts).x_end;
    return x;
}

}  // namespace prclab
