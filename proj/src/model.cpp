#include "prclab/model.hpp"

namespace prclab {

namespace {

double coord_step(double step, double v) { return step * std::max(1.0, std::abs(v)); }

}  // namespace

ModelDef finite_difference_derivatives(const ModelDef& model, double step) {
    if (!(step > 0)) throw std::invalid_argument("finite_difference_derivatives: step must be > 0");
    ModelDef out;
    out.n = model.n;
    out.l = model.l;
    out.param_names = model.param_names;
    out.f = model.f;
    out.h = model.h;
    const auto f = model.f;
    const int n = model.n, l = model.l;
    const double step2 = std::sqrt(step);  // four-point stencils on f

    out.dfdx = [f, n, step](const Vec& x, double u, const Vec& lam) {
        Mat J(n, n);
        Vec xp = x, xm = x;
        for (int k = 0; k < n; ++k) {
            const double h = coord_step(step, x[k]);
            xp[k] = x[k] + h;
            xm[k] = x[k] - h;
            J.col(k) = (f(xp, u, lam) - f(xm, u, lam)) / (2 * h);
            xp[k] = x[k];
            xm[k] = x[k];
        }
        return J;
    };
    out.dfdu = [f, step](const Vec& x, double u, const Vec& lam) {
        const double h = coord_step(step, u);
        return Vec((f(x, u + h, lam) - f(x, u - h, lam)) / (2 * h));
    };
    out.dfdlam = [f, n, l, step](const Vec& x, double u, const Vec& lam) {
        Mat J(n, l);
        Vec lp = lam, lm = lam;
        for (int j = 0; j < l; ++j) {
            const double h = coord_step(step, lam[j]);
            lp[j] = lam[j] + h;
            lm[j] = lam[j] - h;
            J.col(j) = (f(x, u, lp) - f(x, u, lm)) / (2 * h);
            lp[j] = lam[j];
            lm[j] = lam[j];
        }
        return J;
    };
    out.d2fdxdx_dot = [f, n, step2](const Vec& x, double u, const Vec& lam, const Vec& w) {
        // M(i,j) = sum_k d2f_i/(dx_j dx_k) w_k via directional difference along w
        Mat M(n, n);
        const double wn = w.lpNorm<Eigen::Infinity>();
        if (wn == 0.0) return Mat(Mat::Zero(n, n));
        const double eps = step2 * std::max(1.0, x.lpNorm<Eigen::Infinity>()) / wn;
        const Vec xp = x + eps * w, xm = x - eps * w;
        Vec xpp = xp, xpm = xp, xmp = xm, xmm = xm;
        for (int j = 0; j < n; ++j) {
            const double h = coord_step(step2, x[j]);
            xpp[j] += h;
            xpm[j] -= h;
            xmp[j] += h;
            xmm[j] -= h;
            M.col(j) = (f(xpp, u, lam) - f(xpm, u, lam) - f(xmp, u, lam) + f(xmm, u, lam)) /
                       (4 * h * eps);
            xpp[j] = xp[j];
            xpm[j] = xp[j];
            xmp[j] = xm[j];
            xmm[j] = xm[j];
        }
        return M;
    };
    out.d2fdxdu = [f, n, step2](const Vec& x, double u, const Vec& lam) {
        Mat M(n, n);
        const double hu = coord_step(step2, u);
        Vec xp = x, xm = x;
        for (int j = 0; j < n; ++j) {
            const double h = coord_step(step2, x[j]);
            xp[j] = x[j] + h;
            xm[j] = x[j] - h;
            M.col(j) = (f(xp, u + hu, lam) - f(xp, u - hu, lam) - f(xm, u + hu, lam) +
                        f(xm, u - hu, lam)) /
                       (4 * h * hu);
            xp[j] = x[j];
            xm[j] = x[j];
        }
        return M;
    };
    out.d2fdlamdu = [f, n, l, step2](const Vec& x, double u, const Vec& lam) {
        Mat M(n, l);
        const double hu = coord_step(step2, u);
        Vec lp = lam, lm = lam;
        for (int j = 0; j < l; ++j) {
            const double h = coord_step(step2, lam[j]);
            lp[j] = lam[j] + h;
            lm[j] = lam[j] - h;
            M.col(j) = (f(x, u + hu, lp) - f(x, u - hu, lp) - f(x, u + hu, lm) +
                        f(x, u - hu, lm)) /
                       (4 * h * hu);
            lp[j] = lam[j];
            lm[j] = lam[j];
        }
        return M;
    };
    out.d2fdxdlam = [f, n, step2](const Vec& x, double u, const Vec& lam, int j) {
        Mat M(n, n);
        const double hl = coord_step(step2, lam[j]);
        Vec lp = lam, lm = lam;
        lp[j] += hl;
        lm[j] -= hl;
        Vec xp = x, xm = x;
        for (int k = 0; k < n; ++k) {
            const double h = coord_step(step2, x[k]);
            xp[k] = x[k] + h;
            xm[k] = x[k] - h;
            M.col(k) = (f(xp, u, lp) - f(xm, u, lp) - f(xp, u, lm) + f(xm, u, lm)) / (4 * h * hl);
            xp[k] = x[k];
            xm[k] = x[k];
        }
        return M;
    };
    return out;
}

}  // namespace prclab
