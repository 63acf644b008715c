#include "prclab/models.hpp"

#include <algorithm>

namespace prclab {

namespace {

/// Hill term g(s) = 1/(1+s^nu) with first and second derivatives, evaluated in
/// the log domain so large s^nu cannot overflow. For s <= 0 the nu > 2 limit
/// from the right (g = 1, g' = g'' = 0) is used.
void hill(double s, double nu, double& g, double& gp, double& gpp) {
    if (s <= 0.0) {
        g = 1.0;
        gp = 0.0;
        gpp = 0.0;
        return;
    }
    const double L = nu * std::log(s);
    double w;
    if (L >= 0) {
        const double e = std::exp(-L);
        w = 1.0 / (1.0 + e);
        g = e / (1.0 + e);
    } else {
        const double e = std::exp(L);
        w = e / (1.0 + e);
        g = 1.0 / (1.0 + e);
    }
    gp = -nu * w * g / s;
    gpp = nu * w * g / (s * s) * (1.0 + nu * (w - g));
}

}  // namespace

void GoodwinParams::validate() const {
    if (!(K > 0)) throw std::invalid_argument("goodwin: K must be > 0");
    if (!(tau > 0)) throw std::invalid_argument("goodwin: tau must be > 0");
    if (!(nu >= 1)) throw std::invalid_argument("goodwin: nu must be >= 1");
}

Vec nominal_lambda(const GoodwinParams& p) {
    Vec lam(2);
    lam << p.K, p.tau;
    return lam;
}

ModelDef goodwin_model(const GoodwinParams& params) {
    params.validate();
    const double nu = params.nu;
    ModelDef m;
    m.n = 3;
    m.l = 2;
    m.param_names = {"K", "tau"};
    m.f = [nu](const Vec& x, double u, const Vec& lam) {
        double g, gp, gpp;
        hill(x[2] + u, nu, g, gp, gpp);
        Vec dx(3);
        dx << -x[0] + lam[0] * g, (x[0] - x[1]) / lam[1], (x[1] - x[2]) / lam[1];
        return dx;
    };
    m.h = [](const Vec& x, const Vec&) { return x[0]; };
    m.dfdx = [nu](const Vec& x, double u, const Vec& lam) {
        double g, gp, gpp;
        hill(x[2] + u, nu, g, gp, gpp);
        const double it = 1.0 / lam[1];
        Mat J(3, 3);
        J << -1, 0, lam[0] * gp, it, -it, 0, 0, it, -it;
        return J;
    };
    m.dfdu = [nu](const Vec& x, double u, const Vec& lam) {
        double g, gp, gpp;
        hill(x[2] + u, nu, g, gp, gpp);
        Vec d(3);
        d << lam[0] * gp, 0, 0;
        return d;
    };
    m.dfdlam = [nu](const Vec& x, double u, const Vec& lam) {
        double g, gp, gpp;
        hill(x[2] + u, nu, g, gp, gpp);
        const double it2 = 1.0 / (lam[1] * lam[1]);
        Mat J(3, 2);
        J << g, 0, 0, -(x[0] - x[1]) * it2, 0, -(x[1] - x[2]) * it2;
        return J;
    };
    m.d2fdxdx_dot = [nu](const Vec& x, double u, const Vec& lam, const Vec& w) {
        double g, gp, gpp;
        hill(x[2] + u, nu, g, gp, gpp);
        Mat M = Mat::Zero(3, 3);
        M(0, 2) = lam[0] * gpp * w[2];  // only f_1 is nonlinear, through p
        return M;
    };
    m.d2fdxdu = [nu](const Vec& x, double u, const Vec& lam) {
        double g, gp, gpp;
        hill(x[2] + u, nu, g, gp, gpp);
        Mat M = Mat::Zero(3, 3);
        M(0, 2) = lam[0] * gpp;
        return M;
    };
    m.d2fdlamdu = [nu](const Vec& x, double u, const Vec&) {
        double g, gp, gpp;
        hill(x[2] + u, nu, g, gp, gpp);
        Mat M = Mat::Zero(3, 2);
        M(0, 0) = gp;
        return M;
    };
    m.d2fdxdlam = [nu](const Vec& x, double u, const Vec& lam, int j) {
        Mat M = Mat::Zero(3, 3);
        if (j == 0) {
            double g, gp, gpp;
            hill(x[2] + u, nu, g, gp, gpp);
            M(0, 2) = gp;
        } else {
            const double it2 = 1.0 / (lam[1] * lam[1]);
            M(1, 0) = -it2;
            M(1, 1) = it2;
            M(2, 1) = -it2;
            M(2, 2) = it2;
        }
        return M;
    };
    return m;
}

void MorrisLecarParams::validate() const {
    if (!(C > 0)) throw std::invalid_argument("morris_lecar: C must be > 0");
    if (g_Ca < 0 || g_K < 0 || g_L < 0)
        throw std::invalid_argument("morris_lecar: conductances must be >= 0");
    if (V2 == 0 || V4 == 0) throw std::invalid_argument("morris_lecar: V2 and V4 must be nonzero");
    if (!(phi > 0)) throw std::invalid_argument("morris_lecar: phi must be > 0");
}

namespace {

struct MlIndex {
    int I_app = -1, g_Ca = -1, g_K = -1, g_L = -1, C = -1, phi = -1;
};

MlIndex ml_index(const std::vector<std::string>& sweep) {
    MlIndex ix;
    for (int j = 0; j < static_cast<int>(sweep.size()); ++j) {
        const std::string& s = sweep[static_cast<size_t>(j)];
        if (s == "I_app") ix.I_app = j;
        else if (s == "g_Ca") ix.g_Ca = j;
        else if (s == "g_K") ix.g_K = j;
        else if (s == "g_L") ix.g_L = j;
        else if (s == "C") ix.C = j;
        else if (s == "phi") ix.phi = j;
        else throw std::invalid_argument("morris_lecar: unsupported sweep parameter '" + s + "'");
    }
    return ix;
}

struct MlVals {
    double C, g_Ca, g_K, g_L, phi, I_app;
};

MlVals ml_values(const MorrisLecarParams& p, const MlIndex& ix, const Vec& lam) {
    MlVals v{p.C, p.g_Ca, p.g_K, p.g_L, p.phi, p.I_app};
    if (ix.I_app >= 0) v.I_app = lam[ix.I_app];
    if (ix.g_Ca >= 0) v.g_Ca = lam[ix.g_Ca];
    if (ix.g_K >= 0) v.g_K = lam[ix.g_K];
    if (ix.g_L >= 0) v.g_L = lam[ix.g_L];
    if (ix.C >= 0) v.C = lam[ix.C];
    if (ix.phi >= 0) v.phi = lam[ix.phi];
    return v;
}

}  // namespace

Vec nominal_lambda(const MorrisLecarParams& p, const std::vector<std::string>& sweep) {
    Vec lam(static_cast<Eigen::Index>(sweep.size()));
    for (size_t j = 0; j < sweep.size(); ++j) {
        const std::string& s = sweep[j];
        double v;
        if (s == "I_app") v = p.I_app;
        else if (s == "g_Ca") v = p.g_Ca;
        else if (s == "g_K") v = p.g_K;
        else if (s == "g_L") v = p.g_L;
        else if (s == "C") v = p.C;
        else if (s == "phi") v = p.phi;
        else throw std::invalid_argument("morris_lecar: unsupported sweep parameter '" + s + "'");
        lam[static_cast<Eigen::Index>(j)] = v;
    }
    return lam;
}

ModelDef morris_lecar_model(const MorrisLecarParams& params, const std::vector<std::string>& sweep) {
    params.validate();
    const MlIndex ix = ml_index(sweep);
    const MorrisLecarParams p = params;
    ModelDef m;
    m.n = 2;
    m.l = static_cast<int>(sweep.size());
    m.param_names = sweep;

    auto minf = [p](double V) { return 0.5 * (1 + std::tanh((V - p.V1) / p.V2)); };
    auto dminf = [p](double V) {
        const double c = std::cosh((V - p.V1) / p.V2);
        return 0.5 / (p.V2 * c * c);
    };
    auto d2minf = [p](double V) {
        const double z = (V - p.V1) / p.V2;
        const double c = std::cosh(z);
        return -std::tanh(z) / (p.V2 * p.V2 * c * c);
    };
    auto winf = [p](double V) { return 0.5 * (1 + std::tanh((V - p.V3) / p.V4)); };
    auto dwinf = [p](double V) {
        const double c = std::cosh((V - p.V3) / p.V4);
        return 0.5 / (p.V4 * c * c);
    };
    auto d2winf = [p](double V) {
        const double z = (V - p.V3) / p.V4;
        const double c = std::cosh(z);
        return -std::tanh(z) / (p.V4 * p.V4 * c * c);
    };
    // 1/tau_w(V) = cosh((V - V3)/(2 V4))
    auto ch = [p](double V) { return std::cosh((V - p.V3) / (2 * p.V4)); };
    auto sh = [p](double V) { return std::sinh((V - p.V3) / (2 * p.V4)); };

    m.f = [p, ix, minf, winf, ch](const Vec& x, double u, const Vec& lam) {
        const MlVals v = ml_values(p, ix, lam);
        const double V = x[0], w = x[1];
        Vec dx(2);
        dx[0] = (-v.g_Ca * minf(V) * (V - p.V_Ca) - v.g_K * w * (V - p.V_K) -
                 v.g_L * (V - p.V_L) + v.I_app + u) /
                v.C;
        dx[1] = v.phi * (winf(V) - w) * ch(V);
        return dx;
    };
    m.h = [](const Vec& x, const Vec&) { return x[0]; };
    m.dfdx = [p, ix, minf, dminf, winf, dwinf, ch, sh](const Vec& x, double u, const Vec& lam) {
        (void)u;
        const MlVals v = ml_values(p, ix, lam);
        const double V = x[0], w = x[1];
        Mat J(2, 2);
        J(0, 0) = (-v.g_Ca * (dminf(V) * (V - p.V_Ca) + minf(V)) - v.g_K * w - v.g_L) / v.C;
        J(0, 1) = -v.g_K * (V - p.V_K) / v.C;
        J(1, 0) = v.phi * (dwinf(V) * ch(V) + (winf(V) - w) * sh(V) / (2 * p.V4));
        J(1, 1) = -v.phi * ch(V);
        return J;
    };
    m.dfdu = [p, ix](const Vec&, double, const Vec& lam) {
        const MlVals v = ml_values(p, ix, lam);
        Vec d(2);
        d << 1.0 / v.C, 0.0;
        return d;
    };
    m.dfdlam = [p, ix, minf, winf, ch, this_f = m.f](const Vec& x, double u, const Vec& lam) {
        const MlVals v = ml_values(p, ix, lam);
        const double V = x[0], w = x[1];
        Mat J = Mat::Zero(2, static_cast<Eigen::Index>(lam.size()));
        if (ix.I_app >= 0) J(0, ix.I_app) = 1.0 / v.C;
        if (ix.g_Ca >= 0) J(0, ix.g_Ca) = -minf(V) * (V - p.V_Ca) / v.C;
        if (ix.g_K >= 0) J(0, ix.g_K) = -w * (V - p.V_K) / v.C;
        if (ix.g_L >= 0) J(0, ix.g_L) = -(V - p.V_L) / v.C;
        if (ix.C >= 0) J(0, ix.C) = -this_f(x, u, lam)[0] / v.C;
        if (ix.phi >= 0) J(1, ix.phi) = (winf(V) - w) * ch(V);
        return J;
    };
    m.d2fdxdx_dot = [p, ix, minf, dminf, d2minf, winf, dwinf, d2winf, ch, sh](
                        const Vec& x, double u, const Vec& lam, const Vec& wv) {
        (void)u;
        const MlVals v = ml_values(p, ix, lam);
        const double V = x[0], w = x[1];
        const double f1_VV = -v.g_Ca * (d2minf(V) * (V - p.V_Ca) + 2 * dminf(V)) / v.C;
        const double f1_Vw = -v.g_K / v.C;
        const double f2_VV = v.phi * (d2winf(V) * ch(V) + 2 * dwinf(V) * sh(V) / (2 * p.V4) +
                                      (winf(V) - w) * ch(V) / (4 * p.V4 * p.V4));
        const double f2_Vw = -v.phi * sh(V) / (2 * p.V4);
        Mat M(2, 2);
        M(0, 0) = f1_VV * wv[0] + f1_Vw * wv[1];
        M(0, 1) = f1_Vw * wv[0];
        M(1, 0) = f2_VV * wv[0] + f2_Vw * wv[1];
        M(1, 1) = f2_Vw * wv[0];
        return M;
    };
    m.d2fdxdu = [](const Vec&, double, const Vec&) { return Mat(Mat::Zero(2, 2)); };
    m.d2fdlamdu = [ix](const Vec&, double, const Vec& lam) {
        Mat M = Mat::Zero(2, static_cast<Eigen::Index>(lam.size()));
        if (ix.C >= 0) M(0, ix.C) = -1.0 / (lam[ix.C] * lam[ix.C]);
        return M;
    };
    m.d2fdxdlam = [p, ix, minf, dminf, winf, dwinf, ch, sh, base_dfdx = m.dfdx](
                      const Vec& x, double u, const Vec& lam, int j) {
        const MlVals v = ml_values(p, ix, lam);
        const double V = x[0], w = x[1];
        Mat M = Mat::Zero(2, 2);
        if (j == ix.g_Ca) {
            M(0, 0) = -(dminf(V) * (V - p.V_Ca) + minf(V)) / v.C;
        } else if (j == ix.g_K) {
            M(0, 0) = -w / v.C;
            M(0, 1) = -(V - p.V_K) / v.C;
        } else if (j == ix.g_L) {
            M(0, 0) = -1.0 / v.C;
        } else if (j == ix.C) {
            const Mat J = base_dfdx(x, u, lam);
            M(0, 0) = -J(0, 0) / v.C;
            M(0, 1) = -J(0, 1) / v.C;
        } else if (j == ix.phi) {
            M(1, 0) = dwinf(V) * ch(V) + (winf(V) - w) * sh(V) / (2 * p.V4);
            M(1, 1) = -ch(V);
        }
        return M;  // I_app: zero
    };
    return m;
}

void RadialClockParams::validate() const {
    if (!(omega0 > 0)) throw std::invalid_argument("radial_clock: omega0 must be > 0");
    if (!(kappa > 0)) throw std::invalid_argument("radial_clock: kappa must be > 0");
}

Vec nominal_lambda(const RadialClockParams& p) {
    Vec lam(3);
    lam << p.omega0, p.kappa, p.gain;
    return lam;
}

ModelDef radial_clock_model(const RadialClockParams& params) {
    params.validate();
    ModelDef m;
    m.n = 2;
    m.l = 3;
    m.param_names = {"omega0", "kappa", "gain"};
    m.f = [](const Vec& x, double u, const Vec& lam) {
        const double r2 = x.squaredNorm();
        Vec dx(2);
        dx[0] = lam[1] * x[0] * (1 - r2) - lam[0] * x[1] + lam[2] * u;
        dx[1] = lam[1] * x[1] * (1 - r2) + lam[0] * x[0];
        return dx;
    };
    // y rising through 0 puts the cycle section at (1,0), so the computed
    // orbit carries the canonical parameterization x(theta) = (cos, sin)
    m.h = [](const Vec& x, const Vec&) { return x[1]; };
    m.dfdx = [](const Vec& x, double, const Vec& lam) {
        const double X = x[0], Y = x[1];
        Mat J(2, 2);
        J(0, 0) = lam[1] * (1 - 3 * X * X - Y * Y);
        J(0, 1) = -2 * lam[1] * X * Y - lam[0];
        J(1, 0) = -2 * lam[1] * X * Y + lam[0];
        J(1, 1) = lam[1] * (1 - X * X - 3 * Y * Y);
        return J;
    };
    m.dfdu = [](const Vec&, double, const Vec& lam) {
        Vec d(2);
        d << lam[2], 0.0;
        return d;
    };
    m.dfdlam = [](const Vec& x, double u, const Vec& lam) {
        const double X = x[0], Y = x[1];
        const double r2 = X * X + Y * Y;
        (void)lam;
        Mat J(2, 3);
        J << -Y, X * (1 - r2), u, X, Y * (1 - r2), 0.0;
        return J;
    };
    m.d2fdxdx_dot = [](const Vec& x, double, const Vec& lam, const Vec& w) {
        const double X = x[0], Y = x[1], k = lam[1];
        Mat M(2, 2);
        M(0, 0) = -6 * k * X * w[0] - 2 * k * Y * w[1];
        M(0, 1) = -2 * k * Y * w[0] - 2 * k * X * w[1];
        M(1, 0) = -2 * k * Y * w[0] - 2 * k * X * w[1];
        M(1, 1) = -2 * k * X * w[0] - 6 * k * Y * w[1];
        return M;
    };
    m.d2fdxdu = [](const Vec&, double, const Vec&) { return Mat(Mat::Zero(2, 2)); };
    m.d2fdlamdu = [](const Vec&, double, const Vec&) {
        Mat M = Mat::Zero(2, 3);
        M(0, 2) = 1.0;
        return M;
    };
    m.d2fdxdlam = [](const Vec& x, double, const Vec&, int j) {
        const double X = x[0], Y = x[1];
        Mat M = Mat::Zero(2, 2);
        if (j == 0) {
            M(0, 1) = -1.0;
            M(1, 0) = 1.0;
        } else if (j == 1) {
            M(0, 0) = 1 - 3 * X * X - Y * Y;
            M(0, 1) = -2 * X * Y;
            M(1, 0) = -2 * X * Y;
            M(1, 1) = 1 - X * X - 3 * Y * Y;
        }
        return M;
    };
    return m;
}

}  // namespace prclab
