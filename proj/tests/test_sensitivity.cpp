#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "prclab/models.hpp"
#include "prclab/metrics.hpp"
#include "prclab/sensitivity.hpp"

using namespace prclab;
using test::sampled;

namespace {

PeriodicOrbit solve_radial(Scheme scheme, int N) {
    RadialClockParams rp;
    const ModelDef m = radial_clock_model(rp);
    GuessOptions g;
    g.settle_time = 20.0;
    g.N = N;
    Vec seed(2);
    seed << 0.7, 0.4;
    NewtonOptions nopts;
    nopts.tol = 1e-12;
    return solve_orbit(m, nominal_lambda(rp), seed, g, scheme, nopts);
}

struct GoodwinPipeline {
    ModelDef model;
    PeriodicOrbit orbit;
    AdjointResult adjoint;
    SensitivityBundle bundle;
};

GoodwinPipeline goodwin_pipeline(int N, Scheme scheme = Scheme::Trapezoidal) {
    GoodwinPipeline p;
    p.model = goodwin_model({});
    GuessOptions g;
    g.settle_time = 150.0;
    g.N = N;
    Vec seed(3);
    seed << 0.5, 0.5, 0.5;
    NewtonOptions nopts;
    nopts.tol = 1e-12;
    p.orbit = solve_orbit(p.model, nominal_lambda(GoodwinParams{}), seed, g, scheme, nopts);
    p.adjoint = adjoint_prc(p.model, p.orbit);
    p.bundle = sensitivity_bundle(p.model, p.orbit, p.adjoint);
    return p;
}

/// Re-solves the orbit at a shifted parameter, keeping the base orbit's grid,
/// scheme and phase anchor fixed (the sensitivities differentiate exactly this
/// discrete solution map).
PeriodicOrbit resolve_at(const ModelDef& m, const PeriodicOrbit& base, const Vec& lam) {
    PeriodicOrbit guess = base;
    guess.lambda = lam;
    NewtonOptions nopts;
    nopts.tol = 1e-12;
    return newton_orbit(m, lam, guess, base.scheme, base.phase, nopts);
}

}  // namespace

TEST_CASE("radial clock sensitivities have closed forms") {
    const RadialClockParams rp;
    const ModelDef m = radial_clock_model(rp);
    const PeriodicOrbit orb = solve_radial(Scheme::MultipleShooting, 128);
    const AdjointResult adj = adjoint_prc(m, orb);
    const SensitivityBundle b = sensitivity_bundle(m, orb, adj);

    SECTION("frequency responds only to omega0, one to one") {
        REQUIRE(std::abs(b.S_omega[0] - 1.0) < 1e-7);  // d omega / d omega0 = 1
        REQUIRE(std::abs(b.S_omega[1]) < 1e-7);        // kappa shapes nothing
        REQUIRE(std::abs(b.S_omega[2]) < 1e-7);        // gain enters only with u
    }
    SECTION("orbit shape is parameter-free") {
        for (int j = 0; j < 3; ++j)
            REQUIRE(b.S_x[static_cast<size_t>(j)].cwiseAbs().maxCoeff() < 1e-6);
    }
    SECTION("S_q picks out the input-gain direction") {
        const Vec minus_sin = sampled(128, [](double t) { return -std::sin(t); });
        REQUIRE((b.S_q[2] - minus_sin).lpNorm<Eigen::Infinity>() < 1e-5);
        REQUIRE(b.S_q[0].lpNorm<Eigen::Infinity>() < 1e-5);
        REQUIRE(b.S_q[1].lpNorm<Eigen::Infinity>() < 1e-5);
    }
    SECTION("closure of the sensitivity curves") {
        for (int j = 0; j < 3; ++j) {
            REQUIRE(b.S_x[static_cast<size_t>(j)].col(128) == b.S_x[static_cast<size_t>(j)].col(0));
            REQUIRE(b.S_p[static_cast<size_t>(j)].col(128) == b.S_p[static_cast<size_t>(j)].col(0));
        }
    }
}

TEST_CASE("goodwin sensitivities against finite differences of full re-solves") {
    const GoodwinPipeline p = goodwin_pipeline(128);
    const double omega = p.orbit.omega;

    for (int j : {0, 1}) {
        const double h = 1e-4 * std::abs(p.orbit.lambda[j]);
        Vec lp = p.orbit.lambda, lm = p.orbit.lambda;
        lp[j] += h;
        lm[j] -= h;
        const PeriodicOrbit op = resolve_at(p.model, p.orbit, lp);
        const PeriodicOrbit om = resolve_at(p.model, p.orbit, lm);

        SECTION("S_omega for parameter " + p.model.param_names[static_cast<size_t>(j)]) {
            const double fd = (op.omega - om.omega) / (2 * h);
            REQUIRE(std::abs(p.bundle.S_omega[j] - fd) <= 1e-3 * std::abs(fd));
        }
        SECTION("S_T identity and finite difference, parameter " +
                p.model.param_names[static_cast<size_t>(j)]) {
            const double ST = period_sensitivity(p.bundle.S_omega[j], omega);
            REQUIRE(std::abs(ST / p.orbit.period() + p.bundle.S_omega[j] / omega) < 1e-14);
            const double fdT = (op.period() - om.period()) / (2 * h);
            REQUIRE(std::abs(ST - fdT) <= 1e-3 * std::abs(fdT));
        }
        SECTION("S_q for parameter " + p.model.param_names[static_cast<size_t>(j)]) {
            const PhaseSignal qp = adjoint_prc(p.model, op).q;
            const PhaseSignal qm = adjoint_prc(p.model, om).q;
            const PhaseSignal fd = (qp - qm) / (2 * h);
            const double rel = norm_l2(p.bundle.S_q[static_cast<size_t>(j)] - fd) / norm_l2(fd);
            REQUIRE(rel <= 1e-3);
        }
    }
}

TEST_CASE("finite-difference discrepancy shrinks at second order") {
    const GoodwinPipeline p = goodwin_pipeline(128);
    const int j = 0;
    auto fd_omega = [&](double h) {
        Vec lp = p.orbit.lambda, lm = p.orbit.lambda;
        lp[j] += h;
        lm[j] -= h;
        return (resolve_at(p.model, p.orbit, lp).omega - resolve_at(p.model, p.orbit, lm).omega) /
               (2 * h);
    };
    const double h0 = 2e-3 * p.orbit.lambda[j];
    const double d1 = std::abs(fd_omega(h0) - p.bundle.S_omega[j]);
    const double d2 = std::abs(fd_omega(h0 / 2) - p.bundle.S_omega[j]);
    const double ratio = d1 / d2;
    REQUIRE(ratio > 2.5);
    REQUIRE(ratio < 6.0);
}

TEST_CASE("first-order predictivity of S_q") {
    const GoodwinPipeline p = goodwin_pipeline(128);
    const int j = 1;
    auto defect = [&](double h) {
        Vec lp = p.orbit.lambda;
        lp[j] += h;
        const PhaseSignal q_shift = adjoint_prc(p.model, resolve_at(p.model, p.orbit, lp)).q;
        return norm_l2(q_shift - p.adjoint.q - h * p.bundle.S_q[static_cast<size_t>(j)]);
    };
    const double h = 1e-3;
    const double ratio = defect(h) / defect(h / 2);
    REQUIRE(ratio > 3.0);  // O(h^2) remainder
    REQUIRE(ratio < 5.0);
}

TEST_CASE("shooting-scheme sensitivities agree with the trapezoid route") {
    // the shooting E^p block comes from a finite difference of the fundamental
    // matrix; both discretizations must approximate the same derivative
    const GoodwinPipeline trap = goodwin_pipeline(128, Scheme::Trapezoidal);
    const GoodwinPipeline shoot = goodwin_pipeline(128, Scheme::MultipleShooting);
    for (int j : {0, 1}) {
        REQUIRE(std::abs(trap.bundle.S_omega[j] - shoot.bundle.S_omega[j]) <=
                2e-3 * std::abs(trap.bundle.S_omega[j]));
        const double rel = norm_l2(trap.bundle.S_q[static_cast<size_t>(j)] -
                                   shoot.bundle.S_q[static_cast<size_t>(j)]) /
                           norm_l2(trap.bundle.S_q[static_cast<size_t>(j)]);
        REQUIRE(rel < 5e-3);
    }
}

TEST_CASE("sensitivity solves hold tight linear residuals on the shared factorization") {
    SensitivityOptions opts;
    opts.residual_tol = 1e-10;
    const GoodwinPipeline p = goodwin_pipeline(128);
    SensitivityBundle b;
    REQUIRE_NOTHROW(orbit_sensitivity(p.model, p.orbit, {0, 1}, b, opts));
    REQUIRE_NOTHROW(prc_sensitivity(p.model, p.orbit, p.adjoint, {0, 1}, b, opts));
}

TEST_CASE("relative sensitivities") {
    SECTION("pure scaling parameter has unit relative frequency sensitivity") {
        // omega = lambda * omega_base: sigma = lambda * S / omega = 1
        REQUIRE(relative_sensitivity(3.0, 1.5, 2.0) == 1.0);
    }
    SECTION("doubling lambda doubles sigma") {
        const double s1 = relative_sensitivity(2.0, 0.7, 1.3);
        const double s2 = relative_sensitivity(2.0, 0.7, 2.6);
        REQUIRE(std::abs(s2 - 2 * s1) < 1e-15);
    }
    SECTION("degenerate inputs are rejected") {
        REQUIRE_THROWS_AS(relative_sensitivity(0.0, 1.0, 1.0), ZeroSignal);
        REQUIRE_THROWS_AS(relative_sensitivity(1.0, 1.0, 0.0), std::invalid_argument);
    }
    SECTION("signal variant scales the whole curve") {
        const Vec s = sampled(64, [](double t) { return std::cos(t); });
        const PhaseSignal out = relative_sensitivity(2.0, s, 3.0);
        REQUIRE((out - 1.5 * s).lpNorm<Eigen::Infinity>() < 1e-15);
    }
    SECTION("goodwin relative period sensitivity matches the finite-difference slope") {
        const GoodwinPipeline p = goodwin_pipeline(128);
        const int j = 0;
        const double T = p.orbit.period();
        const double ST = period_sensitivity(p.bundle.S_omega[j], p.orbit.omega);
        const double sigma = relative_sensitivity(T, ST, p.orbit.lambda[j]);
        const double h = 1e-4 * p.orbit.lambda[j];
        Vec lp = p.orbit.lambda, lm = p.orbit.lambda;
        lp[j] += h;
        lm[j] -= h;
        const double fd = (resolve_at(p.model, p.orbit, lp).period() -
                           resolve_at(p.model, p.orbit, lm).period()) /
                          (2 * h);
        REQUIRE(std::abs(sigma - (p.orbit.lambda[j] / T) * fd) <= 1e-3 * std::abs(sigma));
    }
}

TEST_CASE("period sensitivity arithmetic") {
    REQUIRE(period_sensitivity(0.0, 2.0) == 0.0);
    // omega = 2*pi, T = 1, S_omega = 2*pi -> S_T = -1
    REQUIRE(std::abs(period_sensitivity(two_pi, two_pi) + 1.0) < 1e-15);
    REQUIRE_THROWS_AS(period_sensitivity(1.0, 0.0), std::invalid_argument);
}
