#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "prclab/fourier.hpp"

using namespace prclab;
using test::sampled;

TEST_CASE("dft/idft round trip") {
    std::mt19937_64 rng(11);
    const Vec q = test::random_smooth(rng, 64);
    const Vec back = idft_real(dft(q));
    REQUIRE((q - back).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("spectral derivative of band-limited signals is exact") {
    const int N = 256;
    const Vec s = sampled(N, [](double t) { return std::sin(t); });
    const Vec c = sampled(N, [](double t) { return std::cos(t); });
    REQUIRE((spectral_derivative(s) - c).lpNorm<Eigen::Infinity>() < 1e-10);

    const Vec konst = Vec::Constant(N, 3.7);
    REQUIRE(spectral_derivative(konst).lpNorm<Eigen::Infinity>() < 1e-12);

    const Vec q = sampled(N, [](double t) { return 1.0 - std::cos(t); });
    REQUIRE((spectral_derivative(q) - s).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("circular shift") {
    std::mt19937_64 rng(7);
    const int N = 256;
    const Vec q = test::random_smooth(rng, N);

    SECTION("grid shifts rotate indices exactly") {
        const double sig = two_pi * 17 / N;
        const Vec s = circular_shift(q, sig);
        for (int m = 0; m < N; ++m) REQUIRE(s[m] == q[(m + 17) % N]);
    }
    SECTION("off-grid shift matches the trigonometric interpolant at shifted phases") {
        const double sig = 0.3;
        const Vec s = circular_shift(q, sig);
        const TrigInterp interp(q);
        for (int m = 0; m < N; m += 13)
            REQUIRE(std::abs(s[m] - interp(two_pi * m / N + sig)) < 1e-11);
    }
}

TEST_CASE("trig interpolation reproduces nodes and derivatives") {
    const int N = 128;
    const Vec q = sampled(N, [](double t) { return 2.0 + std::sin(3 * t) - 0.5 * std::cos(5 * t); });
    const TrigInterp f(q);
    for (int i = 0; i < N; i += 7) REQUIRE(std::abs(f(two_pi * i / N) - q[i]) < 1e-12);
    for (double th : {0.17, 1.93, 4.4}) {
        REQUIRE(std::abs(f(th) - (2.0 + std::sin(3 * th) - 0.5 * std::cos(5 * th))) < 1e-11);
        REQUIRE(std::abs(f.derivative(th) - (3 * std::cos(3 * th) + 2.5 * std::sin(5 * th))) < 1e-10);
        REQUIRE(std::abs(f.second_derivative(th) - (-9 * std::sin(3 * th) + 12.5 * std::cos(5 * th))) <
                1e-9);
    }
}

TEST_CASE("curve interpolation on a closed discrete circle") {
    const int N = 64;
    Mat x(2, N + 1);
    for (int i = 0; i <= N; ++i) {
        x(0, i) = std::cos(two_pi * i / N);
        x(1, i) = std::sin(two_pi * i / N);
    }
    const CurveInterp c(x);
    const Vec p = c.eval(1.234);
    REQUIRE(std::abs(p[0] - std::cos(1.234)) < 1e-12);
    REQUIRE(std::abs(p[1] - std::sin(1.234)) < 1e-12);
    const Vec d = c.derivative(1.234);
    REQUIRE(std::abs(d[0] + std::sin(1.234)) < 1e-11);
}
