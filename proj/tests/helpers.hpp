#ifndef PRCLAB_TEST_HELPERS_HPP
#define PRCLAB_TEST_HELPERS_HPP

#include <random>

#include "prclab/types.hpp"

namespace test {

using prclab::Vec;
using prclab::two_pi;

/// Band-limited random signal: harmonics up to K with decaying amplitudes.
inline Vec random_smooth(std::mt19937_64& rng, int N, int K = 8, double decay = 0.4) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec a(K + 1), b(K + 1);
    for (int k = 0; k <= K; ++k) {
        const double s = std::exp(-decay * k);
        a[k] = s * gauss(rng);
        b[k] = s * gauss(rng);
    }
    Vec q(N);
    for (int i = 0; i < N; ++i) {
        const double th = two_pi * i / N;
        double v = a[0];
        for (int k = 1; k <= K; ++k) v += a[k] * std::cos(k * th) + b[k] * std::sin(k * th);
        q[i] = v;
    }
    return q;
}

/// O(N^2) circular cross-correlation, the reference for the DFT route.
inline Vec brute_force_correlation(const Vec& q1, const Vec& q2) {
    const int N = static_cast<int>(q1.size());
    Vec c(N);
    for (int j = 0; j < N; ++j) {
        long double s = 0;
        for (int m = 0; m < N; ++m) s += (long double)q1[m] * (long double)q2[(m + j) % N];
        c[j] = static_cast<double>(s * two_pi / N);
    }
    return c;
}

inline Vec sampled(int N, const std::function<double(double)>& f) {
    Vec q(N);
    for (int i = 0; i < N; ++i) q[i] = f(two_pi * i / N);
    return q;
}

}  // namespace test

#endif
