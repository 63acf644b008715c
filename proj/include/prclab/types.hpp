#ifndef PRCLAB_TYPES_HPP
#define PRCLAB_TYPES_HPP

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

namespace prclab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// A 2*pi-periodic scalar signal sampled at theta_i = 2*pi*i/N, i = 0..N-1.
using PhaseSignal = Eigen::VectorXd;

constexpr double two_pi = 6.283185307179586476925286766559;

/// Wraps x to [-pi, pi).
inline double wrap_pi(double x) {
    double y = std::fmod(x + M_PI, two_pi);
    if (y < 0) y += two_pi;
    return y - M_PI;
}

/// Wraps x to [0, 2*pi).
inline double wrap_2pi(double x) {
    double y = std::fmod(x, two_pi);
    if (y < 0) y += two_pi;
    return y;
}

// ---- errors ----

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct StepSizeUnderflow : NumericalError {
    using NumericalError::NumericalError;
};
struct NonFiniteState : NumericalError {
    using NumericalError::NumericalError;
};
struct NoCycleDetected : NumericalError {
    using NumericalError::NumericalError;
};
struct NewtonFailure : NumericalError {
    using NumericalError::NumericalError;
};
struct SingularBorderedSystem : NumericalError {
    using NumericalError::NumericalError;
};
struct NotPhaseResetting : NumericalError {
    using NumericalError::NumericalError;
};
struct GridMismatch : NumericalError {
    using NumericalError::NumericalError;
};
struct ZeroSignal : NumericalError {
    using NumericalError::NumericalError;
};

// ---- circle partition ----

/// Partition 0 = theta_0 < theta_1 < ... < theta_N = 2*pi of the unit circle.
struct CirclePartition {
    Vec theta;  // N+1 entries

    int segments() const { return static_cast<int>(theta.size()) - 1; }
    double h(int i) const { return theta[i + 1] - theta[i]; }

    bool uniform(double tol = 1e-12) const {
        const int N = segments();
        const double h0 = two_pi / N;
        for (int i = 0; i <= N; ++i)
            if (std::abs(theta[i] - i * h0) > tol) return false;
        return true;
    }

    static CirclePartition make_uniform(int N) {
        CirclePartition p;
        p.theta = Vec::LinSpaced(N + 1, 0.0, two_pi);
        for (int i = 0; i <= N; ++i) p.theta[i] = two_pi * i / N;
        p.theta[N] = two_pi;
        return p;
    }

    void validate() const {
        const int N = segments();
        if (N < 2) throw std::invalid_argument("partition needs at least 2 segments");
        if (theta[0] != 0.0) throw std::invalid_argument("partition must start at 0");
        if (std::abs(theta[N] - two_pi) > 1e-14)
            throw std::invalid_argument("partition must end at 2*pi");
        for (int i = 0; i < N; ++i)
            if (theta[i + 1] <= theta[i])
                throw std::invalid_argument("partition must be strictly increasing");
    }
};

/// Sample phases of a PhaseSignal with N entries.
inline Vec uniform_grid(int N) {
    Vec th(N);
    for (int i = 0; i < N; ++i) th[i] = two_pi * i / N;
    return th;
}

}  // namespace prclab

#endif
