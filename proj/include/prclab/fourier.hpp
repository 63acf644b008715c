#ifndef PRCLAB_FOURIER_HPP
#define PRCLAB_FOURIER_HPP

#include <complex>
#include <vector>

#include "prclab/types.hpp"

namespace prclab {

using CVec = Eigen::VectorXcd;

/// Forward DFT of a real signal, full spectrum: X[k] = sum_m x[m] e^{-2*pi*i*k*m/N}.
CVec dft(const Vec& x);

/// Inverse DFT (1/N convention); imaginary part discarded.
Vec idft_real(const CVec& X);

/// Spectral derivative d/dtheta of a uniformly sampled 2*pi-periodic signal.
/// The Nyquist mode of even-length signals is dropped (its derivative is not
/// representable as a real signal on the same grid).
Vec spectral_derivative(const Vec& q);

/// q(. - sigma) ... evaluates the trigonometric interpolant of q shifted so that
/// result[m] = q(theta_m + sigma). Shifts within 1e-9/N of a grid multiple are
/// applied by exact index rotation.
Vec circular_shift(const Vec& q, double sigma);

/// Trigonometric interpolant of a uniformly sampled periodic signal and its
/// phase-derivatives, evaluated at arbitrary theta.
class TrigInterp {
public:
    TrigInterp() = default;
    explicit TrigInterp(const Vec& samples);

    double operator()(double theta) const { return eval(theta, 0); }
    double derivative(double theta) const { return eval(theta, 1); }
    double second_derivative(double theta) const { return eval(theta, 2); }
    int size() const { return n_; }

private:
    double eval(double theta, int order) const;
    int n_ = 0;
    // cosine/sine coefficients: q(t) = a0 + sum_k (a_k cos(k t) + b_k sin(k t))
    Vec a_, b_;
};

/// Componentwise trigonometric interpolant of a closed discrete curve given as
/// an n x (N+1) matrix of nodes on the uniform grid (last column equals first).
class CurveInterp {
public:
    CurveInterp() = default;
    explicit CurveInterp(const Mat& nodes);

    Vec eval(double theta) const;
    Vec derivative(double theta) const;
    Vec second_derivative(double theta) const;
    int dim() const { return static_cast<int>(comp_.size()); }
    int grid_size() const { return comp_.empty() ? 0 : comp_[0].size(); }

private:
    std::vector<TrigInterp> comp_;
};

}  // namespace prclab

#endif
