#include "prclab/fourier.hpp"

#include <unsupported/Eigen/FFT>

namespace prclab {

CVec dft(const Vec& x) {
    Eigen::FFT<double> fft;
    std::vector<double> in(x.data(), x.data() + x.size());
    std::vector<std::complex<double>> out;
    fft.fwd(out, in);
    return Eigen::Map<CVec>(out.data(), static_cast<Eigen::Index>(out.size()));
}

Vec idft_real(const CVec& X) {
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> in(X.data(), X.data() + X.size());
    std::vector<std::complex<double>> out;
    fft.inv(out, in);
    Vec y(X.size());
    for (Eigen::Index i = 0; i < X.size(); ++i) y[i] = out[static_cast<size_t>(i)].real();
    return y;
}

Vec spectral_derivative(const Vec& q) {
    const int N = static_cast<int>(q.size());
    CVec X = dft(q);
    CVec Y(N);
    const std::complex<double> im(0.0, 1.0);
    for (int k = 0; k < N; ++k) {
        int kk = (k <= N / 2) ? k : k - N;
        if (N % 2 == 0 && k == N / 2) kk = 0;  // Nyquist dropped
        Y[k] = im * static_cast<double>(kk) * X[k];
    }
    return idft_real(Y);
}

Vec circular_shift(const Vec& q, double sigma) {
    const int N = static_cast<int>(q.size());
    const double step = two_pi / N;
    const double j_real = sigma / step;
    const double j_round = std::round(j_real);
    if (std::abs(sigma - j_round * step) < 1e-9) {
        // exact index rotation: result[m] = q[(m + j) mod N]
        const int j = ((static_cast<long>(j_round) % N) + N) % N;
        Vec out(N);
        for (int m = 0; m < N; ++m) out[m] = q[(m + j) % N];
        return out;
    }
    CVec X = dft(q);
    CVec Y(N);
    const std::complex<double> im(0.0, 1.0);
    for (int k = 0; k < N; ++k) {
        int kk = (k <= N / 2) ? k : k - N;
        if (N % 2 == 0 && k == N / 2) {
            // Nyquist mode of a real signal: a*cos(k theta) shifts to a*cos(k theta)*cos(k sigma)
            Y[k] = X[k] * std::cos(kk * sigma);
        } else {
            Y[k] = X[k] * std::exp(im * (static_cast<double>(kk) * sigma));
        }
    }
    return idft_real(Y);
}

TrigInterp::TrigInterp(const Vec& samples) {
    n_ = static_cast<int>(samples.size());
    CVec X = dft(samples);
    const int K = n_ / 2;
    a_ = Vec::Zero(K + 1);
    b_ = Vec::Zero(K + 1);
    a_[0] = X[0].real() / n_;
    for (int k = 1; k <= K; ++k) {
        if (2 * k == n_) {  // Nyquist: half weight, cosine only
            a_[k] = X[k].real() / n_;
            b_[k] = 0.0;
        } else {
            a_[k] = 2.0 * X[k].real() / n_;
            b_[k] = -2.0 * X[k].imag() / n_;
        }
    }
}

double TrigInterp::eval(double theta, int order) const {
    const int K = static_cast<int>(a_.size()) - 1;
    double s = (order == 0) ? a_[0] : 0.0;
    for (int k = 1; k <= K; ++k) {
        const double c = std::cos(k * theta), sn = std::sin(k * theta);
        switch (order) {
            case 0: s += a_[k] * c + b_[k] * sn; break;
            case 1: s += k * (-a_[k] * sn + b_[k] * c); break;
            default: s += -static_cast<double>(k) * k * (a_[k] * c + b_[k] * sn); break;
        }
    }
    return s;
}

CurveInterp::CurveInterp(const Mat& nodes) {
    const int n = static_cast<int>(nodes.rows());
    const int N = static_cast<int>(nodes.cols()) - 1;  // last column repeats the first
    comp_.reserve(n);
    for (int i = 0; i < n; ++i) comp_.emplace_back(Vec(nodes.row(i).head(N).transpose()));
}

Vec CurveInterp::eval(double theta) const {
    Vec out(dim());
    for (int i = 0; i < dim(); ++i) out[i] = comp_[i](theta);
    return out;
}

Vec CurveInterp::derivative(double theta) const {
    Vec out(dim());
    for (int i = 0; i < dim(); ++i) out[i] = comp_[i].derivative(theta);
    return out;
}

Vec CurveInterp::second_derivative(double theta) const {
    Vec out(dim());
    for (int i = 0; i < dim(); ++i) out[i] = comp_[i].second_derivative(theta);
    return out;
}

}  // namespace prclab
