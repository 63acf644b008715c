#include "prclab/metrics.hpp"

namespace prclab {

PrcSpace parse_space(const std::string& tag) {
    if (tag == "A" || tag == "a") return PrcSpace::A;
    if (tag == "B" || tag == "b") return PrcSpace::B;
    if (tag == "C" || tag == "c") return PrcSpace::C;
    if (tag == "D" || tag == "d") return PrcSpace::D;
    throw std::invalid_argument("unknown PRC space '" + tag + "'");
}

const char* space_name(PrcSpace s) {
    switch (s) {
        case PrcSpace::A: return "A";
        case PrcSpace::B: return "B";
        case PrcSpace::C: return "C";
        default: return "D";
    }
}

double inner(const PhaseSignal& xi, const PhaseSignal& zeta) {
    if (xi.size() != zeta.size()) throw GridMismatch("inner: signals on different grids");
    long double s = 0;
    for (Eigen::Index i = 0; i < xi.size(); ++i)
        s += static_cast<long double>(xi[i]) * static_cast<long double>(zeta[i]);
    return static_cast<double>(s * two_pi / static_cast<long double>(xi.size()));
}

double norm_l2(const PhaseSignal& xi) { return std::sqrt(inner(xi, xi)); }

PhaseSignal derivative(const PhaseSignal& q) { return spectral_derivative(q); }

ShiftResult optimal_shift(const PhaseSignal& q1, const PhaseSignal& q2) {
    if (q1.size() != q2.size()) throw GridMismatch("optimal_shift: signals on different grids");
    const int N = static_cast<int>(q1.size());
    ShiftResult res;

    const CVec Q1 = dft(q1), Q2 = dft(q2);
    CVec C(N);
    for (int k = 0; k < N; ++k) C[k] = std::conj(Q1[k]) * Q2[k];
    res.correlation = idft_real(C) * (two_pi / N);

    // grid argmax; ties within 1e-9 pick the smallest shift and are flagged
    int imax = 0;
    for (int i = 1; i < N; ++i)
        if (res.correlation[i] > res.correlation[imax]) imax = i;
    const double cmax = res.correlation[imax];
    double cmin = cmax;
    for (int i = 0; i < N; ++i) {
        cmin = std::min(cmin, res.correlation[i]);
        if (i != imax && std::abs(res.correlation[i] - cmax) <= 1e-9 &&
            std::min(std::abs(i - imax), N - std::abs(i - imax)) > 1)
            res.multiple_peaks = true;
    }
    if (res.multiple_peaks) {
        for (int i = 0; i < N; ++i)
            if (std::abs(res.correlation[i] - cmax) <= 1e-9) { imax = i; break; }
    }
    if (cmax - cmin <= 1e-14 * std::max(1.0, std::abs(cmax))) {
        res.flat = true;
        res.sigma = 0.0;
        res.peak = res.correlation[0];
        return res;
    }

    // continuous correlation c(sigma) = (2*pi/N^2) Re sum_k conj(Q1)Q2 e^{i k sigma}
    const double scale = two_pi / (static_cast<double>(N) * N);
    auto corr = [&](double sigma, int order) {
        double s = 0;
        for (int k = 0; k < N; ++k) {
            int kk = (k <= N / 2) ? k : k - N;
            if (N % 2 == 0 && k == N / 2) kk = 0;  // Nyquist mode carries no shift information
            const std::complex<double> term =
                C[k] * std::exp(std::complex<double>(0.0, kk * sigma));
            switch (order) {
                case 0: s += term.real(); break;
                case 1: s += -kk * term.imag(); break;
                default: s += -static_cast<double>(kk) * kk * term.real(); break;
            }
        }
        return scale * s;
    };

    // quadratic vertex through the peak and neighbors as the seed
    const double dsig = two_pi / N;
    const double cm = res.correlation[(imax - 1 + N) % N];
    const double cp = res.correlation[(imax + 1) % N];
    double denom = cm - 2 * cmax + cp;
    double seed = imax * dsig;
    if (denom < 0) seed += 0.5 * (cm - cp) / denom * dsig;

    // Newton polish on c'(sigma) = 0
    double sig = seed;
    for (int it = 0; it < 12; ++it) {
        const double g = corr(sig, 1), gg = corr(sig, 2);
        if (gg >= 0) break;
        const double step = g / gg;
        sig -= step;
        if (std::abs(step) < 1e-15) break;
    }
    // keep the polished value only if it stayed near the grid peak and improved
    if (std::abs(wrap_pi(sig - imax * dsig)) > dsig ||
        corr(sig, 0) < cmax - 1e-12 * std::max(1.0, std::abs(cmax)))
        sig = seed;
    res.sigma = wrap_2pi(sig);
    res.peak = corr(res.sigma, 0);
    return res;
}

PhaseSignal horizontal_project(PrcSpace space, const PhaseSignal& q_bar, const PhaseSignal& eta,
                               bool* collapsed_to_b) {
    if (collapsed_to_b) *collapsed_to_b = false;
    if (space == PrcSpace::A) return eta;
    if (q_bar.size() != eta.size()) throw GridMismatch("horizontal_project: grid mismatch");
    const double nq2 = inner(q_bar, q_bar);

    if (space == PrcSpace::B) {
        if (nq2 == 0) throw ZeroSignal("horizontal_project: zero representative in space B");
        return eta - (inner(eta, q_bar) / nq2) * q_bar;
    }

    const PhaseSignal qp = derivative(q_bar);
    const double nqp2 = inner(qp, qp);

    if (space == PrcSpace::C) {
        if (nqp2 == 0) throw ZeroSignal("horizontal_project: constant representative in space C");
        return eta - (inner(eta, qp) / nqp2) * qp;
    }

    // space D; <q, q'> = 0 identically, so the two subtractions commute
    if (nq2 == 0) throw ZeroSignal("horizontal_project: zero representative in space D");
    if (nqp2 <= 1e-28 * nq2) {
        // constant PRC: the shift quotient collapses, fall back to B
        if (collapsed_to_b) *collapsed_to_b = true;
        return eta - (inner(eta, q_bar) / nq2) * q_bar;
    }
    return eta - (inner(eta, q_bar) / nq2) * q_bar - (inner(eta, qp) / nqp2) * qp;
}

namespace {

/// arccos distance between unit rays via the chord: stable where the arccos
/// of a near-unit correlation loses everything to roundoff.
double ray_angle(const PhaseSignal& u, const PhaseSignal& v) {
    const double chord = norm_l2(u - v) / 2.0;
    return 2.0 * std::asin(std::min(1.0, chord));
}

}  // namespace

double distance(PrcSpace space, const PhaseSignal& q1, const PhaseSignal& q2) {
    if (q1.size() != q2.size()) throw GridMismatch("distance: signals on different grids");
    switch (space) {
        case PrcSpace::A:
            return norm_l2(q1 - q2);
        case PrcSpace::B: {
            const double n1 = norm_l2(q1), n2 = norm_l2(q2);
            if (n1 == 0 || n2 == 0) throw ZeroSignal("distance: zero signal in space B");
            return ray_angle(q1 / n1, q2 / n2);
        }
        case PrcSpace::C: {
            const ShiftResult s = optimal_shift(q1, q2);
            return norm_l2(q1 - circular_shift(q2, s.sigma));
        }
        default: {
            const double n1 = norm_l2(q1), n2 = norm_l2(q2);
            if (n1 == 0 || n2 == 0) throw ZeroSignal("distance: zero signal in space D");
            const ShiftResult s = optimal_shift(q1, q2);
            return ray_angle(q1 / n1, circular_shift(q2, s.sigma) / n2);
        }
    }
}

double norm_in_space(PrcSpace space, const PhaseSignal& q_bar, const PhaseSignal& xi) {
    switch (space) {
        case PrcSpace::A:
        case PrcSpace::C:
            return norm_l2(xi);
        default: {
            const double nq = norm_l2(q_bar);
            if (nq == 0) throw ZeroSignal("norm_in_space: zero representative");
            return norm_l2(xi) / nq;
        }
    }
}

double characteristic_norm(PrcSpace space, const PhaseSignal& q_bar) {
    return norm_in_space(space, q_bar, q_bar);
}

}  // namespace prclab
