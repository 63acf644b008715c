#ifndef PRCLAB_METRICS_HPP
#define PRCLAB_METRICS_HPP

#include "prclab/fourier.hpp"

namespace prclab {

/// The four signal spaces: A the plain Hilbert space, B scale-quotient,
/// C shift-quotient, D both.
enum class PrcSpace { A, B, C, D };

PrcSpace parse_space(const std::string& tag);
const char* space_name(PrcSpace s);

/// L2 inner product on the circle, (2*pi/N) * sum_i xi_i zeta_i; exact for
/// band-limited products on the uniform grid.
double inner(const PhaseSignal& xi, const PhaseSignal& zeta);

/// Induced L2 norm.
double norm_l2(const PhaseSignal& xi);

/// Spectral phase-derivative q'.
PhaseSignal derivative(const PhaseSignal& q);

struct ShiftResult {
    double sigma = 0.0;       // optimal shift in [0, 2*pi)
    double peak = 0.0;        // cross-correlation at sigma
    Vec correlation;          // c(sigma_j) on the grid
    bool flat = false;        // constant correlation (degenerate signals)
    bool multiple_peaks = false;  // grid maxima tied within 1e-9
};

/// argmax_sigma <q1(.), q2(.+sigma)>, cross-correlation in the Fourier
/// domain, grid argmax refined by a quadratic vertex and polished by Newton
/// on the trigonometric correlation series.
ShiftResult optimal_shift(const PhaseSignal& q1, const PhaseSignal& q2);

/// Geodesic distance of the chosen space. B/D use the chord form of the
/// arccos distance on normalized representatives; C/D align with the refined
/// optimal shift first.
double distance(PrcSpace space, const PhaseSignal& q1, const PhaseSignal& q2);

/// Removes the vertical component(s) of eta at the representative q_bar.
/// In D with q_bar' = 0 the shift quotient collapses; the projection falls
/// back to the B behavior and sets *collapsed_to_b when given.
PhaseSignal horizontal_project(PrcSpace space, const PhaseSignal& q_bar, const PhaseSignal& eta,
                               bool* collapsed_to_b = nullptr);

/// Tangent-space norm at q_bar of an (already horizontal) vector xi.
double norm_in_space(PrcSpace space, const PhaseSignal& q_bar, const PhaseSignal& xi);

/// Point norm of the characteristic itself in its space (||q||_2 in A/C, 1 in
/// B/D); feeds the relative-sensitivity scaling.
double characteristic_norm(PrcSpace space, const PhaseSignal& q_bar);

}  // namespace prclab

#endif
