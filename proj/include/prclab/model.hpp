#ifndef PRCLAB_MODEL_HPP
#define PRCLAB_MODEL_HPP

#include <functional>
#include <string>
#include <vector>

#include "prclab/types.hpp"

namespace prclab {

/// An oscillator state-space model dx/dt = f(x,u,lambda), y = h(x,lambda) with
/// the derivative blocks needed by the orbit, adjoint and sensitivity solvers.
///
/// Second derivatives are supplied in contracted form: d2fdxdx_dot(x,u,lam,w)
/// returns the n x n matrix with entries sum_k d2f_i/(dx_j dx_k) w_k, and
/// d2fdxdlam(x,u,lam,j) the n x n matrix d2f_i/(dx_k dlam_j). Only these
/// contractions enter the sensitivity right-hand sides.
///
/// All callbacks must be re-entrant; a ModelDef is immutable after construction.
struct ModelDef {
    int n = 0;  // state dimension
    int l = 0;  // parameter dimension
    std::vector<std::string> param_names;

    std::function<Vec(const Vec&, double, const Vec&)> f;
    std::function<double(const Vec&, const Vec&)> h;
    std::function<Mat(const Vec&, double, const Vec&)> dfdx;    // n x n
    std::function<Vec(const Vec&, double, const Vec&)> dfdu;    // n
    std::function<Mat(const Vec&, double, const Vec&)> dfdlam;  // n x l

    std::function<Mat(const Vec&, double, const Vec&, const Vec&)> d2fdxdx_dot;  // n x n
    std::function<Mat(const Vec&, double, const Vec&)> d2fdxdu;                  // n x n
    std::function<Mat(const Vec&, double, const Vec&)> d2fdlamdu;                // n x l
    std::function<Mat(const Vec&, double, const Vec&, int)> d2fdxdlam;           // n x n
};

/// Replaces every derivative callback by central finite differences of f.
/// First derivatives use step*max(1,|coordinate|); mixed second derivatives use
/// a sqrt(step)-scaled four-point stencil on f directly, so the construction
/// depends on f alone and applying it twice reproduces the same values.
ModelDef finite_difference_derivatives(const ModelDef& model, double step);

}  // namespace prclab

#endif
