#pragma once

#include <functional>

#include <Eigen/Dense>

#include "nonprob/propensity.hpp"
#include "nonprob/types.hpp"

namespace nonprob {

/// Solve H x = rhs for symmetric positive-definite H.
///
/// A failed Cholesky factorization is retried once with 1e-10 trace(H)/p
/// added to the diagonal before giving up.
Vector solve_spd(const Matrix& h, const Vector& rhs, int iteration = -1);

struct ConcaveObjective {
    std::function<double(const Vector&)> value;
    std::function<Vector(const Vector&)> gradient;
    // Negative Hessian (positive semi-definite).
    std::function<Matrix(const Vector&)> information;
};

struct NewtonResult {
    Vector x;
    int iterations = 0;
    double gradient_norm = 0.0;
};

/// Damped Newton ascent on a concave objective.
///
/// Convergence is declared when |gradient|_inf <= tolerance * scale.
NewtonResult maximize_concave(const ConcaveObjective& f, Vector start, const NewtonOptions& opts, double scale,
                              const char* what);

}  // namespace nonprob
