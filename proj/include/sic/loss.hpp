#pragma once

#include "sic/linalg.hpp"

namespace sic {

/// Quadratic subproblem f(x) = x^H M x + b^H x + x^H b (+ c).
///
/// M is the mixed Hessian (D_z e)^H D_z e and b the Wirtinger gradient
/// (D_z e)^H e of the block MSE. `c_const` = e^H e is kept for diagnostics
/// only; it does not change the minimizer.
struct QuadraticModel {
    HermitianMatrix M;
    ComplexVector b;
    double c_const = 0.0;
};

/// e^H e.
double mse(ComplexSpan e);

/// 10 log10(e^H e / d^H d). Negative means the residual is below the reference.
double nmse_db(ComplexSpan d, ComplexSpan e);

/// Builds the quadratic from the model Jacobian D_z y (N x K) and the
/// residual e = d - y. Uses D_z e = -D_z y.
QuadraticModel build_quadratic(const ComplexMatrix& jac_y, ComplexSpan e);

/// Gradient only, b = -(D_z y)^H e, without forming M.
ComplexVector wirtinger_gradient(const ComplexMatrix& jac_y, ComplexSpan e);

double grad_norm(const QuadraticModel& q);

/// f(x) without the constant term.
double quadratic_value(const QuadraticModel& q, ComplexSpan x);

}  // namespace sic
