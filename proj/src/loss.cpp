#include "sic/loss.hpp"

#include <cmath>

#include "sic/errors.hpp"

namespace sic {

double mse(ComplexSpan e) {
    double acc = 0.0;
    for (const auto& v : e) acc += std::norm(v);
    return acc;
}

double nmse_db(ComplexSpan d, ComplexSpan e) {
    if (d.size() != e.size()) throw UsageError("nmse_db: length mismatch");
    const double ref = mse(d);
    if (!(ref > 0.0)) throw UsageError("nmse_db: reference signal has zero energy");
    return 10.0 * std::log10(mse(e) / ref);
}

ComplexVector wirtinger_gradient(const ComplexMatrix& jac_y, ComplexSpan e) {
    ComplexVector b = adjoint_matvec(jac_y, e);
    for (auto& v : b) v = -v;
    return b;
}

QuadraticModel build_quadratic(const ComplexMatrix& jac_y, ComplexSpan e) {
    if (jac_y.rows() != e.size()) throw UsageError("build_quadratic: Jacobian rows must equal residual length");
    return QuadraticModel{gram(jac_y), wirtinger_gradient(jac_y, e), mse(e)};
}

double grad_norm(const QuadraticModel& q) { return norm2(q.b); }

double quadratic_value(const QuadraticModel& q, ComplexSpan x) {
    const ComplexVector mx = matvec(q.M, x);
    return dot_h(x, mx).real() + 2.0 * dot_h(q.b, x).real();
}

}  // namespace sic
