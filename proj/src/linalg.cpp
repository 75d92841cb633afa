#include "sic/linalg.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sic/errors.hpp"

namespace sic {

namespace {

void require_same_length(std::size_t a, std::size_t b, const char* op) {
    if (a != b) {
        std::ostringstream os;
        os << op << ": dimension mismatch (" << a << " vs " << b << ")";
        throw UsageError(os.str());
    }
}

constexpr double kMaxCondition = 1e14;

}  // namespace

HermitianMatrix HermitianMatrix::identity(std::size_t dim) {
    HermitianMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m.a_[i * dim + i] = 1.0;
    return m;
}

HermitianMatrix HermitianMatrix::diagonal(std::span<const double> diag) {
    HermitianMatrix m(diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m.a_[i * m.dim_ + i] = diag[i];
    return m;
}

HermitianMatrix HermitianMatrix::from_dense(std::size_t dim, std::span<const cplx> row_major) {
    require_same_length(row_major.size(), dim * dim, "HermitianMatrix::from_dense");
    HermitianMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        m.a_[i * dim + i] = row_major[i * dim + i].real();
        for (std::size_t j = i + 1; j < dim; ++j) {
            const cplx v = 0.5 * (row_major[i * dim + j] + std::conj(row_major[j * dim + i]));
            m.a_[i * dim + j] = v;
            m.a_[j * dim + i] = std::conj(v);
        }
    }
    return m;
}

double HermitianMatrix::max_abs() const {
    double m = 0.0;
    for (const auto& v : a_) m = std::max(m, std::abs(v));
    return m;
}

HermitianMatrix blend(double s, const HermitianMatrix& a, double t, const HermitianMatrix& b) {
    require_same_length(a.dim_, b.dim_, "blend");
    HermitianMatrix out(a.dim_);
    for (std::size_t i = 0; i < a.a_.size(); ++i) out.a_[i] = s * a.a_[i] + t * b.a_[i];
    return out;
}

HermitianMatrix shifted(const HermitianMatrix& a, double shift) {
    HermitianMatrix out = a;
    for (std::size_t i = 0; i < a.dim_; ++i) out.a_[i * a.dim_ + i] += shift;
    return out;
}

HermitianMatrix gram(const ComplexMatrix& j) {
    const std::size_t k = j.cols();
    HermitianMatrix out(k);
    // Upper triangle accumulated row by row, then mirrored.
    for (std::size_t n = 0; n < j.rows(); ++n) {
        const auto row = j.row(n);
        for (std::size_t a = 0; a < k; ++a) {
            const cplx ca = std::conj(row[a]);
            if (ca == cplx{}) continue;
            cplx* dst = out.a_.data() + a * k;
            for (std::size_t b = a; b < k; ++b) dst[b] += ca * row[b];
        }
    }
    for (std::size_t a = 0; a < k; ++a) {
        out.a_[a * k + a] = out.a_[a * k + a].real();
        for (std::size_t b = a + 1; b < k; ++b) out.a_[b * k + a] = std::conj(out.a_[a * k + b]);
    }
    return out;
}

ComplexVector matvec(const HermitianMatrix& a, ComplexSpan v) {
    require_same_length(a.dim(), v.size(), "matvec");
    const std::size_t n = a.dim();
    ComplexVector out(n);
    const cplx* p = a.data().data();
    for (std::size_t i = 0; i < n; ++i) {
        cplx acc{};
        for (std::size_t j = 0; j < n; ++j) acc += p[i * n + j] * v[j];
        out[i] = acc;
    }
    return out;
}

ComplexVector matvec(const ComplexMatrix& j, ComplexSpan v) {
    require_same_length(j.cols(), v.size(), "matvec");
    ComplexVector out(j.rows());
    for (std::size_t r = 0; r < j.rows(); ++r) {
        const auto row = j.row(r);
        cplx acc{};
        for (std::size_t c = 0; c < row.size(); ++c) acc += row[c] * v[c];
        out[r] = acc;
    }
    return out;
}

ComplexVector adjoint_matvec(const ComplexMatrix& j, ComplexSpan v) {
    require_same_length(j.rows(), v.size(), "adjoint_matvec");
    ComplexVector out(j.cols());
    for (std::size_t r = 0; r < j.rows(); ++r) {
        const auto row = j.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) out[c] += std::conj(row[c]) * v[r];
    }
    return out;
}

cplx dot_h(ComplexSpan x, ComplexSpan y) {
    require_same_length(x.size(), y.size(), "dot_h");
    cplx acc{};
    for (std::size_t i = 0; i < x.size(); ++i) acc += std::conj(x[i]) * y[i];
    return acc;
}

double norm2(ComplexSpan x) {
    double acc = 0.0;
    for (const auto& v : x) acc += std::norm(v);
    return std::sqrt(acc);
}

bool all_finite(ComplexSpan x) {
    return std::all_of(x.begin(), x.end(),
                       [](const cplx& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

HermitianEigen eigh(const HermitianMatrix& a) {
    const auto n = static_cast<Eigen::Index>(a.dim());
    // Row-major Hermitian storage read as column-major gives A^T = conj(A);
    // conjugating back recovers A.
    Eigen::Map<const Eigen::MatrixXcd> view(a.data().data(), n, n);
    Eigen::MatrixXcd dense = view.conjugate();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(dense);
    if (solver.info() != Eigen::Success) throw SingularMatrixError("eigh: eigendecomposition did not converge", 0.0);

    HermitianEigen out;
    out.dim = a.dim();
    out.values.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
    out.vectors.assign(solver.eigenvectors().data(), solver.eigenvectors().data() + n * n);
    return out;
}

ComplexVector hermitian_solve(const HermitianMatrix& a, ComplexSpan b) {
    require_same_length(a.dim(), b.size(), "hermitian_solve");
    const HermitianEigen e = eigh(a);
    const std::size_t n = e.dim;
    const double lo = e.values.front();
    const double hi = e.values.back();
    if (!(lo > 0.0)) {
        std::ostringstream os;
        os << "hermitian_solve: non-positive eigenvalue " << lo;
        throw SingularMatrixError(os.str(), lo);
    }
    if (hi / lo > kMaxCondition) {
        std::ostringstream os;
        os << "hermitian_solve: condition number " << hi / lo << " exceeds limit (smallest eigenvalue " << lo << ")";
        throw SingularMatrixError(os.str(), lo);
    }

    // x = U diag(1/l) U^H b
    ComplexVector coeff(n);
    for (std::size_t k = 0; k < n; ++k) {
        cplx acc{};
        for (std::size_t i = 0; i < n; ++i) acc += std::conj(e.vector(i, k)) * b[i];
        coeff[k] = acc / e.values[k];
    }
    ComplexVector x(n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i) x[i] += e.vector(i, k) * coeff[k];
    return x;
}

}  // namespace sic
