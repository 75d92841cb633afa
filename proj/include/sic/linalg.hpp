#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace sic {

using cplx = std::complex<double>;
using ComplexVector = std::vector<cplx>;
using ComplexSpan = std::span<const cplx>;

/// Dense row-major complex matrix. Used for block Jacobians (N x K).
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    cplx& operator()(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return a_[r * cols_ + c]; }

    std::span<cplx> row(std::size_t r) { return {a_.data() + r * cols_, cols_}; }
    std::span<const cplx> row(std::size_t r) const { return {a_.data() + r * cols_, cols_}; }

    std::span<const cplx> data() const { return a_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> a_;
};

/// Square Hermitian matrix, stored densely (row-major).
///
/// Construction from arbitrary dense data symmetrizes, A <- (A + A^H)/2, and
/// zeroes the imaginary part of the diagonal, so every instance satisfies
/// A(i,j) == conj(A(j,i)) exactly.
class HermitianMatrix {
public:
    HermitianMatrix() = default;
    explicit HermitianMatrix(std::size_t dim) : dim_(dim), a_(dim * dim) {}

    static HermitianMatrix identity(std::size_t dim);
    static HermitianMatrix diagonal(std::span<const double> diag);
    static HermitianMatrix from_dense(std::size_t dim, std::span<const cplx> row_major);

    std::size_t dim() const { return dim_; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return a_[r * dim_ + c]; }
    std::span<const cplx> data() const { return a_; }
    double max_abs() const;

    /// A*s + B*t elementwise; the result stays Hermitian for real weights.
    friend HermitianMatrix blend(double s, const HermitianMatrix& a, double t, const HermitianMatrix& b);
    /// A + shift*I.
    friend HermitianMatrix shifted(const HermitianMatrix& a, double shift);
    friend HermitianMatrix gram(const ComplexMatrix& j);

private:
    std::size_t dim_ = 0;
    std::vector<cplx> a_;
};

HermitianMatrix blend(double s, const HermitianMatrix& a, double t, const HermitianMatrix& b);
HermitianMatrix shifted(const HermitianMatrix& a, double shift);

/// J^H J for an N x K matrix J.
HermitianMatrix gram(const ComplexMatrix& j);

ComplexVector matvec(const HermitianMatrix& a, ComplexSpan v);

/// J v for an N x K matrix.
ComplexVector matvec(const ComplexMatrix& j, ComplexSpan v);

/// J^H v for an N x K matrix and length-N v.
ComplexVector adjoint_matvec(const ComplexMatrix& j, ComplexSpan v);

/// Hermitian inner product sum_i conj(x_i) y_i.
cplx dot_h(ComplexSpan x, ComplexSpan y);

double norm2(ComplexSpan x);
bool all_finite(ComplexSpan x);

/// Eigenpairs of a Hermitian matrix. Eigenvalues ascending; eigenvectors
/// stored column-major in `vectors` (column k is the k-th eigenvector).
struct HermitianEigen {
    std::vector<double> values;
    std::vector<cplx> vectors;
    std::size_t dim = 0;

    cplx vector(std::size_t row, std::size_t k) const { return vectors[k * dim + row]; }
};

HermitianEigen eigh(const HermitianMatrix& a);

/// Solves A x = b through the eigendecomposition A = U diag(l) U^H.
/// Throws SingularMatrixError when min(l) <= 0 or max(l)/min(l) > 1e14.
ComplexVector hermitian_solve(const HermitianMatrix& a, ComplexSpan b);

}  // namespace sic
