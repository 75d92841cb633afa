#pragma once

// Shared fixtures and independent reference implementations for the unit
// tests. Nothing here calls into the library's numerical routines.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "sic/linalg.hpp"

namespace sic::test {

inline ComplexVector random_vector(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    ComplexVector v(n);
    for (auto& x : v) x = {g(rng), g(rng)};
    return v;
}

inline ComplexMatrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    ComplexMatrix a(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) a(r, c) = {g(rng), g(rng)};
    return a;
}

/// B^H B / k + shift I for a random k x dim B: Hermitian positive definite.
// B^H B / rows + shift I with B of size rows x dim (default dim + 4).
inline HermitianMatrix random_hpd(std::size_t dim, std::mt19937_64& rng, double shift = 1e-4, std::size_t rows = 0) {
    const std::size_t k = rows ? rows : dim + 4;
    const ComplexMatrix b = random_matrix(k, dim, rng);
    std::vector<cplx> a(dim * dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) {
            cplx s{};
            for (std::size_t r = 0; r < k; ++r) s += std::conj(b(r, i)) * b(r, j);
            a[i * dim + j] = s / static_cast<double>(k) + (i == j ? shift : 0.0);
        }
    return HermitianMatrix::from_dense(dim, a);
}

/// Gaussian elimination with partial pivoting on a dense copy.
inline ComplexVector gauss_solve(const HermitianMatrix& m, const ComplexVector& rhs) {
    const std::size_t n = m.dim();
    std::vector<cplx> a(m.data().begin(), m.data().end());
    ComplexVector b = rhs;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
        if (std::abs(a[piv * n + c]) == 0.0) throw std::runtime_error("singular");
        if (piv != c) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a[c * n + j], a[piv * n + j]);
            std::swap(b[c], b[piv]);
        }
        for (std::size_t r = c + 1; r < n; ++r) {
            const cplx f = a[r * n + c] / a[c * n + c];
            for (std::size_t j = c; j < n; ++j) a[r * n + j] -= f * a[c * n + j];
            b[r] -= f * b[c];
        }
    }
    ComplexVector x(n);
    for (std::size_t i = n; i-- > 0;) {
        cplx s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a[i * n + j] * x[j];
        x[i] = s / a[i * n + i];
    }
    return x;
}

inline ComplexVector naive_matvec(const HermitianMatrix& m, const ComplexVector& v) {
    const std::size_t n = m.dim();
    ComplexVector out(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out[i] += m(i, j) * v[j];
    return out;
}

inline double rel_err(const ComplexVector& a, const ComplexVector& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::norm(a[i] - b[i]);
        den += std::norm(b[i]);
    }
    return std::sqrt(num / (den > 0.0 ? den : 1.0));
}

inline double power(const ComplexVector& v) {
    double p = 0.0;
    for (const auto& s : v) p += std::norm(s);
    return p / static_cast<double>(v.size());
}

}  // namespace sic::test
