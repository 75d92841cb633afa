#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <utility>
#include <vector>

#include "sic/linalg.hpp"

namespace sic {

/// Degree-1 B-spline (hat) basis on P uniform knots over [0, a_max].
///
/// Hats form a partition of unity on [0, a_max]; amplitudes above a_max are
/// clamped onto the last knot.
class SplineBasis {
public:
    SplineBasis(std::size_t size, double a_max);

    std::size_t size() const { return size_; }
    double a_max() const { return a_max_; }
    double knot(std::size_t k) const { return step_ * static_cast<double>(k); }

    /// At most two hats are nonzero for a given amplitude.
    struct Sample {
        std::size_t index = 0;  // lower hat; index + 1 is the upper hat
        double lower = 1.0;
        double upper = 0.0;
    };

    Sample locate(double a) const;
    std::vector<double> eval(double a) const;

private:
    std::size_t size_;
    double a_max_;
    double step_;
};

/// Model parameters packed as [h(0..P-1), w(-D..D)].
class ParamVector {
public:
    ParamVector() = default;
    ParamVector(std::size_t p, std::size_t m, ComplexVector z);

    std::size_t p() const { return p_; }
    std::size_t m() const { return m_; }
    std::size_t size() const { return z_.size(); }

    const ComplexVector& values() const { return z_; }
    ComplexVector& values() { return z_; }

    std::span<const cplx> h() const { return {z_.data(), p_}; }
    std::span<const cplx> w() const { return {z_.data() + p_, m_}; }

    friend bool operator==(const ParamVector&, const ParamVector&) = default;

private:
    std::size_t p_ = 0;
    std::size_t m_ = 0;
    ComplexVector z_;
};

ParamVector pack(ComplexSpan h, ComplexSpan w);
std::pair<ComplexVector, ComplexVector> unpack(const ParamVector& z);

/// Input signal with its hat-basis coordinates cached per sample.
struct PreparedSignal {
    ComplexVector x;
    std::vector<SplineBasis::Sample> basis;

    std::size_t size() const { return x.size(); }
};

/// Hammerstein canceller: y_n = sum_{m=-D}^{D} w_m g(x_{n-m}),
/// g(u) = u * sum_k h_k phi_k(|u|). Samples outside the sequence are zero.
class HammersteinModel {
public:
    HammersteinModel(SplineBasis basis, std::size_t fir_taps);
    HammersteinModel(SplineBasis basis, ComplexVector h, ComplexVector w);

    const SplineBasis& basis() const { return basis_; }
    std::size_t p() const { return basis_.size(); }
    std::size_t m() const { return w_.size(); }
    std::size_t half_length() const { return (w_.size() - 1) / 2; }
    std::size_t num_params() const { return p() + m(); }

    const ComplexVector& h() const { return h_; }
    const ComplexVector& w() const { return w_; }

    ParamVector params() const { return pack(h_, w_); }
    void set_params(const ParamVector& z);

    PreparedSignal prepare(ComplexSpan x) const;

    /// g(x_n) for every sample.
    ComplexVector nonlinear_stage(const PreparedSignal& s) const;

    ComplexVector forward(const PreparedSignal& s) const;
    ComplexVector forward(ComplexSpan x) const;

    /// Output samples [offset, offset + n).
    ComplexVector forward_block(const PreparedSignal& s, std::size_t offset, std::size_t n) const;

    /// D_z y over rows [offset, offset + n): an n x K matrix, columns ordered
    /// as the packed parameter vector. D_z e = -D_z y.
    ComplexMatrix jacobian(const PreparedSignal& s, std::size_t offset, std::size_t n) const;
    ComplexMatrix jacobian(ComplexSpan x) const;

    void save(std::ostream& os) const;
    static HammersteinModel load(std::istream& is);

private:
    SplineBasis basis_;
    ComplexVector h_;
    ComplexVector w_;
};

}  // namespace sic
