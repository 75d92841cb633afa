#include "sic/model.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "sic/errors.hpp"

namespace sic {

SplineBasis::SplineBasis(std::size_t size, double a_max) : size_(size), a_max_(a_max), step_(0.0) {
    if (size < 2) throw UsageError("SplineBasis: need at least 2 knots");
    if (!(a_max > 0.0) || !std::isfinite(a_max)) throw UsageError("SplineBasis: a_max must be positive");
    step_ = a_max / static_cast<double>(size - 1);
}

SplineBasis::Sample SplineBasis::locate(double a) const {
    if (!(a >= 0.0)) throw UsageError("SplineBasis: negative amplitude");
    Sample s;
    if (a >= a_max_) {
        s.index = size_ - 2;
        s.lower = 0.0;
        s.upper = 1.0;
        return s;
    }
    const double pos = a / step_;
    auto idx = static_cast<std::size_t>(pos);
    if (idx > size_ - 2) idx = size_ - 2;
    const double frac = pos - static_cast<double>(idx);
    s.index = idx;
    s.lower = 1.0 - frac;
    s.upper = frac;
    return s;
}

std::vector<double> SplineBasis::eval(double a) const {
    const Sample s = locate(a);
    std::vector<double> phi(size_, 0.0);
    phi[s.index] = s.lower;
    phi[s.index + 1] = s.upper;
    return phi;
}

ParamVector::ParamVector(std::size_t p, std::size_t m, ComplexVector z) : p_(p), m_(m), z_(std::move(z)) {
    if (z_.size() != p_ + m_) throw UsageError("ParamVector: length must equal P + M");
}

ParamVector pack(ComplexSpan h, ComplexSpan w) {
    ComplexVector z;
    z.reserve(h.size() + w.size());
    z.insert(z.end(), h.begin(), h.end());
    z.insert(z.end(), w.begin(), w.end());
    return ParamVector(h.size(), w.size(), std::move(z));
}

std::pair<ComplexVector, ComplexVector> unpack(const ParamVector& z) {
    return {ComplexVector(z.h().begin(), z.h().end()), ComplexVector(z.w().begin(), z.w().end())};
}

HammersteinModel::HammersteinModel(SplineBasis basis, std::size_t fir_taps)
    : basis_(basis), h_(basis.size(), cplx{1.0, 0.0}), w_(fir_taps) {
    if (fir_taps % 2 == 0) throw UsageError("HammersteinModel: FIR length must be odd (M = 2D + 1)");
}

HammersteinModel::HammersteinModel(SplineBasis basis, ComplexVector h, ComplexVector w)
    : basis_(basis), h_(std::move(h)), w_(std::move(w)) {
    if (h_.size() != basis_.size()) throw UsageError("HammersteinModel: h length must equal basis size");
    if (w_.size() % 2 == 0) throw UsageError("HammersteinModel: FIR length must be odd (M = 2D + 1)");
}

void HammersteinModel::set_params(const ParamVector& z) {
    if (z.p() != p() || z.m() != m()) throw UsageError("HammersteinModel::set_params: layout mismatch");
    auto [h, w] = unpack(z);
    h_ = std::move(h);
    w_ = std::move(w);
}

PreparedSignal HammersteinModel::prepare(ComplexSpan x) const {
    PreparedSignal s;
    s.x.assign(x.begin(), x.end());
    s.basis.reserve(x.size());
    for (const auto& u : x) s.basis.push_back(basis_.locate(std::abs(u)));
    return s;
}

ComplexVector HammersteinModel::nonlinear_stage(const PreparedSignal& s) const {
    ComplexVector g(s.size());
    for (std::size_t n = 0; n < s.size(); ++n) {
        const auto& b = s.basis[n];
        g[n] = s.x[n] * (h_[b.index] * b.lower + h_[b.index + 1] * b.upper);
    }
    return g;
}

namespace {

// y_n = sum_j w[j] g[n - (j - D)] for n in [offset, offset + count).
ComplexVector fir_noncausal(const ComplexVector& g, const ComplexVector& w, std::size_t offset, std::size_t count) {
    const auto len = static_cast<std::ptrdiff_t>(g.size());
    const auto d = static_cast<std::ptrdiff_t>((w.size() - 1) / 2);
    ComplexVector y(count);
    for (std::size_t i = 0; i < count; ++i) {
        const auto n = static_cast<std::ptrdiff_t>(offset + i);
        cplx acc{};
        for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(w.size()); ++j) {
            const std::ptrdiff_t src = n - (j - d);
            if (src < 0 || src >= len) continue;
            acc += w[static_cast<std::size_t>(j)] * g[static_cast<std::size_t>(src)];
        }
        y[i] = acc;
    }
    return y;
}

}  // namespace

ComplexVector HammersteinModel::forward(const PreparedSignal& s) const {
    return fir_noncausal(nonlinear_stage(s), w_, 0, s.size());
}

ComplexVector HammersteinModel::forward(ComplexSpan x) const { return forward(prepare(x)); }

ComplexVector HammersteinModel::forward_block(const PreparedSignal& s, std::size_t offset, std::size_t n) const {
    if (offset + n > s.size()) throw UsageError("forward_block: block exceeds signal");
    // Only the samples feeding this block are needed.
    const auto len = static_cast<std::ptrdiff_t>(s.size());
    const auto d = static_cast<std::ptrdiff_t>(half_length());
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(offset) - d);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(len, static_cast<std::ptrdiff_t>(offset + n) + d);
    ComplexVector g(static_cast<std::size_t>(hi - lo));
    for (std::ptrdiff_t k = lo; k < hi; ++k) {
        const auto& b = s.basis[static_cast<std::size_t>(k)];
        g[static_cast<std::size_t>(k - lo)] =
            s.x[static_cast<std::size_t>(k)] * (h_[b.index] * b.lower + h_[b.index + 1] * b.upper);
    }
    ComplexVector y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row_n = static_cast<std::ptrdiff_t>(offset + i);
        cplx acc{};
        for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(w_.size()); ++j) {
            const std::ptrdiff_t src = row_n - (j - d);
            if (src < lo || src >= hi) continue;
            acc += w_[static_cast<std::size_t>(j)] * g[static_cast<std::size_t>(src - lo)];
        }
        y[i] = acc;
    }
    return y;
}

ComplexMatrix HammersteinModel::jacobian(const PreparedSignal& s, std::size_t offset, std::size_t n) const {
    if (offset + n > s.size()) throw UsageError("jacobian: block exceeds signal");
    const std::size_t p = this->p();
    const auto len = static_cast<std::ptrdiff_t>(s.size());
    const auto d = static_cast<std::ptrdiff_t>(half_length());
    ComplexMatrix jac(n, num_params());
    for (std::size_t i = 0; i < n; ++i) {
        const auto row_n = static_cast<std::ptrdiff_t>(offset + i);
        auto row = jac.row(i);
        for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(w_.size()); ++j) {
            const std::ptrdiff_t src = row_n - (j - d);
            if (src < 0 || src >= len) continue;
            const auto& b = s.basis[static_cast<std::size_t>(src)];
            const cplx u = s.x[static_cast<std::size_t>(src)];
            // dy/dw_m = g(x_{n-m})
            row[p + static_cast<std::size_t>(j)] = u * (h_[b.index] * b.lower + h_[b.index + 1] * b.upper);
            // dy/dh_k = sum_m w_m x_{n-m} phi_k(|x_{n-m}|)
            const cplx wu = w_[static_cast<std::size_t>(j)] * u;
            row[b.index] += wu * b.lower;
            row[b.index + 1] += wu * b.upper;
        }
    }
    return jac;
}

ComplexMatrix HammersteinModel::jacobian(ComplexSpan x) const { return jacobian(prepare(x), 0, x.size()); }

void HammersteinModel::save(std::ostream& os) const {
    os << "P " << p() << '\n' << "M " << m() << '\n';
    os << std::setprecision(17) << "a_max " << basis_.a_max() << '\n';
    const ParamVector z = params();
    for (const auto& v : z.values()) os << v.real() << ' ' << v.imag() << '\n';
}

HammersteinModel HammersteinModel::load(std::istream& is) {
    auto field = [&](const char* name) {
        std::string key;
        double value = 0.0;
        if (!(is >> key >> value) || key != name) throw ConfigError(std::string("model file: expected field ") + name);
        return value;
    };
    const auto p = static_cast<std::size_t>(field("P"));
    const auto m = static_cast<std::size_t>(field("M"));
    const double a_max = field("a_max");
    ComplexVector z(p + m);
    for (auto& v : z) {
        double re = 0.0, im = 0.0;
        if (!(is >> re >> im)) throw ConfigError("model file: truncated parameter list");
        v = {re, im};
    }
    HammersteinModel model(SplineBasis(p, a_max), m);
    model.set_params(ParamVector(p, m, std::move(z)));
    return model;
}

}  // namespace sic
