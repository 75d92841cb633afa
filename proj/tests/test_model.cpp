#include <doctest.h>

#include <sstream>

#include "sic/errors.hpp"
#include "sic/model.hpp"
#include "support.hpp"

using namespace sic;

namespace {

HammersteinModel random_model(std::size_t p, std::size_t m, double a_max, std::mt19937_64& rng) {
    return HammersteinModel(SplineBasis(p, a_max), test::random_vector(p, rng), test::random_vector(m, rng));
}

// Hat functions written out from their definition, independent of locate().
double hat(std::size_t k, double a, const SplineBasis& b) {
    const double step = b.a_max() / static_cast<double>(b.size() - 1);
    a = std::min(a, b.a_max());
    return std::max(0.0, 1.0 - std::abs(a - step * static_cast<double>(k)) / step);
}

// y_n = sum_m w_m sum_k h_k x_{n-m} phi_k(|x_{n-m}|), zero outside [0, n).
ComplexVector double_sum(const HammersteinModel& mdl, const ComplexVector& x) {
    const long d = static_cast<long>(mdl.half_length());
    const long len = static_cast<long>(x.size());
    ComplexVector y(x.size());
    for (long n = 0; n < len; ++n)
        for (long m = -d; m <= d; ++m) {
            const long src = n - m;
            if (src < 0 || src >= len) continue;
            cplx g{};
            for (std::size_t k = 0; k < mdl.p(); ++k) g += mdl.h()[k] * hat(k, std::abs(x[src]), mdl.basis());
            y[n] += mdl.w()[m + d] * x[src] * g;
        }
    return y;
}

ComplexVector forward_at(HammersteinModel mdl, const ParamVector& z, const ComplexVector& x) {
    mdl.set_params(z);
    return mdl.forward(x);
}

}  // namespace

TEST_CASE("basis hat interpolation") {
    const SplineBasis b(8, 7.0);
    const auto at_knot = b.eval(b.knot(3));
    for (std::size_t k = 0; k < 8; ++k) CHECK(at_knot[k] == doctest::Approx(k == 3 ? 1.0 : 0.0));

    const auto mid = b.eval(0.5 * (b.knot(2) + b.knot(3)));
    for (std::size_t k = 0; k < 8; ++k) CHECK(mid[k] == doctest::Approx(k == 2 || k == 3 ? 0.5 : 0.0));

    CHECK(b.knot(0) == 0.0);
    CHECK(b.knot(7) == doctest::Approx(7.0));
}

TEST_CASE("basis partition of unity and clamping") {
    const SplineBasis b(8, 1.3);
    for (int i = 0; i <= 1000; ++i) {
        const double a = 1.3 * i / 1000.0;
        double s = 0.0;
        for (double v : b.eval(a)) s += v;
        CHECK(std::abs(s - 1.0) <= 1e-12);
    }
    const auto above = b.eval(5.0);
    CHECK(above.back() == 1.0);
    CHECK_THROWS_AS(b.eval(-0.1), UsageError);
    CHECK_THROWS_AS(SplineBasis(1, 1.0), UsageError);
    CHECK_THROWS_AS(SplineBasis(4, 0.0), UsageError);
}

TEST_CASE("identity configuration reproduces the input") {
    std::mt19937_64 rng(1);
    const auto x = test::random_vector(100, rng);
    ComplexVector w(7);
    w[3] = 1.0;
    const HammersteinModel mdl(SplineBasis(8, 4.0), ComplexVector(8, 1.0), w);
    const auto y = mdl.forward(x);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(y[i] - x[i]) <= 1e-15 * std::abs(x[i]) + 1e-300);
}

TEST_CASE("zero gains give zero output") {
    std::mt19937_64 rng(2);
    const auto x = test::random_vector(50, rng);
    const HammersteinModel mdl(SplineBasis(4, 4.0), ComplexVector(4), test::random_vector(5, rng));
    for (const auto& v : mdl.forward(x)) CHECK(v == cplx{});
}

TEST_CASE("forward matches the double-sum oracle") {
    std::mt19937_64 rng(3);
    const auto x = test::random_vector(120, rng);
    const auto mdl = random_model(8, 11, 4.0, rng);
    CHECK(test::rel_err(mdl.forward(x), double_sum(mdl, x)) <= 1e-12);
}

TEST_CASE("forward_block agrees with full forward") {
    std::mt19937_64 rng(4);
    const auto x = test::random_vector(200, rng);
    const auto mdl = random_model(6, 9, 4.0, rng);
    const auto sig = mdl.prepare(x);
    const auto full = mdl.forward(sig);
    for (std::size_t off : {0u, 1u, 60u, 140u}) {
        const auto blk = mdl.forward_block(sig, off, 60);
        for (std::size_t i = 0; i < 60; ++i) CHECK(std::abs(blk[i] - full[off + i]) <= 1e-12);
    }
    CHECK_THROWS_AS(mdl.forward_block(sig, 150, 60), UsageError);
}

TEST_CASE("jacobian of a zero signal is zero") {
    std::mt19937_64 rng(5);
    const auto mdl = random_model(4, 5, 1.0, rng);
    const auto j = mdl.jacobian(ComplexVector(20));
    for (const auto& v : j.data()) CHECK(v == cplx{});
}

TEST_CASE("jacobian bilinearity identities") {
    std::mt19937_64 rng(6);
    const auto x = test::random_vector(80, rng);
    const auto mdl = random_model(5, 7, 4.0, rng);
    const auto j = mdl.jacobian(x);
    const auto y = mdl.forward(x);
    const std::size_t p = mdl.p();
    ComplexVector yw(x.size()), yh(x.size());
    for (std::size_t n = 0; n < x.size(); ++n) {
        for (std::size_t c = 0; c < mdl.m(); ++c) yw[n] += j(n, p + c) * mdl.w()[c];
        for (std::size_t c = 0; c < p; ++c) yh[n] += j(n, c) * mdl.h()[c];
    }
    CHECK(test::rel_err(yw, y) <= 1e-13);
    CHECK(test::rel_err(yh, y) <= 1e-13);
}

TEST_CASE("jacobian matches Wirtinger finite differences and the model is holomorphic") {
    std::mt19937_64 rng(7);
    const auto x = test::random_vector(60, rng);
    const auto mdl = random_model(4, 5, 4.0, rng);
    const auto j = mdl.jacobian(x);
    const ParamVector z0 = mdl.params();
    const double delta = 1e-6;

    double jnorm = 0.0;
    for (const auto& v : j.data()) jnorm += std::norm(v);
    jnorm = std::sqrt(jnorm);

    for (std::size_t c = 0; c < z0.size(); ++c) {
        auto perturbed = [&](cplx d) {
            ParamVector z = z0;
            z.values()[c] += d;
            return forward_at(mdl, z, x);
        };
        const auto re_p = perturbed(delta), re_m = perturbed(-delta);
        const auto im_p = perturbed(cplx(0, delta)), im_m = perturbed(cplx(0, -delta));
        ComplexVector dz(x.size()), col(x.size());
        double conj_err = 0.0;
        for (std::size_t n = 0; n < x.size(); ++n) {
            const cplx d_re = (re_p[n] - re_m[n]) / (2 * delta);
            const cplx d_im = (im_p[n] - im_m[n]) / (2 * delta);
            dz[n] = 0.5 * (d_re - cplx(0, 1) * d_im);
            conj_err += std::norm(0.5 * (d_re + cplx(0, 1) * d_im));
            col[n] = j(n, c);
        }
        CHECK(test::rel_err(dz, col) <= 1e-6);
        CHECK(std::sqrt(conj_err) <= 1e-8 * jnorm);
    }
}

TEST_CASE("scaling bilinearity") {
    std::mt19937_64 rng(8);
    const auto x = test::random_vector(70, rng);
    const auto mdl = random_model(6, 7, 4.0, rng);
    const auto y = mdl.forward(x);
    const cplx c(0.5, 0.0);

    ComplexVector h = mdl.h(), w = mdl.w();
    for (auto& v : h) v *= c;
    const auto yh = HammersteinModel(mdl.basis(), h, mdl.w()).forward(x);
    for (auto& v : w) v *= c;
    const auto yw = HammersteinModel(mdl.basis(), mdl.h(), w).forward(x);
    for (std::size_t n = 0; n < y.size(); ++n) {
        CHECK(yh[n] == c * y[n]);
        CHECK(yw[n] == c * y[n]);
    }
}

TEST_CASE("shift covariance") {
    std::mt19937_64 rng(9);
    auto x = test::random_vector(90, rng);
    const auto mdl = random_model(5, 9, 4.0, rng);
    ComplexVector shifted(x.size());
    for (std::size_t i = 1; i < x.size(); ++i) shifted[i] = x[i - 1];
    const auto y = mdl.forward(x);
    const auto ys = mdl.forward(shifted);
    // Skip the tail where the unshifted sequence has lost samples to padding.
    for (std::size_t n = 1; n + mdl.half_length() + 1 < x.size(); ++n)
        CHECK(std::abs(ys[n] - y[n - 1]) <= 1e-12 * (1.0 + std::abs(y[n - 1])));
}

TEST_CASE("pack and unpack") {
    const ComplexVector h{1.0, 2.0}, w{3.0, 4.0, 5.0};
    const auto z = pack(h, w);
    CHECK(z.values() == ComplexVector{1.0, 2.0, 3.0, 4.0, 5.0});
    const auto [h2, w2] = unpack(z);
    CHECK(h2 == h);
    CHECK(w2 == w);
    const auto zeros = pack(ComplexVector(3), ComplexVector(5));
    CHECK(zeros.size() == 8);
    for (const auto& v : zeros.values()) CHECK(v == cplx{});
    CHECK_THROWS_AS(ParamVector(2, 3, ComplexVector(4)), UsageError);
}

TEST_CASE("model constructors validate the layout") {
    CHECK_THROWS_AS(HammersteinModel(SplineBasis(4, 1.0), 6), UsageError);
    CHECK_THROWS_AS(HammersteinModel(SplineBasis(4, 1.0), ComplexVector(3), ComplexVector(5)), UsageError);
    const HammersteinModel mdl(SplineBasis(8, 1.0), 51);
    CHECK(mdl.num_params() == 59);
    CHECK(mdl.half_length() == 25);
}

TEST_CASE("save and load round trip exactly") {
    std::mt19937_64 rng(10);
    const auto mdl = random_model(8, 51, 3.17, rng);
    std::stringstream ss;
    mdl.save(ss);
    const auto back = HammersteinModel::load(ss);
    CHECK(back.params() == mdl.params());
    CHECK(back.basis().a_max() == mdl.basis().a_max());

    std::stringstream bad("P 8\nM 51\n");
    CHECK_THROWS_AS(HammersteinModel::load(bad), ConfigError);
}
