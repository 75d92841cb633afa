#include <doctest.h>

#include <cmath>

#include "sic/complexity.hpp"
#include "sic/errors.hpp"

using namespace sic;

namespace {

double round2(double v) { return std::round(v * 100.0) / 100.0; }

}  // namespace

TEST_CASE("cost polynomials at K = 59, N = 60") {
    const CostModel c{59, 60};
    CHECK(cost_mnm(c) == 59ull * 59 * 59 + 59ull * 59 * 60 + 59ull * 60);
    CHECK(cost_mnm(c) == 417779);
    CHECK(cost_grad(c) == 3540);
    CHECK(cost_cg(c, 20) == 3540 + 208860 + 20ull * 59 * 59);
    CHECK(cost_cg(c, 20) == 282020);
}

TEST_CASE("relative cost row for the CG sweep and the gradient step") {
    const CostModel c{59, 60};
    const std::pair<std::uint64_t, double> rows[] = {{50, 0.93}, {30, 0.76}, {20, 0.68},
                                                     {10, 0.59}, {5, 0.55},  {1, 0.52}};
    for (const auto& [l, expect] : rows) {
        const double r = relative_cost(cost_cg(c, l), c);
        CHECK(std::abs(r - expect) <= 0.005);
        CHECK(round2(r) == doctest::Approx(expect));
    }
    CHECK(relative_cost(cost_mnm(c), c) == 1.0);
    CHECK(std::abs(relative_cost(cost_grad(c), c) - 8.47e-3) <= 0.005e-3);
}

TEST_CASE("CG cost grows linearly in L and never exceeds MNM for L < K") {
    const CostModel c{59, 60};
    for (std::uint64_t l = 1; l < 59; ++l) {
        CHECK(cost_cg(c, l + 1) - cost_cg(c, l) == 59ull * 59);
        CHECK(cost_cg(c, l) < cost_mnm(c));
    }
    CHECK(cost_cg(c, 59) == cost_mnm(c));
}

TEST_CASE("invalid cost models") {
    CHECK_THROWS_AS(cost_mnm(CostModel{0, 60}), UsageError);
    CHECK_THROWS_AS(cost_cg(CostModel{59, 60}, 0), UsageError);
}
