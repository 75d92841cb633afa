#include "sic/complexity.hpp"

#include "sic/errors.hpp"

namespace sic {

namespace {
void check(const CostModel& c) {
    if (c.K == 0 || c.N == 0) throw UsageError("CostModel: K and N must be positive");
}
}  // namespace

std::uint64_t cost_mnm(const CostModel& c) {
    check(c);
    return c.K * c.K * c.K + c.K * c.K * c.N + c.K * c.N;
}

std::uint64_t cost_grad(const CostModel& c) {
    check(c);
    return c.K * c.N;
}

std::uint64_t cost_cg(const CostModel& c, std::uint64_t L) {
    check(c);
    if (L == 0) throw UsageError("cost_cg: L must be at least 1");
    return c.K * c.N + c.K * c.K * c.N + L * c.K * c.K;
}

double relative_cost(std::uint64_t cost, const CostModel& c) {
    return static_cast<double>(cost) / static_cast<double>(cost_mnm(c));
}

}  // namespace sic
