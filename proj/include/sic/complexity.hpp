#pragma once

#include <cstdint>

namespace sic {

/// Per-update operation counts for K parameters and block length N.
///
/// The asymptotic costs are evaluated as literal polynomials with unit
/// leading constants:
///   mixed Newton   K^3 + K^2 N + K N
///   gradient       K N
///   CG (L iters)   K N + K^2 N + L K^2
struct CostModel {
    std::uint64_t K = 0;
    std::uint64_t N = 0;
};

std::uint64_t cost_mnm(const CostModel& c);
std::uint64_t cost_grad(const CostModel& c);
std::uint64_t cost_cg(const CostModel& c, std::uint64_t L);

/// cost / cost_mnm.
double relative_cost(std::uint64_t cost, const CostModel& c);

}  // namespace sic
