#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sic/linalg.hpp"
#include "sic/loss.hpp"
#include "sic/model.hpp"

namespace sic {

/// Exponential moving average of the block Hessian and gradient:
///   H <- lambda H + (1 - lambda) M,   g <- lambda g + (1 - lambda) b.
/// The first update copies (M, b).
struct EmaState {
    HermitianMatrix H;
    ComplexVector g;
    double lambda = 0.9;
    bool initialized = false;

    QuadraticModel as_quadratic() const { return QuadraticModel{H, g, 0.0}; }
};

EmaState ema_update(EmaState state, const HermitianMatrix& M, ComplexSpan b);

/// M + gamma I.
HermitianMatrix regularize(const HermitianMatrix& M, double gamma);

/// z + mu * dz with dz = -(M + gamma I)^{-1} b.
ParamVector mnm_step(const ParamVector& z, const QuadraticModel& q, double mu, double gamma);

struct CgConfig {
    std::size_t L = 20;
    double mu = 1.0;
    double gamma = 1e-4;
    double breakdown_tol = 1e-14;
};

/// Search directions and residuals seen by one cg_solve call. Optional.
struct CgTrace {
    std::vector<ComplexVector> directions;  // p_0, p_1, ...
    std::vector<ComplexVector> residuals;   // r_0, r_1, ...
    std::vector<ComplexVector> iterates;    // x_0, x_1, ...
};

struct CgResult {
    ComplexVector x;
    std::size_t iterations = 0;
};

/// Complex conjugate gradients on f(x) = x^H M x + b^H x + x^H b starting
/// from x0, at most L iterations. Stops early when ||r|| <= 1e-14 ||b|| or
/// |p^H M p| <= breakdown_tol ||p||^2.
CgResult cg_solve(const HermitianMatrix& M, ComplexSpan b, ComplexSpan x0, std::size_t L, double breakdown_tol,
                  CgTrace* trace = nullptr);

struct OptStepReport {
    double step_norm = 0.0;
    double grad_norm = 0.0;
    std::size_t inner_iters_used = 0;
    double flops_charged = 0.0;  // solver part only: L K^2 nominal
};

struct CgStepResult {
    ParamVector z;
    OptStepReport report;
};

/// z + mu * cg_solve(M + gamma I, b, 0, L).
CgStepResult cg_step(const ParamVector& z, const QuadraticModel& q, const CgConfig& cfg);

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double mu0 = 1e-4;
    double alpha_start = 1.0;
    double alpha_end = 1e-4;
    std::uint64_t total_steps = 1;
};

/// First and second moments over the stacked real parameters (Re z, Im z).
struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
};

/// Linearly decreasing rate: mu0 * ((1 - t/(T-1)) alpha_start + t/(T-1) alpha_end).
/// Out-of-range t is clamped to the endpoints with a warning on stderr.
double lr_schedule(std::uint64_t t, const AdamConfig& cfg);

/// One Adam step at index t (0-based) on the stacked real view of z.
/// The real gradient of J with respect to (Re z, Im z) is 2 (Re b, Im b).
ParamVector adam_step(const ParamVector& z, ComplexSpan b, AdamState& state, const AdamConfig& cfg, std::uint64_t t);

}  // namespace sic
