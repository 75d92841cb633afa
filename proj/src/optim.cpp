#include "sic/optim.hpp"

#include <cmath>
#include <iostream>

#include "sic/errors.hpp"

namespace sic {

EmaState ema_update(EmaState state, const HermitianMatrix& M, ComplexSpan b) {
    if (M.dim() != b.size()) throw UsageError("ema_update: Hessian and gradient dimensions differ");
    if (!state.initialized) {
        state.H = M;
        state.g.assign(b.begin(), b.end());
        state.initialized = true;
        return state;
    }
    if (state.H.dim() != M.dim()) throw UsageError("ema_update: dimension changed between updates");
    const double lam = state.lambda;
    state.H = blend(lam, state.H, 1.0 - lam, M);
    for (std::size_t i = 0; i < b.size(); ++i) state.g[i] = lam * state.g[i] + (1.0 - lam) * b[i];
    return state;
}

HermitianMatrix regularize(const HermitianMatrix& M, double gamma) {
    if (gamma < 0.0) throw UsageError("regularize: gamma must be nonnegative");
    return gamma == 0.0 ? M : shifted(M, gamma);
}

ParamVector mnm_step(const ParamVector& z, const QuadraticModel& q, double mu, double gamma) {
    if (q.b.size() != z.size()) throw UsageError("mnm_step: gradient length differs from parameter count");
    const ComplexVector dz = hermitian_solve(regularize(q.M, gamma), q.b);
    ParamVector out = z;
    auto& v = out.values();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= mu * dz[i];
    return out;
}

CgResult cg_solve(const HermitianMatrix& M, ComplexSpan b, ComplexSpan x0, std::size_t L, double breakdown_tol,
                  CgTrace* trace) {
    const std::size_t k = M.dim();
    if (b.size() != k || x0.size() != k) throw UsageError("cg_solve: dimension mismatch");
    if (L == 0) throw UsageError("cg_solve: L must be at least 1");

    CgResult out;
    out.x.assign(x0.begin(), x0.end());

    ComplexVector r = matvec(M, out.x);
    for (std::size_t i = 0; i < k; ++i) r[i] += b[i];
    ComplexVector p = r;
    const double stop = 1e-14 * norm2(b);

    if (trace) {
        trace->iterates.push_back(out.x);
        trace->residuals.push_back(r);
    }

    for (std::size_t it = 0; it < L; ++it) {
        if (norm2(r) <= stop) break;
        const ComplexVector xi = matvec(M, p);
        const cplx p_xi = dot_h(p, xi);
        const double p_sq = dot_h(p, p).real();
        if (std::abs(p_xi) <= breakdown_tol * p_sq) break;
        if (trace) trace->directions.push_back(p);

        const cplx alpha = -dot_h(p, r) / p_xi;
        for (std::size_t i = 0; i < k; ++i) {
            out.x[i] += alpha * p[i];
            r[i] += alpha * xi[i];
        }
        const cplx beta = -dot_h(xi, r) / p_xi;
        for (std::size_t i = 0; i < k; ++i) p[i] = r[i] + beta * p[i];
        ++out.iterations;

        if (trace) {
            trace->iterates.push_back(out.x);
            trace->residuals.push_back(r);
        }
    }
    return out;
}

CgStepResult cg_step(const ParamVector& z, const QuadraticModel& q, const CgConfig& cfg) {
    if (q.b.size() != z.size()) throw UsageError("cg_step: gradient length differs from parameter count");
    const std::size_t k = z.size();
    const ComplexVector x0(k);
    const CgResult cg = cg_solve(regularize(q.M, cfg.gamma), q.b, x0, cfg.L, cfg.breakdown_tol);

    CgStepResult out{z, {}};
    auto& v = out.z.values();
    for (std::size_t i = 0; i < k; ++i) v[i] += cfg.mu * cg.x[i];
    out.report.step_norm = std::abs(cfg.mu) * norm2(cg.x);
    out.report.grad_norm = norm2(q.b);
    out.report.inner_iters_used = cg.iterations;
    out.report.flops_charged = static_cast<double>(cfg.L) * static_cast<double>(k) * static_cast<double>(k);
    return out;
}

double lr_schedule(std::uint64_t t, const AdamConfig& cfg) {
    if (cfg.total_steps <= 1) return cfg.mu0 * cfg.alpha_start;
    const std::uint64_t last = cfg.total_steps - 1;
    if (t > last) {
        std::clog << "lr_schedule: step " << t << " beyond schedule end " << last << ", clamping\n";
        t = last;
    }
    if (t == 0) return cfg.mu0 * cfg.alpha_start;
    if (t == last) return cfg.mu0 * cfg.alpha_end;
    const double frac = static_cast<double>(t) / static_cast<double>(last);
    return cfg.mu0 * ((1.0 - frac) * cfg.alpha_start + frac * cfg.alpha_end);
}

ParamVector adam_step(const ParamVector& z, ComplexSpan b, AdamState& state, const AdamConfig& cfg, std::uint64_t t) {
    const std::size_t k = z.size();
    if (b.size() != k) throw UsageError("adam_step: gradient length differs from parameter count");
    if (state.m.empty()) {
        state.m.assign(2 * k, 0.0);
        state.v.assign(2 * k, 0.0);
    }
    if (state.m.size() != 2 * k) throw UsageError("adam_step: moment size mismatch");

    const double lr = lr_schedule(t, cfg);
    const double step = static_cast<double>(t + 1);
    const double c1 = 1.0 - std::pow(cfg.beta1, step);
    const double c2 = 1.0 - std::pow(cfg.beta2, step);

    ParamVector out = z;
    auto& v = out.values();
    for (std::size_t i = 0; i < 2 * k; ++i) {
        const std::size_t j = i % k;
        const double g = 2.0 * (i < k ? b[j].real() : b[j].imag());
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
        const double delta = lr * (state.m[i] / c1) / (std::sqrt(state.v[i] / c2) + cfg.eps);
        if (i < k)
            v[j] -= cplx{delta, 0.0};
        else
            v[j] -= cplx{0.0, delta};
    }
    return out;
}

}  // namespace sic
