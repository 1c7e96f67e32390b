#include "fsav/cnf.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "fsav/errors.hpp"

namespace fsav {

namespace {

using Clock = std::chrono::steady_clock;

// RHS of the fixed-point map for a given iterate:
//   C1 = P^m - (tau/2) D Q^m - tau f Q~,  C2 = Q^m + (tau/2) D P^m + tau f P~
// with f = V + (beta/2)(rho_iterate + rho_old) and the midpoint fields
// P~ = (P_iterate + P^m)/2.
PairField cnf_rhs(const PairField& base, const PairField& z_old, const PairField& z_iter,
                  const ModelParams& params, double tau) {
    const std::size_t n = base.p.size();
    PairField c{RealField(n), RealField(n)};
    for (std::size_t j = 0; j < n; ++j) {
        const double rho_old = z_old.p[j] * z_old.p[j] + z_old.q[j] * z_old.q[j];
        const double rho_new = z_iter.p[j] * z_iter.p[j] + z_iter.q[j] * z_iter.q[j];
        const double v = params.potential.empty() ? 0.0 : params.potential[j];
        const double f = v + 0.5 * params.beta * (rho_new + rho_old);
        const double p_mid = 0.5 * (z_iter.p[j] + z_old.p[j]);
        const double q_mid = 0.5 * (z_iter.q[j] + z_old.q[j]);
        c.p[j] = base.p[j] - tau * f * q_mid;
        c.q[j] = base.q[j] + tau * f * p_mid;
    }
    return c;
}

double pair_linf_diff(const PairField& a, const PairField& b) {
    return std::max(linf_diff(a.p, b.p), linf_diff(a.q, b.q));
}

double pair_linf(const PairField& a) {
    return std::max(linf_norm(a.p), linf_norm(a.q));
}

} // namespace

CnfStepResult step_cnf(const PairField& z, const ModelParams& params, const GridSpec& grid,
                       const SpectralSymbol& symbol, const CnfConfig& cfg,
                       FourierTransform& ft) {
    const std::size_t n = grid.total_points();
    if (z.p.size() != n || z.q.size() != n)
        throw ShapeMismatch("step_cnf: state does not match grid");

    // The linear part of the RHS is iterate-independent.
    const PairField dz = apply_operator_pair(z, symbol, ft);
    PairField base{RealField(n), RealField(n)};
    for (std::size_t j = 0; j < n; ++j) {
        base.p[j] = z.p[j] - 0.5 * cfg.tau * dz.q[j];
        base.q[j] = z.q[j] + 0.5 * cfg.tau * dz.p[j];
    }

    CnfStepResult result;
    result.z = z; // initial iterate
    PairField c_prev;
    double last_residual = 0.0;

    for (int iter = 0; iter <= cfg.max_iterations; ++iter) {
        PairField c = cnf_rhs(base, z, result.z, params, cfg.tau);
        if (iter > 0) {
            // Unchanged RHS means the previous solve already hit the fixed point.
            const double c_diff = pair_linf_diff(c, c_prev);
            const double c_scale = std::max(1.0, pair_linf(c));
            if (c_diff <= cfg.tolerance * c_scale) return result;
        }
        if (iter == cfg.max_iterations) {
            std::ostringstream os;
            os << "fixed-point iteration did not converge in " << cfg.max_iterations
               << " iterations (last residual " << last_residual << ")";
            throw NoConvergence(os.str(), last_residual, result.iterations);
        }

        PairField z_new = apply_A_inverse(c, cfg.tau, symbol, ft);
        ++result.iterations;
        last_residual = pair_linf_diff(z_new, result.z) / std::max(1.0, pair_linf(z_new));
        const bool iterate_converged = last_residual <= cfg.tolerance;
        result.z = std::move(z_new);
        c_prev = std::move(c);
        if (iterate_converged && iter > 0) return result;
    }
    return result; // unreachable
}

CnfRunResult run_cnf(PairField initial, const ModelParams& params, const GridSpec& grid,
                     const SpectralSymbol& symbol, const CnfConfig& cfg, double t_final,
                     FourierTransform& ft) {
    const std::int64_t steps = step_count_for(t_final, cfg.tau);

    CnfRunResult result;
    result.z = std::move(initial);
    std::size_t total_iterations = 0;
    double wall = 0.0;

    for (std::int64_t m = 0; m < steps; ++m) {
        const auto t0 = Clock::now();
        CnfStepResult step = step_cnf(result.z, params, grid, symbol, cfg, ft);
        wall += std::chrono::duration<double>(Clock::now() - t0).count();
        total_iterations += static_cast<std::size_t>(step.iterations);
        result.z = std::move(step.z);
    }

    result.timing.scheme = "cnf";
    result.timing.tau = cfg.tau;
    result.timing.grid_points = grid.total_points();
    result.timing.steps = static_cast<std::size_t>(steps);
    result.timing.wall_seconds = wall;
    result.timing.mean_step_seconds = steps > 0 ? wall / static_cast<double>(steps) : 0.0;
    result.timing.inner_iterations = total_iterations;
    return result;
}

double cnf_energy(const PairField& z, const ModelParams& params, const GridSpec& grid,
                  const SpectralSymbol& symbol, FourierTransform& ft) {
    const double quad = symbol_quadratic_form(z.p, symbol, grid, ft) +
                        symbol_quadratic_form(z.q, symbol, grid, ft);
    double pot = 0.0, quartic = 0.0;
    const std::size_t n = grid.total_points();
    for (std::size_t j = 0; j < n; ++j) {
        const double rho = z.p[j] * z.p[j] + z.q[j] * z.q[j];
        const double v = params.potential.empty() ? 0.0 : params.potential[j];
        pot += v * rho;
        quartic += rho * rho;
    }
    const double h = grid.cell_volume();
    return 0.5 * quad + 0.5 * h * pot + 0.25 * params.beta * h * quartic;
}

} // namespace fsav
