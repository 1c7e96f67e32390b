#pragma once

#include "fsav/fsav_stepper.hpp"

// Fully implicit conservative Crank-Nicolson comparator. The nonlinearity is
// evaluated as (beta/2)(|u^{m+1}|^2 + |u^m|^2) u^{m+1/2}, which conserves both
// the discrete mass and a discrete energy at fixed-point convergence. Each
// inner iterate reuses the constant-coefficient A-solve.

namespace fsav {

struct CnfConfig {
    double tau = 0.0;
    double tolerance = 1e-12; // relative l-inf between successive iterates
    int max_iterations = 100;
};

struct CnfStepResult {
    PairField z;
    int iterations = 0; // A-solves performed
};

/// One implicit midpoint step solved by fixed-point iteration. Throws
/// NoConvergence (with the last residual) when the budget is exhausted.
CnfStepResult step_cnf(const PairField& z, const ModelParams& params, const GridSpec& grid,
                       const SpectralSymbol& symbol, const CnfConfig& cfg,
                       FourierTransform& ft);

struct CnfRunResult {
    PairField z;
    TimingRecord timing; // inner_iterations accumulates the A-solve count
};

CnfRunResult run_cnf(PairField initial, const ModelParams& params, const GridSpec& grid,
                     const SpectralSymbol& symbol, const CnfConfig& cfg, double t_final,
                     FourierTransform& ft);

/// The energy this scheme conserves:
/// (1/2)[(P,DP)+(Q,DQ)] + (h/2) sum V (P^2+Q^2) + (h beta/4) sum (P^2+Q^2)^2.
double cnf_energy(const PairField& z, const ModelParams& params, const GridSpec& grid,
                  const SpectralSymbol& symbol, FourierTransform& ft);

} // namespace fsav
