#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>

#include "fsav/field.hpp"
#include "fsav/grid.hpp"
#include "fsav/model.hpp"
#include "fsav/spectral.hpp"

// One linearly implicit SAV time step:
//   extrapolate -> nonlinear terms -> right-hand side -> two constant-coefficient
//   solves + rank-one correction -> scalar update.
// Every discrete inner product below carries the cell-volume weight.

namespace fsav {

struct SchemeConfig {
    double tau = 0.0;                 // time step, > 0 for runs
    double denominator_guard = 1e-12; // minimum |1 + (tau/4) chi|
    bool check_residual = false;      // compute the per-step solve residual
};

struct SolveReport {
    double chi = 0.0;
    double denominator = 1.0;
    double residual_inf = std::numeric_limits<double>::quiet_NaN();
    double nonlinear_seconds = 0.0; // extrapolation + B-bar evaluation
    double solve_seconds = 0.0;     // transforms, solves, scalar update
    double step_seconds = 0.0;
};

/// Applies A = [[I, (tau/2) D], [-(tau/2) D, I]] mode-by-mode (D = gamma D^alpha).
PairField apply_A(const PairField& z, double tau, const SpectralSymbol& symbol,
                  FourierTransform& ft);

/// Applies A^{-1}: each Fourier mode is a 2x2 rotation-like solve with
/// determinant 1 + (tau/2 lambda)^2 >= 1, so this never fails.
PairField apply_A_inverse(const PairField& z, double tau, const SpectralSymbol& symbol,
                          FourierTransform& ft);

/// Assembles the constant part of the implicit system:
///   C1 = P - (tau/2) D Q - tau B2 w + (tau/4) B2 [(B1,P) + (B2,Q)]
///   C2 = Q + (tau/2) D P + tau B1 w - (tau/4) B1 [(B1,P) + (B2,Q)]
PairField assemble_rhs(const SavState& state, const RealField& b1_bar,
                       const RealField& b2_bar, double tau, const SpectralSymbol& symbol,
                       const GridSpec& grid, FourierTransform& ft);

struct RankOneSolution {
    PairField z;
    double chi = 0.0;         // (B, A^{-1} B_rot)
    double s = 0.0;           // (B, Z_next)
    double denominator = 1.0; // 1 + (tau/4) chi
    double residual_inf = std::numeric_limits<double>::quiet_NaN();
};

/// Solves A Z + (tau/4) (B,Z) B_rot = C with two A-solves and a scalar
/// correction. b_rot must be (B2, -B1). Throws SingularDenominator when
/// |1 + (tau/4) chi| < guard.
RankOneSolution rank_one_solve(const PairField& c, const PairField& b_bar,
                               const PairField& b_rot, double tau,
                               const SpectralSymbol& symbol, const GridSpec& grid,
                               FourierTransform& ft, double guard = 1e-12,
                               bool check_residual = false);

/// Advances one step and returns the new state plus solver diagnostics.
std::pair<SavState, SolveReport> step_fsav(const SavState& state, const ModelParams& params,
                                           const GridSpec& grid, const SpectralSymbol& symbol,
                                           const SchemeConfig& cfg, FourierTransform& ft);

/// Observation hooks for run loops. `sample` fires at t = 0 and then every
/// `stride` steps (always including the final step); `every_step` fires at
/// t = 0 and after each step regardless of stride.
struct RunObservers {
    std::function<void(const SavState&, const SolveReport*)> sample;
    std::int64_t stride = 1;
    std::function<void(const SavState&)> every_step;
};

struct TimingRecord {
    std::string scheme;
    double tau = 0.0;
    std::size_t grid_points = 0;
    std::size_t steps = 0;
    double wall_seconds = 0.0;      // step loop only, no I/O
    double mean_step_seconds = 0.0;
    std::size_t inner_iterations = 0; // 0 for the linearly implicit scheme
};

struct RunResult {
    SavState state;
    TimingRecord timing;
};

/// Runs M = T/tau steps (T/tau must be integral within 1e-9 relative,
/// otherwise NonIntegerStepCount is thrown).
RunResult run(SavState initial, const ModelParams& params, const GridSpec& grid,
              const SpectralSymbol& symbol, const SchemeConfig& cfg, double t_final,
              FourierTransform& ft, const RunObservers& observers = {});

/// Number of steps implied by (t_final, tau); shared validation for run loops.
std::int64_t step_count_for(double t_final, double tau);

} // namespace fsav
