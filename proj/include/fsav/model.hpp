#pragma once

#include <cstdint>

#include "fsav/field.hpp"
#include "fsav/grid.hpp"

namespace fsav {

/// Physical parameters of the equation plus the SAV regularization constant.
struct ModelParams {
    double alpha = 2.0;  // fractional order, in (1,2]
    double gamma = 1.0;  // dispersion coefficient, > 0
    double beta = 0.0;   // nonlinearity strength
    RealField potential; // V sampled at the collocation points
    double c0 = 0.0;     // added under every square root of E
};

/// Solver state: the real field pair, the previous level for extrapolation,
/// and the scalar auxiliary variable.
struct SavState {
    RealField p;
    RealField q;
    RealField p_prev;
    RealField q_prev;
    double w = 0.0;
    double t = 0.0;
    std::int64_t step_index = 0;
};

/// Copies the sampled real/imaginary parts of u0 into a (P, Q) pair.
PairField split_initial(const RealField& real_part, const RealField& imag_part);

/// Discrete nonlinear energy:
/// (h/4) * sum_j [ beta*(P^2+Q^2)^2 + 2*V*(P^2+Q^2) ]  (h -> h_x h_y in 2D).
double compute_E(const RealField& p, const RealField& q, const ModelParams& params,
                 const GridSpec& grid);

/// w = sqrt(E + C0). Throws NonpositiveSavEnergy when E + C0 is not safely
/// positive; raising C0 is the intended remedy.
double init_w(const RealField& p, const RealField& q, const ModelParams& params,
              const GridSpec& grid);

/// Pointwise SAV nonlinear terms:
/// B1 = (beta*(P^2+Q^2)*P + V*P) / sqrt(E+C0), B2 analogously with Q.
PairField compute_B(const RealField& p, const RealField& q, const ModelParams& params,
                    const GridSpec& grid);

/// Second-order explicit midpoint predictor (3*v_curr - v_prev) / 2.
RealField extrapolate(const RealField& v_curr, const RealField& v_prev);

/// Builds the t = 0 state: w from init_w, previous level seeded with the
/// initial fields so the first extrapolation is well defined.
SavState make_initial_state(RealField p, RealField q, const ModelParams& params,
                            const GridSpec& grid);

} // namespace fsav
