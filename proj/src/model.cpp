#include "fsav/model.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "fsav/errors.hpp"

namespace fsav {

namespace {

void check_same_size(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        std::ostringstream os;
        os << what << ": sizes " << a << " and " << b << " differ";
        throw ShapeMismatch(os.str());
    }
}

// sqrt(E + C0) with the positivity guard shared by init_w and compute_B.
double guarded_sav_root(double energy, const RealField& p, const RealField& q, double c0) {
    const double scale = std::max({1.0, linf_norm(p), linf_norm(q)});
    const double eps_pos = 1e-14 * scale;
    const double shifted = energy + c0;
    if (!(shifted > eps_pos)) {
        std::ostringstream os;
        os << "E + C0 = " << shifted << " is not positive; raise the SAV constant C0";
        throw NonpositiveSavEnergy(os.str(), shifted);
    }
    return std::sqrt(shifted);
}

} // namespace

PairField split_initial(const RealField& real_part, const RealField& imag_part) {
    check_same_size(real_part.size(), imag_part.size(), "split_initial");
    return PairField{real_part, imag_part};
}

double compute_E(const RealField& p, const RealField& q, const ModelParams& params,
                 const GridSpec& grid) {
    const std::size_t n = grid.total_points();
    check_same_size(p.size(), n, "compute_E");
    check_same_size(q.size(), n, "compute_E");
    if (!params.potential.empty())
        check_same_size(params.potential.size(), n, "compute_E potential");

    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double rho = p[j] * p[j] + q[j] * q[j];
        const double v = params.potential.empty() ? 0.0 : params.potential[j];
        acc += params.beta * rho * rho + 2.0 * v * rho;
    }
    return 0.25 * grid.cell_volume() * acc;
}

double init_w(const RealField& p, const RealField& q, const ModelParams& params,
              const GridSpec& grid) {
    return guarded_sav_root(compute_E(p, q, params, grid), p, q, params.c0);
}

PairField compute_B(const RealField& p, const RealField& q, const ModelParams& params,
                    const GridSpec& grid) {
    const std::size_t n = grid.total_points();
    const double root = guarded_sav_root(compute_E(p, q, params, grid), p, q, params.c0);
    const double inv_root = 1.0 / root;

    PairField b{RealField(n), RealField(n)};
    for (std::size_t j = 0; j < n; ++j) {
        const double rho = p[j] * p[j] + q[j] * q[j];
        const double v = params.potential.empty() ? 0.0 : params.potential[j];
        const double factor = (params.beta * rho + v) * inv_root;
        b.p[j] = factor * p[j];
        b.q[j] = factor * q[j];
    }
    return b;
}

RealField extrapolate(const RealField& v_curr, const RealField& v_prev) {
    check_same_size(v_curr.size(), v_prev.size(), "extrapolate");
    RealField out(v_curr.size());
    for (std::size_t j = 0; j < v_curr.size(); ++j)
        out[j] = 0.5 * (3.0 * v_curr[j] - v_prev[j]);
    return out;
}

SavState make_initial_state(RealField p, RealField q, const ModelParams& params,
                            const GridSpec& grid) {
    SavState state;
    state.w = init_w(p, q, params, grid);
    state.p_prev = p;
    state.q_prev = q;
    state.p = std::move(p);
    state.q = std::move(q);
    state.t = 0.0;
    state.step_index = 0;
    return state;
}

} // namespace fsav
