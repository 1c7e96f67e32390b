#include <doctest.h>

#include <cmath>

#include "fsav/cnf.hpp"
#include "fsav/diagnostics.hpp"
#include "fsav/errors.hpp"
#include "fsav/experiments.hpp"
#include "oracles.hpp"

using namespace fsav;

namespace {

struct Setup {
    GridSpec grid;
    SpectralSymbol symbol;
    ModelParams params;
    PairField z0;

    explicit Setup(double alpha, std::size_t n = 256, double beta = 2.0) {
        grid = build_grid_1d(-16.0, 16.0, n);
        symbol = build_symbol(grid, alpha, 1.0);
        params.alpha = alpha;
        params.beta = beta;
        z0 = sample_initial_condition(InitialConditionKind::GaussianChirp, 1.0, grid);
    }
};

} // namespace

TEST_SUITE("cnf") {

TEST_CASE("linear problem converges in one solve to the midpoint update") {
    Setup setup(1.7, 64, /*beta=*/0.0);
    FourierTransform ft(setup.grid);
    CnfConfig cfg;
    cfg.tau = 0.02;

    const auto step = step_cnf(setup.z0, setup.params, setup.grid, setup.symbol, cfg, ft);
    CHECK(step.iterations == 1);

    // Same update as the linear constant-coefficient scheme.
    const RealField dp = apply_operator(setup.z0.p, setup.symbol, ft);
    const RealField dq = apply_operator(setup.z0.q, setup.symbol, ft);
    PairField rhs{RealField(64), RealField(64)};
    for (std::size_t j = 0; j < 64; ++j) {
        rhs.p[j] = setup.z0.p[j] - 0.5 * cfg.tau * dq[j];
        rhs.q[j] = setup.z0.q[j] + 0.5 * cfg.tau * dp[j];
    }
    const PairField want = apply_A_inverse(rhs, cfg.tau, setup.symbol, ft);
    CHECK(linf_diff(step.z.p, want.p) <= 1e-14);
    CHECK(linf_diff(step.z.q, want.q) <= 1e-14);
}

TEST_CASE("nonlinear step needs at least two solves") {
    Setup setup(2.0);
    FourierTransform ft(setup.grid);
    CnfConfig cfg;
    cfg.tau = 0.01;
    const auto step = step_cnf(setup.z0, setup.params, setup.grid, setup.symbol, cfg, ft);
    CHECK(step.iterations >= 2);
}

TEST_CASE("one step conserves mass and the scheme energy") {
    Setup setup(2.0);
    FourierTransform ft(setup.grid);
    CnfConfig cfg;
    cfg.tau = 0.01;

    const double m0 = discrete_mass_fields(setup.z0.p, setup.z0.q, setup.grid);
    const double e0 = cnf_energy(setup.z0, setup.params, setup.grid, setup.symbol, ft);
    const auto step = step_cnf(setup.z0, setup.params, setup.grid, setup.symbol, cfg, ft);
    const double m1 = discrete_mass_fields(step.z.p, step.z.q, setup.grid);
    const double e1 = cnf_energy(step.z, setup.params, setup.grid, setup.symbol, ft);

    // mass holds to within 10x of the fixed-point tolerance
    CHECK(std::abs(m1 - m0) <= 10.0 * cfg.tolerance * m0);
    CHECK(std::abs(e1 - e0) <= 1e-9 * std::abs(e0));
}

TEST_CASE("iteration budget errors out") {
    Setup setup(2.0);
    FourierTransform ft(setup.grid);
    CnfConfig cfg;
    cfg.tau = 0.01;
    cfg.max_iterations = 1; // genuinely nonlinear, so one solve cannot settle
    CHECK_THROWS_AS(step_cnf(setup.z0, setup.params, setup.grid, setup.symbol, cfg, ft),
                    NoConvergence);
}

TEST_CASE("run accumulates iterations") {
    Setup setup(1.7, 64);
    FourierTransform ft(setup.grid);
    CnfConfig cfg;
    cfg.tau = 0.01;
    const auto result = run_cnf(setup.z0, setup.params, setup.grid, setup.symbol, cfg, 1.0, ft);
    CHECK(result.timing.steps == 100);
    CHECK(result.timing.inner_iterations >= 100);
    CHECK(result.timing.scheme == "cnf");
}

TEST_CASE("cross-scheme gap shrinks at second order") {
    // FSAV and CNF are both second order; their pointwise gap at T = 1 must
    // shrink roughly 4x when tau is halved.
    auto gap = [](double tau) {
        Setup setup(1.7);
        FourierTransform ft(setup.grid);

        SchemeConfig fsav_cfg;
        fsav_cfg.tau = tau;
        SavState state =
            make_initial_state(setup.z0.p, setup.z0.q, setup.params, setup.grid);
        const auto fsav_run =
            run(std::move(state), setup.params, setup.grid, setup.symbol, fsav_cfg, 1.0, ft);

        CnfConfig cnf_cfg;
        cnf_cfg.tau = tau;
        const auto cnf_run =
            run_cnf(setup.z0, setup.params, setup.grid, setup.symbol, cnf_cfg, 1.0, ft);

        return std::max(linf_diff(fsav_run.state.p, cnf_run.z.p),
                        linf_diff(fsav_run.state.q, cnf_run.z.q));
    };
    const double ratio = gap(0.02) / gap(0.01);
    CHECK(ratio >= 3.0);
    CHECK(ratio <= 5.0);
}

} // TEST_SUITE
