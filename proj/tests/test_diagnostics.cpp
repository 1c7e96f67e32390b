#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fsav/diagnostics.hpp"
#include "fsav/errors.hpp"
#include "fsav/experiments.hpp"
#include "oracles.hpp"

using namespace fsav;

TEST_SUITE("diagnostics") {

TEST_CASE("modified energy of the zero field is w squared") {
    const GridSpec g = build_grid_1d(-16.0, 16.0, 32);
    const SpectralSymbol sym = build_symbol(g, 1.7, 1.0);
    FourierTransform ft(g);
    SavState state;
    state.p = RealField(32, 0.0);
    state.q = RealField(32, 0.0);
    state.w = 1.0;
    CHECK(modified_energy(state, sym, g, ft) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("modified energy matches the dense quadratic form") {
    const GridSpec g = build_grid_1d(-16.0, 16.0, 8);
    const SpectralSymbol sym = build_symbol(g, 1.7, 1.0);
    FourierTransform ft(g);
    SavState state;
    state.p = oracles::random_field(8, 61);
    state.q = oracles::random_field(8, 62);
    state.w = 0.4;

    const auto dense = oracles::dense_operator_1d(g.axis(0), 1.7, 1.0);
    const double quad =
        inner_product(state.p, oracles::mat_vec(dense, state.p), g) +
        inner_product(state.q, oracles::mat_vec(dense, state.q), g);
    const double want = 0.5 * quad + state.w * state.w;
    CHECK(modified_energy(state, sym, g, ft) == doctest::Approx(want).epsilon(1e-12));

    // unweighted variant differs by exactly the cell volume
    CHECK(modified_energy(state, sym, g, ft, EnergyWeighting::Unweighted) ==
          doctest::Approx(want / g.cell_volume()).epsilon(1e-12));
}

TEST_CASE("discrete mass constants") {
    const GridSpec g = build_grid_1d(-16.0, 16.0, 256);
    const PairField z = sample_initial_condition(InitialConditionKind::GaussianChirp, 1.0, g);
    CHECK(discrete_mass_fields(z.p, z.q, g) ==
          doctest::Approx(std::sqrt(std::numbers::pi / 2.0)).epsilon(1e-10));

    const GridSpec g2 = build_grid_2d(-8.0, 8.0, 128);
    const PairField z2 = sample_initial_condition(InitialConditionKind::Gaussian2d, 1.0, g2);
    CHECK(discrete_mass_fields(z2.p, z2.q, g2) == doctest::Approx(2.0).epsilon(1e-9));

    CHECK(discrete_mass_fields(RealField(256, 0.0), RealField(256, 0.0), g) == 0.0);
}

TEST_CASE("relative drift series") {
    ConservationRecord record;
    SUBCASE("constant series is all zeros") {
        for (int i = 0; i < 4; ++i)
            record.samples.push_back({i, 0.1 * i, 2.5, 1.5, 0.0, 0.0});
        const auto drifts = relative_drifts(record);
        CHECK(drifts.max_rh == 0.0);
        CHECK(drifts.max_rm == 0.0);
        CHECK(drifts.rh.front() == 0.0);
        CHECK(drifts.rm.front() == 0.0);
    }
    SUBCASE("tiny perturbation is resolved") {
        record.samples.push_back({0, 0.0, 1.0, 1.0, 0.0, 0.0});
        record.samples.push_back({1, 0.1, 1.0 + 1e-12, 1.0, 0.0, 0.0});
        const auto drifts = relative_drifts(record);
        CHECK(drifts.rh[0] == 0.0);
        CHECK(drifts.rh[1] == doctest::Approx(1e-12).epsilon(1e-3));
    }
    SUBCASE("degenerate reference is rejected") {
        record.samples.push_back({0, 0.0, 0.0, 1.0, 0.0, 0.0});
        CHECK_THROWS_AS(relative_drifts(record), DegenerateReference);
    }
}

TEST_CASE("error between runs") {
    const GridSpec g = build_grid_1d(-16.0, 16.0, 64);
    const RealField p = oracles::random_field(64, 71);
    const RealField q = oracles::random_field(64, 72);

    CHECK(error_between_runs(p, q, g, p, q, g) == 0.0);

    RealField p_shift = p;
    for (auto& x : p_shift) x += 1e-3;
    CHECK(error_between_runs(p, q, g, p_shift, q, g) == doctest::Approx(1e-3).epsilon(1e-10));

    SUBCASE("coarse-in-fine embedding") {
        const GridSpec fine = build_grid_1d(-16.0, 16.0, 128);
        RealField pf(128, 0.0), qf(128, 0.0);
        for (std::size_t j = 0; j < 64; ++j) {
            pf[2 * j] = p[j];
            qf[2 * j] = q[j];
            pf[2 * j + 1] = 99.0; // never compared
            qf[2 * j + 1] = -99.0;
        }
        CHECK(error_between_runs(p, q, g, pf, qf, fine) == 0.0);
        CHECK(error_between_runs(pf, qf, fine, p, q, g) == 0.0); // symmetric dispatch
    }

    SUBCASE("unrelated grids are rejected") {
        const GridSpec other = build_grid_1d(-16.0, 16.0, 96);
        CHECK_THROWS_AS(
            error_between_runs(p, q, g, RealField(96, 0.0), RealField(96, 0.0), other),
            GridMismatch);
    }

    SUBCASE("metric properties on random triples") {
        const RealField pa = oracles::random_field(64, 81), qa = oracles::random_field(64, 82);
        const RealField pb = oracles::random_field(64, 83), qb = oracles::random_field(64, 84);
        const RealField pc = oracles::random_field(64, 85), qc = oracles::random_field(64, 86);
        const double ab = error_between_runs(pa, qa, g, pb, qb, g);
        const double ba = error_between_runs(pb, qb, g, pa, qa, g);
        const double bc = error_between_runs(pb, qb, g, pc, qc, g);
        const double ac = error_between_runs(pa, qa, g, pc, qc, g);
        CHECK(ab == ba);
        CHECK(ab > 0.0);
        CHECK(ac <= ab + bc + 1e-15);
    }
}

TEST_CASE("convergence order") {
    CHECK(convergence_order(4e-4, 1e-4) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS_AS(convergence_order(0.0, 1e-4), InvalidArgument);
    CHECK_THROWS_AS(convergence_order(1e-4, -1.0), InvalidArgument);

    const auto table = make_convergence_table({0.01, 0.005, 0.0025}, {4e-4, 1e-4, 2.5e-5});
    REQUIRE(table.rows.size() == 3);
    CHECK(!table.rows[0].order.has_value());
    CHECK(*table.rows[1].order == doctest::Approx(2.0));
    CHECK(*table.rows[2].order == doctest::Approx(2.0));

    const auto floored = make_convergence_table({32, 64}, {1e-14, 5e-15});
    CHECK(floored.rows[0].at_floor);
    CHECK(floored.rows[1].at_floor);
    CHECK(!floored.rows[1].order.has_value());
}

TEST_CASE("original energy drifts at second order while the modified one holds") {
    const GridSpec g = build_grid_1d(-16.0, 16.0, 128);
    const SpectralSymbol sym = build_symbol(g, 1.7, 1.0);
    ModelParams params;
    params.alpha = 1.7;
    params.beta = 2.0;
    const PairField z0 = sample_initial_condition(InitialConditionKind::GaussianChirp, 1.0, g);

    auto drift_pair = [&](double tau) {
        FourierTransform ft(g);
        SchemeConfig cfg;
        cfg.tau = tau;
        SavState state = make_initial_state(z0.p, z0.q, params, g);
        const double h_mod0 = modified_energy(state, sym, g, ft);
        const double h_orig0 = original_energy(state, params, sym, g, ft);
        double mod_drift = 0.0, orig_drift = 0.0;
        RunObservers obs;
        obs.stride = 5;
        obs.sample = [&](const SavState& s, const SolveReport*) {
            mod_drift = std::max(mod_drift,
                                 std::abs(modified_energy(s, sym, g, ft) - h_mod0));
            orig_drift = std::max(orig_drift,
                                  std::abs(original_energy(s, params, sym, g, ft) - h_orig0));
        };
        run(std::move(state), params, g, sym, cfg, 1.0, ft, obs);
        return std::pair{mod_drift, orig_drift};
    };

    const auto [mod_coarse, orig_coarse] = drift_pair(0.01);
    const auto [mod_fine, orig_fine] = drift_pair(0.005);
    CHECK(mod_coarse <= 1e-10);
    CHECK(mod_fine <= 1e-10);
    CHECK(orig_coarse > 1e-8); // visibly not conserved
    const double ratio = orig_coarse / orig_fine;
    CHECK(ratio >= 3.0);
    CHECK(ratio <= 5.0);
}

} // TEST_SUITE
