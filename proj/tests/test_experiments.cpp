#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fsav/errors.hpp"
#include "fsav/experiments.hpp"

using namespace fsav;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("fsav_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        for (char ch : line) {
            if (ch == ',') {
                cells.push_back(cell);
                cell.clear();
            } else {
                cell.push_back(ch);
            }
        }
        cells.push_back(cell); // keeps a trailing empty cell
        rows.push_back(cells);
    }
    return rows;
}

} // namespace

TEST_SUITE("experiments") {

TEST_CASE("run command writes the conservation log") {
    const auto dir = fresh_dir("run");
    const auto cfg = parse_config(
        "preset=ex4_1\nalpha=1.7\ntau=0.01\nt_final=0.2\nobserver_stride=5\n"
        "snapshot_times=0\n");
    const auto outcome = cmd_run(cfg, dir, /*check=*/false);

    CHECK(outcome.max_rh <= 1e-10);
    CHECK(outcome.max_rm > 0.0);
    CHECK(outcome.samples == 5); // t = 0 plus 4 strided samples over 20 steps

    const auto rows = read_csv(outcome.conservation_csv);
    REQUIRE(rows.size() == 6);
    CHECK(rows[0] == std::vector<std::string>{"step", "t", "H", "M", "RH", "RM", "w", "E"});
    CHECK(rows[1][0] == "0");
    // RH and RM start at zero by definition
    CHECK(std::strtod(rows[1][4].c_str(), nullptr) == 0.0);
    CHECK(std::strtod(rows[1][5].c_str(), nullptr) == 0.0);

    SUBCASE("snapshot at t = 0 reproduces the initial samples exactly") {
        const auto snap = read_csv(dir / "snapshot_0.csv");
        REQUIRE(snap.size() == 257);
        CHECK(snap[0] == std::vector<std::string>{"x", "abs_u"});
        const GridSpec g = build_grid_1d(-16.0, 16.0, 256);
        const PairField z =
            sample_initial_condition(InitialConditionKind::GaussianChirp, 1.0, g);
        for (std::size_t j = 0; j < 256; ++j) {
            const double x = std::strtod(snap[j + 1][0].c_str(), nullptr);
            const double abs_u = std::strtod(snap[j + 1][1].c_str(), nullptr);
            CHECK(x == g.axis(0).point(j));
            CHECK(abs_u == std::hypot(z.p[j], z.q[j]));
        }
    }
}

TEST_CASE("run command is deterministic") {
    const auto cfg = parse_config("preset=ex4_1\nalpha=1.9\ntau=0.01\nt_final=0.1\n");
    const auto dir_a = fresh_dir("det_a");
    const auto dir_b = fresh_dir("det_b");
    cmd_run(cfg, dir_a, false);
    cmd_run(cfg, dir_b, false);
    std::ifstream a(dir_a / "conservation.csv"), b(dir_b / "conservation.csv");
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    CHECK(sa.str() == sb.str()); // bit-identical output for identical config
}

TEST_CASE("cnf run logs its own conserved energy") {
    const auto dir = fresh_dir("run_cnf");
    const auto cfg = parse_config(
        "preset=ex4_1\nalpha=2.0\ntau=0.01\nt_final=0.1\nscheme=cnf\n");
    const auto outcome = cmd_run(cfg, dir, false);
    CHECK(outcome.max_rh <= 1e-9);
}

TEST_CASE("time ladder table") {
    const auto dir = fresh_dir("time");
    const auto cfg = parse_config(
        "preset=ex4_1\nalpha=1.4\ntau_list=0.02,0.01\nt_final=0.5\n");
    const auto outcome = cmd_converge_time(cfg, dir, /*check=*/true, /*threads=*/2);

    REQUIRE(outcome.table.rows.size() == 2);
    CHECK(!outcome.table.rows[0].order.has_value());
    REQUIRE(outcome.table.rows[1].order.has_value());
    CHECK(*outcome.table.rows[1].order == doctest::Approx(2.0).epsilon(0.05));

    const auto rows = read_csv(outcome.csv);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == std::vector<std::string>{"tau", "error", "order"});
    CHECK(rows[1].size() == 3);
    CHECK(rows[1][2].empty()); // first order cell is blank

    SUBCASE("non-halving ladders are rejected") {
        const auto bad = parse_config(
            "preset=ex4_1\nalpha=1.4\ntau_list=0.02,0.015\nt_final=0.5\n");
        CHECK_THROWS_AS(cmd_converge_time(bad, dir, false), ConfigError);
    }
}

TEST_CASE("linear case flags the roundoff floor") {
    const auto dir = fresh_dir("floor");
    // beta = 0 with c0 > 0 and constant data: the only active mode is k = 0,
    // which the linear midpoint update leaves untouched for any tau, so the
    // halving differences sit at roundoff and the order column is flagged.
    const auto cfg = parse_config(
        "dim=1\nx_left=-16\nx_right=16\nn=64\nalpha=1.7\nbeta=0\nc0=1\n"
        "initial_condition=constant\nic_amplitude=0.3\ntau_list=0.02,0.01\nt_final=0.5\n");
    const auto outcome = cmd_converge_time(cfg, dir, /*check=*/true);
    for (const auto& row : outcome.table.rows) CHECK(row.at_floor);
    const auto rows = read_csv(outcome.csv);
    CHECK(rows[1][2] == "floor");
}

TEST_CASE("space ladder with coarse-in-fine comparison") {
    const auto dir = fresh_dir("space");
    // The 1d spectral ladder drops ~16x per doubling in this regime, so the
    // check factor is configured below the 2d default.
    const auto cfg = parse_config(
        "preset=ex4_1\nalpha=1.7\ntau=0.01\nt_final=0.2\nn_list=32,64\n"
        "check_space_drop=8\n");
    const auto outcome = cmd_converge_space(cfg, dir, /*check=*/true, /*threads=*/2);
    REQUIRE(outcome.table.rows.size() == 2);
    CHECK(outcome.table.rows[0].error > outcome.table.rows[1].error);

    SUBCASE("constant data is exactly representable at any resolution") {
        const auto flat = parse_config(
            "dim=1\nx_left=-16\nx_right=16\nn=32\nalpha=1.7\nbeta=0\nc0=1\n"
            "initial_condition=constant\nic_amplitude=0.5\ntau=0.01\nt_final=0.2\n"
            "n_list=16,32\n");
        const auto flat_out = cmd_converge_space(flat, dir, false);
        for (const auto& row : flat_out.table.rows) {
            CHECK(row.error <= 1e-13);
            CHECK(row.at_floor);
        }
    }

    SUBCASE("non-doubling ladders are rejected") {
        const auto bad = parse_config(
            "preset=ex4_1\nalpha=1.7\ntau=0.01\nt_final=0.2\nn_list=32,48\n");
        CHECK_THROWS_AS(cmd_converge_space(bad, dir, false), ConfigError);
    }
}

TEST_CASE("ladder output does not depend on the worker count") {
    const auto cfg = parse_config(
        "preset=ex4_1\nalpha=1.4\nn=64\ntau_list=0.02,0.01\nt_final=0.5\n");
    const auto dir_a = fresh_dir("threads_a");
    const auto dir_b = fresh_dir("threads_b");
    cmd_converge_time(cfg, dir_a, false, /*threads=*/1);
    cmd_converge_time(cfg, dir_b, false, /*threads=*/3);
    std::ifstream a(dir_a / "orders_time.csv"), b(dir_b / "orders_time.csv");
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    CHECK(sa.str() == sb.str());
}

TEST_CASE("2d snapshots carry both coordinates") {
    const auto dir = fresh_dir("snap2d");
    const auto cfg = parse_config(
        "dim=2\nx_left=-2\nx_right=2\nn=8\nalpha=1.7\nbeta=1\nc0=1\n"
        "initial_condition=constant\nic_amplitude=0.25\ntau=0.1\nt_final=0.2\n"
        "snapshot_times=0,0.2\nsnapshot_raw=true\n");
    cmd_run(cfg, dir, false);

    const auto snap = read_csv(dir / "snapshot_0.csv");
    REQUIRE(snap.size() == 65);
    CHECK(snap[0] == std::vector<std::string>{"x", "y", "abs_u"});
    CHECK(std::strtod(snap[1][2].c_str(), nullptr) == 0.25);

    const auto raw = read_csv(dir / "snapshot_raw_0.2.csv");
    CHECK(raw[0] == std::vector<std::string>{"x", "y", "p", "q"});
    REQUIRE(raw.size() == 65);
}

TEST_CASE("cost comparison rows") {
    const auto dir = fresh_dir("cost");
    const auto cfg = parse_config(
        "preset=ex4_1\nalpha=1.7\nn=64\ntau_list=0.01\nt_final=0.5\ntau=0.01\n");
    const auto outcome = cmd_compare_cost(cfg, dir, /*check=*/false);
    REQUIRE(outcome.records.size() == 2);
    CHECK(outcome.records[0].scheme == "fsav");
    CHECK(outcome.records[1].scheme == "cnf");
    CHECK(outcome.records[0].steps == 50);
    CHECK(outcome.records[1].steps == 50);
    CHECK(outcome.records[1].inner_iterations >= 2 * outcome.records[1].steps);
    CHECK(outcome.records[0].inner_iterations == 0);

    const auto rows = read_csv(outcome.csv);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == std::vector<std::string>{"scheme", "tau", "wall_s", "steps",
                                              "inner_iters"});

    SUBCASE("linear sanity row: cnf settles in one solve per step") {
        const auto linear = parse_config(
            "dim=1\nx_left=-16\nx_right=16\nn=64\nalpha=1.7\nbeta=0\nc0=1\n"
            "initial_condition=gaussian_chirp\ntau=0.01\nt_final=0.5\n");
        const auto lin_out = cmd_compare_cost(linear, dir, false);
        CHECK(lin_out.records[1].inner_iterations == lin_out.records[1].steps);
    }
}

TEST_CASE("check mode failures surface as CheckFailed") {
    const auto dir = fresh_dir("check");
    // An absurdly tight RH threshold must trip the check.
    const auto cfg = parse_config(
        "preset=ex4_1\nalpha=1.7\ntau=0.01\nt_final=0.1\ncheck_rh_max=1e-18\n");
    CHECK_THROWS_AS(cmd_run(cfg, dir, /*check=*/true), CheckFailed);
}

} // TEST_SUITE
