#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "bilat/simulation.hpp"

using namespace bilat;

namespace {

SimConfig small_config() {
    SimConfig c;
    c.j = 2;
    c.m = 25;
    c.gamma = {0.3, 0.3};
    c.pi1 = {0.3, 0.3};
    c.delta = {1.0, 1.0};
    c.replications = 400;
    c.seed = 99;
    return c;
}

}  // namespace

TEST_CASE("config validation") {
    SimConfig c = small_config();
    c.replications = 0;
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    c = small_config();
    c.gamma.pop_back();
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    c = small_config();
    c.pi1 = {0.9, 0.9};  // (2 - gamma) * pi1 > 1
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    c = small_config();
    c.delta = {4.0, 4.0};  // group 2 rate above 1
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    c = small_config();
    c.j = 1;
    c.gamma.pop_back();
    c.pi1.pop_back();
    c.delta.pop_back();
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
}

TEST_CASE("worker count does not change the summary") {
    const SimConfig c = small_config();
    const SimSummary s1 = simulate(c, 1);
    const SimSummary s4 = simulate(c, 4);
    const SimSummary s16 = simulate(c, 16);
    for (int i = 0; i < 3; ++i) {
        CHECK(s1.rejection_pct[i] == s4.rejection_pct[i]);
        CHECK(s1.rejection_pct[i] == s16.rejection_pct[i]);
    }
    CHECK(s1.degenerate_count == s4.degenerate_count);
    CHECK(s1.degenerate_count == s16.degenerate_count);
    CHECK(s1.valid_replications == c.replications);
}

TEST_CASE("same seed reproduces, different seed varies") {
    const SimConfig c = small_config();
    const SimSummary a = simulate(c);
    const SimSummary b = simulate(c);
    CHECK(a.rejection_pct == b.rejection_pct);

    SimConfig other = c;
    other.seed = 100;
    const SimSummary d = simulate(other);
    CHECK(a.rejection_pct != d.rejection_pct);
}

TEST_CASE("degenerate tables are resampled, not dropped") {
    SimConfig c;
    c.j = 2;
    c.m = 25;
    c.gamma = {0.3, 0.3};
    c.pi1 = {0.05, 0.05};
    c.delta = {1.0, 1.0};
    c.replications = 200;
    c.seed = 7;
    const SimSummary s = simulate(c);
    CHECK(s.degenerate_count > 0);
    CHECK(s.valid_replications == 200);
}

TEST_CASE("a configuration that defeats resampling aborts with a diagnostic") {
    // Responders are so rare here that almost every table has an empty group;
    // the 100-attempt budget cannot save it.
    SimConfig c;
    c.j = 2;
    c.m = 5;
    c.gamma = {0.3, 0.3};
    c.pi1 = {0.01, 0.01};
    c.delta = {1.0, 1.0};
    c.replications = 50;
    c.seed = 7;
    CHECK_THROWS_AS(simulate(c), std::runtime_error);
}

TEST_CASE("nominal-level sanity at moderate size") {
    SimConfig c = small_config();
    c.m = 50;
    c.replications = 4000;
    const SimSummary s = simulate(c);
    // Score size is close to 5%; allow a generous Monte Carlo band.
    CHECK(s.rejection_pct[1] > 3.0);
    CHECK(s.rejection_pct[1] < 7.5);
}

TEST_CASE("size grid structure mirrors the parameter table") {
    const auto cells = size_grid_cells(10, 0.05, 1);
    CHECK(cells.size() == 432);

    std::set<int> js;
    for (const auto& cell : cells)
        js.insert(cell.j);
    CHECK(js == std::set<int>{2, 4, 6, 8});

    // patterns alternate the two base values out to length J
    for (const auto& cell : cells) {
        if (cell.j == 4 && cell.gamma_case == "I")
            CHECK(cell.config.gamma == std::vector<double>{0.2, 0.4, 0.2, 0.4});
        if (cell.j == 6 && cell.pi_case == "c")
            CHECK(cell.config.pi1 == std::vector<double>{0.2, 0.3, 0.2, 0.3, 0.2, 0.3});
        if (cell.j == 8 && cell.gamma_case == "IV")
            CHECK(cell.config.gamma == std::vector<double>(8, 0.6));
    }

    // 108 rows per J, distinct substream offsets
    std::set<std::uint64_t> offsets;
    int j2 = 0;
    for (const auto& cell : cells) {
        offsets.insert(cell.config.stream_offset);
        if (cell.j == 2)
            ++j2;
    }
    CHECK(j2 == 108);
    CHECK(offsets.size() == 432);

    CHECK_THROWS_AS(size_grid_cells(0, 0.05, 1), std::invalid_argument);
}

TEST_CASE("power grid alternates the null and alternative ratios") {
    const auto cells = power_grid_cells(0.5, {1.0, 1.2, 1.4}, 10, 0.05, 1);
    CHECK(cells.size() == 432);
    for (const auto& cell : cells) {
        CHECK(cell.config.delta[0] == 0.5);
        if (cell.j >= 2)
            CHECK((cell.config.delta[1] == 1.0 || cell.config.delta[1] == 1.2 ||
                   cell.config.delta[1] == 1.4));
        for (int s = 2; s < cell.j; ++s)
            CHECK(cell.config.delta[s] == cell.config.delta[s - 2]);
    }
    CHECK(cells.front().delta_spec == "0.5:1");
}

TEST_CASE("random sweep emits one row per configuration") {
    const auto rows = random_sweep(20, 2, 25, SweepBounds{}, 50, 123);
    CHECK(rows.size() == 20);
    for (const auto& row : rows) {
        CHECK(row.cell.config.pi1.size() == 2);
        for (const double pi : row.cell.config.pi1) {
            CHECK(pi >= 0.1);
            CHECK(pi <= 0.5);
        }
        for (const double g : row.cell.config.gamma) {
            CHECK(g >= 0.1);
            CHECK(g <= 0.9);
        }
        CHECK(row.cell.config.delta[0] >= 0.5);
        CHECK(row.cell.config.delta[0] <= 1.5);
        CHECK(row.summary.valid_replications == 50);
    }

    const std::string csv = to_csv(rows);
    // header + 3 method rows per configuration
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 3 * 20);
}

TEST_CASE("sweep rejection sampling fills 1000 configurations") {
    const auto rows = random_sweep(1000, 2, 20, SweepBounds{}, 1, 271);
    CHECK(rows.size() == 1000);
    for (const auto& row : rows) {
        const auto& c = row.cell.config;
        for (int s = 0; s < c.j; ++s) {
            CHECK((2.0 - c.gamma[s]) * c.pi1[s] <= 1.0);
            CHECK((2.0 - c.gamma[s]) * c.delta[s] * c.pi1[s] <= 1.0);
        }
    }
}

TEST_CASE("sweep size distributions behave like the published box plots") {
    // At m = 50 the Score test's empirical sizes cluster near the nominal
    // level; at m = 25 the Wald sizes spread far wider than the Score sizes.
    const int configs = 100, reps = 2000;
    const auto at50 = random_sweep(configs, 2, 50, SweepBounds{}, reps, 314);
    std::vector<double> score50;
    for (const auto& row : at50)
        score50.push_back(row.summary.rejection_pct[1]);
    std::sort(score50.begin(), score50.end());
    const double median = 0.5 * (score50[49] + score50[50]);
    CHECK(median >= 4.0);
    CHECK(median <= 6.0);

    const auto at25 = random_sweep(configs, 2, 25, SweepBounds{}, reps, 315);
    std::vector<double> score25, wald25;
    for (const auto& row : at25) {
        score25.push_back(row.summary.rejection_pct[1]);
        wald25.push_back(row.summary.rejection_pct[2]);
    }
    const auto iqr = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        return v[74] - v[24];
    };
    CHECK(iqr(wald25) > iqr(score25));
}

TEST_CASE("CSV bytes are identical across worker counts") {
    SimConfig c = small_config();
    c.replications = 600;
    GridRow row;
    row.cell.j = c.j;
    row.cell.m = c.m;
    row.cell.delta_spec = "1.0";
    row.cell.gamma_case = "II";
    row.cell.pi_case = "b";
    row.cell.config = c;

    std::string csv1, csv4;
    row.summary = simulate(c, 1);
    append_csv_rows(csv1, row);
    row.summary = simulate(c, 4);
    append_csv_rows(csv4, row);
    CHECK(csv1 == csv4);
    CHECK(csv1.find("Score") != std::string::npos);
}
