// Command-line front end: homogeneity tests on count-table files and Monte
// Carlo size/power/sweep studies emitting CSV.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bilat/errors.hpp"
#include "bilat/estimation.hpp"
#include "bilat/inference.hpp"
#include "bilat/simulation.hpp"
#include "bilat/table_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitDegenerate = 2;

std::string fmt4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out)
        throw std::runtime_error("cannot write '" + out_path + "'");
    out << text;
}

std::vector<bilat::TestResult> selected_tests(const std::string& method,
                                              const bilat::StratifiedTable& table,
                                              const bilat::GlobalFit& global,
                                              const bilat::ConstrainedFit& constrained) {
    std::vector<bilat::TestResult> tests;
    if (method == "all" || method == "lrt")
        tests.push_back(bilat::lrt_test(global, constrained));
    if (method == "all" || method == "score")
        tests.push_back(bilat::score_test(table, constrained));
    if (method == "all" || method == "wald")
        tests.push_back(bilat::wald_test(table, global));
    return tests;
}

void print_report(const bilat::StratifiedTable& table, const bilat::GlobalFit& global,
                  const bilat::ConstrainedFit& constrained,
                  const std::vector<bilat::TestResult>& tests) {
    std::size_t width = 7;
    for (std::size_t j = 0; j < table.n_strata(); ++j)
        width = std::max(width, table.label(j).size());

    std::printf("Maximum-likelihood estimates (group 2 rate / group 1 rate = delta)\n");
    std::printf("%-*s  %9s %9s %9s  %9s %9s\n", static_cast<int>(width), "stratum", "pi1~",
                "gamma~", "delta~", "pi1^", "gamma^");
    for (std::size_t j = 0; j < table.n_strata(); ++j) {
        std::printf("%-*s  %9s %9s %9s  %9s %9s\n", static_cast<int>(width),
                    table.label(j).c_str(), fmt4(global.pi1[j]).c_str(),
                    fmt4(global.gamma[j]).c_str(), fmt4(global.delta[j]).c_str(),
                    fmt4(constrained.pi1[j]).c_str(), fmt4(constrained.gamma[j]).c_str());
    }
    std::printf("common delta^ = %s  (%d iterations%s)\n", fmt4(constrained.delta).c_str(),
                constrained.iterations, constrained.converged ? "" : ", not converged");

    std::printf("\nHomogeneity tests (df = %d)\n", tests.empty() ? 0 : tests.front().df);
    std::printf("%-6s %10s %10s\n", "method", "statistic", "p_value");
    for (const auto& t : tests)
        std::printf("%-6s %10s %10s\n", bilat::method_name(t.method), fmt4(t.statistic).c_str(),
                    fmt4(t.p_value).c_str());
}

void print_json(const bilat::StratifiedTable& table, const bilat::GlobalFit& global,
                const bilat::ConstrainedFit& constrained,
                const std::vector<bilat::TestResult>& tests) {
    nlohmann::json doc;
    doc["strata"] = nlohmann::json::array();
    for (std::size_t j = 0; j < table.n_strata(); ++j)
        doc["strata"].push_back(table.label(j));
    doc["global_fit"] = {{"pi1", global.pi1},
                         {"gamma", global.gamma},
                         {"delta", global.delta},
                         {"loglik", global.loglik}};
    doc["constrained_fit"] = {{"delta", constrained.delta},
                              {"pi1", constrained.pi1},
                              {"gamma", constrained.gamma},
                              {"loglik", constrained.loglik},
                              {"iterations", constrained.iterations},
                              {"converged", constrained.converged},
                              {"boundary_strata", constrained.boundary_strata}};
    doc["tests"] = nlohmann::json::array();
    for (const auto& t : tests)
        doc["tests"].push_back({{"method", bilat::method_name(t.method)},
                                {"statistic", t.statistic},
                                {"df", t.df},
                                {"p_value", t.p_value}});
    std::cout << doc.dump(2) << '\n';
}

int run_test_command(const std::string& input, const std::string& method,
                     const std::string& format) {
    const bilat::StratifiedTable table = bilat::read_count_table_file(input);
    for (std::size_t j = 0; j < table.n_strata(); ++j) {
        const auto& s = table.strata[j];
        if (s.responders_g1() == 0 || s.responders_g2() == 0)
            throw bilat::DegenerateDataError(
                "stratum '" + table.label(j) + "' group " +
                (s.responders_g1() == 0 ? std::string("1") : std::string("2")) +
                " has no responders");
    }
    if (table.n_strata() < 2)
        throw bilat::DegenerateDataError("df = 0: homogeneity test undefined for J = 1");

    const bilat::GlobalFit global = bilat::global_fit(table);
    const bilat::ConstrainedFit constrained = bilat::constrained_fit(table);
    const auto tests = selected_tests(method, table, global, constrained);
    if (format == "json")
        print_json(table, global, constrained, tests);
    else
        print_report(table, global, constrained, tests);
    return kExitOk;
}

std::vector<double> parse_vector(const std::string& text) {
    std::vector<double> out;
    std::string field;
    const auto push = [&]() {
        if (field.empty())
            throw std::invalid_argument("empty entry in vector option");
        out.push_back(std::stod(field));
        field.clear();
    };
    for (const char c : text) {
        if (c == ',')
            push();
        else
            field += c;
    }
    push();
    return out;
}

struct CellOptions {
    int j = 0;
    int m = 0;
    std::string gamma_case = "I";
    std::string pi_case = "a";
    std::string gamma_vec;
    std::string pi_vec;
    int reps = 50000;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    bool full_grid = false;
    std::string out_path;
};

void fill_common(bilat::SimConfig& config, const CellOptions& opt, bilat::GridCell& cell) {
    config.j = opt.j;
    config.m = opt.m;
    config.replications = opt.reps;
    config.alpha = opt.alpha;
    config.seed = opt.seed;
    if (opt.gamma_vec.empty()) {
        config.gamma = bilat::gamma_case_vector(opt.gamma_case, opt.j);
        cell.gamma_case = opt.gamma_case;
    } else {
        config.gamma = parse_vector(opt.gamma_vec);
        cell.gamma_case = opt.gamma_vec;
        for (auto& c : cell.gamma_case)
            if (c == ',') c = ';';
    }
    if (opt.pi_vec.empty()) {
        config.pi1 = bilat::pi_case_vector(opt.pi_case, opt.j);
        cell.pi_case = opt.pi_case;
    } else {
        config.pi1 = parse_vector(opt.pi_vec);
        cell.pi_case = opt.pi_vec;
        for (auto& c : cell.pi_case)
            if (c == ',') c = ';';
    }
    cell.j = opt.j;
    cell.m = opt.m;
}

std::string format_spec(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"homogeneity tests of proportion ratios for stratified bilateral count data"};
    app.require_subcommand(1);

    // --- test ----------------------------------------------------------------
    std::string input, method = "all", format = "table";
    auto* test_cmd = app.add_subcommand("test", "fit a count-table file and run the tests");
    test_cmd->add_option("--input,-i", input, "count-table CSV (stratum,group,m0,m1,m2)")
        ->required();
    test_cmd->add_option("--method", method, "lrt|score|wald|all")
        ->check(CLI::IsMember({"lrt", "score", "wald", "all"}));
    test_cmd->add_option("--format", format, "table|json")
        ->check(CLI::IsMember({"table", "json"}));

    // --- simulate ------------------------------------------------------------
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo size / power / sweep studies");
    sim_cmd->require_subcommand(1);

    CellOptions size_opt;
    double size_delta = 1.0;
    auto* size_cmd = sim_cmd->add_subcommand("size", "empirical Type I error at a common delta");
    size_cmd->add_option("--j", size_opt.j, "number of strata");
    size_cmd->add_option("--m", size_opt.m, "patients per group per stratum");
    size_cmd->add_option("--delta", size_delta, "common true ratio");
    size_cmd->add_option("--gamma-case", size_opt.gamma_case, "I|II|III|IV");
    size_cmd->add_option("--pi-case", size_opt.pi_case, "a|b|c");
    size_cmd->add_option("--gamma-vec", size_opt.gamma_vec, "explicit gamma vector, comma-separated");
    size_cmd->add_option("--pi-vec", size_opt.pi_vec, "explicit pi1 vector, comma-separated");
    size_cmd->add_option("--reps", size_opt.reps, "replications per cell");
    size_cmd->add_option("--seed", size_opt.seed, "master seed");
    size_cmd->add_option("--alpha", size_opt.alpha, "nominal level");
    size_cmd->add_flag("--full-grid", size_opt.full_grid, "run the full 432-cell grid");
    size_cmd->add_option("--out", size_opt.out_path, "write CSV here instead of stdout");

    CellOptions power_opt;
    double delta0 = 0.5, delta_a = 1.0;
    std::string power_delta_vec;
    auto* power_cmd = sim_cmd->add_subcommand("power", "empirical power against unequal ratios");
    power_cmd->add_option("--j", power_opt.j, "number of strata");
    power_cmd->add_option("--m", power_opt.m, "patients per group per stratum");
    power_cmd->add_option("--delta0", delta0, "null ratio");
    power_cmd->add_option("--delta-a", delta_a, "alternative ratio (alternates with delta0)");
    power_cmd->add_option("--delta-vec", power_delta_vec,
                          "explicit per-stratum delta vector, comma-separated");
    power_cmd->add_option("--gamma-case", power_opt.gamma_case, "I|II|III|IV");
    power_cmd->add_option("--pi-case", power_opt.pi_case, "a|b|c");
    power_cmd->add_option("--gamma-vec", power_opt.gamma_vec, "explicit gamma vector");
    power_cmd->add_option("--pi-vec", power_opt.pi_vec, "explicit pi1 vector");
    power_cmd->add_option("--reps", power_opt.reps, "replications per cell");
    power_cmd->add_option("--seed", power_opt.seed, "master seed");
    power_cmd->add_option("--alpha", power_opt.alpha, "nominal level");
    power_cmd->add_flag("--full-grid", power_opt.full_grid, "run the full power grid");
    power_cmd->add_option("--out", power_opt.out_path, "write CSV here instead of stdout");

    int sweep_configs = 100;
    CellOptions sweep_opt;
    sweep_opt.reps = 5000;
    bilat::SweepBounds bounds;
    auto* sweep_cmd =
        sim_cmd->add_subcommand("sweep", "random parameter configurations for size box plots");
    sweep_cmd->add_option("--configs", sweep_configs, "number of random configurations");
    sweep_cmd->add_option("--j", sweep_opt.j, "number of strata")->required();
    sweep_cmd->add_option("--m", sweep_opt.m, "patients per group per stratum")->required();
    sweep_cmd->add_option("--reps", sweep_opt.reps, "replications per configuration");
    sweep_cmd->add_option("--seed", sweep_opt.seed, "master seed");
    sweep_cmd->add_option("--alpha", sweep_opt.alpha, "nominal level");
    sweep_cmd->add_option("--pi-lo", bounds.pi_lo, "pi1 lower bound");
    sweep_cmd->add_option("--pi-hi", bounds.pi_hi, "pi1 upper bound");
    sweep_cmd->add_option("--gamma-lo", bounds.gamma_lo, "gamma lower bound");
    sweep_cmd->add_option("--gamma-hi", bounds.gamma_hi, "gamma upper bound");
    sweep_cmd->add_option("--delta-lo", bounds.delta_lo, "delta lower bound");
    sweep_cmd->add_option("--delta-hi", bounds.delta_hi, "delta upper bound");
    sweep_cmd->add_option("--out", sweep_opt.out_path, "write CSV here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (test_cmd->parsed())
            return run_test_command(input, method, format);

        if (size_cmd->parsed()) {
            if (size_opt.full_grid) {
                emit(bilat::to_csv(bilat::size_grid(size_opt.reps, size_opt.seed, size_opt.alpha)),
                     size_opt.out_path);
                return kExitOk;
            }
            if (size_opt.j == 0 || size_opt.m == 0)
                throw std::invalid_argument("--j and --m are required without --full-grid");
            bilat::GridRow row;
            fill_common(row.cell.config, size_opt, row.cell);
            row.cell.config.delta.assign(size_opt.j, size_delta);
            row.cell.delta_spec = format_spec(size_delta);
            row.summary = bilat::simulate(row.cell.config);
            std::string body = bilat::csv_header();
            bilat::append_csv_rows(body, row);
            emit(body, size_opt.out_path);
            return kExitOk;
        }

        if (power_cmd->parsed()) {
            if (power_opt.full_grid) {
                emit(bilat::to_csv(
                         bilat::power_grid(power_opt.reps, power_opt.seed, power_opt.alpha)),
                     power_opt.out_path);
                return kExitOk;
            }
            if (power_opt.j == 0 || power_opt.m == 0)
                throw std::invalid_argument("--j and --m are required without --full-grid");
            bilat::GridRow row;
            fill_common(row.cell.config, power_opt, row.cell);
            if (power_delta_vec.empty()) {
                row.cell.config.delta.resize(power_opt.j);
                for (int s = 0; s < power_opt.j; ++s)
                    row.cell.config.delta[s] = (s % 2 == 0) ? delta0 : delta_a;
                row.cell.delta_spec = format_spec(delta0) + ":" + format_spec(delta_a);
            } else {
                row.cell.config.delta = parse_vector(power_delta_vec);
                row.cell.delta_spec = power_delta_vec;
                for (auto& c : row.cell.delta_spec)
                    if (c == ',') c = ';';
            }
            row.summary = bilat::simulate(row.cell.config);
            std::string body = bilat::csv_header();
            bilat::append_csv_rows(body, row);
            emit(body, power_opt.out_path);
            return kExitOk;
        }

        if (sweep_cmd->parsed()) {
            const auto rows = bilat::random_sweep(sweep_configs, sweep_opt.j, sweep_opt.m, bounds,
                                                  sweep_opt.reps, sweep_opt.seed, sweep_opt.alpha);
            emit(bilat::to_csv(rows), sweep_opt.out_path);
            return kExitOk;
        }
    } catch (const bilat::DegenerateDataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDegenerate;
    } catch (const bilat::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
