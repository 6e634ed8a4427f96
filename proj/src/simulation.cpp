#include "bilat/simulation.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "bilat/errors.hpp"
#include "bilat/model.hpp"
#include "bilat/rng.hpp"

namespace bilat {

namespace {

// Substream layout: each replication owns 128 attempt slots.
constexpr std::uint64_t kAttemptSlots = 128;
constexpr int kMaxAttempts = 100;
constexpr std::uint64_t kCellStreamStride = 1ULL << 33;
constexpr std::uint64_t kSweepParamStreamBase = 1ULL << 62;

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string join_values(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0)
            out += ';';
        out += format_double(values[i]);
    }
    return out;
}

struct Tally {
    std::int64_t rejections[3] = {0, 0, 0};
    std::int64_t degenerate = 0;

    void absorb(const Tally& other) {
        for (int i = 0; i < 3; ++i)
            rejections[i] += other.rejections[i];
        degenerate += other.degenerate;
    }
};

StratifiedTable draw_table(const SimConfig& config, std::uint64_t stream_id) {
    RngStream rng(config.seed, stream_id);
    StratifiedTable table;
    table.strata.resize(config.j);
    for (int j = 0; j < config.j; ++j) {
        const ProbTriple g1 = dallal_probs(config.pi1[j], config.gamma[j]);
        const ProbTriple g2 = dallal_probs(config.delta[j] * config.pi1[j], config.gamma[j]);
        const TrinomialCounts c1 = sample_trinomial(rng, config.m, g1);
        const TrinomialCounts c2 = sample_trinomial(rng, config.m, g2);
        table.strata[j] = StratumCounts{c1.m0, c1.m1, c1.m2, c2.m0, c2.m1, c2.m2};
    }
    return table;
}

// One replication: resample past degenerate or unfittable tables, then
// evaluate all three statistics on the same table.
void run_replication(const SimConfig& config, std::int64_t rep, double critical, Tally& tally) {
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        const std::uint64_t stream =
            config.stream_offset + static_cast<std::uint64_t>(rep) * kAttemptSlots +
            static_cast<std::uint64_t>(attempt);
        const StratifiedTable table = draw_table(config, stream);
        if (!is_nondegenerate(table)) {
            ++tally.degenerate;
            continue;
        }
        double stats[3];
        try {
            const GlobalFit global = global_fit(table);
            const ConstrainedFit constrained = constrained_fit(table);
            stats[0] = lrt_test(global, constrained).statistic;
            stats[1] = score_test(table, constrained).statistic;
            stats[2] = wald_test(table, global).statistic;
        } catch (const DegenerateDataError&) {
            ++tally.degenerate;
            continue;
        } catch (const SingularInformationError&) {
            ++tally.degenerate;
            continue;
        } catch (const NoFeasibleSolutionError&) {
            ++tally.degenerate;
            continue;
        }
        for (int i = 0; i < 3; ++i)
            if (stats[i] > critical)
                ++tally.rejections[i];
        return;
    }
    throw std::runtime_error("simulate: replication " + std::to_string(rep) +
                             " failed after " + std::to_string(kMaxAttempts) +
                             " resamples; the configuration is pathological");
}

}  // namespace

void validate(const SimConfig& config) {
    if (config.j < 2)
        throw std::invalid_argument("simulate: need at least 2 strata");
    if (config.m < 1)
        throw std::invalid_argument("simulate: m must be at least 1");
    if (config.replications < 1)
        throw std::invalid_argument("simulate: replications must be at least 1");
    if (!(config.alpha > 0.0) || !(config.alpha < 1.0))
        throw std::invalid_argument("simulate: alpha must lie in (0, 1)");
    const std::size_t j = static_cast<std::size_t>(config.j);
    if (config.gamma.size() != j || config.pi1.size() != j || config.delta.size() != j)
        throw std::invalid_argument("simulate: parameter vectors must have length J");
    for (int s = 0; s < config.j; ++s) {
        const double pi1 = config.pi1[s];
        const double gamma = config.gamma[s];
        const double delta = config.delta[s];
        if (!(pi1 > 0.0) || !(pi1 < 1.0) || !(gamma >= 0.0) || !(gamma <= 1.0) || !(delta > 0.0))
            throw std::invalid_argument("simulate: stratum " + std::to_string(s + 1) +
                                        " parameters out of range");
        const double pi2 = delta * pi1;
        if (!(pi2 < 1.0) || (2.0 - gamma) * pi1 > 1.0 || (2.0 - gamma) * pi2 > 1.0)
            throw std::invalid_argument("simulate: stratum " + std::to_string(s + 1) +
                                        " implies invalid cell probabilities");
    }
}

int resolve_workers(int workers) {
    if (workers > 0)
        return workers;
    if (const char* env = std::getenv("BILAT_THREADS")) {
        const int parsed = std::atoi(env);
        if (parsed > 0)
            return parsed;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

SimSummary simulate(const SimConfig& config, int workers) {
    validate(config);
    const auto start = std::chrono::steady_clock::now();
    const double critical = chisq_quantile(1.0 - config.alpha, config.j - 1);
    const std::int64_t reps = config.replications;

    const int n_workers = std::min<std::int64_t>(resolve_workers(workers), reps);
    std::vector<Tally> tallies(n_workers);
    std::vector<std::string> failures(n_workers);

    const auto run_chunk = [&](int w) {
        const std::int64_t begin = reps * w / n_workers;
        const std::int64_t end = reps * (w + 1) / n_workers;
        try {
            for (std::int64_t rep = begin; rep < end; ++rep)
                run_replication(config, rep, critical, tallies[w]);
        } catch (const std::exception& e) {
            failures[w] = e.what();
        }
    };

    if (n_workers == 1) {
        run_chunk(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (int w = 0; w < n_workers; ++w)
            pool.emplace_back(run_chunk, w);
        for (auto& t : pool)
            t.join();
    }

    Tally total;
    for (int w = 0; w < n_workers; ++w) {
        if (!failures[w].empty())
            throw std::runtime_error(failures[w]);
        total.absorb(tallies[w]);
    }

    SimSummary out;
    out.valid_replications = reps;
    out.degenerate_count = total.degenerate;
    for (int i = 0; i < 3; ++i) {
        const double p = static_cast<double>(total.rejections[i]) / static_cast<double>(reps);
        out.rejection_pct[i] = 100.0 * p;
        out.se_pct[i] = 100.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(reps));
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

// ---------------------------------------------------------------------------
// Grids

namespace {

std::vector<double> expand_pair(double first, double second, int j) {
    std::vector<double> out(j);
    for (int i = 0; i < j; ++i)
        out[i] = (i % 2 == 0) ? first : second;
    return out;
}

}  // namespace

std::vector<double> gamma_case_vector(const std::string& label, int j) {
    if (label == "I") return expand_pair(0.2, 0.4, j);
    if (label == "II") return expand_pair(0.3, 0.3, j);
    if (label == "III") return expand_pair(0.3, 0.5, j);
    if (label == "IV") return expand_pair(0.6, 0.6, j);
    throw std::invalid_argument("unknown gamma case '" + label + "' (expected I..IV)");
}

std::vector<double> pi_case_vector(const std::string& label, int j) {
    if (label == "a") return expand_pair(0.2, 0.4, j);
    if (label == "b") return expand_pair(0.3, 0.3, j);
    if (label == "c") return expand_pair(0.2, 0.3, j);
    throw std::invalid_argument("unknown pi case '" + label + "' (expected a..c)");
}

namespace {

const int kGridJ[] = {2, 4, 6, 8};
const int kGridM[] = {25, 50, 100};
const char* kGammaCases[] = {"I", "II", "III", "IV"};
const char* kPiCases[] = {"a", "b", "c"};

}  // namespace

std::vector<GridCell> size_grid_cells(int replications, double alpha, std::uint64_t seed) {
    if (replications < 1)
        throw std::invalid_argument("size_grid: replications must be at least 1");
    std::vector<GridCell> cells;
    std::uint64_t index = 0;
    for (const int j : kGridJ)
        for (const double delta : {1.0, 1.2, 0.8})
            for (const char* gcase : kGammaCases)
                for (const char* pcase : kPiCases)
                    for (const int m : kGridM) {
                        GridCell cell;
                        cell.j = j;
                        cell.m = m;
                        cell.delta_spec = format_double(delta);
                        cell.gamma_case = gcase;
                        cell.pi_case = pcase;
                        cell.config.j = j;
                        cell.config.m = m;
                        cell.config.gamma = gamma_case_vector(gcase, j);
                        cell.config.pi1 = pi_case_vector(pcase, j);
                        cell.config.delta.assign(j, delta);
                        cell.config.replications = replications;
                        cell.config.alpha = alpha;
                        cell.config.seed = seed;
                        cell.config.stream_offset = index++ * kCellStreamStride;
                        cells.push_back(std::move(cell));
                    }
    return cells;
}

std::vector<GridCell> power_grid_cells(double delta0, const std::vector<double>& delta_a,
                                       int replications, double alpha, std::uint64_t seed) {
    if (replications < 1)
        throw std::invalid_argument("power_grid: replications must be at least 1");
    std::vector<GridCell> cells;
    std::uint64_t index = 0;
    for (const int j : kGridJ)
        for (const double da : delta_a)
            for (const char* gcase : kGammaCases)
                for (const char* pcase : kPiCases)
                    for (const int m : kGridM) {
                        GridCell cell;
                        cell.j = j;
                        cell.m = m;
                        cell.delta_spec = format_double(delta0) + ":" + format_double(da);
                        cell.gamma_case = gcase;
                        cell.pi_case = pcase;
                        cell.config.j = j;
                        cell.config.m = m;
                        cell.config.gamma = gamma_case_vector(gcase, j);
                        cell.config.pi1 = pi_case_vector(pcase, j);
                        cell.config.delta = expand_pair(delta0, da, j);
                        cell.config.replications = replications;
                        cell.config.alpha = alpha;
                        cell.config.seed = seed;
                        cell.config.stream_offset = index++ * kCellStreamStride;
                        cells.push_back(std::move(cell));
                    }
    return cells;
}

std::vector<GridRow> run_cells(const std::vector<GridCell>& cells, int workers) {
    std::vector<GridRow> rows;
    rows.reserve(cells.size());
    for (const auto& cell : cells)
        rows.push_back(GridRow{cell, simulate(cell.config, workers)});
    return rows;
}

std::vector<GridRow> size_grid(int replications, std::uint64_t seed, double alpha, int workers) {
    return run_cells(size_grid_cells(replications, alpha, seed), workers);
}

std::vector<GridRow> power_grid(int replications, std::uint64_t seed, double alpha, int workers) {
    return run_cells(power_grid_cells(0.5, {1.0, 1.2, 1.4}, replications, alpha, seed), workers);
}

std::vector<GridRow> random_sweep(int n_configs, int j, int m, const SweepBounds& bounds,
                                  int replications, std::uint64_t seed, double alpha,
                                  int workers) {
    if (n_configs < 1)
        throw std::invalid_argument("random_sweep: n_configs must be at least 1");
    if (j < 2)
        throw std::invalid_argument("random_sweep: need at least 2 strata");
    if (replications < 1)
        throw std::invalid_argument("random_sweep: replications must be at least 1");

    std::vector<GridRow> rows;
    rows.reserve(n_configs);
    for (int c = 0; c < n_configs; ++c) {
        RngStream param_rng(seed, kSweepParamStreamBase + static_cast<std::uint64_t>(c));
        SimConfig config;
        config.j = j;
        config.m = m;
        config.replications = replications;
        config.alpha = alpha;
        config.seed = seed;
        config.stream_offset = static_cast<std::uint64_t>(c) * kCellStreamStride;

        bool feasible = false;
        for (int tries = 0; tries < 100000 && !feasible; ++tries) {
            const double delta =
                bounds.delta_lo + (bounds.delta_hi - bounds.delta_lo) * param_rng.next_double();
            std::vector<double> gamma(j), pi1(j);
            for (int s = 0; s < j; ++s) {
                gamma[s] = bounds.gamma_lo +
                           (bounds.gamma_hi - bounds.gamma_lo) * param_rng.next_double();
                pi1[s] = bounds.pi_lo + (bounds.pi_hi - bounds.pi_lo) * param_rng.next_double();
            }
            feasible = true;
            for (int s = 0; s < j && feasible; ++s) {
                const double pi2 = delta * pi1[s];
                feasible = pi2 < 1.0 && (2.0 - gamma[s]) * pi1[s] <= 1.0 &&
                           (2.0 - gamma[s]) * pi2 <= 1.0;
            }
            if (feasible) {
                config.gamma = std::move(gamma);
                config.pi1 = std::move(pi1);
                config.delta.assign(j, delta);
            }
        }
        if (!feasible)
            throw std::runtime_error("random_sweep: bounds admit no feasible configuration");

        GridRow row;
        row.cell.j = j;
        row.cell.m = m;
        row.cell.delta_spec = format_double(config.delta[0]);
        row.cell.gamma_case = join_values(config.gamma);
        row.cell.pi_case = join_values(config.pi1);
        row.cell.config = config;
        row.summary = simulate(config, workers);
        rows.push_back(std::move(row));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// CSV

std::string csv_header() {
    return "j,m,delta_spec,gamma_case,pi_case,method,rejection_pct,se_pct,"
           "degenerate_count,reps,seed\n";
}

void append_csv_rows(std::string& out, const GridRow& row) {
    for (int i = 0; i < 3; ++i) {
        char buf[256];
        std::snprintf(buf, sizeof(buf), "%d,%d,%s,%s,%s,%s,%.4f,%.4f,%lld,%d,%llu\n",
                      row.cell.j, row.cell.m, row.cell.delta_spec.c_str(),
                      row.cell.gamma_case.c_str(), row.cell.pi_case.c_str(),
                      method_name(static_cast<TestMethod>(i)), row.summary.rejection_pct[i],
                      row.summary.se_pct[i],
                      static_cast<long long>(row.summary.degenerate_count),
                      row.cell.config.replications,
                      static_cast<unsigned long long>(row.cell.config.seed));
        out += buf;
    }
}

std::string to_csv(const std::vector<GridRow>& rows) {
    std::string out = csv_header();
    for (const auto& row : rows)
        append_csv_rows(out, row);
    return out;
}

}  // namespace bilat
