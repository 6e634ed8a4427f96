#ifndef BILAT_SIMULATION_HPP
#define BILAT_SIMULATION_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "bilat/inference.hpp"

namespace bilat {

struct SimConfig {
    int j = 2;                       // number of strata
    int m = 25;                      // patients per group per stratum
    std::vector<double> gamma;       // gamma_j, length j
    std::vector<double> pi1;         // pi1_j, length j
    std::vector<double> delta;       // true delta_j, length j (all equal for size runs)
    int replications = 50000;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    std::uint64_t stream_offset = 0;  // separates substreams of grid cells / sweep configs
};

// Throws std::invalid_argument when vectors have the wrong length, the
// implied cell probabilities are infeasible, or replications < 1.
void validate(const SimConfig& config);

struct SimSummary {
    // Indexed by TestMethod: LRT, Score, Wald.
    std::array<double, 3> rejection_pct{};
    std::array<double, 3> se_pct{};
    std::int64_t valid_replications = 0;
    std::int64_t degenerate_count = 0;  // tables resampled
    double seconds = 0.0;
};

// Monte Carlo rejection rates at nominal level alpha.  All three statistics
// are computed on the same sampled tables.  Degenerate tables (a group-
// stratum without responders) and tables whose fit fails are resampled from
// the next substream; a replication that cannot produce an analyzable table
// in 100 attempts aborts with a diagnostic.  workers <= 0 picks the
// BILAT_THREADS environment value, falling back to the hardware thread count.
SimSummary simulate(const SimConfig& config, int workers = 0);

int resolve_workers(int workers);

// ---------------------------------------------------------------------------
// Parameter grids

// Alternating two-value patterns extended to length j.
std::vector<double> gamma_case_vector(const std::string& label, int j);  // "I".."IV"
std::vector<double> pi_case_vector(const std::string& label, int j);     // "a".."c"

struct GridCell {
    int j = 0;
    int m = 0;
    std::string delta_spec;  // "1.0" for size cells, "0.5:1.4" for power cells
    std::string gamma_case;
    std::string pi_case;
    SimConfig config;
};

struct GridRow {
    GridCell cell;
    SimSummary summary;
};

// Size grid: delta in {1.0, 1.2, 0.8} x gamma cases I-IV x pi cases a-c x
// m in {25, 50, 100} for each J in {2, 4, 6, 8}; 432 cells.
std::vector<GridCell> size_grid_cells(int replications, double alpha, std::uint64_t seed);

// Power grid: same frame with true delta alternating (delta0, delta_a, ...)
// for delta_a in {1.0, 1.2, 1.4}.
std::vector<GridCell> power_grid_cells(double delta0, const std::vector<double>& delta_a,
                                       int replications, double alpha, std::uint64_t seed);

std::vector<GridRow> run_cells(const std::vector<GridCell>& cells, int workers = 0);

std::vector<GridRow> size_grid(int replications, std::uint64_t seed, double alpha = 0.05,
                               int workers = 0);
std::vector<GridRow> power_grid(int replications, std::uint64_t seed, double alpha = 0.05,
                                int workers = 0);

// ---------------------------------------------------------------------------
// Random-configuration sweep

struct SweepBounds {
    double pi_lo = 0.1, pi_hi = 0.5;
    double gamma_lo = 0.1, gamma_hi = 0.9;
    double delta_lo = 0.5, delta_hi = 1.5;
};

// Draws n_configs parameter sets uniformly inside the bounds (rejecting
// infeasible ones), runs each as a size study with common delta, and labels
// rows with the sampled parameter values.  Throws std::runtime_error when
// rejection sampling fails 1e5 times in a row.
std::vector<GridRow> random_sweep(int n_configs, int j, int m, const SweepBounds& bounds,
                                  int replications, std::uint64_t seed, double alpha = 0.05,
                                  int workers = 0);

// ---------------------------------------------------------------------------
// CSV output (schema shared with the command-line tool)

std::string csv_header();
void append_csv_rows(std::string& out, const GridRow& row);
std::string to_csv(const std::vector<GridRow>& rows);

}  // namespace bilat

#endif  // BILAT_SIMULATION_HPP
