#ifndef BILAT_ESTIMATION_HPP
#define BILAT_ESTIMATION_HPP

#include <cstddef>
#include <vector>

#include "bilat/counts.hpp"
#include "bilat/model.hpp"

namespace bilat {

// Maximum-likelihood fit with a free ratio per stratum (the alternative model).
struct GlobalFit {
    std::vector<double> pi1;    // pi1-tilde
    std::vector<double> gamma;  // gamma-tilde
    std::vector<double> delta;  // delta-tilde
    double loglik = 0.0;

    std::vector<StratumParams> params() const;
};

// Maximum-likelihood fit under the common-ratio null hypothesis.
struct ConstrainedFit {
    double delta = 1.0;         // common ratio delta-hat
    std::vector<double> pi1;    // pi1-hat
    std::vector<double> gamma;  // gamma-hat
    double loglik = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<std::size_t> boundary_strata;  // pi1 clamped to its feasibility bound

    std::vector<StratumParams> params() const;
};

// Closed-form MLE of gamma, 2 m2+ / (m1+ + 2 m2+), pooled over both groups.
// The same form solves the stationarity system with or without the common-
// ratio restriction.  Throws DegenerateDataError when the stratum has no
// responders.
double gamma_mle(const StratumCounts& counts);

// Closed-form per-stratum MLEs (pi1-tilde, gamma-tilde, delta-tilde).
// Throws DegenerateDataError when either group has no responders.
StratumParams global_mle(const StratumCounts& counts);

struct Pi1Solution {
    double pi1 = 0.0;
    bool at_boundary = false;
};

// Root of the pi1 stationarity equation at fixed (delta, gamma), restricted
// to (0, pi_max) with pi_max = min(1/(2-gamma), 1/(delta (2-gamma))).  When
// no interior root exists and the group whose p0 vanishes at pi_max has a
// zero m0 count, returns pi_max with at_boundary set; otherwise throws
// NoFeasibleSolutionError.
Pi1Solution constrained_pi1(const StratumCounts& counts, double delta, double gamma);

struct ScoringOptions {
    double tol = 1e-8;        // |delta step| convergence threshold
    double score_tol = 1e-6;  // |dl/ddelta| <= score_tol * (1 + |delta|)
    int max_iter = 200;
};

// Fisher scoring for the common ratio: gamma-hat per stratum is closed form,
// pi1-hat re-solved at each candidate delta, and delta updated by
// score / expected-information steps with step halving whenever a step
// leaves the feasible region or lowers the profile log-likelihood.
ConstrainedFit fisher_scoring_delta(const StratifiedTable& table, double init_delta,
                                    const ScoringOptions& options = {});

// Pooled starting value for the scoring iteration (ratio of per-site
// response-rate sums, floored at 1e-3).
double default_init_delta(const StratifiedTable& table);

GlobalFit global_fit(const StratifiedTable& table);
ConstrainedFit constrained_fit(const StratifiedTable& table, const ScoringOptions& options = {});

}  // namespace bilat

#endif  // BILAT_ESTIMATION_HPP
