#ifndef BILAT_MODEL_HPP
#define BILAT_MODEL_HPP

#include <vector>

#include "bilat/counts.hpp"

namespace bilat {

// Cell probabilities for none / one / both sites responding.
struct ProbTriple {
    double p0 = 0.0;
    double p1 = 0.0;
    double p2 = 0.0;
};

// Parameters of one stratum: pi1 is the per-site response rate of group 1,
// gamma the conditional probability that the second site responds given the
// first does, delta the proportion ratio pi2/pi1 between groups.
struct StratumParams {
    double pi1 = 0.0;
    double gamma = 0.0;
    double delta = 1.0;
};

// (1 - (2-gamma) pi, 2 pi (1-gamma), pi gamma).  Requires pi, gamma in [0,1]
// and (2-gamma) pi <= 1; throws std::invalid_argument otherwise.
ProbTriple dallal_probs(double pi, double gamma);

// Log-likelihood kernel of one stratum (multinomial coefficient omitted).
// Group 1 cells use (pi1, gamma), group 2 cells use (delta*pi1, gamma).
// Convention 0 * log 0 = 0; returns -infinity when a cell has positive count
// but zero probability.
double loglik_stratum(const StratumCounts& counts, const StratumParams& params);

// Sum of loglik_stratum over strata; params.size() must equal table size.
double loglik_table(const StratifiedTable& table, const std::vector<StratumParams>& params);

// First derivatives of loglik_stratum in (delta, pi1, gamma).  Terms whose
// count is zero are dropped, so boundary parameters with empty cells stay
// finite.
struct ScoreVector {
    double d_delta = 0.0;
    double d_pi1 = 0.0;
    double d_gamma = 0.0;
};
ScoreVector loglik_score(const StratumCounts& counts, const StratumParams& params);

}  // namespace bilat

#endif  // BILAT_MODEL_HPP
