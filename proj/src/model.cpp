#include "bilat/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace bilat {

namespace {

constexpr double kFeasibilitySlack = 1e-9;

// count * log(p) with the 0 * log 0 = 0 convention.
double count_log(double count, double p) {
    if (count == 0.0)
        return 0.0;
    if (p <= 0.0)
        return -std::numeric_limits<double>::infinity();
    return count * std::log(p);
}

}  // namespace

ProbTriple dallal_probs(double pi, double gamma) {
    if (!(pi >= 0.0) || !(pi <= 1.0))
        throw std::invalid_argument("dallal_probs: pi must lie in [0, 1]");
    if (!(gamma >= 0.0) || !(gamma <= 1.0))
        throw std::invalid_argument("dallal_probs: gamma must lie in [0, 1]");
    const double p0 = 1.0 - (2.0 - gamma) * pi;
    if (p0 < -kFeasibilitySlack)
        throw std::invalid_argument("dallal_probs: (2 - gamma) * pi exceeds 1");
    ProbTriple out;
    out.p0 = p0 < 0.0 ? 0.0 : p0;
    out.p1 = 2.0 * pi * (1.0 - gamma);
    out.p2 = pi * gamma;
    return out;
}

double loglik_stratum(const StratumCounts& counts, const StratumParams& params) {
    const ProbTriple g1 = dallal_probs(params.pi1, params.gamma);
    const ProbTriple g2 = dallal_probs(params.delta * params.pi1, params.gamma);
    return count_log(static_cast<double>(counts.m0_g1), g1.p0) +
           count_log(static_cast<double>(counts.m1_g1), g1.p1) +
           count_log(static_cast<double>(counts.m2_g1), g1.p2) +
           count_log(static_cast<double>(counts.m0_g2), g2.p0) +
           count_log(static_cast<double>(counts.m1_g2), g2.p1) +
           count_log(static_cast<double>(counts.m2_g2), g2.p2);
}

double loglik_table(const StratifiedTable& table, const std::vector<StratumParams>& params) {
    if (params.size() != table.strata.size())
        throw std::invalid_argument("loglik_table: one parameter set per stratum required");
    double total = 0.0;
    for (std::size_t j = 0; j < table.strata.size(); ++j)
        total += loglik_stratum(table.strata[j], params[j]);
    return total;
}

ScoreVector loglik_score(const StratumCounts& counts, const StratumParams& params) {
    const double pi = params.pi1;
    const double gamma = params.gamma;
    const double delta = params.delta;
    const double gm2 = gamma - 2.0;
    const double p01 = 1.0 + pi * gm2;           // p0 of group 1
    const double p02 = 1.0 + delta * pi * gm2;   // p0 of group 2

    const double m01 = static_cast<double>(counts.m0_g1);
    const double m11 = static_cast<double>(counts.m1_g1);
    const double m21 = static_cast<double>(counts.m2_g1);
    const double m02 = static_cast<double>(counts.m0_g2);
    const double m12 = static_cast<double>(counts.m1_g2);
    const double m22 = static_cast<double>(counts.m2_g2);

    // Zero counts contribute nothing even when their denominator vanishes.
    const auto term = [](double count, double value) { return count == 0.0 ? 0.0 : count * value; };

    ScoreVector s;
    s.d_delta = term(m12, 1.0 / delta) + term(m22, 1.0 / delta) +
                term(m02, pi * gm2 / p02);
    s.d_pi1 = term(m12 + m21 + m22 + m11, 1.0 / pi) +
              term(m01, gm2 / p01) + term(m02, delta * gm2 / p02);
    s.d_gamma = term(m21 + m22, 1.0 / gamma) + term(m11 + m12, 1.0 / (gamma - 1.0)) +
                term(m01, pi / p01) + term(m02, delta * pi / p02);
    return s;
}

}  // namespace bilat
