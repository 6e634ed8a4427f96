#include "bilat/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "bilat/errors.hpp"
#include "bilat/numeric.hpp"

namespace bilat {

namespace {

void require_group_responders(const StratumCounts& counts, std::size_t j) {
    if (counts.responders_g1() == 0)
        throw DegenerateDataError("stratum " + std::to_string(j + 1) +
                                  ": group 1 has no responders");
    if (counts.responders_g2() == 0)
        throw DegenerateDataError("stratum " + std::to_string(j + 1) +
                                  ": group 2 has no responders");
}

// Expected information for delta in one stratum, with the group-2 zero cell
// kept away from zero.
double expected_info_delta(const StratumCounts& counts, double delta, double pi, double gamma) {
    const double m2 = static_cast<double>(counts.total_g2());
    const double gm2 = gamma - 2.0;
    const double p12 = 2.0 * delta * pi * (1.0 - gamma);
    const double p22 = delta * pi * gamma;
    const double p02 = std::max(1.0 + delta * pi * gm2, 1e-12);
    return m2 * ((p12 + p22) / (delta * delta) + pi * pi * gm2 * gm2 / p02);
}

}  // namespace

std::vector<StratumParams> GlobalFit::params() const {
    std::vector<StratumParams> out(pi1.size());
    for (std::size_t j = 0; j < pi1.size(); ++j)
        out[j] = StratumParams{pi1[j], gamma[j], delta[j]};
    return out;
}

std::vector<StratumParams> ConstrainedFit::params() const {
    std::vector<StratumParams> out(pi1.size());
    for (std::size_t j = 0; j < pi1.size(); ++j)
        out[j] = StratumParams{pi1[j], gamma[j], delta};
    return out;
}

double gamma_mle(const StratumCounts& counts) {
    const double m1 = static_cast<double>(counts.unilateral());
    const double m2 = static_cast<double>(counts.bilateral());
    if (m1 + m2 == 0.0)
        throw DegenerateDataError("gamma undefined: stratum has no responders");
    return 2.0 * m2 / (m1 + 2.0 * m2);
}

StratumParams global_mle(const StratumCounts& counts) {
    validate(counts);
    require_group_responders(counts, 0);

    const double m01 = static_cast<double>(counts.m0_g1);
    const double m11 = static_cast<double>(counts.m1_g1);
    const double m21 = static_cast<double>(counts.m2_g1);
    const double m02 = static_cast<double>(counts.m0_g2);
    const double m12 = static_cast<double>(counts.m1_g2);
    const double m22 = static_cast<double>(counts.m2_g2);
    const double m1p = m11 + m12;
    const double m2p = m21 + m22;

    StratumParams out;
    out.pi1 = (m11 + m21) * (m11 + m12 + 2.0 * m21 + 2.0 * m22) /
              (2.0 * (m01 + m11 + m21) * (m11 + m12 + m21 + m22));
    out.gamma = 2.0 * m2p / (m1p + 2.0 * m2p);
    out.delta = -((m12 + m22) * (m01 - m12 + m1p - m22 + m2p)) /
                ((m02 + m12 + m22) * (m12 - m1p + m22 - m2p));
    return out;
}

Pi1Solution constrained_pi1(const StratumCounts& counts, double delta, double gamma) {
    if (!(delta > 0.0))
        throw std::invalid_argument("constrained_pi1: delta must be positive");
    if (!(gamma >= 0.0) || !(gamma <= 1.0))
        throw std::invalid_argument("constrained_pi1: gamma must lie in [0, 1]");
    const double r = static_cast<double>(counts.responders());
    if (r < 1.0)
        throw DegenerateDataError("constrained_pi1: stratum has no responders");

    const double m01 = static_cast<double>(counts.m0_g1);
    const double m02 = static_cast<double>(counts.m0_g2);
    const double a1 = gamma - 2.0;

    // Clearing denominators in dl/dpi1 = 0 gives a quadratic in pi1.
    const double qa = delta * a1 * a1 * (r + m01 + m02);
    const double qb = a1 * (r * (1.0 + delta) + m01 + delta * m02);
    const double qc = r;

    const double bound_g1 = 1.0 / (2.0 - gamma);
    const double bound_g2 = 1.0 / (delta * (2.0 - gamma));
    const double pi_max = std::min(bound_g1, bound_g2);

    const QuadraticRoots roots = solve_quadratic(qa, qb, qc);
    // Roots within one part in 1e12 of the bound are boundary solutions.
    const double interior_hi = pi_max * (1.0 - 1e-12);

    double best = -1.0;
    double best_ll = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < roots.count; ++i) {
        const double root = roots.root[i];
        if (!(root > 0.0) || !(root < interior_hi))
            continue;
        if (best < 0.0) {
            best = root;
        } else {
            if (best_ll == -std::numeric_limits<double>::infinity())
                best_ll = loglik_stratum(counts, StratumParams{best, gamma, delta});
            const double ll = loglik_stratum(counts, StratumParams{root, gamma, delta});
            if (ll > best_ll) {
                best = root;
                best_ll = ll;
            }
        }
    }
    if (best > 0.0)
        return Pi1Solution{best, false};

    // No interior root: the likelihood climbs to the boundary only when the
    // blocking group has an empty no-response cell.
    double blocking = 0.0;
    if (bound_g1 <= bound_g2)
        blocking += m01;
    if (bound_g2 <= bound_g1)
        blocking += m02;
    if (blocking == 0.0)
        return Pi1Solution{pi_max, true};
    throw NoFeasibleSolutionError(
        "constrained_pi1: no stationary point inside (0, " + std::to_string(pi_max) + ")");
}

double default_init_delta(const StratifiedTable& table) {
    double num = 0.0;
    double den = 0.0;
    for (const auto& s : table.strata) {
        num += static_cast<double>(s.m1_g2 + 2 * s.m2_g2) / (2.0 * s.total_g2());
        den += static_cast<double>(s.m1_g1 + 2 * s.m2_g1) / (2.0 * s.total_g1());
    }
    if (den == 0.0)
        return 1e-3;
    return std::max(num / den, 1e-3);
}

ConstrainedFit fisher_scoring_delta(const StratifiedTable& table, double init_delta,
                                    const ScoringOptions& options) {
    validate(table);
    if (!(init_delta > 0.0))
        throw std::invalid_argument("fisher_scoring_delta: init_delta must be positive");
    const std::size_t n = table.strata.size();
    for (std::size_t j = 0; j < n; ++j)
        require_group_responders(table.strata[j], j);

    std::vector<double> gammas(n);
    for (std::size_t j = 0; j < n; ++j)
        gammas[j] = gamma_mle(table.strata[j]);

    std::vector<double> pi(n), cand_pi(n);
    std::vector<bool> boundary(n), cand_boundary(n);

    const auto profile = [&](double d, std::vector<double>& pis, std::vector<bool>& bnd) {
        double ll = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const Pi1Solution sol = constrained_pi1(table.strata[j], d, gammas[j]);
            pis[j] = sol.pi1;
            bnd[j] = sol.at_boundary;
            ll += loglik_stratum(table.strata[j], StratumParams{sol.pi1, gammas[j], d});
        }
        return ll;
    };

    const auto total_score = [&](double d, const std::vector<double>& pis) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            s += loglik_score(table.strata[j], StratumParams{pis[j], gammas[j], d}).d_delta;
        return s;
    };

    double delta = init_delta;
    double cur_ll = profile(delta, pi, boundary);
    double score = total_score(delta, pi);

    bool converged = false;
    int iterations = 0;
    while (iterations < options.max_iter) {
        ++iterations;
        double info = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            info += expected_info_delta(table.strata[j], delta, pi[j], gammas[j]);
        if (!(info > 0.0))
            break;

        double step = score / info;
        bool accepted = false;
        bool any_valid = false;
        double cand_ll = 0.0;
        double cand_delta = 0.0;
        for (int halving = 0; halving < 40; ++halving, step *= 0.5) {
            cand_delta = delta + step;
            if (!(cand_delta > 0.0))
                continue;
            try {
                cand_ll = profile(cand_delta, cand_pi, cand_boundary);
            } catch (const NoFeasibleSolutionError&) {
                continue;
            }
            if (std::isnan(cand_ll) || cand_ll == -std::numeric_limits<double>::infinity())
                continue;
            any_valid = true;
            if (cand_ll >= cur_ll - 1e-12 * (1.0 + std::fabs(cur_ll))) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            if (!any_valid)
                throw std::runtime_error("fisher_scoring_delta: step halving underflowed");
            // No improving step exists; stop at the current iterate.
            converged = std::fabs(score) <= options.score_tol * (1.0 + std::fabs(delta));
            break;
        }

        const double moved = std::fabs(cand_delta - delta);
        delta = cand_delta;
        pi.swap(cand_pi);
        boundary.swap(cand_boundary);
        cur_ll = cand_ll;
        score = total_score(delta, pi);
        if (moved <= options.tol &&
            std::fabs(score) <= options.score_tol * (1.0 + std::fabs(delta))) {
            converged = true;
            break;
        }
    }

    ConstrainedFit fit;
    fit.delta = delta;
    fit.pi1 = std::move(pi);
    fit.gamma = std::move(gammas);
    fit.loglik = cur_ll;
    fit.iterations = iterations;
    fit.converged = converged;
    for (std::size_t j = 0; j < n; ++j)
        if (boundary[j])
            fit.boundary_strata.push_back(j);
    return fit;
}

GlobalFit global_fit(const StratifiedTable& table) {
    validate(table);
    const std::size_t n = table.strata.size();
    GlobalFit fit;
    fit.pi1.resize(n);
    fit.gamma.resize(n);
    fit.delta.resize(n);
    double ll = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        require_group_responders(table.strata[j], j);
        const StratumParams p = global_mle(table.strata[j]);
        fit.pi1[j] = p.pi1;
        fit.gamma[j] = p.gamma;
        fit.delta[j] = p.delta;
        ll += loglik_stratum(table.strata[j], p);
    }
    fit.loglik = ll;
    return fit;
}

ConstrainedFit constrained_fit(const StratifiedTable& table, const ScoringOptions& options) {
    return fisher_scoring_delta(table, default_init_delta(table), options);
}

}  // namespace bilat
