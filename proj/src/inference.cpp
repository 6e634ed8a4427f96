#include "bilat/inference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "bilat/errors.hpp"
#include "bilat/model.hpp"
#include "bilat/numeric.hpp"

namespace bilat {

namespace {

constexpr double kNegativeStatFloor = -1e-9;

double det3(const InfoMatrix3& m) {
    return m.i11 * (m.i22 * m.i33 - m.i23 * m.i23) -
           m.i12 * (m.i12 * m.i33 - m.i23 * m.i13) +
           m.i13 * (m.i12 * m.i23 - m.i22 * m.i13);
}

int homogeneity_df(std::size_t n_strata) {
    if (n_strata < 2)
        throw DegenerateDataError("df = 0: homogeneity test undefined for J = 1");
    return static_cast<int>(n_strata) - 1;
}

TestResult finish(TestMethod method, double statistic, int df, std::vector<double> delta) {
    if (statistic < 0.0 && statistic >= kNegativeStatFloor)
        statistic = 0.0;
    TestResult out;
    out.method = method;
    out.statistic = statistic;
    out.df = df;
    out.p_value = chisq_sf(std::max(statistic, 0.0), df);
    out.delta = std::move(delta);
    return out;
}

// Solves the symmetric positive-definite system M x = b in place; M is the
// contrast covariance of the Wald test.
std::vector<double> solve_spd(std::vector<std::vector<double>> m, std::vector<double> b) {
    const std::size_t n = b.size();
    // Cholesky factorization M = L L^T
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < i; ++k)
            m[i][i] -= m[i][k] * m[i][k];
        if (!(m[i][i] > 0.0))
            throw SingularInformationError("contrast covariance is not positive definite");
        m[i][i] = std::sqrt(m[i][i]);
        for (std::size_t r = i + 1; r < n; ++r) {
            for (std::size_t k = 0; k < i; ++k)
                m[r][i] -= m[r][k] * m[i][k];
            m[r][i] /= m[i][i];
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < i; ++k)
            b[i] -= m[i][k] * b[k];
        b[i] /= m[i][i];
    }
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t k = i + 1; k < n; ++k)
            b[i] -= m[k][i] * b[k];
        b[i] /= m[i][i];
    }
    return b;
}

}  // namespace

const char* method_name(TestMethod method) {
    switch (method) {
        case TestMethod::LRT: return "LRT";
        case TestMethod::Score: return "Score";
        case TestMethod::Wald: return "Wald";
    }
    return "?";
}

InfoMatrix3 info_matrix(const StratumCounts& counts, double delta, double pi1,
                        double gamma, double clamp_eps) {
    if (!(delta > 0.0) || !(pi1 > 0.0))
        throw std::invalid_argument("info_matrix: delta and pi1 must be positive");
    if (!(gamma >= 0.0) || !(gamma <= 1.0))
        throw std::invalid_argument("info_matrix: gamma must lie in [0, 1]");
    if (!(clamp_eps > 0.0))
        throw std::invalid_argument("info_matrix: clamp_eps must be positive");
    if ((2.0 - gamma) * pi1 > 1.0 + 1e-9 || (2.0 - gamma) * delta * pi1 > 1.0 + 1e-9)
        throw std::invalid_argument("info_matrix: parameters are infeasible");

    const double m1 = static_cast<double>(counts.total_g1());
    const double m2 = static_cast<double>(counts.total_g2());
    const double gm2 = gamma - 2.0;
    // Probability-valued denominators, kept away from zero.
    const double p01 = std::max(1.0 + pi1 * gm2, clamp_eps);
    const double p02 = std::max(1.0 + delta * pi1 * gm2, clamp_eps);
    const double g = std::max(gamma, clamp_eps);
    const double gm1 = std::min(gamma - 1.0, -clamp_eps);

    InfoMatrix3 out;
    out.i11 = m2 / (delta * delta * p02) - m2 / (delta * delta);
    out.i12 = -m2 * gm2 / p02;
    out.i13 = -m2 * pi1 / p02;
    out.i22 = m1 * gm2 * gm2 / p01 - gm2 * (m1 + delta * m2) / pi1 +
              delta * delta * m2 * gm2 * gm2 / p02;
    out.i23 = -delta * m2 / p02 - m1 / p01;
    out.i33 = m1 * pi1 / g - 2.0 * m1 * pi1 / gm1 + m1 * pi1 * pi1 / p01 +
              delta * delta * m2 * pi1 * pi1 / p02 + delta * m2 * pi1 / g -
              2.0 * delta * m2 * pi1 / gm1;
    return out;
}

Inverse3 invert3(const InfoMatrix3& info) {
    const double det = det3(info);
    if (std::fabs(det) <= 1e-300)
        throw SingularInformationError("information matrix is singular");

    Inverse3 out;
    out.det = det;
    out.inv[0][0] = (info.i22 * info.i33 - info.i23 * info.i23) / det;
    out.inv[0][1] = -(info.i12 * info.i33 - info.i13 * info.i23) / det;
    out.inv[0][2] = (info.i12 * info.i23 - info.i13 * info.i22) / det;
    out.inv[1][0] = out.inv[0][1];
    out.inv[1][1] = (info.i11 * info.i33 - info.i13 * info.i13) / det;
    out.inv[1][2] = -(info.i11 * info.i23 - info.i13 * info.i12) / det;
    out.inv[2][0] = out.inv[0][2];
    out.inv[2][1] = out.inv[1][2];
    out.inv[2][2] = (info.i11 * info.i22 - info.i12 * info.i12) / det;
    return out;
}

double chisq_sf(double x, int df) {
    if (df < 1)
        throw std::domain_error("chisq_sf: df must be at least 1");
    if (!(x >= 0.0))
        throw std::domain_error("chisq_sf: x must be nonnegative");
    return regularized_gamma_q(0.5 * df, 0.5 * x);
}

double chisq_quantile(double q, int df) {
    if (df < 1)
        throw std::domain_error("chisq_quantile: df must be at least 1");
    if (!(q > 0.0) || !(q < 1.0))
        throw std::domain_error("chisq_quantile: q must lie in (0, 1)");
    const double target = 1.0 - q;  // survival probability at the quantile
    double lo = 0.0;
    double hi = df + 10.0 * std::sqrt(2.0 * df) + 10.0;
    while (chisq_sf(hi, df) > target)
        hi *= 2.0;
    for (int iter = 0; iter < 200 && hi - lo > 1e-10 * std::max(1.0, lo); ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (chisq_sf(mid, df) > target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

TestResult lrt_test(const GlobalFit& global, const ConstrainedFit& constrained) {
    const int df = homogeneity_df(global.pi1.size());
    const double stat = 2.0 * (global.loglik - constrained.loglik);
    return finish(TestMethod::LRT, stat, df, {constrained.delta});
}

TestResult lrt_test(const StratifiedTable& table) {
    return lrt_test(global_fit(table), constrained_fit(table));
}

TestResult score_test(const StratifiedTable& table, const ConstrainedFit& constrained) {
    const int df = homogeneity_df(table.strata.size());
    double stat = 0.0;
    for (std::size_t j = 0; j < table.strata.size(); ++j) {
        const StratumParams p{constrained.pi1[j], constrained.gamma[j], constrained.delta};
        const double u = loglik_score(table.strata[j], p).d_delta;
        const InfoMatrix3 info =
            info_matrix(table.strata[j], constrained.delta, constrained.pi1[j],
                        constrained.gamma[j]);
        const double det = det3(info);
        if (std::fabs(det) <= 1e-300)
            throw SingularInformationError("score test: information matrix is singular");
        stat += u * u * (info.i22 * info.i33 - info.i23 * info.i23) / det;
    }
    return finish(TestMethod::Score, stat, df, {constrained.delta});
}

TestResult score_test(const StratifiedTable& table) {
    return score_test(table, constrained_fit(table));
}

TestResult wald_test(const StratifiedTable& table, const GlobalFit& global) {
    const int df = homogeneity_df(table.strata.size());
    const std::size_t n = table.strata.size();

    // Only the (1,1) element of each block inverse enters C Iw^-1 C^T.
    std::vector<double> v(n);
    for (std::size_t j = 0; j < n; ++j) {
        const Inverse3 inv = invert3(
            info_matrix(table.strata[j], global.delta[j], global.pi1[j], global.gamma[j]));
        v[j] = inv.inv[0][0];
    }

    std::vector<double> d(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k)
        d[k] = global.delta[0] - global.delta[k + 1];

    std::vector<std::vector<double>> cov(n - 1, std::vector<double>(n - 1, v[0]));
    for (std::size_t k = 0; k + 1 < n; ++k)
        cov[k][k] += v[k + 1];

    const std::vector<double> x = solve_spd(std::move(cov), d);
    double stat = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k)
        stat += d[k] * x[k];
    return finish(TestMethod::Wald, stat, df, global.delta);
}

TestResult wald_test(const StratifiedTable& table) {
    return wald_test(table, global_fit(table));
}

}  // namespace bilat
