#ifndef BILAT_INFERENCE_HPP
#define BILAT_INFERENCE_HPP

#include <array>
#include <string>
#include <vector>

#include "bilat/counts.hpp"
#include "bilat/estimation.hpp"

namespace bilat {

// Expected Fisher information of one stratum for the parameter order
// (delta, pi1, gamma); symmetric completion implied.
struct InfoMatrix3 {
    double i11 = 0.0, i12 = 0.0, i13 = 0.0;
    double i22 = 0.0, i23 = 0.0;
    double i33 = 0.0;
};

struct Inverse3 {
    std::array<std::array<double, 3>, 3> inv{};
    double det = 0.0;
};

// Evaluates the six expected-information entries.  Probability-valued
// denominators (the p0 forms in both groups and the gamma / gamma-1 forms)
// are kept away from zero by clamp_eps so boundary fits stay finite.
InfoMatrix3 info_matrix(const StratumCounts& counts, double delta, double pi1,
                        double gamma, double clamp_eps = 1e-12);

// Adjugate-over-determinant inverse; throws SingularInformationError when
// |det| <= 1e-300.
Inverse3 invert3(const InfoMatrix3& info);

enum class TestMethod { LRT, Score, Wald };

const char* method_name(TestMethod method);

struct TestResult {
    TestMethod method = TestMethod::LRT;
    double statistic = 0.0;
    int df = 0;
    double p_value = 1.0;
    // Common delta-hat (one entry) for LRT/Score, per-stratum delta-tilde for Wald.
    std::vector<double> delta;
};

// Chi-square survival function and lower-tail quantile, df >= 1.
double chisq_sf(double x, int df);
double chisq_quantile(double q, int df);

// The three homogeneity tests; df = J - 1.  The overloads taking fits avoid
// refitting when several statistics are computed on the same table.
TestResult lrt_test(const StratifiedTable& table);
TestResult lrt_test(const GlobalFit& global, const ConstrainedFit& constrained);
TestResult score_test(const StratifiedTable& table);
TestResult score_test(const StratifiedTable& table, const ConstrainedFit& constrained);
TestResult wald_test(const StratifiedTable& table);
TestResult wald_test(const StratifiedTable& table, const GlobalFit& global);

}  // namespace bilat

#endif  // BILAT_INFERENCE_HPP
