#ifndef BILAT_COUNTS_HPP
#define BILAT_COUNTS_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace bilat {

// Patients with 0, 1 or 2 responding sites in one stratum, by group.
// Group 1 is the reference group (denominator of the proportion ratio).
struct StratumCounts {
    std::int64_t m0_g1 = 0;
    std::int64_t m1_g1 = 0;
    std::int64_t m2_g1 = 0;
    std::int64_t m0_g2 = 0;
    std::int64_t m1_g2 = 0;
    std::int64_t m2_g2 = 0;

    std::int64_t total_g1() const { return m0_g1 + m1_g1 + m2_g1; }
    std::int64_t total_g2() const { return m0_g2 + m1_g2 + m2_g2; }
    std::int64_t responders_g1() const { return m1_g1 + m2_g1; }
    std::int64_t responders_g2() const { return m1_g2 + m2_g2; }

    // Pooled unilateral / bilateral responder counts (both groups).
    std::int64_t unilateral() const { return m1_g1 + m1_g2; }
    std::int64_t bilateral() const { return m2_g1 + m2_g2; }
    std::int64_t responders() const { return unilateral() + bilateral(); }

    bool operator==(const StratumCounts&) const = default;
};

struct StratifiedTable {
    std::vector<StratumCounts> strata;
    std::vector<std::string> labels;  // optional, parallel to strata when non-empty

    std::size_t n_strata() const { return strata.size(); }
    std::string label(std::size_t j) const {
        return j < labels.size() ? labels[j] : "stratum " + std::to_string(j + 1);
    }
};

// Throw std::invalid_argument unless all counts are nonnegative and each
// group total is at least one.
void validate(const StratumCounts& counts);
void validate(const StratifiedTable& table);

// Every group in every stratum has at least one responder.
bool is_nondegenerate(const StratifiedTable& table);

}  // namespace bilat

#endif  // BILAT_COUNTS_HPP
