#include "bilat/counts.hpp"

#include <stdexcept>

namespace bilat {

void validate(const StratumCounts& counts) {
    const std::int64_t cells[6] = {counts.m0_g1, counts.m1_g1, counts.m2_g1,
                                   counts.m0_g2, counts.m1_g2, counts.m2_g2};
    for (const auto c : cells)
        if (c < 0)
            throw std::invalid_argument("stratum counts must be nonnegative");
    if (counts.total_g1() < 1 || counts.total_g2() < 1)
        throw std::invalid_argument("each group needs at least one patient");
}

void validate(const StratifiedTable& table) {
    if (table.strata.empty())
        throw std::invalid_argument("table needs at least one stratum");
    if (!table.labels.empty() && table.labels.size() != table.strata.size())
        throw std::invalid_argument("labels must match the number of strata");
    for (const auto& s : table.strata)
        validate(s);
}

bool is_nondegenerate(const StratifiedTable& table) {
    for (const auto& s : table.strata)
        if (s.responders_g1() == 0 || s.responders_g2() == 0)
            return false;
    return !table.strata.empty();
}

}  // namespace bilat
