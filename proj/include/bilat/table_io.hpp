#ifndef BILAT_TABLE_IO_HPP
#define BILAT_TABLE_IO_HPP

#include <iosfwd>
#include <string>

#include "bilat/counts.hpp"
#include "bilat/errors.hpp"

namespace bilat {

// Count-table CSV: header "stratum,group,m0,m1,m2", one row per
// (stratum, group) with group in {1, 2} and exactly two rows per stratum.
// Strata keep their order of first appearance.
StratifiedTable read_count_table(std::istream& in);
StratifiedTable read_count_table_file(const std::string& path);

void write_count_table(std::ostream& out, const StratifiedTable& table);

}  // namespace bilat

#endif  // BILAT_TABLE_IO_HPP
