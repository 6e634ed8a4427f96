#include "bilat/table_io.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <map>
#include <ostream>
#include <vector>

namespace bilat {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (const char c : line) {
        if (c == ',') {
            fields.push_back(trim(field));
            field.clear();
        } else {
            field += c;
        }
    }
    fields.push_back(trim(field));
    return fields;
}

std::int64_t parse_count(const std::string& field, const char* name, int line_no) {
    if (field.empty())
        throw ParseError(std::string(name) + " is empty", line_no);
    std::size_t pos = 0;
    long long value = 0;
    try {
        value = std::stoll(field, &pos);
    } catch (const std::exception&) {
        throw ParseError(std::string(name) + " '" + field + "' is not an integer", line_no);
    }
    if (pos != field.size())
        throw ParseError(std::string(name) + " '" + field + "' is not an integer", line_no);
    if (value < 0)
        throw ParseError(std::string(name) + " must be nonnegative", line_no);
    return value;
}

}  // namespace

StratifiedTable read_count_table(std::istream& in) {
    std::string line;
    int line_no = 0;

    if (!std::getline(in, line))
        throw ParseError("empty input; expected header 'stratum,group,m0,m1,m2'");
    ++line_no;
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    const auto header = split_csv(line);
    const std::vector<std::string> expected = {"stratum", "group", "m0", "m1", "m2"};
    if (header.size() != 5 ||
        !std::equal(header.begin(), header.end(), expected.begin()))
        throw ParseError("expected header 'stratum,group,m0,m1,m2'", line_no);

    StratifiedTable table;
    std::map<std::string, std::size_t> index;     // label -> position
    std::vector<std::array<bool, 2>> seen_group;  // per stratum

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (trim(line).empty())
            continue;
        const auto fields = split_csv(line);
        if (fields.size() != 5)
            throw ParseError("expected 5 fields, found " + std::to_string(fields.size()),
                             line_no);
        const std::string& label = fields[0];
        if (label.empty())
            throw ParseError("stratum label is empty", line_no);
        if (fields[1] != "1" && fields[1] != "2")
            throw ParseError("group must be 1 or 2, found '" + fields[1] + "'", line_no);
        const int group = fields[1] == "1" ? 0 : 1;
        const std::int64_t m0 = parse_count(fields[2], "m0", line_no);
        const std::int64_t m1 = parse_count(fields[3], "m1", line_no);
        const std::int64_t m2 = parse_count(fields[4], "m2", line_no);
        if (m0 + m1 + m2 < 1)
            throw ParseError("stratum '" + label + "' group " + fields[1] +
                                 " has no patients",
                             line_no);

        auto [it, inserted] = index.try_emplace(label, table.strata.size());
        if (inserted) {
            table.strata.emplace_back();
            table.labels.push_back(label);
            seen_group.push_back({false, false});
        }
        const std::size_t j = it->second;
        if (seen_group[j][group])
            throw ParseError("duplicate row for stratum '" + label + "' group " + fields[1],
                             line_no);
        seen_group[j][group] = true;
        auto& counts = table.strata[j];
        if (group == 0) {
            counts.m0_g1 = m0;
            counts.m1_g1 = m1;
            counts.m2_g1 = m2;
        } else {
            counts.m0_g2 = m0;
            counts.m1_g2 = m1;
            counts.m2_g2 = m2;
        }
    }

    if (table.strata.empty())
        throw ParseError("no data rows found");
    for (std::size_t j = 0; j < table.strata.size(); ++j) {
        if (!seen_group[j][0] || !seen_group[j][1])
            throw ParseError("stratum '" + table.labels[j] + "' is missing group " +
                             (seen_group[j][0] ? "2" : "1"));
    }
    return table;
}

StratifiedTable read_count_table_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open '" + path + "'");
    return read_count_table(in);
}

void write_count_table(std::ostream& out, const StratifiedTable& table) {
    out << "stratum,group,m0,m1,m2\n";
    for (std::size_t j = 0; j < table.strata.size(); ++j) {
        const auto& s = table.strata[j];
        const std::string label = table.label(j);
        out << label << ",1," << s.m0_g1 << ',' << s.m1_g1 << ',' << s.m2_g1 << '\n';
        out << label << ",2," << s.m0_g2 << ',' << s.m1_g2 << ',' << s.m2_g2 << '\n';
    }
}

}  // namespace bilat
