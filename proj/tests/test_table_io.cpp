#include <doctest.h>

#include <sstream>

#include "bilat/table_io.hpp"

using namespace bilat;

#ifndef BILAT_DATA_DIR
#define BILAT_DATA_DIR "data"
#endif

TEST_CASE("bundled example file parses to the published counts") {
    const auto table = read_count_table_file(std::string(BILAT_DATA_DIR) + "/ome.csv");
    REQUIRE(table.n_strata() == 3);
    CHECK(table.labels[0] == "<2 years");
    CHECK(table.labels[2] == ">=6 years");
    CHECK(table.strata[0] == StratumCounts{8, 2, 8, 11, 2, 2});
    CHECK(table.strata[1] == StratumCounts{6, 6, 10, 3, 1, 5});
    CHECK(table.strata[2] == StratumCounts{0, 1, 3, 1, 0, 6});
}

TEST_CASE("round trip write then parse") {
    StratifiedTable t;
    t.strata = {StratumCounts{1, 2, 3, 4, 5, 6}, StratumCounts{0, 7, 1, 2, 0, 9}};
    t.labels = {"phase 1", "phase 2"};

    std::ostringstream out;
    write_count_table(out, t);
    std::istringstream in(out.str());
    const auto back = read_count_table(in);
    CHECK(back.strata == t.strata);
    CHECK(back.labels == t.labels);
}

TEST_CASE("group order within a stratum does not matter") {
    std::istringstream in(
        "stratum,group,m0,m1,m2\n"
        "s,2,4,5,6\n"
        "s,1,1,2,3\n");
    const auto t = read_count_table(in);
    CHECK(t.strata[0] == StratumCounts{1, 2, 3, 4, 5, 6});
}

TEST_CASE("parse errors carry diagnostics") {
    std::istringstream dup(
        "stratum,group,m0,m1,m2\n"
        "young,1,1,2,3\n"
        "young,2,4,5,6\n"
        "young,2,7,8,9\n");
    CHECK_THROWS_WITH_AS(read_count_table(dup),
                         "line 4: duplicate row for stratum 'young' group 2", ParseError);

    std::istringstream missing(
        "stratum,group,m0,m1,m2\n"
        "young,1,1,2,3\n");
    CHECK_THROWS_WITH_AS(read_count_table(missing), "stratum 'young' is missing group 2",
                         ParseError);

    std::istringstream bad_group(
        "stratum,group,m0,m1,m2\n"
        "young,3,1,2,3\n");
    CHECK_THROWS_AS(read_count_table(bad_group), ParseError);

    std::istringstream bad_count(
        "stratum,group,m0,m1,m2\n"
        "young,1,1,-2,3\n");
    CHECK_THROWS_AS(read_count_table(bad_count), ParseError);

    std::istringstream bad_header("a,b,c\nyoung,1,1,2,3\n");
    CHECK_THROWS_AS(read_count_table(bad_header), ParseError);

    std::istringstream empty("");
    CHECK_THROWS_AS(read_count_table(empty), ParseError);

    CHECK_THROWS_AS(read_count_table_file("/nonexistent/counts.csv"), ParseError);
}
