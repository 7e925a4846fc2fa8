#include <doctest.h>

#include <map>
#include <set>

#include "causumx/common.hpp"
#include "causumx/patterns.hpp"
#include "causumx/tabular.hpp"
#include "testutil.hpp"

using namespace causumx;
using testutil::table;

TEST_SUITE_BEGIN("tabular");

TEST_CASE("kind inference: numeric iff every non-missing cell parses") {
    const Dataset d = table("a,b\n1,x\n2,y\n");
    CHECK(d.rowCount == 2);
    CHECK(d.column("a").kind == AttrKind::Numeric);
    CHECK(d.column("b").kind == AttrKind::Categorical);
}

TEST_CASE("kind inference: mixed parse makes a column categorical") {
    const Dataset d = table("a\n1\nz\n");
    CHECK(d.column("a").kind == AttrKind::Categorical);
    CHECK(d.activeDomain("a") == std::vector<std::string>{"1", "z"});
}

TEST_CASE("kind overrides win over inference") {
    std::map<std::string, AttrKind> overrides{{"a", AttrKind::Categorical}};
    const Dataset d = parseCsv("a\n1\n2\n", overrides);
    CHECK(d.column("a").kind == AttrKind::Categorical);
}

TEST_CASE("missing cells are empty strings; domains exclude them") {
    const Dataset d = table("a,b\n1,\n,x\n3,x\n");
    CHECK(d.column("a").kind == AttrKind::Numeric);
    CHECK(d.column("a").isMissing(1));
    CHECK(d.column("b").isMissing(0));
    CHECK(d.activeDomain("b") == std::vector<std::string>{"x"});
}

TEST_CASE("ragged rows fail with the row index") {
    CHECK_THROWS_WITH_AS(table("a,b\n1,2\n3\n"), doctest::Contains("row 2"), DataError);
}

TEST_CASE("duplicate header names rejected") {
    CHECK_THROWS_WITH_AS(table("a,a\n1,2\n"), doctest::Contains("duplicate"), DataError);
}

TEST_CASE("quoted fields: separators, escaped quotes, newlines") {
    const Dataset d = table("a,b\n\"x,y\",\"he said \"\"hi\"\"\"\n\"line\nbreak\",z\n");
    CHECK(d.rowCount == 2);
    CHECK(d.cellText(0, 0) == "x,y");
    CHECK(d.cellText(0, 1) == "he said \"hi\"");
    CHECK(d.cellText(1, 0) == "line\nbreak");
}

TEST_CASE("evaluate_query: arithmetic means, sorted group order") {
    const Dataset d = table("Country,Salary\nUS,10\nUS,20\nIN,5\n");
    QuerySpec q{{"Country"}, "Salary", std::nullopt};
    const AggregateView v = evaluateQuery(d, q);
    REQUIRE(v.m() == 2);
    CHECK(v.groups[0].key == std::vector<std::string>{"IN"});
    CHECK(v.groups[0].avg == doctest::Approx(5.0));
    CHECK(v.groups[0].count == 1);
    CHECK(v.groups[1].key == std::vector<std::string>{"US"});
    CHECK(v.groups[1].avg == doctest::Approx(15.0));
    CHECK(v.groups[1].count == 2);
}

TEST_CASE("evaluate_query: filter semantics") {
    const Dataset d = table("Country,Salary\nUS,10\nUS,20\nIN,5\n");
    QuerySpec q{{"Country"}, "Salary", testutil::eq("Country", "US")};
    const AggregateView v = evaluateQuery(d, q);
    REQUIRE(v.m() == 1);
    CHECK(v.groups[0].key == std::vector<std::string>{"US"});
    CHECK(v.groups[0].avg == doctest::Approx(15.0));
}

TEST_CASE("evaluate_query matches an independent two-pass mean") {
    const Dataset d = table("g,y\na,1\nb,10\na,3\nb,30\n");
    QuerySpec q{{"g"}, "y", std::nullopt};
    const AggregateView v = evaluateQuery(d, q);

    // Oracle: collect values per key, then average in a second pass.
    std::map<std::string, std::vector<double>> byKey;
    for (std::size_t r = 0; r < d.rowCount; ++r) {
        byKey[d.cellText(r, 0)].push_back(d.column("y").nums[r]);
    }
    REQUIRE(v.m() == byKey.size());
    std::size_t i = 0;
    for (const auto& [key, values] : byKey) {
        double sum = 0.0;
        for (double x : values) sum += x;
        CHECK(v.groups[i].key[0] == key);
        CHECK(v.groups[i].avg == doctest::Approx(sum / double(values.size())));
        ++i;
    }
}

TEST_CASE("evaluate_query: group counts sum to surviving row count") {
    Rng rng(7);
    const Dataset d = testutil::randomTable(rng, 120, {3, 4}, 0.15);
    // Add a numeric outcome with some missing cells.
    std::string csv = "g,y\n";
    for (std::size_t r = 0; r < d.rowCount; ++r) {
        csv += d.cellText(r, 0).empty() ? "" : d.cellText(r, 0);
        csv += ',';
        if (rng.nextUnit() < 0.2) csv += "";
        else csv += std::to_string(r);
        csv += '\n';
    }
    const Dataset d2 = table(csv);
    QuerySpec q{{"g"}, "y", std::nullopt};
    std::size_t expected = 0;
    for (std::size_t r = 0; r < d2.rowCount; ++r) {
        if (!d2.column("g").isMissing(r) && !d2.column("y").isMissing(r)) ++expected;
    }
    if (expected == 0) return;
    const AggregateView v = evaluateQuery(d2, q);
    std::size_t total = 0;
    for (const auto& g : v.groups) total += g.count;
    CHECK(total == expected);
}

TEST_CASE("evaluate_query: empty view is an error") {
    const Dataset d = table("g,y\na,\n");
    QuerySpec q{{"g"}, "y", std::nullopt};
    CHECK_THROWS_AS(evaluateQuery(d, q), DataError);
}

TEST_CASE("query validation") {
    const Dataset d = table("g,y\na,1\n");
    CHECK_THROWS_AS(validateQuery(d, QuerySpec{{}, "y", std::nullopt}), DataError);
    CHECK_THROWS_AS(validateQuery(d, QuerySpec{{"y"}, "y", std::nullopt}), DataError);
    CHECK_THROWS_AS(validateQuery(d, QuerySpec{{"g"}, "g", std::nullopt}), DataError);
    CHECK_THROWS_AS(validateQuery(d, QuerySpec{{"missing"}, "y", std::nullopt}), DataError);
}

TEST_CASE("check_fd: constant per key holds") {
    const Dataset d = table("Country,Continent\nUS,N.America\nUS,N.America\nIndia,Asia\n");
    CHECK(checkFd(d, {"Country"}, "Continent"));
}

TEST_CASE("check_fd: per-key disagreement fails") {
    const Dataset d = table(
        "Country,Gender\n"
        "US,Male\n"
        "US,Non-binary\n"
        "India,Male\n");
    CHECK_FALSE(checkFd(d, {"Country"}, "Gender"));
}

TEST_CASE("check_fd is reflexive: w inside the key set") {
    Rng rng(11);
    const Dataset d = testutil::randomTable(rng, 40, {3, 3});
    CHECK(checkFd(d, {"c0", "c1"}, "c0"));
    CHECK(checkFd(d, {"c0"}, "c0"));
}

TEST_CASE("check_fd matches a hash-join oracle on random tables") {
    Rng rng(13);
    for (int iter = 0; iter < 30; ++iter) {
        const Dataset d = testutil::randomTable(rng, 50, {2, 3, 4}, 0.1);
        const std::vector<std::string> gb{"c0"};
        const std::string w = "c" + std::to_string(1 + rng.nextBelow(2));

        // Oracle: brute-force pairwise comparison over all row pairs.
        bool expected = true;
        for (std::size_t i = 0; i < d.rowCount && expected; ++i) {
            for (std::size_t j = i + 1; j < d.rowCount && expected; ++j) {
                if (d.cellText(i, 0) != d.cellText(j, 0)) continue;
                if (d.cellText(i, d.columnIndex(w)) != d.cellText(j, d.columnIndex(w))) {
                    expected = false;
                }
            }
        }
        CHECK(checkFd(d, gb, w) == expected);
    }
}

TEST_CASE("partition_attributes: FD attributes join the grouping side") {
    const Dataset d = table(
        "Country,Continent,Age,Salary\n"
        "US,NA,30,100\n"
        "US,NA,40,120\n"
        "IN,Asia,25,30\n");
    QuerySpec q{{"Country"}, "Salary", std::nullopt};
    const AttributePartition part = partitionAttributes(d, q);
    CHECK(part.grouping == std::set<std::string>{"Country", "Continent"});
    CHECK(part.treatment == std::set<std::string>{"Age"});
}

TEST_CASE("partition_attributes: single column plus outcome") {
    const Dataset d = table("g,y\na,1\nb,2\n");
    QuerySpec q{{"g"}, "y", std::nullopt};
    const AttributePartition part = partitionAttributes(d, q);
    CHECK(part.grouping == std::set<std::string>{"g"});
    CHECK(part.treatment.empty());
}

TEST_CASE("partition_attributes is a partition of schema minus the outcome") {
    Rng rng(17);
    for (int iter = 0; iter < 20; ++iter) {
        Dataset d = testutil::randomTable(rng, 30, {2, 2, 3, 4});
        // Append a numeric outcome.
        std::string csv = renderCsv(d);
        std::string out = "c0,c1,c2,c3,y\n";
        std::size_t pos = csv.find('\n') + 1;
        std::size_t row = 0;
        while (pos < csv.size()) {
            const std::size_t next = csv.find('\n', pos);
            out += csv.substr(pos, next - pos) + "," + std::to_string(row++) + "\n";
            pos = next + 1;
        }
        d = table(out);
        QuerySpec q{{"c0"}, "y", std::nullopt};
        const AttributePartition part = partitionAttributes(d, q);
        for (const auto& attr : d.schema) {
            if (attr == "y") {
                CHECK_FALSE(part.grouping.count(attr));
                CHECK_FALSE(part.treatment.count(attr));
            } else {
                CHECK(part.grouping.count(attr) + part.treatment.count(attr) == 1);
                // Cross-check membership against the FD oracle.
                if (attr != "c0") {
                    CHECK(part.grouping.count(attr) == (checkFd(d, {"c0"}, attr) ? 1u : 0u));
                }
            }
        }
    }
}

TEST_CASE("CSV round trip: load, serialize, reload") {
    const std::string csv =
        "name,score,note\n"
        "alice,1.5,\"likes, commas\"\n"
        "bob,,plain\n"
        ",3.25,\"quote \"\" inside\"\n";
    const Dataset d1 = table(csv);
    const Dataset d2 = table(renderCsv(d1));
    REQUIRE(d1.rowCount == d2.rowCount);
    REQUIRE(d1.schema == d2.schema);
    for (std::size_t r = 0; r < d1.rowCount; ++r) {
        for (std::size_t c = 0; c < d1.schema.size(); ++c) {
            CHECK(d1.cellText(r, c) == d2.cellText(r, c));
        }
    }
    for (std::size_t c = 0; c < d1.schema.size(); ++c) {
        CHECK(d1.columns[c].kind == d2.columns[c].kind);
        CHECK(d1.activeDomain(d1.schema[c]) == d2.activeDomain(d2.schema[c]));
    }
}

TEST_CASE("filterDataset rebuilds dictionaries") {
    const Dataset d = table("g,y\na,1\nb,2\nc,3\n");
    const Dataset f = filterDataset(d, testutil::eq("g", "b"));
    CHECK(f.rowCount == 1);
    CHECK(f.activeDomain("g") == std::vector<std::string>{"b"});
}

TEST_SUITE_END();
