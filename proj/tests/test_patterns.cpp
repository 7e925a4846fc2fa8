#include <doctest.h>

#include <set>
#include <unordered_set>

#include "causumx/common.hpp"
#include "causumx/patterns.hpp"
#include "testutil.hpp"

using namespace causumx;
using testutil::table;

TEST_SUITE_BEGIN("patterns");

TEST_CASE("canonicalization: predicate order does not matter") {
    const Pattern a = Pattern::create({SimplePredicate{"x", PredOp::Eq, std::string("1")},
                                       SimplePredicate{"a", PredOp::Eq, std::string("2")}});
    const Pattern b = Pattern::create({SimplePredicate{"a", PredOp::Eq, std::string("2")},
                                       SimplePredicate{"x", PredOp::Eq, std::string("1")}});
    CHECK(a == b);
    CHECK(PatternHash{}(a) == PatternHash{}(b));
    CHECK(a.text() == "a = 2 AND x = 1");
}

TEST_CASE("construction rejects conflicting equalities") {
    CHECK_FALSE(Pattern::tryCreate({SimplePredicate{"a", PredOp::Eq, std::string("1")},
                                    SimplePredicate{"a", PredOp::Eq, std::string("2")}}));
    CHECK_THROWS_AS(Pattern::create({SimplePredicate{"a", PredOp::Eq, std::string("1")},
                                     SimplePredicate{"a", PredOp::Eq, std::string("2")}}),
                    DataError);
    // Exact duplicates collapse.
    const Pattern p = Pattern::create({SimplePredicate{"a", PredOp::Eq, std::string("1")},
                                       SimplePredicate{"a", PredOp::Eq, std::string("1")}});
    CHECK(p.length() == 1);
}

TEST_CASE("construction rejects duplicate (attr, op) pairs") {
    CHECK_FALSE(Pattern::tryCreate({SimplePredicate{"a", PredOp::Le, 3.0},
                                    SimplePredicate{"a", PredOp::Le, 5.0}}));
    // Different ops on the same attribute are allowed at construction.
    CHECK(Pattern::tryCreate({SimplePredicate{"a", PredOp::Le, 5.0},
                              SimplePredicate{"a", PredOp::Gt, 3.0}}));
}

TEST_CASE("matches: empty pattern is the tautology") {
    const Dataset d = table("a\nx\n");
    CHECK(matches(Pattern{}, d, 0));
}

TEST_CASE("matches: conjunction over age and education") {
    const Dataset d = table(
        "Age,Education\n"
        "29,Master's degree\n"
        "40,Master's degree\n");
    const Pattern p = Pattern::create({SimplePredicate{"Age", PredOp::Lt, 35.0},
                                       SimplePredicate{"Education", PredOp::Eq,
                                                       std::string("Master's degree")}});
    CHECK(matches(p, d, 0));
    CHECK_FALSE(matches(p, d, 1));
}

TEST_CASE("matches: predicate over a missing cell is false") {
    const Dataset d = table("a,b\n,1\nx,\n");
    CHECK_FALSE(matches(testutil::eq("a", "x"), d, 0));
    CHECK_FALSE(matches(testutil::numericPred("b", PredOp::Ge, 0.0), d, 1));
}

TEST_CASE("matches: unknown attribute is a schema error") {
    const Dataset d = table("a\nx\n");
    CHECK_THROWS_AS(matches(testutil::eq("nope", "x"), d, 0), DataError);
}

TEST_CASE("matches equals a naive per-predicate loop on random data") {
    Rng rng(101);
    for (int iter = 0; iter < 40; ++iter) {
        const Dataset d = testutil::randomTable(rng, 25, {3, 4, 2}, 0.1);
        std::vector<SimplePredicate> preds;
        for (std::size_t a = 0; a < 3; ++a) {
            if (rng.nextUnit() < 0.5) continue;
            preds.push_back(SimplePredicate{"c" + std::to_string(a), PredOp::Eq,
                                            "v" + std::to_string(rng.nextBelow(4))});
        }
        auto maybe = Pattern::tryCreate(preds);
        if (!maybe) continue;
        const Pattern p = *maybe;
        for (std::size_t r = 0; r < d.rowCount; ++r) {
            bool expected = true;
            for (const auto& pred : p.predicates) {
                const std::string cell = d.cellText(r, d.columnIndex(pred.attr));
                if (cell.empty() || cell != std::get<std::string>(pred.value)) {
                    expected = false;
                    break;
                }
            }
            CHECK(matches(p, d, r) == expected);
        }
    }
}

TEST_CASE("monotonicity: adding a predicate never enlarges the matched set") {
    Rng rng(202);
    const Dataset d = testutil::randomTable(rng, 60, {3, 3, 3});
    for (int iter = 0; iter < 25; ++iter) {
        const Pattern base = testutil::eq("c0", "v" + std::to_string(rng.nextBelow(3)));
        auto extended = Pattern::tryCreate(
            {base.predicates[0],
             SimplePredicate{"c1", PredOp::Eq, "v" + std::to_string(rng.nextBelow(3))}});
        REQUIRE(extended);
        for (std::size_t r = 0; r < d.rowCount; ++r) {
            if (matches(*extended, d, r)) CHECK(matches(base, d, r));
        }
    }
}

namespace {

QuerySpec soQuery() { return QuerySpec{{"Country"}, "Salary", std::nullopt}; }

Dataset soShaped() {
    return table(
        "Country,Continent,Salary\n"
        "DE,Europe,60\n"
        "FR,Europe,55\n"
        "US,NA,100\n"
        "IN,Asia,20\n"
        "DE,Europe,70\n");
}

}  // namespace

TEST_CASE("covered_groups: tautology covers all groups") {
    const Dataset d = soShaped();
    const QuerySpec q = soQuery();
    const AggregateView v = evaluateQuery(d, q);
    const auto covered = coveredGroups(Pattern{}, d, q, v);
    CHECK(covered.size() == v.m());
}

TEST_CASE("covered_groups: continent pattern selects the European countries") {
    const Dataset d = soShaped();
    const QuerySpec q = soQuery();
    const AggregateView v = evaluateQuery(d, q);
    const auto covered = coveredGroups(testutil::eq("Continent", "Europe"), d, q, v);
    std::set<std::string> names;
    for (std::uint32_t i : covered) names.insert(v.groups[i].key[0]);
    CHECK(names == std::set<std::string>{"DE", "FR"});
}

TEST_CASE("covered_groups: non-FD attribute is a contract violation") {
    const Dataset d = table(
        "Country,Gender,Salary\n"
        "US,Male,10\n"
        "US,Female,20\n");
    const QuerySpec q = soQuery();
    const AggregateView v = evaluateQuery(d, q);
    CHECK_THROWS_AS(coveredGroups(testutil::eq("Gender", "Male"), d, q, v), DataError);
}

TEST_CASE("covered_groups equals an exhaustive per-row oracle") {
    Rng rng(303);
    for (int iter = 0; iter < 20; ++iter) {
        // c1 is derived from c0, so the FD c0 -> c1 holds by construction.
        std::string csv = "c0,c1,y\n";
        const std::size_t rows = 100;
        for (std::size_t r = 0; r < rows; ++r) {
            const std::size_t g = rng.nextBelow(6);
            csv += "g" + std::to_string(g) + ",h" + std::to_string(g % 3) + "," +
                   std::to_string(rng.nextBelow(50)) + "\n";
        }
        const Dataset d = table(csv);
        const QuerySpec q{{"c0"}, "y", std::nullopt};
        const AggregateView v = evaluateQuery(d, q);
        const Pattern pg = testutil::eq("c1", "h" + std::to_string(rng.nextBelow(3)));
        const auto covered = coveredGroups(pg, d, q, v);

        // Oracle: a group is covered iff every one of its rows matches.
        std::set<std::uint32_t> expected;
        for (std::uint32_t i = 0; i < v.m(); ++i) {
            bool all = true;
            bool any = false;
            for (std::size_t r = 0; r < d.rowCount; ++r) {
                if (d.cellText(r, 0) != v.groups[i].key[0]) continue;
                any = true;
                if (!matches(pg, d, r)) all = false;
            }
            if (any && all) expected.insert(i);
        }
        CHECK(std::set<std::uint32_t>(covered.begin(), covered.end()) == expected);

        // FD consistency: all rows of one group agree on the pattern.
        for (std::uint32_t i = 0; i < v.m(); ++i) {
            std::set<bool> values;
            for (std::size_t r = 0; r < d.rowCount; ++r) {
                if (d.cellText(r, 0) == v.groups[i].key[0]) values.insert(matches(pg, d, r));
            }
            CHECK(values.size() == 1);
        }
    }
}

TEST_CASE("bin cuts: equal-frequency thresholds, deduplicated") {
    const Dataset d = table("x\n1\n2\n3\n4\n5\n6\n7\n8\n9\n10\n");
    const auto cuts = binCuts(d, "x", 5);
    CHECK(cuts == std::vector<double>{3, 5, 7, 9});
    // Constant column yields no cuts.
    const Dataset c = table("x\n4\n4\n4\n");
    CHECK(binCuts(c, "x", 5).empty());
}

TEST_CASE("pattern text parse and render round trip") {
    const Dataset d = table("Age,Education,Salary\n29,Master's degree,10\n50,PhD,20\n");
    const std::string text = "Age <= 35 AND Education = \"Master's degree\"";
    const Pattern p = parsePattern(text, d);
    CHECK(p.length() == 2);
    CHECK(p.text() == text);
    CHECK(parsePattern(p.text(), d) == p);

    CHECK_THROWS_AS(parsePattern("Age <= ", d), DataError);
    CHECK_THROWS_AS(parsePattern("Education < PhD", d), DataError);
    CHECK_THROWS_AS(parsePattern("Age <= 35 AND", d), DataError);
    CHECK_THROWS_AS(parsePattern("Age ~ 35", d), DataError);
}

TEST_SUITE_END();
