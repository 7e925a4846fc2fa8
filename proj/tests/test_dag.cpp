#include <doctest.h>

#include <set>

#include "causumx/common.hpp"
#include "causumx/dag.hpp"

using namespace causumx;

TEST_SUITE_BEGIN("dag");

TEST_CASE("parse: smallest DAG") {
    const CausalDag g = parseDot("digraph g { A -> B; }");
    CHECK(g.nodes() == std::vector<std::string>{"A", "B"});
    CHECK(g.edges() == std::set<std::pair<std::string, std::string>>{{"A", "B"}});
}

TEST_CASE("parse: 2-cycle is rejected with the cycle listed") {
    CHECK_THROWS_WITH_AS(parseDot("digraph g { A -> B; B -> A; }"), doctest::Contains("cycle"),
                         DataError);
}

TEST_CASE("parse: shared child accumulates parents") {
    const CausalDag g = parseDot("digraph g { Education -> Role; Age -> Role; }");
    CHECK(g.parents("Role") == std::vector<std::string>{"Age", "Education"});
}

TEST_CASE("parse: quoted identifiers, chains, isolated nodes, comments") {
    const CausalDag g = parseDot(
        "digraph example {\n"
        "  // a comment\n"
        "  \"years coding\" -> Role -> Salary\n"
        "  Hobby;\n"
        "}\n");
    CHECK(g.hasNode("Hobby"));
    CHECK(g.parents("Salary") == std::vector<std::string>{"Role"});
    CHECK(g.parents("Role") == std::vector<std::string>{"years coding"});
}

TEST_CASE("parse: syntax errors carry line numbers") {
    CHECK_THROWS_WITH_AS(parseDot("digraph g {\nA -> ;\n}"), doctest::Contains("line 2"), DataError);
    CHECK_THROWS_AS(parseDot("graph g { A -- B; }"), DataError);
    CHECK_THROWS_AS(parseDot("digraph g { A -> B;"), DataError);
}

TEST_CASE("serialize then parse is idempotent") {
    const CausalDag g = parseDot("digraph g { B -> C; A -> C; D; }");
    const CausalDag g2 = parseDot(serializeDot(g));
    CHECK(g.nodes() == g2.nodes());
    CHECK(g.edges() == g2.edges());
    CHECK(serializeDot(g) == serializeDot(g2));
}

TEST_CASE("adjustment set: treatment without parents has no confounders") {
    const CausalDag g = parseDot("digraph g { T -> Y; }");
    CHECK(adjustmentSet(g, {"T"}, "Y").empty());
}

TEST_CASE("adjustment set: parents of the treatment") {
    const CausalDag g = parseDot(
        "digraph g { Gender -> Education; EducationParents -> Education; Country -> Education; "
        "Education -> Salary; }");
    CHECK(adjustmentSet(g, {"Education"}, "Salary") ==
          std::vector<std::string>{"Country", "EducationParents", "Gender"});
}

TEST_CASE("adjustment set: union across a multi-attribute treatment") {
    const CausalDag g = parseDot("digraph g { C -> T1; C -> T2; D -> T2; T1 -> Y; T2 -> Y; }");
    CHECK(adjustmentSet(g, {"T1", "T2"}, "Y") == std::vector<std::string>{"C", "D"});
    // A treatment that parents another treatment is excluded from Z.
    const CausalDag g2 = parseDot("digraph g { T1 -> T2; C -> T2; T2 -> Y; T1 -> Y; }");
    CHECK(adjustmentSet(g2, {"T1", "T2"}, "Y") == std::vector<std::string>{"C"});
}

TEST_CASE("adjustment set: unknown node is a schema error") {
    const CausalDag g = parseDot("digraph g { T -> Y; }");
    CHECK_THROWS_AS(adjustmentSet(g, {"missing"}, "Y"), DataError);
    CHECK_THROWS_AS(adjustmentSet(g, {"T"}, "missing"), DataError);
}

TEST_CASE("ancestors: isolated node has none; chains are transitive") {
    const CausalDag g = parseDot("digraph g { A -> B; B -> C; D; }");
    CHECK(causalAncestors(g, "D").empty());
    CHECK(causalAncestors(g, "C") == std::set<std::string>{"A", "B"});
    CHECK_THROWS_AS(causalAncestors(g, "missing"), DataError);
}

TEST_CASE("ancestors match a transitive-closure oracle on random DAGs") {
    Rng rng(42);
    for (int iter = 0; iter < 30; ++iter) {
        const std::size_t n = 4 + rng.nextBelow(7);
        std::vector<std::string> nodes;
        for (std::size_t i = 0; i < n; ++i) nodes.push_back("n" + std::to_string(i));
        // Edges only from lower to higher index keep the graph acyclic.
        std::set<std::pair<std::string, std::string>> edges;
        std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                if (rng.nextUnit() < 0.3) {
                    edges.emplace(nodes[i], nodes[j]);
                    adj[i][j] = true;
                }
            }
        }
        const CausalDag g = CausalDag::create(nodes, edges);

        // Floyd-Warshall reachability.
        std::vector<std::vector<bool>> reach = adj;
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    if (reach[i][k] && reach[k][j]) reach[i][j] = true;
                }
            }
        }
        const std::size_t target = rng.nextBelow(n);
        std::set<std::string> expected;
        for (std::size_t i = 0; i < n; ++i) {
            if (reach[i][target]) expected.insert(nodes[i]);
        }
        CHECK(causalAncestors(g, nodes[target]) == expected);
    }
}

TEST_CASE("ancestors are monotone under edge addition") {
    const CausalDag g1 = parseDot("digraph g { A -> B; C; }");
    const CausalDag g2 = parseDot("digraph g { A -> B; C -> A; }");
    const auto before = causalAncestors(g1, "B");
    const auto after = causalAncestors(g2, "B");
    for (const auto& node : before) CHECK(after.count(node));
}

TEST_SUITE_END();
