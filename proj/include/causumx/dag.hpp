#pragma once

#include <set>
#include <string>
#include <vector>

namespace causumx {

class CausalDag {
public:
    // Throws DataError when an edge endpoint is undeclared or a cycle exists.
    static CausalDag create(std::vector<std::string> nodes,
                            std::set<std::pair<std::string, std::string>> edges);

    const std::vector<std::string>& nodes() const { return nodes_; }
    const std::set<std::pair<std::string, std::string>>& edges() const { return edges_; }

    bool hasNode(const std::string& name) const;
    // Parents of a declared node, sorted. Throws DataError on unknown node.
    std::vector<std::string> parents(const std::string& node) const;
    // Same, but unknown nodes act as isolated (partial DAGs degrade gracefully).
    std::vector<std::string> parentsOrEmpty(const std::string& node) const;

private:
    std::vector<std::string> nodes_;  // sorted
    std::set<std::pair<std::string, std::string>> edges_;
};

// DOT subset: `digraph name? { A -> B; C; }`, identifiers bare or
// double-quoted, semicolons optional, chains (A -> B -> C) allowed.
CausalDag parseDot(const std::string& text);
std::string serializeDot(const CausalDag& g);

// Union of DAG parents over all treatment attributes, minus the treatments
// and the outcome; sorted. Throws DataError on unknown nodes.
std::vector<std::string> adjustmentSet(const CausalDag& g,
                                       const std::vector<std::string>& treatmentAttrs,
                                       const std::string& outcome);

// All nodes with a directed path to `node` (excluded itself), sorted.
std::set<std::string> causalAncestors(const CausalDag& g, const std::string& node);

}  // namespace causumx
