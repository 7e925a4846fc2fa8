#pragma once

#include <set>
#include <string>
#include <vector>

#include "causumx/patterns.hpp"
#include "causumx/tabular.hpp"

namespace causumx {

// Level-wise Apriori over equality predicates on the grouping attributes.
// Every returned pattern has row support >= max(1, ceil(tau * |D_phi|)).
std::vector<Pattern> mineGroupingPatterns(const Dataset& d, const QuerySpec& q,
                                          const std::set<std::string>& groupingAttrs,
                                          double tau);

// Keeps one pattern per distinct covered-group set: minimum length, ties by
// textual order. Patterns covering no group are dropped.
std::vector<Pattern> dedupGrouping(const std::vector<Pattern>& patterns, const Dataset& d,
                                   const QuerySpec& q, const AggregateView& view);

}  // namespace causumx
