#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "causumx/pipeline.hpp"

namespace causumx {

// Exhaustive reference: every satisfiable equality conjunction over the
// grouping attributes (no support threshold), every treatment pattern up to
// full length with full-data CATE, exact selection. Bounds: at most 6
// grouping attributes, 4 causal treatment attributes, 5 values each.
SummaryReport bruteForceSummarize(const Dataset& d, const QuerySpec& q, const CausalDag& g,
                                  std::size_t k, double theta, const EngineConfig& cfg);

// Reference frequent-pattern miner: direct enumeration with per-pattern
// support counting. Bounds: at most 8 attributes, 200 rows.
std::vector<Pattern> naiveFrequentPatterns(const Dataset& d,
                                           const std::vector<std::string>& attrs, double tau);

struct PrecisionRecall {
    double precision = 1.0;
    double recall = 1.0;
};

PrecisionRecall precisionRecall(const std::set<std::uint32_t>& found,
                                const std::set<std::uint32_t>& truth);

// Rank correlation in [-1, 1]; both sequences must order the same item set.
double kendallTau(const std::vector<std::string>& rankA, const std::vector<std::string>& rankB);

}  // namespace causumx
