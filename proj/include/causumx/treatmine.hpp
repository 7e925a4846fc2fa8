#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "causumx/dag.hpp"
#include "causumx/effect.hpp"
#include "causumx/patterns.hpp"
#include "causumx/tabular.hpp"

namespace causumx {

enum class Direction { Positive, Negative };

struct LatticeNode {
    Pattern pattern;
    CateEstimate estimate;
    std::size_t level = 1;  // == pattern.length()
};

struct ScoredTreatment {
    Pattern pattern;
    CateEstimate estimate;
};

struct ExplanationCandidate {
    Pattern groupingPattern;
    std::vector<std::uint32_t> covered;  // view indices, sorted
    std::optional<ScoredTreatment> positive;
    std::optional<ScoredTreatment> negative;
    double weight = 0.0;  // |positive.cate| + |negative.cate|
};

struct TreatmentSearchStats {
    std::size_t estimations = 0;
    std::size_t cacheHits = 0;
    std::size_t levelsExplored = 0;
};

// Memoizes (pg, pt) estimates so the positive and negative searches over one
// grouping pattern never recompute a pair.
class CateCache {
public:
    using Compute = std::function<CateOutcome(const Pattern&)>;
    CateCache(Compute compute) : compute_(std::move(compute)) {}
    const CateOutcome& get(const Pattern& pt, TreatmentSearchStats& stats);

private:
    Compute compute_;
    std::unordered_map<Pattern, CateOutcome, PatternHash> memo_;
};

// Single-predicate treatment candidates over attributes that are causal
// ancestors of the outcome: one '=' per active-domain value for categorical
// attributes, threshold pairs per bin cut for numeric ones.
std::vector<Pattern> genLevel1(const Dataset& d, const QuerySpec& q,
                               const std::set<std::string>& treatmentAttrs, const CausalDag& g,
                               const EngineConfig& cfg);

// Pure filter stage: keep estimates with the requested sign, p < alpha and
// |cate| >= nearZeroEps, then the best ceil(50%) by |cate| (everything when
// at most two survive).
std::vector<LatticeNode> selectSurvivors(std::vector<LatticeNode> evaluated, Direction sigma,
                                         double alpha, double nearZeroEps);

// Estimates each candidate (through the cache), drops skips, then applies
// selectSurvivors.
std::vector<LatticeNode> filterCandidates(const std::vector<Pattern>& candidates,
                                          std::size_t level, CateCache& cache, Direction sigma,
                                          double alpha, double nearZeroEps,
                                          TreatmentSearchStats& stats);

// Length-(l+1) candidates whose every length-l sub-pattern is a node;
// at most one predicate per attribute; each candidate emitted once.
std::vector<Pattern> genNextLevel(const std::vector<LatticeNode>& nodes);

// Level-wise search for the extreme-CATE treatment pattern in one direction.
// Stops at the first level whose best |cate| does not exceed the running
// maximum. Ties favor shorter patterns, then textual order.
std::optional<ScoredTreatment> getTopTreatment(const Dataset& d, const QuerySpec& q,
                                               const Pattern& pg,
                                               const std::set<std::string>& treatmentAttrs,
                                               const CausalDag& g, Direction sigma,
                                               const EngineConfig& cfg, CateCache& cache,
                                               TreatmentSearchStats* stats = nullptr);

// Runs both directional searches per grouping pattern (in parallel across
// patterns) and assembles weighted candidates; zero-weight ones are dropped.
std::vector<ExplanationCandidate> buildCandidates(const Dataset& d, const QuerySpec& q,
                                                  const std::vector<Pattern>& groupingPatterns,
                                                  const std::set<std::string>& treatmentAttrs,
                                                  const CausalDag& g, const AggregateView& view,
                                                  const EngineConfig& cfg);

// 0.01 * stddev of the outcome over the subpopulation.
double nearZeroEpsilon(const Dataset& d, const QuerySpec& q,
                       std::span<const std::uint32_t> subpopRows);

}  // namespace causumx
