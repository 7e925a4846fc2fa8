#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "causumx/effect.hpp"
#include "causumx/lpsolve.hpp"
#include "causumx/tabular.hpp"
#include "causumx/treatmine.hpp"

namespace causumx {

enum class Algorithm { CauSumX, BruteForce, Greedy };

Algorithm parseAlgorithm(const std::string& name);  // throws UsageError

struct RunConfig {
    std::string dataPath;
    std::string dagPath;
    std::vector<std::string> groupBy;
    std::string avgAttr;
    std::string whereClause;  // pattern syntax, empty = none

    std::size_t k = 5;
    double theta = 0.75;
    double tau = 0.1;
    std::size_t sampleSize = 1'000'000;
    double alpha = 0.05;
    std::size_t minArm = 10;
    int bins = 5;
    Algorithm algorithm = Algorithm::CauSumX;
    std::uint64_t seed = 0;
    std::string output = "text";  // text | json
    unsigned threads = 0;         // 0 = hardware concurrency

    EngineConfig engine() const;
    void validate() const;  // throws UsageError
};

struct PhaseTiming {
    std::string phase;
    double seconds = 0.0;
};

struct SummaryReport {
    QuerySpec query;
    AggregateView view;
    std::vector<ExplanationCandidate> selected;
    std::size_t coveredCount = 0;
    double coverageFraction = 0.0;
    double totalWeight = 0.0;
    bool sizeOk = true;
    bool coverageOk = true;
    bool noSolution = false;
    std::vector<PhaseTiming> timings;
};

SummaryReport runPipeline(const RunConfig& cfg);

// Assembles the report for an already-computed selection (shared by the
// pipeline and the brute-force reference).
SummaryReport makeReport(QuerySpec query, AggregateView view,
                         const std::vector<ExplanationCandidate>& candidates,
                         const std::vector<std::size_t>& selection, std::size_t k, double theta,
                         bool noSolution);

// One sentence pair per selected candidate; effect sizes at three significant
// digits, p-values as power-of-ten upper bounds.
std::string renderText(const SummaryReport& r, const RunConfig& cfg);

// Canonical document: sorted keys, 12-significant-digit floats, trailing
// newline; byte-identical across runs with equal config and seed.
std::string renderJson(const SummaryReport& r, const RunConfig& cfg);

}  // namespace causumx
