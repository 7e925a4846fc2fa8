#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "causumx/tabular.hpp"
#include "causumx/treatmine.hpp"

namespace causumx {

// Selection problem over candidate explanations: pick at most k candidates
// whose covered groups total at least theta * m, maximizing total weight.
struct IlpInstance {
    std::size_t m = 0;
    std::vector<double> weights;
    std::vector<std::vector<std::uint32_t>> coverage;  // per candidate, sorted group indices
    std::size_t k = 0;
    double theta = 0.0;

    std::size_t candidateCount() const { return weights.size(); }
};

struct FractionalSolution {
    std::vector<double> g;  // per candidate, in [0,1]
    std::vector<double> t;  // per group, in [0,1]
    double objective = 0.0;
};

// Number of groups a selection must reach: ceil(theta * m) up to rounding slack.
std::size_t coverageTarget(double theta, std::size_t m);

IlpInstance buildIlp(const std::vector<ExplanationCandidate>& cands, const AggregateView& view,
                     std::size_t k, double theta);

// Optimal solution of the continuous relaxation, or nullopt when infeasible.
// Groups with identical covering-candidate sets are aggregated before
// solving, which preserves both feasibility and the optimum exactly.
std::optional<FractionalSolution> solveLpRelaxation(const IlpInstance& ilp);

// Draw k candidates independently, candidate j with probability g_j / k and
// "no pick" absorbing the rest; duplicates collapse. Sorted candidate indices.
std::vector<std::size_t> randomizedRounding(const FractionalSolution& frac,
                                            const IlpInstance& ilp, std::uint64_t seed);

// Iterative selection by weight with a coverage-gain preference while the
// coverage target is unmet. No coverage guarantee.
std::vector<std::size_t> greedySelect(const IlpInstance& ilp);

// Exhaustive search over subsets of size <= k (bounds: l <= 25, k <= 6).
// Ties resolved toward the lexicographically smallest index set.
std::optional<std::vector<std::size_t>> solveIlpExact(const IlpInstance& ilp);

double selectionWeight(const IlpInstance& ilp, const std::vector<std::size_t>& selection);
std::size_t selectionCoverage(const IlpInstance& ilp, const std::vector<std::size_t>& selection);

}  // namespace causumx
