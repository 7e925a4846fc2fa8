#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "causumx/dag.hpp"
#include "causumx/patterns.hpp"
#include "causumx/tabular.hpp"

namespace causumx {

// Estimation knobs shared across the engine.
struct EngineConfig {
    std::size_t sampleSize = 1'000'000;
    double alpha = 0.05;
    std::size_t minArm = 10;
    int bins = 5;
    std::uint64_t seed = 0;
    unsigned threads = 0;  // 0 = hardware concurrency
};

struct CateEstimate {
    double cate = 0.0;
    double stdError = 0.0;
    double pValue = 1.0;
    std::size_t nTreated = 0;
    std::size_t nControl = 0;
    std::size_t nUsed = 0;
};

enum class SkipReason { Overlap, Collinear, EmptySubpopulation };

std::string_view skipReasonText(SkipReason r);

// Either an estimate or the reason the candidate was skipped.
struct CateOutcome {
    std::optional<CateEstimate> estimate;
    std::optional<SkipReason> skip;

    bool ok() const { return estimate.has_value(); }
    static CateOutcome skipped(SkipReason r) { return {std::nullopt, r}; }
    static CateOutcome of(CateEstimate e) { return {std::move(e), std::nullopt}; }
};

// indicator[i] = 1 iff row rows[i] matches pt.
std::vector<std::uint8_t> assignTreatment(const Dataset& d, std::span<const std::uint32_t> rows,
                                          const Pattern& pt);

// Uniform without-replacement sample of at most maxN row ids, deterministic
// given seed; ids come back in ascending order. A no-op when |rows| <= maxN.
std::vector<std::uint32_t> sampleRows(std::span<const std::uint32_t> rows, std::size_t maxN,
                                      std::uint64_t seed);

// Confounder-adjusted CATE of pt on q.avgAttr within the pg subpopulation:
// OLS of the outcome on [intercept, T, adjustment columns], T coefficient
// reported with its standard error and two-sided t-test p-value.
CateOutcome estimateCate(const Dataset& d, const QuerySpec& q, const Pattern& pg,
                         const Pattern& pt, const CausalDag& g, const EngineConfig& cfg);

// Same, for a precomputed subpopulation (rows must be the pg-filtered row
// set; pgText only feeds per-call seed derivation).
CateOutcome estimateCateOnRows(const Dataset& d, const QuerySpec& q,
                               std::span<const std::uint32_t> subpopRows,
                               const std::string& pgText, const Pattern& pt,
                               const CausalDag& g, const EngineConfig& cfg);

// Two-sided Student-t tail probability via the regularized incomplete beta.
double studentTTwoSidedP(double t, double degreesOfFreedom);
double incompleteBetaReg(double a, double b, double x);

}  // namespace causumx
