#include "causumx/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "causumx/common.hpp"
#include "causumx/dag.hpp"
#include "causumx/groupmine.hpp"

namespace causumx {

namespace {

// Every satisfiable equality conjunction over `attrs`, one value choice per
// included attribute.
std::vector<Pattern> enumerateEqualityPatterns(const Dataset& d,
                                               const std::vector<std::string>& attrs) {
    std::vector<Pattern> out;
    std::vector<SimplePredicate> current;
    std::function<void(std::size_t)> recurse = [&](std::size_t idx) {
        if (idx == attrs.size()) {
            if (!current.empty()) out.push_back(Pattern::create(current));
            return;
        }
        recurse(idx + 1);  // skip this attribute
        const Column& col = d.column(attrs[idx]);
        for (const auto& value : col.dict) {
            current.push_back(SimplePredicate{attrs[idx], PredOp::Eq, value});
            recurse(idx + 1);
            current.pop_back();
        }
    };
    recurse(0);
    return out;
}

// Full treatment-pattern space for the brute-force reference: conjunctions
// with at most one predicate per attribute, categorical equalities and
// binned thresholds, all lengths.
std::vector<Pattern> enumerateTreatmentPatterns(const Dataset& d,
                                                const std::vector<std::string>& attrs, int bins) {
    std::vector<std::vector<SimplePredicate>> perAttr;
    for (const auto& attr : attrs) {
        std::vector<SimplePredicate> preds;
        const Column& col = d.column(attr);
        if (col.kind == AttrKind::Categorical) {
            for (const auto& value : col.dict) preds.push_back({attr, PredOp::Eq, value});
        } else {
            for (double cut : binCuts(d, attr, bins)) {
                preds.push_back({attr, PredOp::Le, cut});
                preds.push_back({attr, PredOp::Gt, cut});
            }
        }
        perAttr.push_back(std::move(preds));
    }
    std::vector<Pattern> out;
    std::vector<SimplePredicate> current;
    std::function<void(std::size_t)> recurse = [&](std::size_t idx) {
        if (idx == perAttr.size()) {
            if (!current.empty()) out.push_back(Pattern::create(current));
            return;
        }
        recurse(idx + 1);
        for (const auto& pred : perAttr[idx]) {
            current.push_back(pred);
            recurse(idx + 1);
            current.pop_back();
        }
    };
    recurse(0);
    return out;
}

}  // namespace

SummaryReport bruteForceSummarize(const Dataset& d, const QuerySpec& q, const CausalDag& g,
                                  std::size_t k, double theta, const EngineConfig& cfg) {
    validateQuery(d, q);
    const AttributePartition part = partitionAttributes(d, q);

    // Only attributes with a causal path to the outcome can carry an effect;
    // the rest are excluded from the reference search as well.
    const std::set<std::string> ancestors =
        g.hasNode(q.avgAttr) ? causalAncestors(g, q.avgAttr) : std::set<std::string>{};
    std::vector<std::string> treatmentAttrs;
    for (const auto& attr : part.treatment) {
        if (ancestors.count(attr)) treatmentAttrs.push_back(attr);
    }

    const std::vector<std::string> groupingAttrs(part.grouping.begin(), part.grouping.end());
    if (groupingAttrs.size() > 6 || treatmentAttrs.size() > 4) {
        throw std::invalid_argument("bruteForceSummarize: instance above enumeration bounds");
    }
    for (const auto& attr : groupingAttrs) {
        if (d.activeDomain(attr).size() > 5) {
            throw std::invalid_argument("bruteForceSummarize: grouping domain above bounds");
        }
    }
    for (const auto& attr : treatmentAttrs) {
        if (d.activeDomain(attr).size() > 5) {
            throw std::invalid_argument("bruteForceSummarize: treatment domain above bounds");
        }
    }

    const AggregateView view = evaluateQuery(d, q);

    // Grouping side: all satisfiable conjunctions, deduplicated by coverage.
    std::vector<Pattern> groupingPatterns = enumerateEqualityPatterns(d, groupingAttrs);
    groupingPatterns = dedupGrouping(groupingPatterns, d, q, view);

    // Treatment side: exhaustive evaluation on the full data, one pass per
    // grouping pattern; the extremes per sign are the reference treatments.
    EngineConfig fullData = cfg;
    fullData.sampleSize = std::max<std::size_t>(d.rowCount, 1);
    std::vector<Pattern> treatmentPatterns = enumerateTreatmentPatterns(d, treatmentAttrs, cfg.bins);

    std::vector<ExplanationCandidate> candidates;
    for (const auto& pg : groupingPatterns) {
        ExplanationCandidate cand;
        cand.groupingPattern = pg;
        cand.covered = coveredGroups(pg, d, q, view);
        std::optional<ScoredTreatment> pos;
        std::optional<ScoredTreatment> neg;
        for (const auto& pt : treatmentPatterns) {
            const CateOutcome outcome = estimateCate(d, q, pg, pt, g, fullData);
            if (!outcome.ok()) continue;
            const CateEstimate& est = *outcome.estimate;
            if (!(est.pValue < cfg.alpha)) continue;
            if (est.cate > 0.0) {
                const bool better = !pos || std::fabs(est.cate) > std::fabs(pos->estimate.cate) ||
                                    (std::fabs(est.cate) == std::fabs(pos->estimate.cate) &&
                                     pt.text() < pos->pattern.text());
                if (better) pos = ScoredTreatment{pt, est};
            } else if (est.cate < 0.0) {
                const bool better = !neg || std::fabs(est.cate) > std::fabs(neg->estimate.cate) ||
                                    (std::fabs(est.cate) == std::fabs(neg->estimate.cate) &&
                                     pt.text() < neg->pattern.text());
                if (better) neg = ScoredTreatment{pt, est};
            }
        }
        cand.positive = std::move(pos);
        cand.negative = std::move(neg);
        cand.weight = (cand.positive ? std::fabs(cand.positive->estimate.cate) : 0.0) +
                      (cand.negative ? std::fabs(cand.negative->estimate.cate) : 0.0);
        if (cand.positive || cand.negative) candidates.push_back(std::move(cand));
    }

    const IlpInstance ilp = buildIlp(candidates, view, k, theta);
    const auto selection = candidates.empty()
                               ? (coverageTarget(theta, view.m()) == 0
                                      ? std::optional<std::vector<std::size_t>>{{}}
                                      : std::nullopt)
                               : solveIlpExact(ilp);
    if (!selection) {
        return makeReport(q, view, candidates, {}, k, theta, true);
    }
    return makeReport(q, view, candidates, *selection, k, theta, false);
}

std::vector<Pattern> naiveFrequentPatterns(const Dataset& d, const std::vector<std::string>& attrs,
                                           double tau) {
    if (attrs.size() > 8 || d.rowCount > 200) {
        throw std::invalid_argument("naiveFrequentPatterns: instance above enumeration bounds");
    }
    // Same contract as the miner: support >= max(1, ceil(tau * rows)).
    const std::size_t support = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(tau * static_cast<double>(d.rowCount) - 1e-9)));

    std::vector<Pattern> out;
    for (const auto& p : enumerateEqualityPatterns(d, attrs)) {
        CompiledPattern compiled(p, d);
        std::size_t count = 0;
        for (std::size_t r = 0; r < d.rowCount; ++r) {
            if (compiled.matches(d, r)) ++count;
        }
        if (count >= support) out.push_back(p);
    }
    return out;
}

PrecisionRecall precisionRecall(const std::set<std::uint32_t>& found,
                                const std::set<std::uint32_t>& truth) {
    std::size_t common = 0;
    for (std::uint32_t x : found) common += truth.count(x);
    PrecisionRecall pr;
    pr.precision = found.empty() ? 1.0 : static_cast<double>(common) / static_cast<double>(found.size());
    pr.recall = truth.empty() ? 1.0 : static_cast<double>(common) / static_cast<double>(truth.size());
    return pr;
}

double kendallTau(const std::vector<std::string>& rankA, const std::vector<std::string>& rankB) {
    if (rankA.size() != rankB.size()) throw UsageError("kendallTau: rankings differ in size");
    const std::size_t n = rankA.size();
    if (n < 2) throw UsageError("kendallTau: need at least two items");
    std::map<std::string, std::size_t> posB;
    for (std::size_t i = 0; i < n; ++i) {
        if (!posB.emplace(rankB[i], i).second) throw UsageError("kendallTau: duplicate item in ranking");
    }
    std::vector<std::size_t> mapped(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto it = posB.find(rankA[i]);
        if (it == posB.end()) throw UsageError("kendallTau: rankings cover different item sets");
        mapped[i] = it->second;
    }
    long long concordant = 0;
    long long discordant = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (mapped[i] < mapped[j]) ++concordant;
            else ++discordant;
        }
    }
    const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
    return static_cast<double>(concordant - discordant) / pairs;
}

}  // namespace causumx
