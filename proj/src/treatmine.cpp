#include "causumx/treatmine.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "causumx/common.hpp"

namespace causumx {

const CateOutcome& CateCache::get(const Pattern& pt, TreatmentSearchStats& stats) {
    auto it = memo_.find(pt);
    if (it != memo_.end()) {
        ++stats.cacheHits;
        return it->second;
    }
    ++stats.estimations;
    auto [ins, fresh] = memo_.emplace(pt, compute_(pt));
    (void)fresh;
    return ins->second;
}

std::vector<Pattern> genLevel1(const Dataset& d, const QuerySpec& q,
                               const std::set<std::string>& treatmentAttrs, const CausalDag& g,
                               const EngineConfig& cfg) {
    const std::set<std::string> ancestors = g.hasNode(q.avgAttr)
                                                ? causalAncestors(g, q.avgAttr)
                                                : std::set<std::string>{};
    std::vector<Pattern> out;
    for (const auto& attr : treatmentAttrs) {
        if (!ancestors.count(attr)) continue;  // no causal path to the outcome
        const Column& col = d.column(attr);
        if (col.kind == AttrKind::Categorical) {
            for (const auto& value : col.dict) {
                out.push_back(Pattern::create({SimplePredicate{attr, PredOp::Eq, value}}));
            }
        } else {
            for (double cut : binCuts(d, attr, cfg.bins)) {
                out.push_back(Pattern::create({SimplePredicate{attr, PredOp::Le, cut}}));
                out.push_back(Pattern::create({SimplePredicate{attr, PredOp::Gt, cut}}));
            }
        }
    }
    std::sort(out.begin(), out.end(),
              [](const Pattern& a, const Pattern& b) { return a.text() < b.text(); });
    return out;
}

std::vector<LatticeNode> selectSurvivors(std::vector<LatticeNode> evaluated, Direction sigma,
                                         double alpha, double nearZeroEps) {
    std::vector<LatticeNode> kept;
    kept.reserve(evaluated.size());
    for (auto& node : evaluated) {
        const double cate = node.estimate.cate;
        if (sigma == Direction::Positive && !(cate > 0.0)) continue;
        if (sigma == Direction::Negative && !(cate < 0.0)) continue;
        if (!(node.estimate.pValue < alpha)) continue;
        if (std::fabs(cate) < nearZeroEps) continue;
        kept.push_back(std::move(node));
    }
    if (kept.size() <= 2) return kept;
    std::sort(kept.begin(), kept.end(), [](const LatticeNode& a, const LatticeNode& b) {
        const double fa = std::fabs(a.estimate.cate);
        const double fb = std::fabs(b.estimate.cate);
        if (fa != fb) return fa > fb;
        return a.pattern.text() < b.pattern.text();
    });
    kept.resize((kept.size() + 1) / 2);
    return kept;
}

std::vector<LatticeNode> filterCandidates(const std::vector<Pattern>& candidates,
                                          std::size_t level, CateCache& cache, Direction sigma,
                                          double alpha, double nearZeroEps,
                                          TreatmentSearchStats& stats) {
    std::vector<LatticeNode> evaluated;
    evaluated.reserve(candidates.size());
    for (const auto& pt : candidates) {
        const CateOutcome& outcome = cache.get(pt, stats);
        if (!outcome.ok()) continue;
        evaluated.push_back(LatticeNode{pt, *outcome.estimate, level});
    }
    return selectSurvivors(std::move(evaluated), sigma, alpha, nearZeroEps);
}

std::vector<Pattern> genNextLevel(const std::vector<LatticeNode>& nodes) {
    if (nodes.size() < 2) return {};
    std::unordered_set<Pattern, PatternHash> present;
    present.reserve(nodes.size());
    for (const auto& n : nodes) present.insert(n.pattern);

    std::vector<const Pattern*> sorted;
    sorted.reserve(nodes.size());
    for (const auto& n : nodes) sorted.push_back(&n.pattern);
    std::sort(sorted.begin(), sorted.end(),
              [](const Pattern* a, const Pattern* b) { return a->text() < b->text(); });

    std::vector<Pattern> out;
    std::unordered_set<Pattern, PatternHash> emitted;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        for (std::size_t j = i + 1; j < sorted.size(); ++j) {
            const auto& a = sorted[i]->predicates;
            const auto& b = sorted[j]->predicates;
            std::vector<SimplePredicate> merged = a;
            merged.insert(merged.end(), b.begin(), b.end());
            auto candidate = Pattern::tryCreate(std::move(merged));
            if (!candidate || candidate->length() != a.size() + 1) continue;
            // One predicate per attribute keeps threshold pairs apart.
            if (candidate->attributes().size() != candidate->length()) continue;
            if (emitted.count(*candidate)) continue;

            bool allParents = true;
            for (std::size_t skip = 0; skip < candidate->predicates.size() && allParents; ++skip) {
                std::vector<SimplePredicate> sub;
                for (std::size_t t = 0; t < candidate->predicates.size(); ++t) {
                    if (t != skip) sub.push_back(candidate->predicates[t]);
                }
                allParents = present.count(Pattern::create(std::move(sub))) > 0;
            }
            if (!allParents) continue;
            emitted.insert(*candidate);
            out.push_back(std::move(*candidate));
        }
    }
    std::sort(out.begin(), out.end(),
              [](const Pattern& a, const Pattern& b) { return a.text() < b.text(); });
    return out;
}

namespace {

// Lower |cate| loses; ties favor the shorter pattern, then textual order.
bool beats(const Pattern& pattern, const CateEstimate& est, const std::optional<ScoredTreatment>& best) {
    if (!best) return true;
    const double fa = std::fabs(est.cate);
    const double fb = std::fabs(best->estimate.cate);
    if (fa != fb) return fa > fb;
    if (pattern.length() != best->pattern.length()) return pattern.length() < best->pattern.length();
    return pattern.text() < best->pattern.text();
}

}  // namespace

std::optional<ScoredTreatment> getTopTreatment(const Dataset& d, const QuerySpec& q,
                                               const Pattern& pg,
                                               const std::set<std::string>& treatmentAttrs,
                                               const CausalDag& g, Direction sigma,
                                               const EngineConfig& cfg, CateCache& cache,
                                               TreatmentSearchStats* statsOut) {
    TreatmentSearchStats local;
    TreatmentSearchStats& stats = statsOut ? *statsOut : local;

    std::optional<CompiledPattern> where;
    if (q.where) where.emplace(*q.where, d);
    CompiledPattern pgCompiled(pg, d);
    std::vector<std::uint32_t> subpop;
    for (std::size_t r = 0; r < d.rowCount; ++r) {
        if (where && !where->matches(d, r)) continue;
        if (pgCompiled.matches(d, r)) subpop.push_back(static_cast<std::uint32_t>(r));
    }
    if (subpop.empty()) return std::nullopt;
    const double nearZeroEps = nearZeroEpsilon(d, q, subpop);

    std::vector<Pattern> candidates = genLevel1(d, q, treatmentAttrs, g, cfg);
    std::vector<LatticeNode> nodes =
        filterCandidates(candidates, 1, cache, sigma, cfg.alpha, nearZeroEps, stats);
    stats.levelsExplored = 1;
    if (nodes.empty()) return std::nullopt;

    std::optional<ScoredTreatment> best;
    for (const auto& node : nodes) {
        if (beats(node.pattern, node.estimate, best)) best = ScoredTreatment{node.pattern, node.estimate};
    }

    std::size_t level = 1;
    while (true) {
        ++level;
        candidates = genNextLevel(nodes);
        if (candidates.empty()) break;
        nodes = filterCandidates(candidates, level, cache, sigma, cfg.alpha, nearZeroEps, stats);
        if (nodes.empty()) break;
        stats.levelsExplored = level;

        std::optional<ScoredTreatment> levelBest;
        for (const auto& node : nodes) {
            if (beats(node.pattern, node.estimate, levelBest)) {
                levelBest = ScoredTreatment{node.pattern, node.estimate};
            }
        }
        // Continue only while levels keep improving on the running maximum.
        if (levelBest && std::fabs(levelBest->estimate.cate) > std::fabs(best->estimate.cate)) {
            best = levelBest;
        } else {
            break;
        }
    }
    return best;
}

double nearZeroEpsilon(const Dataset& d, const QuerySpec& q,
                       std::span<const std::uint32_t> subpopRows) {
    const Column& outcome = d.column(q.avgAttr);
    double sum = 0.0;
    std::size_t n = 0;
    for (std::uint32_t r : subpopRows) {
        if (outcome.isMissing(r)) continue;
        sum += outcome.nums[r];
        ++n;
    }
    if (n == 0) return 0.0;
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::uint32_t r : subpopRows) {
        if (outcome.isMissing(r)) continue;
        const double delta = outcome.nums[r] - mean;
        ss += delta * delta;
    }
    return 0.01 * std::sqrt(ss / static_cast<double>(n));
}

std::vector<ExplanationCandidate> buildCandidates(const Dataset& d, const QuerySpec& q,
                                                  const std::vector<Pattern>& groupingPatterns,
                                                  const std::set<std::string>& treatmentAttrs,
                                                  const CausalDag& g, const AggregateView& view,
                                                  const EngineConfig& cfg) {
    std::vector<std::optional<ExplanationCandidate>> slots(groupingPatterns.size());
    std::optional<CompiledPattern> where;
    if (q.where) where.emplace(*q.where, d);
    parallelFor(groupingPatterns.size(), cfg.threads, [&](std::size_t i) {
        const Pattern& pg = groupingPatterns[i];
        const std::string pgText = pg.text();
        // The subpopulation is fixed per grouping pattern; estimates reuse it.
        CompiledPattern pgCompiled(pg, d);
        std::vector<std::uint32_t> subpop;
        for (std::size_t r = 0; r < d.rowCount; ++r) {
            if (where && !where->matches(d, r)) continue;
            if (pgCompiled.matches(d, r)) subpop.push_back(static_cast<std::uint32_t>(r));
        }
        CateCache cache([&](const Pattern& pt) {
            return estimateCateOnRows(d, q, subpop, pgText, pt, g, cfg);
        });

        ExplanationCandidate cand;
        cand.groupingPattern = pg;
        cand.covered = coveredGroups(pg, d, q, view);
        cand.positive = getTopTreatment(d, q, pg, treatmentAttrs, g, Direction::Positive, cfg, cache);
        cand.negative = getTopTreatment(d, q, pg, treatmentAttrs, g, Direction::Negative, cfg, cache);
        cand.weight = (cand.positive ? std::fabs(cand.positive->estimate.cate) : 0.0) +
                      (cand.negative ? std::fabs(cand.negative->estimate.cate) : 0.0);
        if (cand.positive || cand.negative) slots[i] = std::move(cand);
    });
    std::vector<ExplanationCandidate> out;
    out.reserve(groupingPatterns.size());
    for (auto& slot : slots) {
        if (slot) out.push_back(std::move(*slot));
    }
    return out;
}

}  // namespace causumx
