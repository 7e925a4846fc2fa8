#include "causumx/groupmine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "causumx/common.hpp"

namespace causumx {

namespace {

struct MinedPattern {
    Pattern pattern;
    std::vector<std::uint32_t> rows;  // supporting rows, sorted
};

std::vector<std::uint32_t> intersectSorted(const std::vector<std::uint32_t>& a,
                                           const std::vector<std::uint32_t>& b) {
    std::vector<std::uint32_t> out;
    out.reserve(std::min(a.size(), b.size()));
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

}  // namespace

std::vector<Pattern> mineGroupingPatterns(const Dataset& d, const QuerySpec& q,
                                          const std::set<std::string>& groupingAttrs,
                                          double tau) {
    if (tau < 0.0 || tau > 1.0) throw UsageError("tau must lie in [0, 1]");
    std::optional<CompiledPattern> where;
    if (q.where) where.emplace(*q.where, d);
    std::vector<std::uint32_t> baseRows;
    baseRows.reserve(d.rowCount);
    for (std::size_t r = 0; r < d.rowCount; ++r) {
        if (!where || where->matches(d, r)) baseRows.push_back(static_cast<std::uint32_t>(r));
    }
    const std::size_t support =
        std::max<std::size_t>(1, static_cast<std::size_t>(
                                     std::ceil(tau * static_cast<double>(baseRows.size()) - 1e-9)));

    const std::vector<std::string> attrs(groupingAttrs.begin(), groupingAttrs.end());

    // Level 1: one equality candidate per (attribute, active-domain value),
    // with supporting-row lists carried along so candidate support at deeper
    // levels is a list intersection.
    std::vector<MinedPattern> level;
    for (const auto& attr : attrs) {
        const Column& col = d.column(attr);
        if (col.kind != AttrKind::Categorical) continue;
        std::unordered_map<std::int32_t, std::vector<std::uint32_t>> byCode;
        for (std::uint32_t r : baseRows) {
            const std::int32_t code = col.codes[r];
            if (code >= 0) byCode[code].push_back(r);
        }
        for (std::size_t code = 0; code < col.dict.size(); ++code) {
            auto it = byCode.find(static_cast<std::int32_t>(code));
            if (it == byCode.end() || it->second.size() < support) continue;
            MinedPattern mp;
            mp.pattern = Pattern::create({SimplePredicate{attr, PredOp::Eq, col.dict[code]}});
            mp.rows = std::move(it->second);
            level.push_back(std::move(mp));
        }
    }

    std::vector<Pattern> result;
    std::unordered_map<Pattern, bool, PatternHash> frequent;
    for (const auto& mp : level) {
        result.push_back(mp.pattern);
        frequent[mp.pattern] = true;
    }

    const std::size_t maxLen = attrs.size();
    std::size_t len = 1;
    while (!level.empty() && len < maxLen) {
        // Join pairs sharing their first len-1 predicates; the canonical
        // predicate order makes each candidate come up exactly once.
        std::vector<MinedPattern> next;
        for (std::size_t i = 0; i < level.size(); ++i) {
            for (std::size_t j = i + 1; j < level.size(); ++j) {
                const auto& a = level[i].pattern.predicates;
                const auto& b = level[j].pattern.predicates;
                bool prefixEqual = true;
                for (std::size_t t = 0; t + 1 < a.size(); ++t) {
                    if (!(a[t] == b[t])) {
                        prefixEqual = false;
                        break;
                    }
                }
                if (!prefixEqual) continue;
                if (a.back().attr == b.back().attr) continue;
                std::vector<SimplePredicate> preds = a;
                preds.push_back(b.back());
                auto candidate = Pattern::tryCreate(std::move(preds));
                if (!candidate || candidate->length() != len + 1) continue;

                // Downward closure: all length-len sub-patterns must be frequent.
                bool allFrequent = true;
                for (std::size_t skip = 0; skip < candidate->predicates.size() && allFrequent; ++skip) {
                    std::vector<SimplePredicate> sub;
                    for (std::size_t t = 0; t < candidate->predicates.size(); ++t) {
                        if (t != skip) sub.push_back(candidate->predicates[t]);
                    }
                    allFrequent = frequent.count(Pattern::create(std::move(sub))) > 0;
                }
                if (!allFrequent) continue;

                auto rows = intersectSorted(level[i].rows, level[j].rows);
                if (rows.size() < support) continue;
                next.push_back(MinedPattern{std::move(*candidate), std::move(rows)});
            }
        }
        std::sort(next.begin(), next.end(), [](const MinedPattern& a, const MinedPattern& b) {
            return a.pattern.text() < b.pattern.text();
        });
        for (const auto& mp : next) {
            result.push_back(mp.pattern);
            frequent[mp.pattern] = true;
        }
        level = std::move(next);
        ++len;
    }
    return result;
}

std::vector<Pattern> dedupGrouping(const std::vector<Pattern>& patterns, const Dataset& d,
                                   const QuerySpec& q, const AggregateView& view) {
    struct Entry {
        Pattern pattern;
        std::vector<std::uint32_t> covered;
    };
    std::map<std::vector<std::uint32_t>, Entry> best;
    for (const auto& p : patterns) {
        auto covered = coveredGroups(p, d, q, view);
        if (covered.empty()) continue;
        auto it = best.find(covered);
        if (it == best.end()) {
            best.emplace(covered, Entry{p, covered});
            continue;
        }
        Entry& cur = it->second;
        const bool shorter = p.length() < cur.pattern.length();
        const bool tieWins = p.length() == cur.pattern.length() && p.text() < cur.pattern.text();
        if (shorter || tieWins) cur.pattern = p;
    }
    std::vector<Pattern> out;
    out.reserve(best.size());
    for (auto& [covered, entry] : best) out.push_back(std::move(entry.pattern));
    std::sort(out.begin(), out.end(),
              [](const Pattern& a, const Pattern& b) { return a.text() < b.text(); });
    return out;
}

}  // namespace causumx
