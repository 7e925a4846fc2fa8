#include "causumx/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "causumx/common.hpp"
#include "causumx/dag.hpp"
#include "causumx/groupmine.hpp"
#include "causumx/oracle.hpp"

namespace causumx {

Algorithm parseAlgorithm(const std::string& name) {
    if (name == "causumx") return Algorithm::CauSumX;
    if (name == "bruteforce") return Algorithm::BruteForce;
    if (name == "greedy") return Algorithm::Greedy;
    throw UsageError("unknown algorithm '" + name + "' (expected causumx, bruteforce or greedy)");
}

EngineConfig RunConfig::engine() const {
    EngineConfig cfg;
    cfg.sampleSize = sampleSize;
    cfg.alpha = alpha;
    cfg.minArm = minArm;
    cfg.bins = bins;
    cfg.seed = seed;
    cfg.threads = threads;
    return cfg;
}

void RunConfig::validate() const {
    if (k < 1) throw UsageError("k must be at least 1");
    if (theta < 0.0 || theta > 1.0) throw UsageError("theta must lie in [0, 1]");
    if (tau < 0.0 || tau > 1.0) throw UsageError("tau must lie in [0, 1]");
    if (sampleSize < 1) throw UsageError("sample size must be at least 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("alpha must lie in (0, 1)");
    if (minArm < 1) throw UsageError("min-arm must be at least 1");
    if (bins < 2) throw UsageError("bins must be at least 2");
    if (output != "text" && output != "json") throw UsageError("output must be text or json");
    if (groupBy.empty()) throw UsageError("at least one group-by attribute is required");
    if (avgAttr.empty()) throw UsageError("an average attribute is required");
}

SummaryReport makeReport(QuerySpec query, AggregateView view,
                         const std::vector<ExplanationCandidate>& candidates,
                         const std::vector<std::size_t>& selection, std::size_t k, double theta,
                         bool noSolution) {
    SummaryReport report;
    report.query = std::move(query);
    report.view = std::move(view);
    report.noSolution = noSolution;
    std::set<std::uint32_t> covered;
    for (std::size_t j : selection) {
        report.selected.push_back(candidates[j]);
        report.totalWeight += candidates[j].weight;
        covered.insert(candidates[j].covered.begin(), candidates[j].covered.end());
    }
    report.coveredCount = covered.size();
    const std::size_t m = report.view.m();
    report.coverageFraction = m == 0 ? 0.0 : static_cast<double>(covered.size()) / static_cast<double>(m);
    report.sizeOk = report.selected.size() <= k;
    report.coverageOk = report.coveredCount >= coverageTarget(theta, m);
    return report;
}

SummaryReport runPipeline(const RunConfig& cfg) {
    cfg.validate();
    const EngineConfig engine = cfg.engine();
    std::vector<PhaseTiming> timings;
    const auto timed = [&timings](const std::string& phase, auto&& fn) {
        const auto start = std::chrono::steady_clock::now();
        auto result = fn();
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        timings.push_back({phase, elapsed.count()});
        return result;
    };

    Dataset raw = timed("load", [&] { return loadCsv(cfg.dataPath); });
    const CausalDag dag = timed("dag", [&] {
        std::ifstream in(cfg.dagPath, std::ios::binary);
        if (!in) throw DataError("cannot open DAG file '" + cfg.dagPath + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        return parseDot(buf.str());
    });

    QuerySpec query;
    query.groupBy = cfg.groupBy;
    query.avgAttr = cfg.avgAttr;
    std::string whereText;
    if (!cfg.whereClause.empty()) {
        query.where = parsePattern(cfg.whereClause, raw);
        whereText = query.where->text();
    }
    validateQuery(raw, query);

    // The WHERE clause reduces the table once, up front.
    const Dataset data = timed("filter", [&] {
        return query.where ? filterDataset(raw, *query.where) : std::move(raw);
    });
    if (data.rowCount == 0) throw DataError("no rows satisfy the WHERE clause");
    QuerySpec filtered;
    filtered.groupBy = query.groupBy;
    filtered.avgAttr = query.avgAttr;

    const AggregateView view = timed("aggregate", [&] { return evaluateQuery(data, filtered); });
    const AttributePartition part =
        timed("partition", [&] { return partitionAttributes(data, filtered); });

    const std::vector<Pattern> groupingPatterns = timed("grouping-mining", [&] {
        auto mined = mineGroupingPatterns(data, filtered, part.grouping, cfg.tau);
        return dedupGrouping(mined, data, filtered, view);
    });

    std::vector<ExplanationCandidate> candidates;
    std::vector<std::size_t> selection;
    bool noSolution = false;

    if (cfg.algorithm == Algorithm::BruteForce) {
        SummaryReport report = timed("bruteforce", [&] {
            return bruteForceSummarize(data, filtered, dag, cfg.k, cfg.theta, engine);
        });
        report.query = query;
        report.timings = std::move(timings);
        return report;
    }

    candidates = timed("treatment-mining", [&] {
        return buildCandidates(data, filtered, groupingPatterns, part.treatment, dag, view, engine);
    });

    const IlpInstance ilp = buildIlp(candidates, view, cfg.k, cfg.theta);
    if (cfg.algorithm == Algorithm::Greedy) {
        selection = timed("selection", [&] { return greedySelect(ilp); });
    } else {
        auto picked = timed("selection", [&]() -> std::optional<std::vector<std::size_t>> {
            auto frac = solveLpRelaxation(ilp);
            if (!frac) return std::nullopt;
            return randomizedRounding(*frac, ilp, deriveSeed(cfg.seed, "rounding"));
        });
        if (picked) {
            selection = std::move(*picked);
        } else {
            noSolution = true;
        }
    }

    SummaryReport report = makeReport(query, view, candidates, selection, cfg.k, cfg.theta, noSolution);
    report.timings = std::move(timings);
    return report;
}

namespace {

std::string formatSignificant(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

// Smallest power-of-ten bound strictly above p, starting at 1e-2 and
// extended upward so rendering stays total for large p.
std::string formatPBound(double p) {
    if (p <= 0.0) return "1e-16";
    if (p >= 1.0) return "1";
    int e = static_cast<int>(std::floor(-std::log10(p) - 1e-12));
    e = std::clamp(e, 1, 16);
    return "1e-" + std::to_string(e);
}

std::string patternPhrase(const Pattern& p) {
    return p.empty() ? std::string("all groups") : p.text();
}

double roundSignificant(double v, int digits = 12) {
    if (!std::isfinite(v)) return v;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
    return std::strtod(buf, nullptr);
}

nlohmann::json treatmentJson(const std::optional<ScoredTreatment>& t) {
    if (!t) return nullptr;
    nlohmann::json j;
    j["pattern"] = t->pattern.text();
    j["cate"] = roundSignificant(t->estimate.cate);
    j["std_error"] = roundSignificant(t->estimate.stdError);
    j["p_value"] = roundSignificant(t->estimate.pValue);
    j["n_treated"] = t->estimate.nTreated;
    j["n_control"] = t->estimate.nControl;
    return j;
}

}  // namespace

std::string renderText(const SummaryReport& r, const RunConfig& cfg) {
    (void)cfg;
    if (r.selected.empty()) return "No feasible explanation summary.\n";
    std::string out;
    for (const auto& cand : r.selected) {
        std::string line = "For " + patternPhrase(cand.groupingPattern) + ", ";
        if (cand.positive) {
            line += "the most substantial effect on high " + r.query.avgAttr + " (effect size of " +
                    formatSignificant(cand.positive->estimate.cate) + ", p < " +
                    formatPBound(cand.positive->estimate.pValue) + ") is observed for " +
                    cand.positive->pattern.text() + ".";
            if (cand.negative) {
                line += " Conversely, " + cand.negative->pattern.text() +
                        " has the greatest adverse impact (effect size: " +
                        formatSignificant(cand.negative->estimate.cate) + ", p < " +
                        formatPBound(cand.negative->estimate.pValue) + ").";
            }
        } else if (cand.negative) {
            line += cand.negative->pattern.text() +
                    " has the greatest adverse impact (effect size: " +
                    formatSignificant(cand.negative->estimate.cate) + ", p < " +
                    formatPBound(cand.negative->estimate.pValue) + ").";
        }
        out += line;
        out += '\n';
    }
    return out;
}

std::string renderJson(const SummaryReport& r, const RunConfig& cfg) {
    nlohmann::json doc;
    doc["query"]["group_by"] = r.query.groupBy;
    doc["query"]["avg"] = r.query.avgAttr;
    doc["query"]["where"] = r.query.where ? r.query.where->text() : "";
    doc["params"]["k"] = cfg.k;
    doc["params"]["theta"] = roundSignificant(cfg.theta);
    doc["params"]["tau"] = roundSignificant(cfg.tau);
    doc["params"]["seed"] = cfg.seed;

    nlohmann::json viewJson = nlohmann::json::array();
    for (const auto& g : r.view.groups) {
        nlohmann::json entry;
        entry["key"] = g.key;
        entry["avg"] = roundSignificant(g.avg);
        entry["count"] = g.count;
        viewJson.push_back(std::move(entry));
    }
    doc["view"] = std::move(viewJson);

    nlohmann::json explanations = nlohmann::json::array();
    for (const auto& cand : r.selected) {
        nlohmann::json e;
        e["grouping_pattern"] = cand.groupingPattern.text();
        nlohmann::json coveredJson = nlohmann::json::array();
        for (std::uint32_t i : cand.covered) coveredJson.push_back(r.view.groups[i].key);
        e["covered_groups"] = std::move(coveredJson);
        e["positive"] = treatmentJson(cand.positive);
        e["negative"] = treatmentJson(cand.negative);
        e["weight"] = roundSignificant(cand.weight);
        explanations.push_back(std::move(e));
    }
    doc["explanations"] = std::move(explanations);

    doc["summary"]["covered_count"] = r.coveredCount;
    doc["summary"]["coverage_fraction"] = roundSignificant(r.coverageFraction);
    doc["summary"]["total_weight"] = roundSignificant(r.totalWeight);
    doc["summary"]["size_ok"] = r.sizeOk;
    doc["summary"]["coverage_ok"] = r.coverageOk;

    return doc.dump(2) + "\n";
}

}  // namespace causumx
