#include "causumx/lpsolve.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "causumx/common.hpp"
#include "causumx/lp.hpp"

namespace causumx {

std::size_t coverageTarget(double theta, std::size_t m) {
    if (theta <= 0.0) return 0;
    return static_cast<std::size_t>(std::ceil(theta * static_cast<double>(m) - 1e-9));
}

IlpInstance buildIlp(const std::vector<ExplanationCandidate>& cands, const AggregateView& view,
                     std::size_t k, double theta) {
    IlpInstance ilp;
    ilp.m = view.m();
    ilp.k = k;
    ilp.theta = theta;
    ilp.weights.reserve(cands.size());
    ilp.coverage.reserve(cands.size());
    for (const auto& c : cands) {
        ilp.weights.push_back(c.weight);
        ilp.coverage.push_back(c.covered);
    }
    return ilp;
}

std::optional<FractionalSolution> solveLpRelaxation(const IlpInstance& ilp) {
    const std::size_t l = ilp.candidateCount();
    if (l == 0) {
        if (coverageTarget(ilp.theta, ilp.m) == 0) {
            return FractionalSolution{{}, std::vector<double>(ilp.m, 0.0), 0.0};
        }
        return std::nullopt;
    }
    for (const auto& cov : ilp.coverage) {
        for (std::uint32_t i : cov) {
            if (i >= ilp.m) throw EngineError("ilp coverage index out of range");
        }
    }

    // Groups with the same covering-candidate set are interchangeable in the
    // relaxation; one averaged variable per signature is exact and keeps the
    // tableau small even for views with very many groups.
    std::vector<std::vector<std::uint32_t>> coveringOf(ilp.m);
    for (std::uint32_t j = 0; j < l; ++j) {
        for (std::uint32_t i : ilp.coverage[j]) coveringOf[i].push_back(j);
    }
    std::map<std::vector<std::uint32_t>, std::size_t> signatureCount;
    for (std::size_t i = 0; i < ilp.m; ++i) {
        if (!coveringOf[i].empty()) signatureCount[coveringOf[i]] += 1;
    }
    const std::size_t s = signatureCount.size();

    lp::Problem prob;
    prob.objective.assign(l + s, 0.0);
    prob.upper.assign(l + s, 1.0);
    for (std::size_t j = 0; j < l; ++j) prob.objective[j] = ilp.weights[j];

    {
        lp::Constraint size;
        size.coeffs.assign(l + s, 0.0);
        for (std::size_t j = 0; j < l; ++j) size.coeffs[j] = 1.0;
        size.sense = lp::Sense::LessEq;
        size.rhs = static_cast<double>(ilp.k);
        prob.rows.push_back(std::move(size));
    }
    std::vector<std::size_t> classCounts;
    classCounts.reserve(s);
    std::size_t sigIndex = 0;
    for (const auto& [covering, count] : signatureCount) {
        lp::Constraint link;  // tau_s <= sum of covering g_j
        link.coeffs.assign(l + s, 0.0);
        link.coeffs[l + sigIndex] = 1.0;
        for (std::uint32_t j : covering) link.coeffs[j] = -1.0;
        link.sense = lp::Sense::LessEq;
        link.rhs = 0.0;
        prob.rows.push_back(std::move(link));
        classCounts.push_back(count);
        ++sigIndex;
    }
    {
        lp::Constraint coverage;
        coverage.coeffs.assign(l + s, 0.0);
        for (std::size_t i = 0; i < s; ++i) {
            coverage.coeffs[l + i] = static_cast<double>(classCounts[i]);
        }
        coverage.sense = lp::Sense::GreaterEq;
        coverage.rhs = ilp.theta * static_cast<double>(ilp.m);
        prob.rows.push_back(std::move(coverage));
    }

    lp::Solution sol = lp::solve(prob);
    if (sol.status == lp::SolveStatus::Infeasible) return std::nullopt;

    FractionalSolution frac;
    frac.g.assign(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(l));
    for (auto& g : frac.g) g = std::clamp(g, 0.0, 1.0);
    std::map<std::vector<std::uint32_t>, double> tauOf;
    sigIndex = 0;
    for (const auto& [covering, count] : signatureCount) {
        (void)count;
        tauOf[covering] = std::clamp(sol.x[l + sigIndex], 0.0, 1.0);
        ++sigIndex;
    }
    frac.t.assign(ilp.m, 0.0);
    for (std::size_t i = 0; i < ilp.m; ++i) {
        if (!coveringOf[i].empty()) frac.t[i] = tauOf[coveringOf[i]];
    }
    frac.objective = 0.0;
    for (std::size_t j = 0; j < l; ++j) frac.objective += ilp.weights[j] * frac.g[j];
    return frac;
}

std::vector<std::size_t> randomizedRounding(const FractionalSolution& frac,
                                            const IlpInstance& ilp, std::uint64_t seed) {
    const std::size_t l = frac.g.size();
    std::vector<double> cumulative(l, 0.0);
    double total = 0.0;
    for (std::size_t j = 0; j < l; ++j) {
        total += frac.g[j] / static_cast<double>(ilp.k);
        cumulative[j] = total;
    }
    Rng rng(seed);
    std::set<std::size_t> chosen;
    for (std::size_t draw = 0; draw < ilp.k; ++draw) {
        const double u = rng.nextUnit();
        // Smallest j with u < cumulative[j]; residual mass beyond `total`
        // means no pick this draw.
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        if (it == cumulative.end()) continue;
        const std::size_t j = static_cast<std::size_t>(it - cumulative.begin());
        if (frac.g[j] > 0.0) chosen.insert(j);
    }
    return {chosen.begin(), chosen.end()};
}

std::vector<std::size_t> greedySelect(const IlpInstance& ilp) {
    const std::size_t l = ilp.candidateCount();
    const std::size_t target = coverageTarget(ilp.theta, ilp.m);
    std::vector<bool> chosen(l, false);
    std::set<std::uint32_t> covered;
    std::vector<std::size_t> out;

    while (out.size() < ilp.k && out.size() < l) {
        const bool needCoverage = covered.size() < target;
        std::size_t best = l;
        double bestWeight = -1.0;
        bool bestGains = false;
        for (std::size_t j = 0; j < l; ++j) {
            if (chosen[j]) continue;
            std::size_t gain = 0;
            if (needCoverage) {
                for (std::uint32_t i : ilp.coverage[j]) gain += covered.count(i) ? 0 : 1;
            }
            const bool gains = gain > 0;
            // While short of coverage, positive-gain candidates dominate;
            // inside a class, weight decides (index breaks ties).
            bool better;
            if (needCoverage && gains != bestGains) {
                better = gains;
            } else {
                better = ilp.weights[j] > bestWeight + 1e-12;
            }
            if (best == l || better) {
                best = j;
                bestWeight = ilp.weights[j];
                bestGains = gains;
            }
        }
        if (best == l) break;
        chosen[best] = true;
        out.push_back(best);
        for (std::uint32_t i : ilp.coverage[best]) covered.insert(i);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<std::vector<std::size_t>> solveIlpExact(const IlpInstance& ilp) {
    const std::size_t l = ilp.candidateCount();
    if (l > 25 || ilp.k > 6) {
        throw std::invalid_argument("solveIlpExact: instance above enumeration bounds");
    }
    const std::size_t target = coverageTarget(ilp.theta, ilp.m);

    std::vector<std::vector<std::uint64_t>> bits(l);
    const std::size_t words = (ilp.m + 63) / 64;
    for (std::size_t j = 0; j < l; ++j) {
        bits[j].assign(words, 0);
        for (std::uint32_t i : ilp.coverage[j]) bits[j][i / 64] |= 1ull << (i % 64);
    }

    std::optional<std::vector<std::size_t>> best;
    double bestWeight = -1.0;
    std::vector<std::size_t> pick;
    std::vector<std::uint64_t> acc(words, 0);

    std::function<void(std::size_t)> recurse = [&](std::size_t start) {
        {
            std::size_t covered = 0;
            for (std::uint64_t w : acc) covered += static_cast<std::size_t>(std::popcount(w));
            if (covered >= target) {
                double weight = 0.0;
                for (std::size_t j : pick) weight += ilp.weights[j];
                if (weight > bestWeight + 1e-12) {
                    bestWeight = weight;
                    best = pick;
                }
                // Equal weight keeps the earlier (lexicographically smaller)
                // selection because subsets are visited in index order.
            }
        }
        if (pick.size() == ilp.k) return;
        for (std::size_t j = start; j < l; ++j) {
            std::vector<std::uint64_t> saved = acc;
            for (std::size_t w = 0; w < words; ++w) acc[w] |= bits[j][w];
            pick.push_back(j);
            recurse(j + 1);
            pick.pop_back();
            acc = saved;
        }
    };
    recurse(0);
    return best;
}

double selectionWeight(const IlpInstance& ilp, const std::vector<std::size_t>& selection) {
    double w = 0.0;
    for (std::size_t j : selection) w += ilp.weights[j];
    return w;
}

std::size_t selectionCoverage(const IlpInstance& ilp, const std::vector<std::size_t>& selection) {
    std::set<std::uint32_t> covered;
    for (std::size_t j : selection) covered.insert(ilp.coverage[j].begin(), ilp.coverage[j].end());
    return covered.size();
}

}  // namespace causumx
