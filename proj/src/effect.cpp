#include "causumx/effect.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>

#include "causumx/common.hpp"

namespace causumx {

namespace {

constexpr double kCollinearTol = 1e-8;

// Continued-fraction kernel of the regularized incomplete beta (Lentz).
double betaContinuedFraction(double a, double b, double x) {
    constexpr double kTiny = 1e-300;
    constexpr double kEps = 1e-15;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 300; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace

double incompleteBetaReg(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double lnFront = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(lnFront);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * betaContinuedFraction(a, b, x) / a;
    }
    return 1.0 - front * betaContinuedFraction(b, a, 1.0 - x) / b;
}

double studentTTwoSidedP(double t, double degreesOfFreedom) {
    if (degreesOfFreedom <= 0.0) return 1.0;
    if (!std::isfinite(t)) return 0.0;
    const double x = degreesOfFreedom / (degreesOfFreedom + t * t);
    return incompleteBetaReg(degreesOfFreedom / 2.0, 0.5, x);
}

std::string_view skipReasonText(SkipReason r) {
    switch (r) {
        case SkipReason::Overlap: return "overlap";
        case SkipReason::Collinear: return "collinear";
        case SkipReason::EmptySubpopulation: return "empty-subpopulation";
    }
    return "?";
}

std::vector<std::uint8_t> assignTreatment(const Dataset& d, std::span<const std::uint32_t> rows,
                                          const Pattern& pt) {
    CompiledPattern compiled(pt, d);
    std::vector<std::uint8_t> out(rows.size(), 0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out[i] = compiled.matches(d, rows[i]) ? 1 : 0;
    }
    return out;
}

std::vector<std::uint32_t> sampleRows(std::span<const std::uint32_t> rows, std::size_t maxN,
                                      std::uint64_t seed) {
    if (maxN < 1) throw std::invalid_argument("sampleRows: maxN must be positive");
    if (rows.size() <= maxN) return {rows.begin(), rows.end()};
    std::vector<std::uint32_t> pool(rows.begin(), rows.end());
    Rng rng(seed);
    for (std::size_t i = 0; i < maxN; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.nextBelow(pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(maxN);
    std::sort(pool.begin(), pool.end());
    return pool;
}

namespace {

struct DesignMatrix {
    Eigen::MatrixXd x;  // [intercept, adjustment columns..., T]
    Eigen::VectorXd y;
    std::size_t tColumn = 0;
    std::size_t nTreated = 0;
    std::size_t nControl = 0;
};

// Complete-case rows: outcome present and every adjustment attribute present.
std::vector<std::uint32_t> completeCases(const Dataset& d, const Column& outcome,
                                         const std::vector<std::size_t>& zCols,
                                         std::span<const std::uint32_t> rows) {
    std::vector<std::uint32_t> out;
    out.reserve(rows.size());
    for (std::uint32_t r : rows) {
        if (outcome.isMissing(r)) continue;
        bool missing = false;
        for (std::size_t c : zCols) {
            if (d.columns[c].isMissing(r)) {
                missing = true;
                break;
            }
        }
        if (!missing) out.push_back(r);
    }
    return out;
}

}  // namespace

CateOutcome estimateCateOnRows(const Dataset& d, const QuerySpec& q,
                               std::span<const std::uint32_t> subpopRows,
                               const std::string& pgText, const Pattern& pt, const CausalDag& g,
                               const EngineConfig& cfg) {
    if (subpopRows.empty()) return CateOutcome::skipped(SkipReason::EmptySubpopulation);

    const std::uint64_t callSeed = deriveSeed(cfg.seed, pgText + "|" + pt.text());
    const std::vector<std::uint32_t> sampled = sampleRows(subpopRows, cfg.sampleSize, callSeed);

    // Adjustment set: union of DAG parents of the treatment attributes;
    // attributes absent from the DAG act as isolated nodes.
    std::set<std::string> zSet;
    for (const auto& attr : pt.attributes()) {
        for (auto& p : g.parentsOrEmpty(attr)) zSet.insert(std::move(p));
    }
    for (const auto& attr : pt.attributes()) zSet.erase(attr);
    zSet.erase(q.avgAttr);
    std::vector<std::string> zAttrs;
    for (const auto& z : zSet) {
        if (d.hasAttribute(z)) zAttrs.push_back(z);
    }

    const Column& outcome = d.column(q.avgAttr);
    std::vector<std::size_t> zCols;
    zCols.reserve(zAttrs.size());
    for (const auto& z : zAttrs) zCols.push_back(d.columnIndex(z));

    const std::vector<std::uint32_t> used = completeCases(d, outcome, zCols, sampled);
    if (used.empty()) return CateOutcome::skipped(SkipReason::EmptySubpopulation);

    const std::vector<std::uint8_t> treated = assignTreatment(d, used, pt);
    std::size_t nTreated = 0;
    for (std::uint8_t t : treated) nTreated += t;
    const std::size_t nControl = used.size() - nTreated;
    if (nTreated < cfg.minArm || nControl < cfg.minArm) {
        return CateOutcome::skipped(SkipReason::Overlap);
    }

    const std::size_t n = used.size();
    Eigen::VectorXd y(n);
    for (std::size_t i = 0; i < n; ++i) y(static_cast<Eigen::Index>(i)) = outcome.nums[used[i]];
    Eigen::VectorXd tCol(n);
    for (std::size_t i = 0; i < n; ++i) tCol(static_cast<Eigen::Index>(i)) = treated[i];

    // Candidate adjustment columns: one-hot per non-reference level of each
    // categorical member (reference = smallest domain value), raw numerics.
    std::vector<Eigen::VectorXd> zColumns;
    for (std::size_t c : zCols) {
        const Column& col = d.columns[c];
        if (col.kind == AttrKind::Numeric) {
            Eigen::VectorXd v(n);
            for (std::size_t i = 0; i < n; ++i) v(static_cast<Eigen::Index>(i)) = col.nums[used[i]];
            zColumns.push_back(std::move(v));
        } else {
            for (std::size_t level = 1; level < col.dict.size(); ++level) {
                Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
                bool any = false;
                for (std::size_t i = 0; i < n; ++i) {
                    if (col.codes[used[i]] == static_cast<std::int32_t>(level)) {
                        v(static_cast<Eigen::Index>(i)) = 1.0;
                        any = true;
                    }
                }
                if (any) zColumns.push_back(std::move(v));
            }
        }
    }

    // Deterministic rank screen: keep each column only if it is not in the
    // span of the previously kept ones (orthogonal residual test, applied
    // twice for numerical headroom). The intercept is always kept.
    const Eigen::Index ni = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd basis(ni, 1 + zColumns.size() + 1);
    Eigen::Index basisCols = 0;
    auto residualAgainstBasis = [&](const Eigen::VectorXd& v) {
        Eigen::VectorXd r = v;
        for (int pass = 0; pass < 2; ++pass) {
            if (basisCols > 0) r -= basis.leftCols(basisCols) * (basis.leftCols(basisCols).transpose() * r);
        }
        return r;
    };
    std::vector<Eigen::VectorXd> kept;
    auto tryKeep = [&](const Eigen::VectorXd& v) {
        Eigen::VectorXd r = residualAgainstBasis(v);
        const double norm = r.norm();
        if (norm <= kCollinearTol * std::max(1.0, v.norm())) return false;
        basis.col(basisCols++) = r / norm;
        kept.push_back(v);
        return true;
    };
    tryKeep(Eigen::VectorXd::Ones(ni));
    for (const auto& z : zColumns) tryKeep(z);
    if (!tryKeep(tCol)) return CateOutcome::skipped(SkipReason::Collinear);

    const std::size_t p = kept.size();
    if (n <= p) return CateOutcome::skipped(SkipReason::Collinear);

    Eigen::MatrixXd x(ni, static_cast<Eigen::Index>(p));
    for (std::size_t j = 0; j < p; ++j) x.col(static_cast<Eigen::Index>(j)) = kept[j];
    const Eigen::Index tIdx = static_cast<Eigen::Index>(p - 1);

    Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
    const Eigen::VectorXd beta = qr.solve(y);
    const Eigen::VectorXd resid = y - x * beta;
    const double rss = resid.squaredNorm();
    const double df = static_cast<double>(n - p);
    const double sigma2 = rss / df;

    // (X^T X)^-1 diagonal from the thin R factor: R^-1 R^-T.
    const Eigen::MatrixXd r =
        qr.matrixQR().topRows(static_cast<Eigen::Index>(p)).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd rInv =
        r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(
            static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p)));
    const double xtxInvTT = rInv.row(tIdx).squaredNorm();

    CateEstimate est;
    est.cate = beta(tIdx);
    est.stdError = std::sqrt(std::max(0.0, sigma2 * xtxInvTT));
    est.nTreated = nTreated;
    est.nControl = nControl;
    est.nUsed = n;
    if (est.stdError < 1e-300) {
        est.pValue = std::fabs(est.cate) < 1e-12 ? 1.0 : 0.0;
    } else {
        est.pValue = studentTTwoSidedP(est.cate / est.stdError, df);
    }
    if (!std::isfinite(est.cate) || !std::isfinite(est.stdError) || !std::isfinite(est.pValue)) {
        throw EngineError("non-finite effect estimate for treatment '" + pt.text() + "'");
    }
    return CateOutcome::of(est);
}

CateOutcome estimateCate(const Dataset& d, const QuerySpec& q, const Pattern& pg,
                         const Pattern& pt, const CausalDag& g, const EngineConfig& cfg) {
    std::optional<CompiledPattern> where;
    if (q.where) where.emplace(*q.where, d);
    CompiledPattern pgCompiled(pg, d);
    std::vector<std::uint32_t> rows;
    rows.reserve(d.rowCount);
    for (std::size_t r = 0; r < d.rowCount; ++r) {
        if (where && !where->matches(d, r)) continue;
        if (pgCompiled.matches(d, r)) rows.push_back(static_cast<std::uint32_t>(r));
    }
    return estimateCateOnRows(d, q, rows, pg.text(), pt, g, cfg);
}

}  // namespace causumx
