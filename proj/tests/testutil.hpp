#pragma once

#include <string>
#include <vector>

#include "causumx/common.hpp"
#include "causumx/patterns.hpp"
#include "causumx/tabular.hpp"

namespace causumx::testutil {

inline Dataset table(const std::string& csvText) { return parseCsv(csvText); }

// Small random categorical table: `attrs` columns named c0..c{n-1} with the
// given domain sizes, values v0..v{d-1}.
inline Dataset randomTable(Rng& rng, std::size_t rows, const std::vector<std::size_t>& domainSizes,
                           double missingRate = 0.0) {
    std::string csv;
    for (std::size_t a = 0; a < domainSizes.size(); ++a) {
        if (a > 0) csv += ',';
        csv += "c" + std::to_string(a);
    }
    csv += '\n';
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t a = 0; a < domainSizes.size(); ++a) {
            if (a > 0) csv += ',';
            if (missingRate > 0.0 && rng.nextUnit() < missingRate) continue;
            csv += "v" + std::to_string(rng.nextBelow(domainSizes[a]));
        }
        csv += '\n';
    }
    return table(csv);
}

inline Pattern eq(const std::string& attr, const std::string& value) {
    return Pattern::create({SimplePredicate{attr, PredOp::Eq, value}});
}

inline Pattern numericPred(const std::string& attr, PredOp op, double value) {
    return Pattern::create({SimplePredicate{attr, op, value}});
}

// Deterministic standard normal draw (Box-Muller over the portable RNG).
inline double nextGaussian(Rng& rng) {
    double u1 = rng.nextUnit();
    while (u1 <= 1e-12) u1 = rng.nextUnit();
    const double u2 = rng.nextUnit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return r * std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace causumx::testutil
