#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "causumx/tabular.hpp"

namespace causumx {

enum class PredOp { Eq, Lt, Gt, Le, Ge };

std::string_view opText(PredOp op);

using Literal = std::variant<std::string, double>;

struct SimplePredicate {
    std::string attr;
    PredOp op = PredOp::Eq;
    Literal value;

    std::string text() const;
    bool operator==(const SimplePredicate&) const = default;
};

bool predicateLess(const SimplePredicate& a, const SimplePredicate& b);

// Conjunction of simple predicates in canonical (attr, op, value) order.
// The empty pattern is the tautology. Construction rejects two equality
// predicates on one attribute with different values and duplicate
// (attr, op) pairs.
struct Pattern {
    std::vector<SimplePredicate> predicates;

    static Pattern create(std::vector<SimplePredicate> preds);                 // throws DataError
    static std::optional<Pattern> tryCreate(std::vector<SimplePredicate> preds);

    std::size_t length() const { return predicates.size(); }
    bool empty() const { return predicates.empty(); }
    std::vector<std::string> attributes() const;

    // "attr op value" joined by " AND "; equality values with spaces quoted.
    std::string text() const;

    bool operator==(const Pattern&) const = default;
};

struct PatternHash {
    std::size_t operator()(const Pattern& p) const;
};

// Predicate list compiled against a concrete dataset for fast row tests.
class CompiledPattern {
public:
    CompiledPattern(const Pattern& p, const Dataset& d);  // throws DataError on unknown attr
    bool matches(const Dataset& d, std::size_t row) const;

private:
    struct Test {
        std::size_t col;
        PredOp op;
        bool categorical;
        std::int32_t code;   // -2: literal outside active domain
        double num;
    };
    std::vector<Test> tests_;
};

bool matches(const Pattern& p, const Dataset& d, std::size_t row);

// Groups of the view whose (FD-unique) attribute values satisfy pg, as
// sorted view indices. Throws DataError when pg uses an attribute not
// functionally determined by the group-by attributes.
std::vector<std::uint32_t> coveredGroups(const Pattern& pg, const Dataset& d,
                                         const QuerySpec& q, const AggregateView& view);

// Equal-frequency cut points for a numeric column: sorted distinct values at
// quantiles i/bins, deduplicated. Each cut yields the predicate pair
// (attr <= cut) and (attr > cut).
std::vector<double> binCuts(const Dataset& d, const std::string& attr, int bins);

// Textual syntax: `attr op value` joined by " AND "; ops =, <, >, <=, >=.
Pattern parsePattern(const std::string& text, const Dataset& d);

}  // namespace causumx
