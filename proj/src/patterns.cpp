#include "causumx/patterns.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "causumx/common.hpp"

namespace causumx {

namespace {

int opRank(PredOp op) {
    switch (op) {
        case PredOp::Eq: return 0;
        case PredOp::Lt: return 1;
        case PredOp::Gt: return 2;
        case PredOp::Le: return 3;
        case PredOp::Ge: return 4;
    }
    return 5;
}

std::string literalText(const Literal& v) {
    if (std::holds_alternative<double>(v)) return formatDouble(std::get<double>(v));
    return std::get<std::string>(v);
}

std::string quoteIfNeeded(const std::string& s) {
    if (s.find(' ') == std::string::npos && s.find('"') == std::string::npos && !s.empty()) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

}  // namespace

std::string_view opText(PredOp op) {
    switch (op) {
        case PredOp::Eq: return "=";
        case PredOp::Lt: return "<";
        case PredOp::Gt: return ">";
        case PredOp::Le: return "<=";
        case PredOp::Ge: return ">=";
    }
    return "?";
}

std::string SimplePredicate::text() const {
    std::string out = attr;
    out += ' ';
    out += opText(op);
    out += ' ';
    if (op == PredOp::Eq && std::holds_alternative<std::string>(value)) {
        out += quoteIfNeeded(std::get<std::string>(value));
    } else {
        out += literalText(value);
    }
    return out;
}

bool predicateLess(const SimplePredicate& a, const SimplePredicate& b) {
    if (a.attr != b.attr) return a.attr < b.attr;
    if (opRank(a.op) != opRank(b.op)) return opRank(a.op) < opRank(b.op);
    if (a.value.index() != b.value.index()) return a.value.index() < b.value.index();
    if (std::holds_alternative<double>(a.value)) {
        return std::get<double>(a.value) < std::get<double>(b.value);
    }
    return std::get<std::string>(a.value) < std::get<std::string>(b.value);
}

std::optional<Pattern> Pattern::tryCreate(std::vector<SimplePredicate> preds) {
    std::sort(preds.begin(), preds.end(), predicateLess);
    preds.erase(std::unique(preds.begin(), preds.end()), preds.end());
    for (std::size_t i = 1; i < preds.size(); ++i) {
        if (preds[i].attr == preds[i - 1].attr && preds[i].op == preds[i - 1].op) {
            return std::nullopt;  // same (attr, op) with a different value
        }
    }
    Pattern p;
    p.predicates = std::move(preds);
    return p;
}

Pattern Pattern::create(std::vector<SimplePredicate> preds) {
    auto p = tryCreate(std::move(preds));
    if (!p) throw DataError("unsatisfiable or redundant pattern rejected");
    return std::move(*p);
}

std::vector<std::string> Pattern::attributes() const {
    std::vector<std::string> out;
    for (const auto& pred : predicates) {
        if (std::find(out.begin(), out.end(), pred.attr) == out.end()) out.push_back(pred.attr);
    }
    return out;
}

std::string Pattern::text() const {
    if (predicates.empty()) return "";
    std::vector<std::string> parts;
    parts.reserve(predicates.size());
    for (const auto& p : predicates) parts.push_back(p.text());
    return joinStrings(parts, " AND ");
}

std::size_t PatternHash::operator()(const Pattern& p) const {
    std::uint64_t h = 1469598103934665603ull;
    for (const auto& pred : p.predicates) {
        h = fnv1a64(pred.attr, h);
        h = fnv1a64(opText(pred.op), h);
        if (std::holds_alternative<double>(pred.value)) {
            const double v = std::get<double>(pred.value);
            h = fnv1a64(std::string_view(reinterpret_cast<const char*>(&v), sizeof(v)), h);
        } else {
            h = fnv1a64(std::get<std::string>(pred.value), h);
        }
    }
    return static_cast<std::size_t>(h);
}

CompiledPattern::CompiledPattern(const Pattern& p, const Dataset& d) {
    tests_.reserve(p.predicates.size());
    for (const auto& pred : p.predicates) {
        Test t;
        t.col = d.columnIndex(pred.attr);
        t.op = pred.op;
        const Column& col = d.columns[t.col];
        t.categorical = col.kind == AttrKind::Categorical;
        if (t.categorical) {
            if (pred.op != PredOp::Eq) {
                throw DataError("ordering predicate on categorical attribute '" + pred.attr + "'");
            }
            if (!std::holds_alternative<std::string>(pred.value)) {
                throw DataError("numeric literal on categorical attribute '" + pred.attr + "'");
            }
            t.code = col.codeOf(std::get<std::string>(pred.value));
            t.num = 0.0;
        } else {
            if (!std::holds_alternative<double>(pred.value)) {
                throw DataError("string literal on numeric attribute '" + pred.attr + "'");
            }
            t.code = 0;
            t.num = std::get<double>(pred.value);
        }
        tests_.push_back(t);
    }
}

bool CompiledPattern::matches(const Dataset& d, std::size_t row) const {
    for (const auto& t : tests_) {
        const Column& col = d.columns[t.col];
        if (t.categorical) {
            if (col.codes[row] < 0 || col.codes[row] != t.code) return false;
        } else {
            const double v = col.nums[row];  // NaN compares false everywhere
            switch (t.op) {
                case PredOp::Eq:
                    if (!(v == t.num)) return false;
                    break;
                case PredOp::Lt:
                    if (!(v < t.num)) return false;
                    break;
                case PredOp::Gt:
                    if (!(v > t.num)) return false;
                    break;
                case PredOp::Le:
                    if (!(v <= t.num)) return false;
                    break;
                case PredOp::Ge:
                    if (!(v >= t.num)) return false;
                    break;
            }
        }
    }
    return true;
}

bool matches(const Pattern& p, const Dataset& d, std::size_t row) {
    return CompiledPattern(p, d).matches(d, row);
}

std::vector<std::uint32_t> coveredGroups(const Pattern& pg, const Dataset& d, const QuerySpec& q,
                                         const AggregateView& view) {
    for (const auto& attr : pg.attributes()) {
        if (!checkFd(d, q.groupBy, attr)) {
            throw DataError("grouping pattern attribute '" + attr +
                            "' is not functionally determined by the group-by attributes");
        }
    }
    CompiledPattern compiled(pg, d);
    std::vector<std::uint32_t> out;
    for (std::size_t i = 0; i < view.groups.size(); ++i) {
        if (compiled.matches(d, view.groups[i].repRow)) out.push_back(static_cast<std::uint32_t>(i));
    }
    return out;
}

std::vector<double> binCuts(const Dataset& d, const std::string& attr, int bins) {
    if (bins < 2) return {};
    const Column& col = d.column(attr);
    if (col.kind != AttrKind::Numeric) throw DataError("binCuts needs a numeric attribute");
    std::vector<double> values;
    values.reserve(col.nums.size());
    for (double v : col.nums) {
        if (!std::isnan(v)) values.push_back(v);
    }
    if (values.empty()) return {};
    std::sort(values.begin(), values.end());
    std::vector<double> cuts;
    for (int i = 1; i < bins; ++i) {
        const std::size_t idx = (static_cast<std::size_t>(i) * values.size()) / static_cast<std::size_t>(bins);
        const double cut = values[std::min(idx, values.size() - 1)];
        if (cuts.empty() || cuts.back() != cut) cuts.push_back(cut);
    }
    // A cut equal to the maximum makes (attr > cut) unsatisfiable; drop it.
    while (!cuts.empty() && cuts.back() >= values.back()) cuts.pop_back();
    return cuts;
}

namespace {

struct PatternLexer {
    const std::string& text;
    std::size_t pos = 0;

    void skipSpace() {
        while (pos < text.size() && text[pos] == ' ') ++pos;
    }
    bool done() {
        skipSpace();
        return pos >= text.size();
    }
    std::string token() {
        skipSpace();
        if (pos >= text.size()) throw DataError("pattern syntax: unexpected end of input");
        if (text[pos] == '"') {
            ++pos;
            std::string out;
            while (pos < text.size()) {
                if (text[pos] == '"') {
                    if (pos + 1 < text.size() && text[pos + 1] == '"') {
                        out += '"';
                        pos += 2;
                    } else {
                        ++pos;
                        return out;
                    }
                } else {
                    out += text[pos++];
                }
            }
            throw DataError("pattern syntax: unterminated quote");
        }
        std::size_t start = pos;
        while (pos < text.size() && text[pos] != ' ') ++pos;
        return text.substr(start, pos - start);
    }
};

PredOp parseOp(const std::string& tok) {
    if (tok == "=") return PredOp::Eq;
    if (tok == "<") return PredOp::Lt;
    if (tok == ">") return PredOp::Gt;
    if (tok == "<=") return PredOp::Le;
    if (tok == ">=") return PredOp::Ge;
    throw DataError("pattern syntax: unknown operator '" + tok + "'");
}

}  // namespace

Pattern parsePattern(const std::string& text, const Dataset& d) {
    std::vector<SimplePredicate> preds;
    PatternLexer lex{text};
    bool expectPredicate = false;
    while (!lex.done()) {
        const std::string attr = lex.token();
        const PredOp op = parseOp(lex.token());
        const std::string raw = lex.token();
        const Column& col = d.column(attr);
        SimplePredicate pred;
        pred.attr = attr;
        pred.op = op;
        if (col.kind == AttrKind::Numeric) {
            try {
                std::size_t used = 0;
                const double v = std::stod(raw, &used);
                if (used != raw.size()) throw std::invalid_argument(raw);
                pred.value = v;
            } catch (const std::exception&) {
                throw DataError("pattern syntax: '" + raw + "' is not numeric (attribute '" + attr + "')");
            }
        } else {
            if (op != PredOp::Eq) {
                throw DataError("pattern syntax: ordering operator on categorical attribute '" + attr + "'");
            }
            pred.value = raw;
        }
        preds.push_back(std::move(pred));
        expectPredicate = false;
        if (!lex.done()) {
            const std::string conj = lex.token();
            if (conj != "AND") throw DataError("pattern syntax: expected AND, got '" + conj + "'");
            expectPredicate = true;
        }
    }
    if (expectPredicate) throw DataError("pattern syntax: dangling AND");
    return Pattern::create(std::move(preds));
}

}  // namespace causumx
