#include "causumx/tabular.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "causumx/common.hpp"
#include "causumx/patterns.hpp"

namespace causumx {

namespace {

bool parseFiniteDouble(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto res = std::from_chars(first, last, out);
    if (res.ec != std::errc() || res.ptr != last) return false;
    return std::isfinite(out);
}

// RFC-4180 record reader: quoted fields may contain separators, newlines and
// doubled quotes. Returns false at end of input.
class CsvReader {
public:
    CsvReader(const std::string& text, const std::string& source)
        : text_(text), source_(source) {}

    bool nextRecord(std::vector<std::string>& fields) {
        fields.clear();
        if (pos_ >= text_.size()) return false;
        recordLine_ = line_;
        std::string field;
        bool quoted = false;
        bool started = false;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (quoted) {
                if (c == '"') {
                    if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '"') {
                        field += '"';
                        pos_ += 2;
                    } else {
                        quoted = false;
                        ++pos_;
                    }
                } else {
                    if (c == '\n') ++line_;
                    field += c;
                    ++pos_;
                }
                continue;
            }
            if (c == '"' && field.empty() && !started) {
                quoted = true;
                started = true;
                ++pos_;
            } else if (c == ',') {
                fields.push_back(std::move(field));
                field.clear();
                started = false;
                ++pos_;
            } else if (c == '\r' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '\n') {
                pos_ += 2;
                ++line_;
                fields.push_back(std::move(field));
                return true;
            } else if (c == '\n') {
                ++pos_;
                ++line_;
                fields.push_back(std::move(field));
                return true;
            } else {
                field += c;
                started = true;
                ++pos_;
            }
        }
        if (quoted) throw DataError(source_ + ": unterminated quoted field at line " + std::to_string(recordLine_));
        fields.push_back(std::move(field));
        return true;
    }

    std::size_t recordLine() const { return recordLine_; }

private:
    const std::string& text_;
    std::string source_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t recordLine_ = 1;
};

Column buildColumn(const std::vector<std::string>& cells, AttrKind kind,
                   const std::string& attr, const std::string& source) {
    Column col;
    col.kind = kind;
    if (kind == AttrKind::Numeric) {
        col.nums.reserve(cells.size());
        for (std::size_t r = 0; r < cells.size(); ++r) {
            if (cells[r].empty()) {
                col.nums.push_back(std::numeric_limits<double>::quiet_NaN());
                continue;
            }
            double v;
            if (!parseFiniteDouble(cells[r], v)) {
                throw DataError(source + ": column '" + attr + "' forced numeric but row " +
                                std::to_string(r + 1) + " holds '" + cells[r] + "'");
            }
            col.nums.push_back(v);
        }
    } else {
        std::vector<std::string> distinct;
        {
            std::unordered_set<std::string> seen;
            for (const auto& c : cells) {
                if (!c.empty() && seen.insert(c).second) distinct.push_back(c);
            }
        }
        std::sort(distinct.begin(), distinct.end());
        std::unordered_map<std::string, std::int32_t> codeOf;
        codeOf.reserve(distinct.size());
        for (std::size_t i = 0; i < distinct.size(); ++i) codeOf[distinct[i]] = static_cast<std::int32_t>(i);
        col.dict = std::move(distinct);
        col.codes.reserve(cells.size());
        for (const auto& c : cells) {
            col.codes.push_back(c.empty() ? -1 : codeOf[c]);
        }
    }
    return col;
}

std::string escapeCsv(const std::string& s) {
    const bool needsQuote = s.find_first_of(",\"\n\r") != std::string::npos;
    if (!needsQuote) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

}  // namespace

bool Column::isMissing(std::size_t row) const {
    return kind == AttrKind::Categorical ? codes[row] < 0 : std::isnan(nums[row]);
}

std::int32_t Column::codeOf(const std::string& value) const {
    auto it = std::lower_bound(dict.begin(), dict.end(), value);
    if (it == dict.end() || *it != value) return -2;
    return static_cast<std::int32_t>(it - dict.begin());
}

bool Dataset::hasAttribute(const std::string& name) const {
    return std::find(schema.begin(), schema.end(), name) != schema.end();
}

std::size_t Dataset::columnIndex(const std::string& name) const {
    auto it = std::find(schema.begin(), schema.end(), name);
    if (it == schema.end()) throw DataError("unknown attribute '" + name + "'");
    return static_cast<std::size_t>(it - schema.begin());
}

std::vector<std::string> Dataset::activeDomain(const std::string& name) const {
    const Column& col = column(name);
    if (col.kind == AttrKind::Categorical) return col.dict;
    std::vector<double> distinct;
    for (double v : col.nums) {
        if (!std::isnan(v)) distinct.push_back(v);
    }
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    std::vector<std::string> out;
    out.reserve(distinct.size());
    for (double v : distinct) out.push_back(formatDouble(v));
    return out;
}

std::string Dataset::cellText(std::size_t row, std::size_t col) const {
    const Column& c = columns[col];
    if (c.isMissing(row)) return "";
    if (c.kind == AttrKind::Categorical) return c.dict[static_cast<std::size_t>(c.codes[row])];
    return formatDouble(c.nums[row]);
}

Dataset parseCsv(const std::string& text, const std::map<std::string, AttrKind>& kindOverrides,
                 const std::string& sourceName) {
    CsvReader reader(text, sourceName);
    std::vector<std::string> header;
    if (!reader.nextRecord(header) || header.empty()) {
        throw DataError(sourceName + ": missing header row");
    }
    {
        std::unordered_set<std::string> seen;
        for (const auto& name : header) {
            if (name.empty()) throw DataError(sourceName + ": empty attribute name in header");
            if (!seen.insert(name).second) {
                throw DataError(sourceName + ": duplicate attribute name '" + name + "' in header");
            }
        }
    }
    for (const auto& [attr, kind] : kindOverrides) {
        (void)kind;
        if (std::find(header.begin(), header.end(), attr) == header.end()) {
            throw DataError(sourceName + ": kind override for unknown attribute '" + attr + "'");
        }
    }

    const std::size_t width = header.size();
    std::vector<std::vector<std::string>> cells(width);
    std::vector<std::string> record;
    std::size_t rowIndex = 0;
    while (reader.nextRecord(record)) {
        if (record.size() == 1 && record[0].empty()) continue;  // blank trailing line
        if (record.size() != width) {
            throw DataError(sourceName + ": row " + std::to_string(rowIndex + 1) + " (line " +
                            std::to_string(reader.recordLine()) + ") has " +
                            std::to_string(record.size()) + " fields, expected " +
                            std::to_string(width));
        }
        for (std::size_t c = 0; c < width; ++c) cells[c].push_back(std::move(record[c]));
        ++rowIndex;
    }

    Dataset d;
    d.schema = header;
    d.rowCount = rowIndex;
    d.columns.reserve(width);
    for (std::size_t c = 0; c < width; ++c) {
        AttrKind kind;
        auto it = kindOverrides.find(header[c]);
        if (it != kindOverrides.end()) {
            kind = it->second;
        } else {
            kind = AttrKind::Numeric;
            bool sawValue = false;
            for (const auto& cell : cells[c]) {
                if (cell.empty()) continue;
                sawValue = true;
                double v;
                if (!parseFiniteDouble(cell, v)) {
                    kind = AttrKind::Categorical;
                    break;
                }
            }
            if (!sawValue) kind = AttrKind::Categorical;  // all-missing column
        }
        d.columns.push_back(buildColumn(cells[c], kind, header[c], sourceName));
    }
    return d;
}

Dataset loadCsv(const std::string& path, const std::map<std::string, AttrKind>& kindOverrides) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open data file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parseCsv(buf.str(), kindOverrides, path);
}

std::string renderCsv(const Dataset& d) {
    std::string out;
    for (std::size_t c = 0; c < d.schema.size(); ++c) {
        if (c > 0) out += ',';
        out += escapeCsv(d.schema[c]);
    }
    out += '\n';
    for (std::size_t r = 0; r < d.rowCount; ++r) {
        for (std::size_t c = 0; c < d.schema.size(); ++c) {
            if (c > 0) out += ',';
            out += escapeCsv(d.cellText(r, c));
        }
        out += '\n';
    }
    return out;
}

void writeCsv(const Dataset& d, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write data file '" + path + "'");
    out << renderCsv(d);
    if (!out) throw DataError("failed writing data file '" + path + "'");
}

void validateQuery(const Dataset& d, const QuerySpec& q) {
    if (q.groupBy.empty()) throw DataError("query needs at least one group-by attribute");
    for (const auto& a : q.groupBy) {
        if (d.column(a).kind != AttrKind::Categorical) {
            throw DataError("group-by attribute '" + a + "' must be categorical");
        }
        if (a == q.avgAttr) throw DataError("group-by attributes may not include the average attribute");
    }
    if (d.column(q.avgAttr).kind != AttrKind::Numeric) {
        throw DataError("average attribute '" + q.avgAttr + "' must be numeric");
    }
}

AggregateView evaluateQuery(const Dataset& d, const QuerySpec& q) {
    validateQuery(d, q);
    std::optional<CompiledPattern> where;
    if (q.where) where.emplace(*q.where, d);

    std::vector<std::size_t> gbCols;
    gbCols.reserve(q.groupBy.size());
    for (const auto& a : q.groupBy) gbCols.push_back(d.columnIndex(a));
    const Column& outcome = d.column(q.avgAttr);

    struct Agg {
        double sum = 0.0;
        std::size_t count = 0;
        std::size_t repRow = 0;
    };
    std::map<std::vector<std::int32_t>, Agg> byKey;  // sorted dict codes => sorted keys
    std::vector<std::int32_t> key(gbCols.size());
    for (std::size_t r = 0; r < d.rowCount; ++r) {
        if (where && !where->matches(d, r)) continue;
        if (outcome.isMissing(r)) continue;
        bool keyMissing = false;
        for (std::size_t i = 0; i < gbCols.size(); ++i) {
            key[i] = d.columns[gbCols[i]].codes[r];
            if (key[i] < 0) {
                keyMissing = true;
                break;
            }
        }
        if (keyMissing) continue;
        auto [it, fresh] = byKey.try_emplace(key);
        if (fresh) it->second.repRow = r;
        it->second.sum += outcome.nums[r];
        it->second.count += 1;
    }
    if (byKey.empty()) throw DataError("query returned an empty view");

    AggregateView view;
    view.groups.reserve(byKey.size());
    for (const auto& [codes, agg] : byKey) {
        GroupEntry e;
        e.key.reserve(codes.size());
        for (std::size_t i = 0; i < codes.size(); ++i) {
            e.key.push_back(d.columns[gbCols[i]].dict[static_cast<std::size_t>(codes[i])]);
        }
        e.avg = agg.sum / static_cast<double>(agg.count);
        e.count = agg.count;
        e.repRow = agg.repRow;
        view.groups.push_back(std::move(e));
    }
    return view;
}

bool checkFd(const Dataset& d, const std::vector<std::string>& gb, const std::string& w) {
    std::vector<std::size_t> gbCols;
    gbCols.reserve(gb.size());
    for (const auto& a : gb) gbCols.push_back(d.columnIndex(a));
    const Column& target = d.column(w);

    // Key rows by their gb value tuple; missing is one extra value per attr.
    std::unordered_map<std::string, std::size_t> firstRowOfKey;
    std::string key;
    for (std::size_t r = 0; r < d.rowCount; ++r) {
        key.clear();
        for (std::size_t c : gbCols) {
            const Column& col = d.columns[c];
            if (col.kind == AttrKind::Categorical) {
                key += std::to_string(col.codes[r]);
            } else {
                key += col.isMissing(r) ? std::string("m") : formatDouble(col.nums[r]);
            }
            key += '\x1f';
        }
        auto [it, fresh] = firstRowOfKey.try_emplace(key, r);
        if (fresh) continue;
        const std::size_t prev = it->second;
        if (target.kind == AttrKind::Categorical) {
            if (target.codes[prev] != target.codes[r]) return false;
        } else {
            const bool mPrev = target.isMissing(prev);
            const bool mCur = target.isMissing(r);
            if (mPrev != mCur) return false;
            if (!mPrev && target.nums[prev] != target.nums[r]) return false;
        }
    }
    return true;
}

AttributePartition partitionAttributes(const Dataset& d, const QuerySpec& q) {
    validateQuery(d, q);
    AttributePartition part;
    for (const auto& a : q.groupBy) part.grouping.insert(a);
    for (const auto& attr : d.schema) {
        if (attr == q.avgAttr || part.grouping.count(attr)) continue;
        if (d.column(attr).kind == AttrKind::Categorical && checkFd(d, q.groupBy, attr)) {
            part.grouping.insert(attr);
        } else {
            part.treatment.insert(attr);
        }
    }
    return part;
}

Dataset filterDataset(const Dataset& d, const Pattern& where) {
    CompiledPattern compiled(where, d);
    std::vector<std::size_t> keep;
    keep.reserve(d.rowCount);
    for (std::size_t r = 0; r < d.rowCount; ++r) {
        if (compiled.matches(d, r)) keep.push_back(r);
    }
    Dataset out;
    out.schema = d.schema;
    out.rowCount = keep.size();
    out.columns.reserve(d.columns.size());
    for (std::size_t c = 0; c < d.columns.size(); ++c) {
        const Column& src = d.columns[c];
        Column col;
        col.kind = src.kind;
        if (src.kind == AttrKind::Numeric) {
            col.nums.reserve(keep.size());
            for (std::size_t r : keep) col.nums.push_back(src.nums[r]);
        } else {
            // Dictionaries are rebuilt so the active domain stays exact.
            std::vector<std::string> distinct;
            for (std::size_t r : keep) {
                if (!src.isMissing(r)) distinct.push_back(src.dict[static_cast<std::size_t>(src.codes[r])]);
            }
            std::sort(distinct.begin(), distinct.end());
            distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
            std::unordered_map<std::string, std::int32_t> codeOf;
            for (std::size_t i = 0; i < distinct.size(); ++i) codeOf[distinct[i]] = static_cast<std::int32_t>(i);
            col.codes.reserve(keep.size());
            for (std::size_t r : keep) {
                col.codes.push_back(src.isMissing(r)
                                        ? -1
                                        : codeOf[src.dict[static_cast<std::size_t>(src.codes[r])]]);
            }
            col.dict = std::move(distinct);
        }
        out.columns.push_back(std::move(col));
    }
    return out;
}

}  // namespace causumx
