#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace causumx {

struct Pattern;  // patterns.hpp

enum class AttrKind { Categorical, Numeric };

// One column of an immutable dataset. Categorical columns are dictionary
// encoded with a lexicographically sorted dictionary, so code order equals
// value order; code -1 marks a missing cell. Numeric columns use NaN for
// missing (only finite values parse as numeric, so NaN is unambiguous).
struct Column {
    AttrKind kind = AttrKind::Categorical;
    std::vector<std::int32_t> codes;     // categorical payload
    std::vector<std::string> dict;       // sorted distinct non-missing values
    std::vector<double> nums;            // numeric payload

    std::size_t size() const { return kind == AttrKind::Categorical ? codes.size() : nums.size(); }
    bool isMissing(std::size_t row) const;
    // Code of a categorical literal, or -2 when the value is outside the
    // active domain (matches nothing).
    std::int32_t codeOf(const std::string& value) const;
};

class Dataset {
public:
    std::vector<std::string> schema;
    std::vector<Column> columns;
    std::size_t rowCount = 0;

    bool hasAttribute(const std::string& name) const;
    std::size_t columnIndex(const std::string& name) const;  // throws DataError
    const Column& column(const std::string& name) const { return columns[columnIndex(name)]; }

    // Exact set of distinct non-missing values in a column, sorted
    // (lexicographically for categorical, numerically for numeric).
    std::vector<std::string> activeDomain(const std::string& name) const;

    std::string cellText(std::size_t row, std::size_t col) const;  // missing -> ""
};

struct QuerySpec {
    std::vector<std::string> groupBy;
    std::string avgAttr;
    std::optional<Pattern> where;
};

struct GroupEntry {
    std::vector<std::string> key;
    double avg = 0.0;
    std::size_t count = 0;
    std::size_t repRow = 0;  // a row of the filtered table belonging to this group
};

struct AggregateView {
    std::vector<GroupEntry> groups;
    std::size_t m() const { return groups.size(); }
};

// CSV ingestion (RFC-4180 style, UTF-8, mandatory header, "" = missing).
// A column is numeric iff every non-missing cell parses fully as a finite
// decimal number; overrides win over inference.
Dataset loadCsv(const std::string& path,
                const std::map<std::string, AttrKind>& kindOverrides = {});
Dataset parseCsv(const std::string& text,
                 const std::map<std::string, AttrKind>& kindOverrides = {},
                 const std::string& sourceName = "<string>");
void writeCsv(const Dataset& d, const std::string& path);
std::string renderCsv(const Dataset& d);

void validateQuery(const Dataset& d, const QuerySpec& q);

// Rows failing the WHERE pattern or with missing avg/group-by cells are
// excluded; groups are sorted by key. Throws DataError when nothing survives.
AggregateView evaluateQuery(const Dataset& d, const QuerySpec& q);

// True iff every pair of rows agreeing on gb agrees on w (missing cells act
// as one extra value).
bool checkFd(const Dataset& d, const std::vector<std::string>& gb, const std::string& w);

struct AttributePartition {
    std::set<std::string> grouping;
    std::set<std::string> treatment;
};

AttributePartition partitionAttributes(const Dataset& d, const QuerySpec& q);

// Materializes the sub-dataset of rows matching the pattern (dictionaries and
// domains are rebuilt, so all Dataset invariants hold on the result).
Dataset filterDataset(const Dataset& d, const Pattern& where);

}  // namespace causumx
