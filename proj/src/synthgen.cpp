#include "causumx/synthgen.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <unordered_map>

#include "causumx/common.hpp"

namespace causumx {

namespace {

Column categoricalColumn(const std::vector<std::string>& cells) {
    std::vector<std::string> distinct = cells;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    std::unordered_map<std::string, std::int32_t> codeOf;
    codeOf.reserve(distinct.size());
    for (std::size_t i = 0; i < distinct.size(); ++i) codeOf[distinct[i]] = static_cast<std::int32_t>(i);
    Column col;
    col.kind = AttrKind::Categorical;
    col.dict = std::move(distinct);
    col.codes.reserve(cells.size());
    for (const auto& c : cells) col.codes.push_back(codeOf[c]);
    return col;
}

}  // namespace

Dataset generateSynthetic(const SyntheticSpec& spec) {
    if (spec.n < 1) throw UsageError("synthetic generator needs n >= 1");
    if (spec.treatmentAttrs < 1) throw UsageError("synthetic generator needs at least one treatment attribute");

    const std::size_t n = spec.n;
    Dataset d;
    d.rowCount = n;
    d.schema.push_back("G");
    {
        std::vector<std::string> cells(n);
        for (std::size_t r = 0; r < n; ++r) cells[r] = std::to_string(r + 1);
        d.columns.push_back(categoricalColumn(cells));
    }
    for (std::size_t p = 1; p <= spec.groupingAttrs; ++p) {
        // G_p buckets rows 1..n into 2p equal-width ranges.
        d.schema.push_back("G_" + std::to_string(p));
        std::vector<std::string> cells(n);
        for (std::size_t r = 1; r <= n; ++r) {
            const std::size_t bucket = (r * 2 * p + n - 1) / n;  // ceil(r*2p/n)
            cells[r - 1] = std::to_string(bucket);
        }
        d.columns.push_back(categoricalColumn(cells));
    }

    Rng rng(spec.seed);
    std::vector<std::vector<int>> treatments(spec.treatmentAttrs, std::vector<int>(n));
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t q = 0; q < spec.treatmentAttrs; ++q) {
            treatments[q][r] = static_cast<int>(rng.nextBelow(5)) + 1;
        }
    }
    for (std::size_t q = 1; q <= spec.treatmentAttrs; ++q) {
        d.schema.push_back("T_" + std::to_string(q));
        std::vector<std::string> cells(n);
        for (std::size_t r = 0; r < n; ++r) cells[r] = std::to_string(treatments[q - 1][r]);
        d.columns.push_back(categoricalColumn(cells));
    }

    d.schema.push_back("O");
    {
        Column col;
        col.kind = AttrKind::Numeric;
        col.nums.resize(n);
        for (std::size_t r = 0; r < n; ++r) {
            int o = 0;
            for (std::size_t q = 0; q < spec.treatmentAttrs; ++q) {
                o += (q % 2 == 0) ? treatments[q][r] : -treatments[q][r];
            }
            col.nums[r] = static_cast<double>(o);
        }
        d.columns.push_back(std::move(col));
    }
    return d;
}

CausalDag syntheticDag(const SyntheticSpec& spec) {
    std::vector<std::string> nodes{"G", "O"};
    std::set<std::pair<std::string, std::string>> edges;
    for (std::size_t p = 1; p <= spec.groupingAttrs; ++p) nodes.push_back("G_" + std::to_string(p));
    for (std::size_t q = 1; q <= spec.treatmentAttrs; ++q) {
        const std::string name = "T_" + std::to_string(q);
        nodes.push_back(name);
        edges.emplace(name, "O");
    }
    return CausalDag::create(std::move(nodes), std::move(edges));
}

SyntheticFiles writeSyntheticFiles(const SyntheticSpec& spec, const std::string& outDir) {
    std::filesystem::create_directories(outDir);
    const Dataset d = generateSynthetic(spec);
    const CausalDag g = syntheticDag(spec);
    SyntheticFiles files;
    files.csvPath = (std::filesystem::path(outDir) / "synthetic.csv").string();
    files.dotPath = (std::filesystem::path(outDir) / "synthetic.dot").string();
    writeCsv(d, files.csvPath);
    std::ofstream out(files.dotPath, std::ios::binary);
    if (!out) throw DataError("cannot write DAG file '" + files.dotPath + "'");
    out << serializeDot(g);
    return files;
}

}  // namespace causumx
