#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "causumx/common.hpp"
#include "causumx/pipeline.hpp"
#include "causumx/synthgen.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

int runMain(int argc, char** argv) {
    CLI::App app{"causumx - summarized causal explanations for group-by-average views"};
    app.require_subcommand(0, 1);

    causumx::RunConfig cfg;
    std::string groupByCsv;
    std::string algorithm = "causumx";

    app.add_option("--data", cfg.dataPath, "input CSV file")->envname("CAUSUMX_DATA");
    app.add_option("--dag", cfg.dagPath, "causal DAG in DOT format")->envname("CAUSUMX_DAG");
    app.add_option("--group-by", groupByCsv, "comma-separated group-by attributes")
        ->envname("CAUSUMX_GROUP_BY");
    app.add_option("--avg", cfg.avgAttr, "average (outcome) attribute")->envname("CAUSUMX_AVG");
    app.add_option("--where", cfg.whereClause, "filter predicate, e.g. \"Country = US\"")
        ->envname("CAUSUMX_WHERE");
    app.add_option("--k", cfg.k, "maximum number of explanations")->envname("CAUSUMX_K");
    app.add_option("--theta", cfg.theta, "required coverage fraction")->envname("CAUSUMX_THETA");
    app.add_option("--tau", cfg.tau, "frequent-pattern support threshold")->envname("CAUSUMX_TAU");
    app.add_option("--sample-size", cfg.sampleSize, "row sample cap per effect estimate")
        ->envname("CAUSUMX_SAMPLE_SIZE");
    app.add_option("--alpha", cfg.alpha, "significance level")->envname("CAUSUMX_ALPHA");
    app.add_option("--min-arm", cfg.minArm, "minimum rows per treatment arm")
        ->envname("CAUSUMX_MIN_ARM");
    app.add_option("--bins", cfg.bins, "bins for numeric treatment attributes")
        ->envname("CAUSUMX_BINS");
    app.add_option("--algorithm", algorithm, "causumx | bruteforce | greedy")
        ->envname("CAUSUMX_ALGORITHM");
    app.add_option("--seed", cfg.seed, "random seed")->envname("CAUSUMX_SEED");
    app.add_option("--threads", cfg.threads, "worker threads (0 = hardware)")
        ->envname("CAUSUMX_THREADS");
    app.add_option("--output", cfg.output, "text | json")->envname("CAUSUMX_OUTPUT");

    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset and its DAG");
    causumx::SyntheticSpec spec;
    std::string outDir = ".";
    synth->add_option("--n", spec.n, "rows")->required();
    synth->add_option("--i", spec.groupingAttrs, "bucketed grouping attributes");
    synth->add_option("--j", spec.treatmentAttrs, "treatment attributes")->required();
    synth->add_option("--seed", spec.seed, "random seed");
    synth->add_option("--out-dir", outDir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (synth->parsed()) {
            const auto files = causumx::writeSyntheticFiles(spec, outDir);
            std::cout << files.csvPath << "\n" << files.dotPath << "\n";
            return kExitOk;
        }
        if (cfg.dataPath.empty() || cfg.dagPath.empty()) {
            throw causumx::UsageError("--data and --dag are required");
        }
        if (groupByCsv.empty()) throw causumx::UsageError("--group-by is required");
        cfg.groupBy.clear();
        std::size_t start = 0;
        while (start <= groupByCsv.size()) {
            const std::size_t comma = groupByCsv.find(',', start);
            const std::string part = groupByCsv.substr(
                start, comma == std::string::npos ? std::string::npos : comma - start);
            if (!part.empty()) cfg.groupBy.push_back(part);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        cfg.algorithm = causumx::parseAlgorithm(algorithm);
        cfg.validate();

        const causumx::SummaryReport report = causumx::runPipeline(cfg);
        for (const auto& t : report.timings) {
            std::fprintf(stderr, "[phase] %-18s %8.3fs\n", t.phase.c_str(), t.seconds);
        }
        if (cfg.output == "json") {
            std::cout << causumx::renderJson(report, cfg);
        } else {
            std::cout << causumx::renderText(report, cfg);
        }
        return kExitOk;
    } catch (const causumx::UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const causumx::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

}  // namespace

int main(int argc, char** argv) { return runMain(argc, argv); }
