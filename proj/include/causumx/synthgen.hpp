#pragma once

#include <cstdint>
#include <string>

#include "causumx/dag.hpp"
#include "causumx/tabular.hpp"

namespace causumx {

// Synthetic benchmark family: schema (G, G_1..G_i, T_1..T_j, O) where G is
// unique per row, G_p buckets G's range into 2p equal-width buckets, each T_q
// is uniform on {1..5}, and O = T_1 - T_2 + T_3 - ... +- T_j exactly.
struct SyntheticSpec {
    std::size_t n = 1000;
    std::size_t groupingAttrs = 0;   // i
    std::size_t treatmentAttrs = 1;  // j >= 1
    std::uint64_t seed = 0;
};

Dataset generateSynthetic(const SyntheticSpec& spec);

// The implied causal structure: T_q -> O; G and the bucket attributes are
// declared as isolated nodes.
CausalDag syntheticDag(const SyntheticSpec& spec);

struct SyntheticFiles {
    std::string csvPath;
    std::string dotPath;
};

SyntheticFiles writeSyntheticFiles(const SyntheticSpec& spec, const std::string& outDir);

}  // namespace causumx
