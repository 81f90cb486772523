#pragma once

#include "hinforge/hin.hpp"
#include "hinforge/rng.hpp"

#include <string>
#include <vector>

namespace hinforge {

struct MetaPathSchema {
    std::vector<int> type_sequence;
    std::string name;
};

// Typed walks matching one schema. zeta[i] lists the indices of the samples
// that contain node i at any position, each index at most once.
struct MetaPathSampleSet {
    MetaPathSchema schema;
    std::vector<std::vector<int>> samples;
    std::vector<std::vector<int>> zeta;
};

// Accepts either one-letter abbreviations ("APA") or full type names
// separated by '-' ("author-paper-author").
MetaPathSchema parse_schema(const std::string& spec, const Hin& hin);

// Up to per_node walks from every node of the schema's start type, uniform
// typed neighbor selection, 10x retry budget per requested walk. Start nodes
// get split generators, so output is deterministic and order-independent.
MetaPathSampleSet sample_metapaths(const Hin& hin, const MetaPathSchema& schema, int per_node,
                                   Rng& rng);

std::vector<std::vector<int>> build_zeta(const std::vector<std::vector<int>>& samples, int n);

// One line per walk: "<schema name>\t<id>-<id>-...".
void save_samples(const MetaPathSampleSet& set, const std::string& path);

}  // namespace hinforge
