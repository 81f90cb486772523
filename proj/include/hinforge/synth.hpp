#pragma once

#include "hinforge/hin.hpp"

#include <cstdint>

namespace hinforge {

// Planted-partition HIN: k clusters spread over `types` node types with
// per_type nodes of each type in each cluster. Edges only join distinct
// types, kept with probability p_in inside a cluster and p_out across.
// Features are snr * one-hot(cluster) plus unit Gaussian noise; every node
// is labeled with its planted cluster.
struct SynthSpec {
    int k = 3;
    int types = 3;
    int per_type = 40;
    double p_in = 0.2;
    double p_out = 0.01;
    int f = 16;
    double snr = 3.0;
    std::uint64_t seed = 7;
};

Hin generate_synthetic(const SynthSpec& spec);

}  // namespace hinforge
