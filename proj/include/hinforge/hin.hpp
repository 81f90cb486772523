#pragma once

#include "hinforge/rng.hpp"
#include "hinforge/tensor.hpp"

#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace hinforge {

struct Edge {
    int src = 0;
    int dst = 0;
    int rel = 0;
};

// Canonical unordered-pair key.
inline unsigned long long edge_key(int i, int j) {
    if (i > j) std::swap(i, j);
    return (static_cast<unsigned long long>(i) << 32) | static_cast<unsigned int>(j);
}

// Undirected heterogeneous graph. Immutable after load; neighbor lists are
// sorted and edges are stored once in file order with no self-loops or
// duplicate pairs.
struct Hin {
    int n = 0;
    std::vector<std::string> node_names;
    std::vector<int> node_types;
    std::vector<std::string> type_names;
    std::vector<std::string> relation_names;
    std::vector<Edge> edges;
    Tensor features;
    // -1 marks a node without a ground-truth label.
    std::vector<int> labels;
    std::vector<std::string> warnings;

    std::vector<std::vector<int>> adj;
    std::unordered_set<unsigned long long> edge_keys;
    // Unordered type pairs joined by at least one edge.
    std::unordered_set<unsigned long long> linked_type_pairs;
    std::unordered_map<std::string, int> name_to_id;

    bool has_edge(int i, int j) const;
    bool types_linked(int a, int b) const;
    bool has_labels() const;
    int type_id(const std::string& name) const;  // -1 when unknown
};

enum class Polarity { positive, negative };

struct EdgeSample {
    std::vector<std::pair<int, int>> pairs;
    Polarity polarity = Polarity::positive;
};

Hin load_hin(const std::string& node_file, const std::string& edge_file,
             const std::string& feature_file = "", const std::string& label_file = "");
// Loads nodes.tsv/edges.tsv and, when present, features.csv/labels.tsv.
Hin load_hin_dir(const std::string& dir);
void save_hin(const Hin& hin, const std::string& dir);

std::vector<int> neighbors(const Hin& hin, int i);
EdgeSample sample_negative_edges(const Hin& hin, int count, Rng& rng);
Tensor adjacency_dense(const Hin& hin);

}  // namespace hinforge
