#include "hinforge/synth.hpp"

#include "hinforge/errors.hpp"
#include "hinforge/rng.hpp"

#include <algorithm>

namespace hinforge {

Hin generate_synthetic(const SynthSpec& spec) {
    if (spec.k < 2) throw ArgumentError("synth: need k >= 2 clusters");
    if (spec.types < 2) throw ArgumentError("synth: need >= 2 node types");
    if (spec.per_type < 1) throw ArgumentError("synth: per_type must be >= 1");
    if (!(spec.p_out >= 0.0 && spec.p_out < spec.p_in && spec.p_in <= 1.0))
        throw ArgumentError("synth: require 0 <= p_out < p_in <= 1");
    if (spec.f < spec.k) throw ArgumentError("synth: feature dim must be >= k");

    Hin hin;
    hin.n = spec.k * spec.types * spec.per_type;
    for (int t = 0; t < spec.types; ++t) {
        std::string name(1, static_cast<char>('A' + t % 26));
        if (t >= 26) name += std::to_string(t / 26);
        hin.type_names.push_back(name);
    }
    // Node order: type-major, then cluster, then index.
    std::vector<int> cluster_of(hin.n);
    for (int t = 0; t < spec.types; ++t)
        for (int c = 0; c < spec.k; ++c)
            for (int i = 0; i < spec.per_type; ++i) {
                int id = static_cast<int>(hin.node_names.size());
                hin.node_names.push_back(hin.type_names[t] +
                                         std::to_string(c * spec.per_type + i));
                hin.name_to_id.emplace(hin.node_names.back(), id);
                hin.node_types.push_back(t);
                cluster_of[id] = c;
            }
    hin.labels = cluster_of;
    hin.adj.assign(hin.n, {});

    Rng edge_rng(hash_combine(spec.seed, 0x65646765ULL));
    std::vector<std::vector<int>> rel_of_pair(spec.types, std::vector<int>(spec.types, -1));
    for (int a = 0; a < spec.types; ++a)
        for (int b = a + 1; b < spec.types; ++b) {
            rel_of_pair[a][b] = static_cast<int>(hin.relation_names.size());
            hin.relation_names.push_back(hin.type_names[a] + "-" + hin.type_names[b]);
        }
    for (int u = 0; u < hin.n; ++u)
        for (int v = u + 1; v < hin.n; ++v) {
            int tu = hin.node_types[u], tv = hin.node_types[v];
            if (tu == tv) continue;
            const double p = cluster_of[u] == cluster_of[v] ? spec.p_in : spec.p_out;
            if (edge_rng.uniform() >= p) continue;
            int rel = rel_of_pair[std::min(tu, tv)][std::max(tu, tv)];
            hin.edges.push_back({u, v, rel});
            hin.edge_keys.insert(edge_key(u, v));
            hin.linked_type_pairs.insert(edge_key(tu, tv));
            hin.adj[u].push_back(v);
            hin.adj[v].push_back(u);
        }
    for (auto& lst : hin.adj) std::sort(lst.begin(), lst.end());

    Rng feat_rng(hash_combine(spec.seed, 0x66656174ULL));
    hin.features = Tensor(hin.n, spec.f);
    for (int i = 0; i < hin.n; ++i)
        for (int j = 0; j < spec.f; ++j)
            hin.features.at(i, j) =
                feat_rng.gaussian() + (j == cluster_of[i] ? spec.snr : 0.0);

    return hin;
}

}  // namespace hinforge
