#include "hinforge/metapath.hpp"

#include "hinforge/errors.hpp"

#include <cctype>
#include <fstream>

namespace hinforge {

namespace {

int match_type(const std::string& token, const Hin& hin) {
    int exact = hin.type_id(token);
    if (exact >= 0) return exact;
    // Case-insensitive unique prefix fallback covers one-letter abbreviations.
    int found = -1;
    for (size_t t = 0; t < hin.type_names.size(); ++t) {
        const std::string& name = hin.type_names[t];
        if (name.size() < token.size()) continue;
        bool ok = true;
        for (size_t i = 0; i < token.size() && ok; ++i)
            ok = std::tolower(static_cast<unsigned char>(name[i])) ==
                 std::tolower(static_cast<unsigned char>(token[i]));
        if (!ok) continue;
        if (found >= 0) throw ParseError("meta-path: ambiguous type '" + token + "'");
        found = static_cast<int>(t);
    }
    if (found < 0) throw ParseError("meta-path: unknown type '" + token + "'");
    return found;
}

}  // namespace

MetaPathSchema parse_schema(const std::string& spec, const Hin& hin) {
    if (spec.empty()) throw ParseError("meta-path: empty schema");
    MetaPathSchema schema;
    schema.name = spec;
    if (spec.find('-') != std::string::npos) {
        std::string token;
        for (char c : spec) {
            if (c == '-') {
                schema.type_sequence.push_back(match_type(token, hin));
                token.clear();
            } else {
                token.push_back(c);
            }
        }
        schema.type_sequence.push_back(match_type(token, hin));
    } else {
        for (char c : spec) schema.type_sequence.push_back(match_type(std::string(1, c), hin));
    }
    if (schema.type_sequence.size() < 2) throw SchemaError("meta-path: length must be >= 2");
    for (size_t i = 0; i + 1 < schema.type_sequence.size(); ++i) {
        int a = schema.type_sequence[i], b = schema.type_sequence[i + 1];
        if (!hin.types_linked(a, b))
            throw SchemaError("meta-path '" + spec + "': no relation joins " + hin.type_names[a] +
                              " and " + hin.type_names[b]);
    }
    return schema;
}

MetaPathSampleSet sample_metapaths(const Hin& hin, const MetaPathSchema& schema, int per_node,
                                   Rng& rng) {
    if (per_node < 1) throw ArgumentError("sample_metapaths: per_node must be >= 1");
    MetaPathSampleSet out;
    out.schema = schema;

    // Neighbor ids grouped by type, filled lazily per visited node.
    std::vector<std::vector<std::vector<int>>> by_type(hin.n);
    auto typed_neighbors = [&](int node, int type) -> const std::vector<int>& {
        auto& slot = by_type[node];
        if (slot.empty()) {
            slot.assign(hin.type_names.size(), {});
            for (int j : hin.adj[node]) slot[hin.node_types[j]].push_back(j);
        }
        return slot[type];
    };

    const int len = static_cast<int>(schema.type_sequence.size());
    const unsigned long long base = rng.next_u64();
    for (int start = 0; start < hin.n; ++start) {
        if (hin.node_types[start] != schema.type_sequence[0]) continue;
        Rng local(hash_combine(base, static_cast<unsigned long long>(start)));
        int drawn = 0;
        int budget = 10 * per_node;
        while (drawn < per_node && budget > 0) {
            --budget;
            std::vector<int> walk{start};
            int cur = start;
            bool dead = false;
            for (int step = 1; step < len; ++step) {
                const auto& cand = typed_neighbors(cur, schema.type_sequence[step]);
                if (cand.empty()) {
                    dead = true;
                    break;
                }
                cur = cand[local.uniform_int(static_cast<int>(cand.size()))];
                walk.push_back(cur);
            }
            if (dead) continue;
            out.samples.push_back(std::move(walk));
            ++drawn;
        }
    }
    out.zeta = build_zeta(out.samples, hin.n);
    return out;
}

std::vector<std::vector<int>> build_zeta(const std::vector<std::vector<int>>& samples, int n) {
    std::vector<std::vector<int>> zeta(n);
    for (size_t s = 0; s < samples.size(); ++s) {
        for (int node : samples[s]) {
            if (node < 0 || node >= n) throw IndexError("build_zeta: node id out of range");
            auto& lst = zeta[node];
            if (lst.empty() || lst.back() != static_cast<int>(s))
                lst.push_back(static_cast<int>(s));
        }
    }
    return zeta;
}

void save_samples(const MetaPathSampleSet& set, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    for (const auto& walk : set.samples) {
        out << set.schema.name << '\t';
        for (size_t i = 0; i < walk.size(); ++i) out << (i ? "-" : "") << walk[i];
        out << '\n';
    }
}

}  // namespace hinforge
