#include "hinforge/hin.hpp"

#include "hinforge/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace hinforge {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::stringstream ss(line);
    while (std::getline(ss, cur, sep)) out.push_back(cur);
    return out;
}

// Strips a trailing carriage return so CRLF files parse like LF files.
std::string chomp(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

int intern(std::vector<std::string>& names, std::unordered_map<std::string, int>& index,
           const std::string& name) {
    auto it = index.find(name);
    if (it != index.end()) return it->second;
    int id = static_cast<int>(names.size());
    names.push_back(name);
    index.emplace(name, id);
    return id;
}

int parse_int(const std::string& s, const std::string& file, int lineno) {
    try {
        size_t pos = 0;
        int v = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError(file + ":" + std::to_string(lineno) + ": expected integer, got '" + s +
                         "'");
    }
}

double parse_real(const std::string& s, const std::string& file, int lineno) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError(file + ":" + std::to_string(lineno) + ": expected real, got '" + s + "'");
    }
}

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    return in;
}

}  // namespace

bool Hin::has_edge(int i, int j) const { return edge_keys.count(edge_key(i, j)) > 0; }

bool Hin::types_linked(int a, int b) const { return linked_type_pairs.count(edge_key(a, b)) > 0; }

bool Hin::has_labels() const {
    for (int l : labels)
        if (l >= 0) return true;
    return false;
}

int Hin::type_id(const std::string& name) const {
    for (size_t i = 0; i < type_names.size(); ++i)
        if (type_names[i] == name) return static_cast<int>(i);
    return -1;
}

Hin load_hin(const std::string& node_file, const std::string& edge_file,
             const std::string& feature_file, const std::string& label_file) {
    Hin hin;
    std::unordered_map<std::string, int> type_index;

    {
        std::ifstream in = open_or_throw(node_file);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            line = chomp(line);
            if (line.empty()) continue;
            auto cols = split(line, '\t');
            if (cols.size() < 2 || cols.size() > 3 || cols[0].empty() || cols[1].empty())
                throw ParseError(node_file + ":" + std::to_string(lineno) +
                                 ": expected name<TAB>type[<TAB>label]");
            if (hin.name_to_id.count(cols[0]))
                throw IntegrityError(node_file + ":" + std::to_string(lineno) +
                                     ": duplicate node '" + cols[0] + "'");
            int id = static_cast<int>(hin.node_names.size());
            hin.name_to_id.emplace(cols[0], id);
            hin.node_names.push_back(cols[0]);
            hin.node_types.push_back(intern(hin.type_names, type_index, cols[1]));
            hin.labels.push_back(cols.size() == 3 ? parse_int(cols[2], node_file, lineno) : -1);
        }
    }
    hin.n = static_cast<int>(hin.node_names.size());
    if (hin.n == 0) throw ParseError(node_file + ": no nodes");
    hin.adj.assign(hin.n, {});

    {
        std::unordered_map<std::string, int> rel_index;
        std::ifstream in = open_or_throw(edge_file);
        std::string line;
        int lineno = 0;
        int dropped = 0;
        while (std::getline(in, line)) {
            ++lineno;
            line = chomp(line);
            if (line.empty()) continue;
            auto cols = split(line, '\t');
            if (cols.size() != 3 || cols[0].empty() || cols[1].empty() || cols[2].empty())
                throw ParseError(edge_file + ":" + std::to_string(lineno) +
                                 ": expected src<TAB>dst<TAB>relation");
            auto si = hin.name_to_id.find(cols[0]);
            auto di = hin.name_to_id.find(cols[1]);
            if (si == hin.name_to_id.end() || di == hin.name_to_id.end())
                throw IntegrityError(edge_file + ":" + std::to_string(lineno) +
                                     ": edge references unknown node");
            int s = si->second, d = di->second;
            if (s == d)
                throw IntegrityError(edge_file + ":" + std::to_string(lineno) + ": self-loop on '" +
                                     cols[0] + "'");
            if (hin.has_edge(s, d)) {
                ++dropped;
                continue;
            }
            int rel = intern(hin.relation_names, rel_index, cols[2]);
            hin.edges.push_back({s, d, rel});
            hin.edge_keys.insert(edge_key(s, d));
            hin.linked_type_pairs.insert(edge_key(hin.node_types[s], hin.node_types[d]));
            hin.adj[s].push_back(d);
            hin.adj[d].push_back(s);
        }
        if (dropped > 0)
            hin.warnings.push_back("dropped " + std::to_string(dropped) + " duplicate edge(s)");
    }
    for (auto& lst : hin.adj) std::sort(lst.begin(), lst.end());

    if (static_cast<int>(hin.type_names.size() + hin.relation_names.size()) <= 2)
        hin.warnings.push_back("graph is homogeneous: |types| + |relations| <= 2");

    if (!feature_file.empty()) {
        std::ifstream in = open_or_throw(feature_file);
        std::string line;
        int lineno = 0;
        std::vector<std::vector<double>> rows;
        while (std::getline(in, line)) {
            ++lineno;
            line = chomp(line);
            if (line.empty()) continue;
            auto cols = split(line, ',');
            std::vector<double> row;
            row.reserve(cols.size());
            for (const auto& c : cols) row.push_back(parse_real(c, feature_file, lineno));
            if (!rows.empty() && rows[0].size() != row.size())
                throw ShapeError(feature_file + ":" + std::to_string(lineno) +
                                 ": ragged feature row");
            rows.push_back(std::move(row));
        }
        if (static_cast<int>(rows.size()) != hin.n)
            throw ShapeError(feature_file + ": expected " + std::to_string(hin.n) + " rows, got " +
                             std::to_string(rows.size()));
        int f = rows.empty() ? 0 : static_cast<int>(rows[0].size());
        hin.features = Tensor(hin.n, f);
        for (int i = 0; i < hin.n; ++i)
            for (int j = 0; j < f; ++j) hin.features.at(i, j) = rows[i][j];
    } else {
        hin.features = Tensor::zeros(hin.n, static_cast<int>(hin.type_names.size()));
        for (int i = 0; i < hin.n; ++i) hin.features.at(i, hin.node_types[i]) = 1.0;
    }
    ensure_finite(hin.features, "load_hin features");

    if (!label_file.empty()) {
        std::ifstream in = open_or_throw(label_file);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            line = chomp(line);
            if (line.empty()) continue;
            auto cols = split(line, '\t');
            if (cols.size() != 2)
                throw ParseError(label_file + ":" + std::to_string(lineno) +
                                 ": expected name<TAB>label");
            auto it = hin.name_to_id.find(cols[0]);
            if (it == hin.name_to_id.end())
                throw IntegrityError(label_file + ":" + std::to_string(lineno) +
                                     ": unknown node '" + cols[0] + "'");
            hin.labels[it->second] = parse_int(cols[1], label_file, lineno);
        }
    }

    return hin;
}

Hin load_hin_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    auto path = [&dir](const char* name) { return (fs::path(dir) / name).string(); };
    std::string features = fs::exists(path("features.csv")) ? path("features.csv") : "";
    std::string labels = fs::exists(path("labels.tsv")) ? path("labels.tsv") : "";
    return load_hin(path("nodes.tsv"), path("edges.tsv"), features, labels);
}

void save_hin(const Hin& hin, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    {
        std::ofstream out(fs::path(dir) / "nodes.tsv");
        if (!out) throw IoError("cannot write nodes.tsv in " + dir);
        for (int i = 0; i < hin.n; ++i)
            out << hin.node_names[i] << '\t' << hin.type_names[hin.node_types[i]] << '\n';
    }
    {
        std::ofstream out(fs::path(dir) / "edges.tsv");
        if (!out) throw IoError("cannot write edges.tsv in " + dir);
        for (const Edge& e : hin.edges)
            out << hin.node_names[e.src] << '\t' << hin.node_names[e.dst] << '\t'
                << hin.relation_names[e.rel] << '\n';
    }
    {
        std::ofstream out(fs::path(dir) / "features.csv");
        if (!out) throw IoError("cannot write features.csv in " + dir);
        char buf[40];
        for (int i = 0; i < hin.n; ++i) {
            for (int j = 0; j < hin.features.cols; ++j) {
                std::snprintf(buf, sizeof buf, "%.17g", hin.features.at(i, j));
                out << (j ? "," : "") << buf;
            }
            out << '\n';
        }
    }
    if (hin.has_labels()) {
        std::ofstream out(fs::path(dir) / "labels.tsv");
        if (!out) throw IoError("cannot write labels.tsv in " + dir);
        for (int i = 0; i < hin.n; ++i)
            if (hin.labels[i] >= 0) out << hin.node_names[i] << '\t' << hin.labels[i] << '\n';
    }
}

std::vector<int> neighbors(const Hin& hin, int i) {
    if (i < 0 || i >= hin.n) throw IndexError("neighbors: node id out of range");
    return hin.adj[i];
}

EdgeSample sample_negative_edges(const Hin& hin, int count, Rng& rng) {
    if (count < 0) throw ArgumentError("sample_negative_edges: negative count");
    const long long total_pairs = static_cast<long long>(hin.n) * (hin.n - 1) / 2;
    const long long capacity = total_pairs - static_cast<long long>(hin.edges.size());
    if (count > capacity)
        throw CapacityError("sample_negative_edges: requested " + std::to_string(count) +
                            " non-edges, only " + std::to_string(capacity) + " exist");
    EdgeSample out;
    out.polarity = Polarity::negative;
    std::unordered_set<unsigned long long> used;
    long long attempts = 0;
    const long long attempt_cap = 200LL * count + 1000;
    while (static_cast<int>(out.pairs.size()) < count && attempts < attempt_cap) {
        ++attempts;
        int i = rng.uniform_int(hin.n);
        int j = rng.uniform_int(hin.n);
        if (i == j) continue;
        if (i > j) std::swap(i, j);
        unsigned long long key = edge_key(i, j);
        if (hin.has_edge(i, j) || used.count(key)) continue;
        used.insert(key);
        out.pairs.emplace_back(i, j);
    }
    if (static_cast<int>(out.pairs.size()) < count) {
        // Rejection sampling stalled (nearly complete graph): enumerate the
        // remaining non-edges and take a uniform partial shuffle.
        std::vector<std::pair<int, int>> rest;
        for (int i = 0; i < hin.n; ++i)
            for (int j = i + 1; j < hin.n; ++j)
                if (!hin.has_edge(i, j) && !used.count(edge_key(i, j))) rest.emplace_back(i, j);
        int need = count - static_cast<int>(out.pairs.size());
        for (int k = 0; k < need; ++k) {
            int pick = k + rng.uniform_int(static_cast<int>(rest.size()) - k);
            std::swap(rest[k], rest[pick]);
            out.pairs.push_back(rest[k]);
        }
    }
    return out;
}

Tensor adjacency_dense(const Hin& hin) {
    Tensor a = Tensor::zeros(hin.n, hin.n);
    for (const Edge& e : hin.edges) {
        a.at(e.src, e.dst) = 1.0;
        a.at(e.dst, e.src) = 1.0;
    }
    return a;
}

}  // namespace hinforge
