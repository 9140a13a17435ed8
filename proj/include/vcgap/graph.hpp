#pragma once

// Undirected simple graphs with stable vertex ids, the doubled-graph
// construction, bipartiteness / odd-cycle detection and cover checks.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <queue>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"
#include "vcgap/errors.hpp"

namespace vcgap {

using VertexId = std::uint32_t;
using VertexSet = std::set<VertexId>;

/// Unordered edge stored with u < v.
struct Edge {
    VertexId u = 0;
    VertexId v = 0;

    friend auto operator<=>(const Edge&, const Edge&) = default;
};

inline Edge make_edge(VertexId a, VertexId b) { return a < b ? Edge{a, b} : Edge{b, a}; }

/**
 * Immutable undirected simple graph.
 *
 * Vertex ids are arbitrary integers kept in ascending order; they survive
 * induced subgraphs so covers computed on a kernel map straight back to the
 * original graph. Adjacency is indexed by position in vertices().
 */
class Graph {
public:
    Graph() = default;

    /// Builds a graph over the given ids. Duplicate edges are merged;
    /// self-loops, repeated ids and unknown endpoints are rejected.
    static Graph from_edges(std::vector<VertexId> ids, const std::vector<std::pair<VertexId, VertexId>>& edge_list) {
        Graph g;
        std::sort(ids.begin(), ids.end());
        if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
            throw ArgumentError("duplicate vertex id");
        }
        g.ids_ = std::move(ids);
        g.edges_.reserve(edge_list.size());
        for (const auto& [a, b] : edge_list) {
            if (a == b) throw ArgumentError("self-loop on vertex " + std::to_string(a));
            if (!g.contains(a) || !g.contains(b)) {
                throw ArgumentError("edge endpoint not a vertex: {" + std::to_string(a) + "," + std::to_string(b) + "}");
            }
            g.edges_.push_back(make_edge(a, b));
        }
        std::sort(g.edges_.begin(), g.edges_.end());
        g.edges_.erase(std::unique(g.edges_.begin(), g.edges_.end()), g.edges_.end());
        g.build_adjacency();
        return g;
    }

    /// Graph on ids 0..n-1.
    static Graph with_order(std::size_t n, const std::vector<std::pair<VertexId, VertexId>>& edge_list) {
        std::vector<VertexId> ids(n);
        for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<VertexId>(i);
        return from_edges(std::move(ids), edge_list);
    }

    std::size_t order() const noexcept { return ids_.size(); }
    std::size_t size() const noexcept { return edges_.size(); }
    bool empty() const noexcept { return ids_.empty(); }

    std::span<const VertexId> vertices() const noexcept { return ids_; }
    std::span<const Edge> edges() const noexcept { return edges_; }
    VertexId id_at(std::size_t pos) const { return ids_.at(pos); }

    /// Neighbor positions of the vertex at `pos`, ascending.
    std::span<const std::size_t> neighbors(std::size_t pos) const { return adjacency_.at(pos); }
    std::size_t degree(std::size_t pos) const { return adjacency_.at(pos).size(); }

    std::optional<std::size_t> position(VertexId id) const noexcept {
        auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
        if (it == ids_.end() || *it != id) return std::nullopt;
        return static_cast<std::size_t>(it - ids_.begin());
    }

    std::size_t index_of(VertexId id) const {
        auto pos = position(id);
        if (!pos) throw ArgumentError("vertex " + std::to_string(id) + " not in graph");
        return *pos;
    }

    bool contains(VertexId id) const noexcept { return position(id).has_value(); }

    bool has_edge(VertexId a, VertexId b) const noexcept {
        if (a == b) return false;
        return std::binary_search(edges_.begin(), edges_.end(), make_edge(a, b));
    }

    VertexSet vertex_set() const { return VertexSet(ids_.begin(), ids_.end()); }

    friend bool operator==(const Graph& a, const Graph& b) { return a.ids_ == b.ids_ && a.edges_ == b.edges_; }

private:
    void build_adjacency() {
        adjacency_.assign(ids_.size(), {});
        for (const auto& e : edges_) {
            const auto pu = *position(e.u);
            const auto pv = *position(e.v);
            adjacency_[pu].push_back(pv);
            adjacency_[pv].push_back(pu);
        }
        for (auto& list : adjacency_) std::sort(list.begin(), list.end());
    }

    std::vector<VertexId> ids_;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::size_t>> adjacency_;
};

/// V = in_cover ∪ out_cover (V1 and V0).
struct CoverPartition {
    VertexSet in_cover;
    VertexSet out_cover;

    std::size_t cover_size() const noexcept { return in_cover.size(); }

    static CoverPartition from_cover(const Graph& g, const VertexSet& in) {
        CoverPartition p;
        for (VertexId id : g.vertices()) {
            (in.count(id) ? p.in_cover : p.out_cover).insert(id);
        }
        return p;
    }

    friend bool operator==(const CoverPartition&, const CoverPartition&) = default;
};

enum class Copy { prime, double_prime };

struct Origin {
    Copy copy = Copy::prime;
    VertexId base_id = 0;
};

/// Two copies of a base graph joined by every cross pair.
struct DoubledGraph {
    Graph base;
    Graph combined;
    /// Indexed by combined position.
    std::vector<Origin> origin;
};

struct Bipartition {
    VertexSet left;
    VertexSet right;
};

/// t vertices v1..vt with consecutive pairs and (vt, v1) all edges; t odd.
struct OddCycle {
    std::vector<VertexId> cycle;
};

using OddCycleResult = std::variant<Bipartition, OddCycle>;

struct CoverCheck {
    bool feasible = false;
    std::vector<Edge> uncovered;
};

// ---------------------------------------------------------------------------

/**
 * Reads DIMACS edge format: "c" comments, one "p edge n m" header, then
 * "e u v" lines with 1-based ids. Vertex k in the file becomes id k-1.
 */
inline Graph parse_dimacs(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::optional<std::size_t> n;
    std::vector<std::pair<VertexId, VertexId>> edges;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ss(line);
        std::string tag;
        if (!(ss >> tag)) continue;
        if (tag == "c") continue;
        if (tag == "p") {
            if (n) throw ParseError(line_no, "duplicate problem line");
            std::string format;
            long long nv = -1;
            long long ne = -1;
            if (!(ss >> format >> nv >> ne) || (format != "edge" && format != "col") || nv < 0 || ne < 0) {
                throw ParseError(line_no, "malformed header, expected 'p edge <n> <m>'");
            }
            n = static_cast<std::size_t>(nv);
            edges.reserve(static_cast<std::size_t>(ne));
            continue;
        }
        if (tag == "e") {
            if (!n) throw ParseError(line_no, "edge line before problem line");
            long long a = 0;
            long long b = 0;
            if (!(ss >> a >> b)) throw ParseError(line_no, "malformed edge line");
            const auto limit = static_cast<long long>(*n);
            if (a < 1 || b < 1 || a > limit || b > limit) throw ParseError(line_no, "vertex id out of range");
            if (a == b) throw ParseError(line_no, "self-loop");
            edges.emplace_back(static_cast<VertexId>(a - 1), static_cast<VertexId>(b - 1));
            continue;
        }
        throw ParseError(line_no, "unknown line type '" + tag + "'");
    }
    if (!n) throw ParseError(line_no, "missing problem line");
    return Graph::with_order(*n, edges);
}

inline Graph parse_dimacs(const std::string& text) {
    std::istringstream ss(text);
    return parse_dimacs(ss);
}

/// Writes positions as 1-based DIMACS ids.
inline void write_dimacs(std::ostream& out, const Graph& g) {
    out << "p edge " << g.order() << ' ' << g.size() << '\n';
    for (const auto& e : g.edges()) {
        out << "e " << g.index_of(e.u) + 1 << ' ' << g.index_of(e.v) + 1 << '\n';
    }
}

/// {"n": int, "edges": [[u,v],...]} with 0-based positions; "ids" is added
/// when the ids are not exactly 0..n-1.
inline nlohmann::json to_json(const Graph& g) {
    nlohmann::json j;
    j["n"] = g.order();
    auto edges = nlohmann::json::array();
    for (const auto& e : g.edges()) edges.push_back({g.index_of(e.u), g.index_of(e.v)});
    j["edges"] = std::move(edges);
    bool identity = true;
    for (std::size_t i = 0; i < g.order(); ++i) identity = identity && g.id_at(i) == i;
    if (!identity) j["ids"] = std::vector<VertexId>(g.vertices().begin(), g.vertices().end());
    return j;
}

inline Graph graph_from_json(const nlohmann::json& j) {
    const auto n = j.at("n").get<std::size_t>();
    std::vector<VertexId> ids(n);
    if (j.contains("ids")) {
        ids = j.at("ids").get<std::vector<VertexId>>();
        if (ids.size() != n) throw ArgumentError("ids length does not match n");
    } else {
        for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<VertexId>(i);
    }
    std::vector<std::pair<VertexId, VertexId>> edges;
    for (const auto& e : j.at("edges")) {
        const auto a = e.at(0).get<std::size_t>();
        const auto b = e.at(1).get<std::size_t>();
        if (a >= n || b >= n) throw ArgumentError("edge index out of range");
        edges.emplace_back(ids[a], ids[b]);
    }
    return Graph::from_edges(std::move(ids), edges);
}

inline Graph induced_subgraph(const Graph& g, const VertexSet& keep) {
    for (VertexId id : keep) {
        if (!g.contains(id)) throw ArgumentError("vertex " + std::to_string(id) + " not in graph");
    }
    std::vector<std::pair<VertexId, VertexId>> edges;
    for (const auto& e : g.edges()) {
        if (keep.count(e.u) && keep.count(e.v)) edges.emplace_back(e.u, e.v);
    }
    return Graph::from_edges(std::vector<VertexId>(keep.begin(), keep.end()), edges);
}

/**
 * G2: primes take combined ids 0..n-1 and double-primes n..2n-1, both in
 * base position order. Each copy mirrors the base edges and every
 * (prime, double-prime) pair is joined.
 */
inline DoubledGraph duplicate_join(const Graph& g) {
    const std::size_t n = g.order();
    DoubledGraph dg;
    dg.base = g;
    dg.origin.resize(2 * n);
    std::vector<std::pair<VertexId, VertexId>> edges;
    edges.reserve(2 * g.size() + n * n);
    for (const auto& e : g.edges()) {
        const auto a = static_cast<VertexId>(g.index_of(e.u));
        const auto b = static_cast<VertexId>(g.index_of(e.v));
        edges.emplace_back(a, b);
        edges.emplace_back(static_cast<VertexId>(n + a), static_cast<VertexId>(n + b));
    }
    for (std::size_t i = 0; i < n; ++i) {
        dg.origin[i] = {Copy::prime, g.id_at(i)};
        dg.origin[n + i] = {Copy::double_prime, g.id_at(i)};
        for (std::size_t j = 0; j < n; ++j) {
            edges.emplace_back(static_cast<VertexId>(i), static_cast<VertexId>(n + j));
        }
    }
    dg.combined = Graph::with_order(2 * n, edges);
    return dg;
}

namespace detail {

inline bool is_valid_bipartition(const Graph& g, const Bipartition& b) {
    if (b.left.size() + b.right.size() != g.order()) return false;
    for (VertexId id : g.vertices()) {
        if (b.left.count(id) == b.right.count(id)) return false;
    }
    for (const auto& e : g.edges()) {
        if (b.left.count(e.u) == b.left.count(e.v)) return false;
    }
    return true;
}

inline bool is_valid_odd_cycle(const Graph& g, const OddCycle& c) {
    const auto t = c.cycle.size();
    if (t < 3 || t % 2 == 0) return false;
    for (std::size_t i = 0; i < t; ++i) {
        if (!g.has_edge(c.cycle[i], c.cycle[(i + 1) % t])) return false;
    }
    return true;
}

} // namespace detail

/// BFS 2-coloring. On a conflict the two tree paths to the common ancestor
/// close a simple odd cycle.
inline OddCycleResult find_odd_cycle(const Graph& g) {
    const std::size_t n = g.order();
    constexpr std::size_t none = static_cast<std::size_t>(-1);
    std::vector<int> color(n, -1);
    std::vector<std::size_t> parent(n, none);
    std::vector<std::size_t> depth(n, 0);
    for (std::size_t root = 0; root < n; ++root) {
        if (color[root] != -1) continue;
        color[root] = 0;
        std::queue<std::size_t> queue;
        queue.push(root);
        while (!queue.empty()) {
            const auto u = queue.front();
            queue.pop();
            for (auto w : g.neighbors(u)) {
                if (color[w] == -1) {
                    color[w] = 1 - color[u];
                    parent[w] = u;
                    depth[w] = depth[u] + 1;
                    queue.push(w);
                } else if (color[w] == color[u]) {
                    std::vector<std::size_t> up;
                    std::vector<std::size_t> down;
                    auto a = u;
                    auto b = w;
                    while (depth[a] > depth[b]) { up.push_back(a); a = parent[a]; }
                    while (depth[b] > depth[a]) { down.push_back(b); b = parent[b]; }
                    while (a != b) {
                        up.push_back(a);
                        down.push_back(b);
                        a = parent[a];
                        b = parent[b];
                    }
                    up.push_back(a);
                    OddCycle cycle;
                    for (auto p : up) cycle.cycle.push_back(g.id_at(p));
                    for (auto it = down.rbegin(); it != down.rend(); ++it) cycle.cycle.push_back(g.id_at(*it));
                    if (!detail::is_valid_odd_cycle(g, cycle)) throw ContractViolation("odd cycle extraction failed");
                    return cycle;
                }
            }
        }
    }
    Bipartition parts;
    for (std::size_t i = 0; i < n; ++i) (color[i] == 0 ? parts.left : parts.right).insert(g.id_at(i));
    if (!detail::is_valid_bipartition(g, parts)) throw ContractViolation("bipartition check failed");
    return parts;
}

inline CoverCheck verify_cover(const Graph& g, const CoverPartition& p) {
    if (p.in_cover.size() + p.out_cover.size() != g.order()) {
        throw ArgumentError("partition does not cover the vertex set exactly once");
    }
    for (VertexId id : g.vertices()) {
        if (p.in_cover.count(id) == p.out_cover.count(id)) {
            throw ArgumentError("vertex " + std::to_string(id) + " not in exactly one side of the partition");
        }
    }
    CoverCheck check;
    for (const auto& e : g.edges()) {
        if (!p.in_cover.count(e.u) && !p.in_cover.count(e.v)) check.uncovered.push_back(e);
    }
    check.feasible = check.uncovered.empty();
    return check;
}

} // namespace vcgap
