#pragma once

// Shared fixtures and brute-force oracles for the unit tests. Everything
// here is deliberately naive and independent of the library algorithms.

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "vcgap/graph.hpp"

namespace support {

using vcgap::Graph;
using vcgap::VertexId;

inline Graph complete(std::size_t n) {
    std::vector<std::pair<VertexId, VertexId>> e;
    for (VertexId i = 0; i < n; ++i)
        for (VertexId j = i + 1; j < n; ++j) e.emplace_back(i, j);
    return Graph::with_order(n, e);
}

inline Graph cycle(std::size_t n) {
    std::vector<std::pair<VertexId, VertexId>> e;
    for (VertexId i = 0; i < n; ++i) e.emplace_back(i, static_cast<VertexId>((i + 1) % n));
    return Graph::with_order(n, e);
}

inline Graph path(std::size_t n) {
    std::vector<std::pair<VertexId, VertexId>> e;
    for (VertexId i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
    return Graph::with_order(n, e);
}

/// Center 0, leaves 1..leaves.
inline Graph star(std::size_t leaves) {
    std::vector<std::pair<VertexId, VertexId>> e;
    for (VertexId i = 1; i <= leaves; ++i) e.emplace_back(0, i);
    return Graph::with_order(leaves + 1, e);
}

inline Graph complete_bipartite(std::size_t a, std::size_t b) {
    std::vector<std::pair<VertexId, VertexId>> e;
    for (VertexId i = 0; i < a; ++i)
        for (VertexId j = 0; j < b; ++j) e.emplace_back(i, static_cast<VertexId>(a + j));
    return Graph::with_order(a + b, e);
}

inline Graph petersen() {
    std::vector<std::pair<VertexId, VertexId>> e;
    for (VertexId i = 0; i < 5; ++i) {
        e.emplace_back(i, (i + 1) % 5);
        e.emplace_back(5 + i, 5 + (i + 2) % 5);
        e.emplace_back(i, 5 + i);
    }
    return Graph::with_order(10, e);
}

inline Graph random_graph(std::mt19937_64& rng, std::size_t n, double p) {
    std::bernoulli_distribution coin(p);
    std::vector<std::pair<VertexId, VertexId>> e;
    for (VertexId i = 0; i < n; ++i)
        for (VertexId j = i + 1; j < n; ++j)
            if (coin(rng)) e.emplace_back(i, j);
    return Graph::with_order(n, e);
}

/// Random bipartite graph with sides {0..a-1} and {a..a+b-1}.
inline Graph random_bipartite(std::mt19937_64& rng, std::size_t a, std::size_t b, double p) {
    std::bernoulli_distribution coin(p);
    std::vector<std::pair<VertexId, VertexId>> e;
    for (VertexId i = 0; i < a; ++i)
        for (VertexId j = 0; j < b; ++j)
            if (coin(rng)) e.emplace_back(i, static_cast<VertexId>(a + j));
    return Graph::with_order(a + b, e);
}

/// Minimum vertex cover size by trying every subset.
inline std::size_t brute_force_vc(const Graph& g) {
    const std::size_t n = g.order();
    std::size_t best = n;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        const auto size = static_cast<std::size_t>(__builtin_popcountll(mask));
        if (size >= best) continue;
        bool ok = true;
        for (const auto& e : g.edges()) {
            if (!(mask >> g.index_of(e.u) & 1) && !(mask >> g.index_of(e.v) & 1)) {
                ok = false;
                break;
            }
        }
        if (ok) best = size;
    }
    return best;
}

/// Bipartite iff some 2-coloring makes every edge bichromatic.
inline bool brute_force_bipartite(const Graph& g) {
    const std::size_t n = g.order();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        bool ok = true;
        for (const auto& e : g.edges()) {
            if ((mask >> g.index_of(e.u) & 1) == (mask >> g.index_of(e.v) & 1)) {
                ok = false;
                break;
            }
        }
        if (ok) return true;
    }
    return false;
}

/// Maximum matching size by recursion over edges.
inline std::size_t brute_force_matching(const Graph& g) {
    const auto edges = g.edges();
    std::vector<bool> used(g.order(), false);
    std::size_t best = 0;
    auto rec = [&](auto&& self, std::size_t k, std::size_t size) -> void {
        if (size + (edges.size() - k) <= best) return;
        if (k == edges.size()) {
            best = std::max(best, size);
            return;
        }
        const auto pu = g.index_of(edges[k].u);
        const auto pv = g.index_of(edges[k].v);
        if (!used[pu] && !used[pv]) {
            used[pu] = used[pv] = true;
            self(self, k + 1, size + 1);
            used[pu] = used[pv] = false;
        }
        self(self, k + 1, size);
    };
    rec(rec, 0, 0);
    return best;
}

} // namespace support
