#pragma once

// Maximum bipartite matching, König covers, and the greedy maximal-matching
// 2-approximation.

#include <algorithm>
#include <cstddef>
#include <queue>
#include <vector>

#include "vcgap/errors.hpp"
#include "vcgap/graph.hpp"

namespace vcgap {

struct Matching {
    std::vector<Edge> edges;

    std::size_t size() const noexcept { return edges.size(); }
};

namespace detail {

constexpr std::size_t unmatched = static_cast<std::size_t>(-1);

/// mate[pos] for every vertex position, or `unmatched`.
inline std::vector<std::size_t> mates_of(const Graph& g, const Matching& m) {
    std::vector<std::size_t> mate(g.order(), unmatched);
    for (const auto& e : m.edges) {
        const auto pu = g.index_of(e.u);
        const auto pv = g.index_of(e.v);
        if (!g.has_edge(e.u, e.v) || mate[pu] != unmatched || mate[pv] != unmatched) {
            throw ContractViolation("matching is not a set of disjoint graph edges");
        }
        mate[pu] = pv;
        mate[pv] = pu;
    }
    return mate;
}

/// Left positions reachable from free left vertices by alternating paths,
/// plus the right positions reached on the way.
inline std::vector<bool> alternating_reach(const Graph& g, const std::vector<bool>& is_left,
                                           const std::vector<std::size_t>& mate, bool* found_augmenting) {
    std::vector<bool> seen(g.order(), false);
    std::queue<std::size_t> queue;
    for (std::size_t p = 0; p < g.order(); ++p) {
        if (is_left[p] && mate[p] == unmatched) {
            seen[p] = true;
            queue.push(p);
        }
    }
    while (!queue.empty()) {
        const auto u = queue.front();
        queue.pop();
        for (auto w : g.neighbors(u)) {
            if (seen[w] || mate[u] == w) continue;
            seen[w] = true;
            if (mate[w] == unmatched) {
                if (found_augmenting) *found_augmenting = true;
                continue;
            }
            if (!seen[mate[w]]) {
                seen[mate[w]] = true;
                queue.push(mate[w]);
            }
        }
    }
    return seen;
}

inline std::vector<bool> left_mask(const Graph& g, const Bipartition& parts) {
    std::vector<bool> is_left(g.order());
    for (std::size_t p = 0; p < g.order(); ++p) is_left[p] = parts.left.count(g.id_at(p)) > 0;
    return is_left;
}

} // namespace detail

/// Kuhn's augmenting-path algorithm from each left vertex in id order.
inline Matching max_matching(const Graph& g, const Bipartition& parts) {
    if (!detail::is_valid_bipartition(g, parts)) throw ArgumentError("not a valid 2-coloring of the graph");
    const std::size_t n = g.order();
    const auto is_left = detail::left_mask(g, parts);
    std::vector<std::size_t> mate(n, detail::unmatched);
    std::vector<std::size_t> visited(n, 0);
    std::size_t stamp = 0;

    // Iterative DFS: stack of (left position, next neighbor index).
    auto augment = [&](std::size_t root) {
        ++stamp;
        std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
        std::vector<std::size_t> via;
        while (!stack.empty()) {
            auto& [u, k] = stack.back();
            const auto nb = g.neighbors(u);
            if (k == nb.size()) {
                stack.pop_back();
                if (!via.empty()) via.pop_back();
                continue;
            }
            const auto w = nb[k++];
            if (visited[w] == stamp) continue;
            visited[w] = stamp;
            if (mate[w] == detail::unmatched) {
                via.push_back(w);
                for (std::size_t s = 0; s < stack.size(); ++s) {
                    mate[stack[s].first] = via[s];
                    mate[via[s]] = stack[s].first;
                }
                return true;
            }
            via.push_back(w);
            stack.emplace_back(mate[w], 0);
        }
        return false;
    };

    for (std::size_t p = 0; p < n; ++p) {
        if (is_left[p]) augment(p);
    }

    Matching m;
    for (std::size_t p = 0; p < n; ++p) {
        if (is_left[p] && mate[p] != detail::unmatched) m.edges.push_back(make_edge(g.id_at(p), g.id_at(mate[p])));
    }
    std::sort(m.edges.begin(), m.edges.end());

    bool augmenting = false;
    detail::alternating_reach(g, is_left, mate, &augmenting);
    if (augmenting) throw ContractViolation("augmenting path left after matching");
    return m;
}

/// Cover = (left not reached) ∪ (right reached) by alternating paths from
/// free left vertices.
inline CoverPartition konig_cover(const Graph& g, const Bipartition& parts, const Matching& m) {
    if (!detail::is_valid_bipartition(g, parts)) throw ArgumentError("not a valid 2-coloring of the graph");
    const auto is_left = detail::left_mask(g, parts);
    const auto mate = detail::mates_of(g, m);
    const auto reach = detail::alternating_reach(g, is_left, mate, nullptr);
    VertexSet in;
    for (std::size_t p = 0; p < g.order(); ++p) {
        if (is_left[p] != reach[p]) in.insert(g.id_at(p));
    }
    auto cover = CoverPartition::from_cover(g, in);
    if (cover.cover_size() != m.size()) throw ContractViolation("cover size differs from matching size");
    if (!verify_cover(g, cover).feasible) throw ContractViolation("konig construction produced an infeasible cover");
    return cover;
}

/// Greedy maximal matching in edge order; both endpoints of each matched edge.
inline CoverPartition maximal_matching_cover(const Graph& g) {
    VertexSet in;
    for (const auto& e : g.edges()) {
        if (!in.count(e.u) && !in.count(e.v)) {
            in.insert(e.u);
            in.insert(e.v);
        }
    }
    return CoverPartition::from_cover(g, in);
}

} // namespace vcgap
