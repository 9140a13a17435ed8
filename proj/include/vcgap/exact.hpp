#pragma once

// Exact minimum vertex cover for small graphs: branch and bound over 64-bit
// vertex masks, plus a plain subset enumeration used to cross-check it.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "json.hpp"
#include "vcgap/bipartite.hpp"
#include "vcgap/errors.hpp"
#include "vcgap/graph.hpp"
#include "vcgap/lp.hpp"
#include "vcgap/sdp.hpp"

namespace vcgap {

enum class ExactStatus { optimal, unknown };

inline const char* to_string(ExactStatus s) { return s == ExactStatus::optimal ? "optimal" : "unknown"; }

struct ExactResult {
    ExactStatus status = ExactStatus::unknown;
    /// Set only when status is optimal.
    std::optional<std::size_t> optimum;
    std::optional<CoverPartition> cover;
    std::uint64_t nodes = 0;

    bool known() const noexcept { return status == ExactStatus::optimal; }
};

constexpr std::size_t max_exact_order = 64;
constexpr std::size_t max_enumeration_order = 30;
constexpr std::uint64_t default_node_budget = 20'000'000;

namespace detail {

using Mask = std::uint64_t;

inline std::vector<Mask> adjacency_masks(const Graph& g) {
    std::vector<Mask> adj(g.order(), 0);
    for (std::size_t p = 0; p < g.order(); ++p) {
        for (auto w : g.neighbors(p)) adj[p] |= Mask{1} << w;
    }
    return adj;
}

inline CoverPartition cover_from_mask(const Graph& g, Mask m) {
    VertexSet in;
    for (std::size_t p = 0; p < g.order(); ++p) {
        if (m >> p & 1) in.insert(g.id_at(p));
    }
    return CoverPartition::from_cover(g, in);
}

class BranchAndBound {
public:
    BranchAndBound(const Graph& g, std::uint64_t budget) : adj_(adjacency_masks(g)), budget_(budget) {}

    /// Returns false when the node budget ran out.
    bool run(Mask incumbent) {
        best_ = incumbent;
        best_size_ = static_cast<std::size_t>(std::popcount(incumbent));
        Mask alive = 0;
        for (std::size_t p = 0; p < adj_.size(); ++p) alive |= Mask{1} << p;
        return search(alive, 0);
    }

    Mask best() const noexcept { return best_; }
    std::uint64_t nodes() const noexcept { return nodes_; }

private:
    int degree(std::size_t p, Mask alive) const { return std::popcount(adj_[p] & alive); }

    /// Size of a greedy maximal matching on the alive subgraph.
    std::size_t matching_bound(Mask alive) const {
        std::size_t size = 0;
        Mask free = alive;
        while (free) {
            const auto p = static_cast<std::size_t>(std::countr_zero(free));
            free &= free - 1;
            const Mask nb = adj_[p] & free;
            if (nb) {
                free &= ~(nb & -nb);
                ++size;
            }
        }
        return size;
    }

    bool search(Mask alive, Mask chosen) {
        if (++nodes_ > budget_) return false;
        // Degree-0 removal and degree-1 folding (take the neighbor).
        for (bool changed = true; changed;) {
            changed = false;
            for (Mask rest = alive; rest; rest &= rest - 1) {
                const auto p = static_cast<std::size_t>(std::countr_zero(rest));
                if (!(alive >> p & 1)) continue;
                const Mask nb = adj_[p] & alive;
                if (nb == 0) {
                    alive &= ~(Mask{1} << p);
                } else if ((nb & (nb - 1)) == 0) {
                    chosen |= nb;
                    alive &= ~(nb | Mask{1} << p);
                    changed = true;
                }
            }
        }
        const auto taken = static_cast<std::size_t>(std::popcount(chosen));
        if (taken >= best_size_) return true;
        if (alive == 0) {
            best_ = chosen;
            best_size_ = taken;
            return true;
        }
        if (taken + matching_bound(alive) >= best_size_) return true;

        std::size_t pick = 0;
        int pick_degree = -1;
        for (Mask rest = alive; rest; rest &= rest - 1) {
            const auto p = static_cast<std::size_t>(std::countr_zero(rest));
            const int d = degree(p, alive);
            if (d > pick_degree) {
                pick = p;
                pick_degree = d;
            }
        }
        const Mask bit = Mask{1} << pick;
        if (!search(alive & ~bit, chosen | bit)) return false;
        const Mask nb = adj_[pick] & alive;
        return search(alive & ~(bit | nb), chosen | nb);
    }

    std::vector<Mask> adj_;
    std::uint64_t budget_;
    std::uint64_t nodes_ = 0;
    Mask best_ = 0;
    std::size_t best_size_ = 0;
};

} // namespace detail

/// Branch and bound; ArgumentError above 64 vertices. A search that exceeds
/// `budget` nodes reports status unknown and no optimum.
inline ExactResult exact_vc(const Graph& g, std::uint64_t budget = default_node_budget) {
    if (g.order() > max_exact_order) throw ArgumentError("exact search supports at most 64 vertices");
    ExactResult r;
    const auto seed = maximal_matching_cover(g);
    detail::Mask incumbent = 0;
    for (VertexId id : seed.in_cover) incumbent |= detail::Mask{1} << g.index_of(id);
    detail::BranchAndBound bb(g, budget);
    const bool finished = bb.run(incumbent);
    r.nodes = bb.nodes();
    if (!finished) return r;
    auto cover = detail::cover_from_mask(g, bb.best());
    if (!verify_cover(g, cover).feasible) throw ContractViolation("exact search returned an infeasible cover");
    r.status = ExactStatus::optimal;
    r.optimum = cover.cover_size();
    r.cover = std::move(cover);
    return r;
}

/// Tries subsets in increasing size (Gosper's hack); first cover wins.
inline ExactResult exact_vc_enumerate(const Graph& g) {
    const std::size_t n = g.order();
    if (n > max_enumeration_order) throw ArgumentError("enumeration supports at most 30 vertices");
    const auto adj = detail::adjacency_masks(g);
    const detail::Mask all = n == 0 ? 0 : (detail::Mask{1} << n) - 1;
    auto covers = [&](detail::Mask s) {
        for (std::size_t p = 0; p < n; ++p) {
            if (!(s >> p & 1) && (adj[p] & ~s)) return false;
        }
        return true;
    };
    ExactResult r;
    for (std::size_t k = 0; k <= n; ++k) {
        detail::Mask s = k == 0 ? 0 : (detail::Mask{1} << k) - 1;
        while (s <= all) {
            ++r.nodes;
            if (covers(s)) {
                r.status = ExactStatus::optimal;
                r.optimum = k;
                r.cover = detail::cover_from_mask(g, s);
                return r;
            }
            if (s == 0) break;
            const detail::Mask c = s & -s;
            const detail::Mask next = s + c;
            if (next == 0) break;
            s = (((next ^ s) >> 2) / c) | next;
        }
    }
    throw ContractViolation("enumeration found no cover");
}

struct GapReport {
    double z_lp = 0.0;
    double z_sdp = 0.0;
    bool sdp_converged = false;
    std::size_t z_exact = 0;
    /// z_exact / z_lp and z_exact / z_sdp; 1.0 when the denominator is 0.
    double gap_lp = 1.0;
    double gap_sdp = 1.0;
};

inline GapReport lp_gap_report(const Graph& g, const SdpConfig& sdp = {}, std::uint64_t budget = default_node_budget) {
    const auto exact = exact_vc(g, budget);
    if (!exact.known()) throw SolverError("exact optimum unknown within the node budget", exact.nodes);
    GapReport r;
    r.z_exact = *exact.optimum;
    r.z_lp = vc_lp_value(g);
    const auto gs = admm_solve(build_sdp_single(g), sdp);
    r.z_sdp = gs.objective_value;
    r.sdp_converged = gs.converged;
    const double ze = static_cast<double>(r.z_exact);
    if (r.z_lp > 0.0) r.gap_lp = ze / r.z_lp;
    if (r.z_sdp > 0.0) r.gap_sdp = ze / r.z_sdp;
    return r;
}

inline nlohmann::json to_json(const GapReport& r) {
    return {{"z_lp", r.z_lp},       {"z_sdp", r.z_sdp},   {"sdp_converged", r.sdp_converged},
            {"z_exact", r.z_exact}, {"gap_lp", r.gap_lp}, {"gap_sdp", r.gap_sdp}};
}

} // namespace vcgap
