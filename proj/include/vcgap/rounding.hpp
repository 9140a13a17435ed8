#pragma once

// Reading an SDP embedding: the two-sided distribution test on v_o·v_j,
// threshold rounding, closed-form ratio certificates, the near-half band
// subgraph, and numeric probes of the four-vector completion identity and
// the odd-cycle argument.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "vcgap/errors.hpp"
#include "vcgap/graph.hpp"
#include "vcgap/sdp.hpp"

namespace vcgap {

struct Thresholds {
    /// Condition (a): fewer than this fraction of vertices below `cut`.
    double below_half_fraction = 0.000001;
    /// Condition (b): fewer than this fraction above band_top().
    double above_band_fraction = 0.01;
    double epsilon = 0.0004;
    double cut = 0.5;

    double band_top() const noexcept { return cut + epsilon; }

    void validate() const {
        auto open_unit = [](double x) { return x > 0.0 && x < 1.0; };
        if (!open_unit(below_half_fraction) || !open_unit(above_band_fraction) || !(epsilon > 0.0)) {
            throw ArgumentError("threshold fractions must lie in (0,1) and epsilon must be positive");
        }
    }
};

struct PropertyReport {
    std::size_t count_below_half = 0;
    std::size_t count_above_band = 0;
    std::size_t n = 0;
    bool holds_1a = false;
    bool holds_1b = false;

    bool holds() const noexcept { return holds_1a && holds_1b; }
};

struct RatioCertificate {
    double claimed_ratio_bound = 2.0;
    /// "theorem2", "theorem3" or "theorem4".
    std::string source;
    std::map<std::string, double> inputs;
    std::vector<std::string> assumptions;
};

struct EpsilonSubgraph {
    VertexSet v_eps;
    Graph graph;
    double coverage_fraction = 0.0;
    /// Embedding index of each vertex of `graph`, by position.
    std::vector<std::size_t> embedding_index;
};

/// v_o·v for base vertex positions 0..count-1 stored at offset+position.
inline std::vector<double> anchor_products(const VectorEmbedding& emb, std::size_t offset, std::size_t count) {
    std::vector<double> out(count);
    for (std::size_t p = 0; p < count; ++p) out[p] = emb.anchor_product(offset + p);
    return out;
}

/// Strict real-valued comparisons: count < fraction·n.
inline PropertyReport classify_property1(const VectorEmbedding& emb, std::span<const std::size_t> indices,
                                         const Thresholds& th = {}) {
    th.validate();
    PropertyReport r;
    r.n = indices.size();
    for (auto idx : indices) {
        const double x = emb.anchor_product(idx);
        if (x < th.cut) ++r.count_below_half;
        if (x > th.band_top()) ++r.count_above_band;
    }
    const double n = static_cast<double>(r.n);
    r.holds_1a = static_cast<double>(r.count_below_half) < th.below_half_fraction * n;
    r.holds_1b = static_cast<double>(r.count_above_band) < th.above_band_fraction * n;
    return r;
}

inline std::vector<std::size_t> index_range(std::size_t offset, std::size_t count) {
    std::vector<std::size_t> out(count);
    for (std::size_t p = 0; p < count; ++p) out[p] = offset + p;
    return out;
}

/// V0 = {v_o·v_j < cut}, V1 = the rest. Feasibility is the caller's job.
inline CoverPartition threshold_cut(const VectorEmbedding& emb, const Graph& g, std::size_t offset, double cut = 0.5) {
    CoverPartition p;
    for (std::size_t pos = 0; pos < g.order(); ++pos) {
        (emb.anchor_product(offset + pos) < cut ? p.out_cover : p.in_cover).insert(g.id_at(pos));
    }
    return p;
}

/// Valid when z* ≥ n/2 + n/k: every cover has ratio ≤ 2k/(k+2).
inline RatioCertificate certify_theorem2(double n, double k) {
    if (!(k > 0.0)) throw ArgumentError("k must be positive");
    RatioCertificate c;
    c.claimed_ratio_bound = 2.0 * k / (k + 2.0);
    c.source = "theorem2";
    c.inputs = {{"n", n}, {"k", k}};
    c.assumptions = {"z* >= n/2 + n/k"};
    return c;
}

/// Valid when z* ≥ n/2: ratio ≤ 2k/(k+1) with k = |V1|/|V0|.
inline std::optional<RatioCertificate> certify_theorem3(std::size_t v1_size, std::size_t v0_size, std::size_t n) {
    if (v1_size + v0_size != n) throw ArgumentError("|V1| + |V0| must equal n");
    if (v0_size == 0) return std::nullopt;
    RatioCertificate c;
    const double v1 = static_cast<double>(v1_size);
    const double v0 = static_cast<double>(v0_size);
    c.claimed_ratio_bound = 2.0 * v1 / (v1 + v0);
    c.source = "theorem3";
    c.inputs = {{"n", static_cast<double>(n)}, {"v1", v1}, {"v0", v0}, {"k", v1 / v0}};
    c.assumptions = {"z* >= n/2"};
    return c;
}

/// 0·(a·n) + 0.5·(1−a−b)·n + (0.5+ε)·(b·n)
inline double theorem4_lower_bound(double n, const Thresholds& th) {
    const double a = th.below_half_fraction;
    const double b = th.above_band_fraction;
    return 0.5 * (1.0 - a - b) * n + (0.5 + th.epsilon) * (b * n);
}

/// Requires condition (a) to hold and (b) to fail.
inline double theorem4_lower_bound(const PropertyReport& report, const Thresholds& th) {
    if (!report.holds_1a || report.holds_1b) {
        throw ArgumentError("lower bound needs condition (a) holding and condition (b) failing");
    }
    return theorem4_lower_bound(static_cast<double>(report.n), th);
}

/// 2k/(k+2) bound with k implied by the lower bound L = n/2 + n/k.
inline std::optional<RatioCertificate> certify_theorem4(const PropertyReport& report, const Thresholds& th) {
    const double n = static_cast<double>(report.n);
    const double bound = theorem4_lower_bound(report, th);
    const double excess = bound - 0.5 * n;
    if (!(excess > 0.0)) return std::nullopt;
    auto c = certify_theorem2(n, n / excess);
    c.source = "theorem4";
    c.inputs["lower_bound"] = bound;
    c.assumptions = {"z* >= n/2", "z* >= " + std::to_string(bound) + " (unverified lower bound from the band counts)"};
    return c;
}

/// V_eps = {j : cut ≤ v_o·v_j ≤ cut + ε}, closed on both ends.
inline EpsilonSubgraph build_epsilon_subgraph(const VectorEmbedding& emb, const Graph& g, std::size_t offset,
                                              const Thresholds& th = {}) {
    EpsilonSubgraph out;
    for (std::size_t pos = 0; pos < g.order(); ++pos) {
        const double x = emb.anchor_product(offset + pos);
        if (x >= th.cut && x <= th.band_top()) out.v_eps.insert(g.id_at(pos));
    }
    out.graph = induced_subgraph(g, out.v_eps);
    for (VertexId id : out.graph.vertices()) out.embedding_index.push_back(offset + g.index_of(id));
    out.coverage_fraction = g.empty() ? 0.0 : static_cast<double>(out.v_eps.size()) / static_cast<double>(g.order());
    return out;
}

// ---------------------------------------------------------------------------

struct PerpendicularCheck {
    /// max |v_i·v_j| over the four inputs
    double perpendicularity_defect = 0.0;
    /// max |v·v_i − 0.5|
    double half_defect = 0.0;
    /// ‖v − 0.5(v1+v2+v3+v4)‖
    double identity_defect = 0.0;
    bool passes = false;
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

} // namespace detail

inline PerpendicularCheck perpendicular_completion_check(const std::array<std::vector<double>, 4>& basis,
                                                         const std::vector<double>& v, double tol,
                                                         double tau_norm = 1e-4) {
    const std::size_t d = v.size();
    if (d < 4) throw ArgumentError("vectors need dimension at least 4");
    for (const auto& b : basis) {
        if (b.size() != d) throw ArgumentError("vector dimensions differ");
        if (std::abs(detail::norm(b) - 1.0) > tau_norm) throw ArgumentError("input vector is not unit length");
    }
    if (std::abs(detail::norm(v) - 1.0) > tau_norm) throw ArgumentError("completion vector is not unit length");

    PerpendicularCheck c;
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = i + 1; j < 4; ++j) {
            c.perpendicularity_defect = std::max(c.perpendicularity_defect, std::abs(detail::dot(basis[i], basis[j])));
        }
        c.half_defect = std::max(c.half_defect, std::abs(detail::dot(v, basis[i]) - 0.5));
    }
    double sq = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        const double r = v[k] - 0.5 * (basis[0][k] + basis[1][k] + basis[2][k] + basis[3][k]);
        sq += r * r;
    }
    c.identity_defect = std::sqrt(sq);
    c.passes = c.perpendicularity_defect <= tol && c.half_defect <= tol && c.identity_defect <= tol;
    return c;
}

enum class ProbeVerdict {
    bipartite,
    /// Odd cycle present but the other copy offers no anchor edge.
    no_anchor,
    /// The geometric premises (products ≈ 0.5 / ≈ 0) fail at tol.
    premises_fail,
    /// Premises hold but a derived consequence fails.
    contradiction,
    /// Premises and all consequences hold at tol.
    consistent,
};

inline const char* to_string(ProbeVerdict v) {
    switch (v) {
    case ProbeVerdict::bipartite: return "bipartite";
    case ProbeVerdict::no_anchor: return "no_anchor";
    case ProbeVerdict::premises_fail: return "premises_fail";
    case ProbeVerdict::contradiction: return "contradiction";
    case ProbeVerdict::consistent: return "consistent";
    }
    return "?";
}

struct OddCycleProbe {
    ProbeVerdict verdict = ProbeVerdict::bipartite;
    Bipartition parts;
    std::vector<VertexId> cycle;
    double premise_defect = 0.0;
    double u_norm = 0.0;
    /// ‖(v_i + v_{i+1}) − U‖ per cycle edge
    std::vector<double> edge_defects;
    /// ‖v_i − U/2‖ per cycle vertex
    std::vector<double> collapse_defects;
    /// |‖U‖ − √2|
    double norm_gap = 0.0;
};

/**
 * Evaluates the odd-cycle chain on an embedding of the doubled graph.
 * With U = 2v_o − v_c − v_d for an anchor edge (c, d) of the other copy,
 * reports how far each cycle edge sum is from U, how far each cycle vector
 * is from U/2, and how far ‖U‖ is from √2.
 */
inline OddCycleProbe odd_cycle_probe(const VectorEmbedding& emb, const EpsilonSubgraph& eps,
                                     std::optional<std::pair<std::size_t, std::size_t>> anchor, double tol) {
    OddCycleProbe probe;
    auto found = find_odd_cycle(eps.graph);
    if (auto* parts = std::get_if<Bipartition>(&found)) {
        probe.verdict = ProbeVerdict::bipartite;
        probe.parts = std::move(*parts);
        return probe;
    }
    probe.cycle = std::get<OddCycle>(found).cycle;
    if (!anchor) {
        probe.verdict = ProbeVerdict::no_anchor;
        return probe;
    }
    const auto [c, d] = *anchor;
    std::vector<std::size_t> idx;
    for (VertexId id : probe.cycle) idx.push_back(eps.embedding_index[eps.graph.index_of(id)]);
    const std::size_t t = idx.size();

    auto track = [&](double value) { probe.premise_defect = std::max(probe.premise_defect, value); };
    for (auto i : idx) {
        track(std::abs(emb.anchor_product(i) - 0.5));
        track(std::abs(emb.product(i, c)));
        track(std::abs(emb.product(i, d)));
    }
    track(std::abs(emb.anchor_product(c) - 0.5));
    track(std::abs(emb.anchor_product(d) - 0.5));
    track(std::abs(emb.product(c, d)));
    for (std::size_t k = 0; k < t; ++k) track(std::abs(emb.product(idx[k], idx[(k + 1) % t])));

    const auto& vo = emb.vector(0);
    const auto& vc = emb.vector(c);
    const auto& vd = emb.vector(d);
    std::vector<double> u(vo.size());
    for (std::size_t k = 0; k < u.size(); ++k) u[k] = 2.0 * vo[k] - vc[k] - vd[k];
    probe.u_norm = detail::norm(u);
    probe.norm_gap = std::abs(probe.u_norm - std::sqrt(2.0));

    std::vector<double> scratch(u.size());
    for (std::size_t k = 0; k < t; ++k) {
        const auto& vi = emb.vector(idx[k]);
        const auto& vj = emb.vector(idx[(k + 1) % t]);
        for (std::size_t q = 0; q < u.size(); ++q) scratch[q] = vi[q] + vj[q] - u[q];
        probe.edge_defects.push_back(detail::norm(scratch));
        for (std::size_t q = 0; q < u.size(); ++q) scratch[q] = vi[q] - 0.5 * u[q];
        probe.collapse_defects.push_back(detail::norm(scratch));
    }

    if (probe.premise_defect > tol) {
        probe.verdict = ProbeVerdict::premises_fail;
        return probe;
    }
    const double worst_edge = *std::max_element(probe.edge_defects.begin(), probe.edge_defects.end());
    const double worst_collapse = *std::max_element(probe.collapse_defects.begin(), probe.collapse_defects.end());
    probe.verdict = (worst_edge > tol || worst_collapse > tol || probe.norm_gap > tol) ? ProbeVerdict::contradiction
                                                                                       : ProbeVerdict::consistent;
    return probe;
}

// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const PropertyReport& r) {
    return {{"count_below_half", r.count_below_half}, {"count_above_band", r.count_above_band}, {"n", r.n},
            {"holds_1a", r.holds_1a},                 {"holds_1b", r.holds_1b},                 {"holds", r.holds()}};
}

inline PropertyReport property_report_from_json(const nlohmann::json& j) {
    PropertyReport r;
    r.count_below_half = j.at("count_below_half").get<std::size_t>();
    r.count_above_band = j.at("count_above_band").get<std::size_t>();
    r.n = j.at("n").get<std::size_t>();
    r.holds_1a = j.at("holds_1a").get<bool>();
    r.holds_1b = j.at("holds_1b").get<bool>();
    return r;
}

inline nlohmann::json to_json(const RatioCertificate& c) {
    return {{"claimed_ratio_bound", c.claimed_ratio_bound},
            {"source", c.source},
            {"inputs", c.inputs},
            {"assumptions", c.assumptions}};
}

inline RatioCertificate certificate_from_json(const nlohmann::json& j) {
    RatioCertificate c;
    c.claimed_ratio_bound = j.at("claimed_ratio_bound").get<double>();
    c.source = j.at("source").get<std::string>();
    c.inputs = j.at("inputs").get<std::map<std::string, double>>();
    c.assumptions = j.at("assumptions").get<std::vector<std::string>>();
    return c;
}

inline nlohmann::json to_json(const OddCycleProbe& p) {
    nlohmann::json j;
    j["verdict"] = to_string(p.verdict);
    if (p.verdict == ProbeVerdict::bipartite) {
        j["left"] = p.parts.left;
        j["right"] = p.parts.right;
        return j;
    }
    j["cycle"] = p.cycle;
    if (p.verdict == ProbeVerdict::no_anchor) return j;
    j["premise_defect"] = p.premise_defect;
    j["u_norm"] = p.u_norm;
    j["norm_gap"] = p.norm_gap;
    j["edge_defects"] = p.edge_defects;
    j["collapse_defects"] = p.collapse_defects;
    return j;
}

} // namespace vcgap
