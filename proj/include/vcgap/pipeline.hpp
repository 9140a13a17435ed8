#pragma once

// The nine-step cover pipeline: LP value, optional kernelization, doubled
// SDP, distribution tests on both copies, rounding or fallback, and
// recombination on the original graph, all recorded in a RunTrace.

#include <chrono>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "vcgap/bipartite.hpp"
#include "vcgap/errors.hpp"
#include "vcgap/exact.hpp"
#include "vcgap/graph.hpp"
#include "vcgap/lp.hpp"
#include "vcgap/rounding.hpp"
#include "vcgap/sdp.hpp"

namespace vcgap {

constexpr int trace_schema_version = 1;

struct PipelineConfig {
    LpConfig lp;
    SdpConfig sdp;
    Thresholds thresholds;
    double tau_ratio = 1e-9;
    /// Also solve the single-graph SDP on the residual (for reporting).
    bool solve_single_sdp = true;
    /// Tolerance for the odd-cycle probe verdict.
    double probe_tol = 1e-3;
    /// Keep the doubled Gram matrix in the trace (for the probe command).
    bool keep_gram = false;
};

enum class Step {
    /// Kernelization left an empty residual; no SDP needed.
    kernel_only,
    step4_cut_prime,
    step5_cut_doubleprime,
    step6_arbitrary,
    step7_arbitrary,
    step8_bipartite,
    sdp_nonconverged_fallback,
    theorem6_violation_fallback,
    /// two_approx_baseline output
    baseline_matching,
};

inline const char* to_string(Step s) {
    switch (s) {
    case Step::kernel_only: return "kernel_only";
    case Step::step4_cut_prime: return "step4_cut_prime";
    case Step::step5_cut_doubleprime: return "step5_cut_doubleprime";
    case Step::step6_arbitrary: return "step6_arbitrary";
    case Step::step7_arbitrary: return "step7_arbitrary";
    case Step::step8_bipartite: return "step8_bipartite";
    case Step::sdp_nonconverged_fallback: return "sdp_nonconverged_fallback";
    case Step::theorem6_violation_fallback: return "theorem6_violation_fallback";
    case Step::baseline_matching: return "baseline_matching";
    }
    return "?";
}

struct RunTrace {
    std::size_t n = 0;
    std::size_t m = 0;
    double z_lp = 0.0;

    bool kernelized = false;
    HalfIntegralDecomposition decomposition;
    std::size_t residual_n = 0;
    std::size_t residual_m = 0;

    std::optional<double> z_sdp_single;
    std::optional<double> z_sdp_doubled;
    std::size_t sdp_iterations = 0;
    bool sdp_converged = false;
    /// z6 − 2·z4 on the residual.
    std::optional<double> lemma2_lower_margin;
    /// 2·exact(residual) − z6, filled by evaluate_ratio.
    std::optional<double> lemma2_upper_margin;

    std::optional<PropertyReport> property_prime;
    std::optional<PropertyReport> property_double_prime;
    std::optional<double> epsilon_coverage;
    std::optional<OddCycleProbe> probe;
    std::optional<GramSolution> gram;

    Step step = Step::kernel_only;
    std::vector<RatioCertificate> certificates;
    /// Vertices added to repair an infeasible threshold cut.
    std::vector<VertexId> repairs;
    std::vector<std::string> flags;

    CoverPartition cover;
    std::size_t cover_size = 0;

    std::optional<std::size_t> oracle_optimum;
    std::optional<double> empirical_ratio;
    bool certificate_violated = false;

    std::map<std::string, double> timings_ms;
};

/// Thrown when a subordinate contract fails; carries the trace so far.
class PipelineAborted : public ContractViolation {
public:
    PipelineAborted(const std::string& what, RunTrace partial)
        : ContractViolation(what), partial_(std::move(partial)) {}

    const RunTrace& partial() const noexcept { return partial_; }

private:
    RunTrace partial_;
};

namespace detail {

class Stopwatch {
public:
    double elapsed_ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

/// Adds the higher-product endpoint of every uncovered edge.
inline CoverPartition repair_cut(const Graph& g, CoverPartition cut, const VectorEmbedding& emb, std::size_t offset,
                                 std::vector<VertexId>& added) {
    for (const auto& e : verify_cover(g, cut).uncovered) {
        if (cut.in_cover.count(e.u) || cut.in_cover.count(e.v)) continue;
        const double pu = emb.anchor_product(offset + g.index_of(e.u));
        const double pv = emb.anchor_product(offset + g.index_of(e.v));
        const VertexId pick = pv > pu ? e.v : e.u;
        cut.in_cover.insert(pick);
        cut.out_cover.erase(pick);
        added.push_back(pick);
    }
    return cut;
}

inline std::optional<RatioCertificate> partition_certificate(const CoverPartition& p) {
    return certify_theorem3(p.in_cover.size(), p.out_cover.size(), p.in_cover.size() + p.out_cover.size());
}

/// Steps 3 to 8 on a residual whose LP optimum is n'/2.
inline CoverPartition solve_residual(const Graph& residual, const PipelineConfig& cfg, RunTrace& trace) {
    const std::size_t n = residual.order();
    if (n == 0) {
        trace.step = Step::kernel_only;
        return {};
    }
    Stopwatch sdp_clock;
    if (cfg.solve_single_sdp) {
        const auto single = admm_solve(build_sdp_single(residual), cfg.sdp);
        trace.z_sdp_single = single.objective_value;
        if (!single.converged) trace.flags.push_back("single_sdp_nonconverged");
    }
    const auto doubled = admm_solve(build_sdp_doubled(duplicate_join(residual)), cfg.sdp);
    trace.timings_ms["sdp"] = sdp_clock.elapsed_ms();
    trace.z_sdp_doubled = doubled.objective_value;
    trace.sdp_iterations = doubled.iterations;
    trace.sdp_converged = doubled.converged;
    if (cfg.keep_gram) trace.gram = doubled;
    if (trace.z_sdp_single) trace.lemma2_lower_margin = doubled.objective_value - 2.0 * *trace.z_sdp_single;

    std::optional<VectorEmbedding> emb;
    if (doubled.converged) {
        try {
            emb = extract_vectors(doubled, cfg.sdp.tau_factor);
        } catch (const ContractViolation&) {
            trace.flags.push_back("factorization_failed");
        }
    }
    if (!emb) {
        trace.step = Step::sdp_nonconverged_fallback;
        return maximal_matching_cover(residual);
    }

    const std::size_t prime = 1;
    const std::size_t double_prime = 1 + n;
    const auto& th = cfg.thresholds;
    trace.property_prime = classify_property1(*emb, index_range(prime, n), th);
    trace.property_double_prime = classify_property1(*emb, index_range(double_prime, n), th);
    const auto& rp = *trace.property_prime;
    const auto& rpp = *trace.property_double_prime;

    // Steps 4 and 5: too many vertices below the cut on a copy.
    if (!rp.holds_1a || !rpp.holds_1a) {
        std::optional<CoverPartition> chosen;
        if (!rp.holds_1a) {
            auto cut = threshold_cut(*emb, residual, prime, th.cut);
            if (verify_cover(residual, cut).feasible) {
                chosen = std::move(cut);
                trace.step = Step::step4_cut_prime;
            }
        }
        if (!chosen && !rpp.holds_1a) {
            auto cut = threshold_cut(*emb, residual, double_prime, th.cut);
            if (verify_cover(residual, cut).feasible) {
                chosen = std::move(cut);
                trace.step = Step::step5_cut_doubleprime;
            }
        }
        if (!chosen) {
            const bool use_prime = !rp.holds_1a;
            const std::size_t offset = use_prime ? prime : double_prime;
            chosen = repair_cut(residual, threshold_cut(*emb, residual, offset, th.cut), *emb, offset, trace.repairs);
            trace.step = use_prime ? Step::step4_cut_prime : Step::step5_cut_doubleprime;
            trace.flags.push_back("cut_repaired");
        }
        if (auto cert = partition_certificate(*chosen)) trace.certificates.push_back(*cert);
        return *chosen;
    }

    // Steps 6 and 7: too many vertices above the band.
    if (!rp.holds_1b || !rpp.holds_1b) {
        const bool use_prime = !rp.holds_1b;
        trace.step = use_prime ? Step::step6_arbitrary : Step::step7_arbitrary;
        if (auto cert = certify_theorem4(use_prime ? rp : rpp, th)) trace.certificates.push_back(*cert);
        return maximal_matching_cover(residual);
    }

    // Step 8: both copies pass; round through the band subgraph of V′.
    const auto eps = build_epsilon_subgraph(*emb, residual, prime, th);
    trace.epsilon_coverage = eps.coverage_fraction;
    auto found = find_odd_cycle(eps.graph);
    if (auto* parts = std::get_if<Bipartition>(&found)) {
        const auto matching = max_matching(eps.graph, *parts);
        const auto inner = konig_cover(eps.graph, *parts, matching);
        VertexSet in = inner.in_cover;
        for (VertexId id : residual.vertices()) {
            if (!eps.v_eps.count(id)) in.insert(id);
        }
        auto cover = CoverPartition::from_cover(residual, in);
        trace.step = Step::step8_bipartite;
        if (auto cert = partition_certificate(cover)) trace.certificates.push_back(*cert);
        return cover;
    }

    const auto other = build_epsilon_subgraph(*emb, residual, double_prime, th);
    std::optional<std::pair<std::size_t, std::size_t>> anchor;
    if (other.graph.size() > 0) {
        const auto& e = other.graph.edges().front();
        anchor = std::make_pair(double_prime + residual.index_of(e.u), double_prime + residual.index_of(e.v));
    }
    trace.probe = odd_cycle_probe(*emb, eps, anchor, cfg.probe_tol);
    trace.flags.push_back("theorem6_violation");
    trace.step = Step::theorem6_violation_fallback;
    return maximal_matching_cover(residual);
}

} // namespace detail

inline RunTrace mahdis_run(const Graph& g, const PipelineConfig& cfg = {}) {
    detail::Stopwatch total;
    RunTrace trace;
    trace.n = g.order();
    trace.m = g.size();
    try {
        // Step 1
        trace.z_lp = vc_lp_value(g, cfg.lp.tol.lp);
        trace.timings_ms["lp"] = total.elapsed_ms();

        // Step 2
        const double half_n = 0.5 * static_cast<double>(g.order());
        Graph residual = g;
        trace.decomposition.v_half = g.vertex_set();
        trace.decomposition.lp_value = trace.z_lp;
        if (trace.z_lp < half_n - cfg.lp.tol.lp * std::max(1.0, half_n)) {
            auto nt = nt_decompose(g, cfg.lp);
            trace.kernelized = true;
            trace.decomposition = nt.decomposition;
            residual = std::move(nt.residual);
        }
        trace.residual_n = residual.order();
        trace.residual_m = residual.size();

        // Steps 3 to 8
        const auto residual_cover = detail::solve_residual(residual, cfg, trace);

        // Step 9
        trace.cover = recombine(g, trace.decomposition, residual_cover);
        trace.cover_size = trace.cover.cover_size();
    } catch (const ContractViolation& e) {
        trace.timings_ms["total"] = total.elapsed_ms();
        throw PipelineAborted(e.what(), std::move(trace));
    }
    trace.timings_ms["total"] = total.elapsed_ms();
    return trace;
}

inline RunTrace two_approx_baseline(const Graph& g) {
    RunTrace trace;
    trace.n = g.order();
    trace.m = g.size();
    trace.step = Step::baseline_matching;
    trace.cover = maximal_matching_cover(g);
    trace.cover_size = trace.cover.cover_size();
    return trace;
}

/// size / optimum, with 0/0 defined as 1.
inline double cover_ratio(std::size_t size, std::size_t optimum) {
    if (optimum == 0) return size == 0 ? 1.0 : std::numeric_limits<double>::infinity();
    return static_cast<double>(size) / static_cast<double>(optimum);
}

/// Fills the empirical ratio and checks each certificate against it.
inline RunTrace evaluate_ratio(RunTrace trace, const ExactResult& oracle, double tau_ratio = PipelineConfig{}.tau_ratio) {
    if (!oracle.known()) return trace;
    trace.oracle_optimum = *oracle.optimum;
    trace.empirical_ratio = cover_ratio(trace.cover_size, *oracle.optimum);
    for (const auto& c : trace.certificates) {
        if (c.claimed_ratio_bound < *trace.empirical_ratio - tau_ratio) trace.certificate_violated = true;
    }
    if (trace.certificate_violated) trace.flags.push_back("certificate_violated");
    if (trace.z_sdp_doubled && trace.step != Step::baseline_matching) {
        // exact(g) = |V¹| + exact(residual) after kernelization.
        const double residual_opt =
            static_cast<double>(*oracle.optimum) - static_cast<double>(trace.decomposition.v_one.size());
        trace.lemma2_upper_margin = 2.0 * residual_opt - *trace.z_sdp_doubled;
    }
    return trace;
}

// ---------------------------------------------------------------------------

namespace detail {

template <class T>
nlohmann::json optional_json(const std::optional<T>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

} // namespace detail

inline nlohmann::json to_json(const RunTrace& t) {
    nlohmann::json j;
    j["schema_version"] = trace_schema_version;
    j["graph"] = {{"n", t.n}, {"m", t.m}};
    j["z_lp"] = t.z_lp;
    j["kernelization"] = {{"applied", t.kernelized},
                          {"v_zero", t.decomposition.v_zero},
                          {"v_half", t.decomposition.v_half},
                          {"v_one", t.decomposition.v_one},
                          {"residual_n", t.residual_n},
                          {"residual_m", t.residual_m}};
    j["sdp"] = {{"z_single", detail::optional_json(t.z_sdp_single)},
                {"z_doubled", detail::optional_json(t.z_sdp_doubled)},
                {"iterations", t.sdp_iterations},
                {"converged", t.sdp_converged},
                {"lemma2_lower_margin", detail::optional_json(t.lemma2_lower_margin)},
                {"lemma2_upper_margin", detail::optional_json(t.lemma2_upper_margin)}};
    j["property_prime"] = t.property_prime ? to_json(*t.property_prime) : nlohmann::json(nullptr);
    j["property_double_prime"] = t.property_double_prime ? to_json(*t.property_double_prime) : nlohmann::json(nullptr);
    j["epsilon_coverage"] = detail::optional_json(t.epsilon_coverage);
    j["probe"] = t.probe ? to_json(*t.probe) : nlohmann::json(nullptr);
    j["step_taken"] = to_string(t.step);
    j["certificates"] = nlohmann::json::array();
    for (const auto& c : t.certificates) j["certificates"].push_back(to_json(c));
    j["repairs"] = t.repairs;
    j["flags"] = t.flags;
    j["cover"] = t.cover.in_cover;
    j["cover_size"] = t.cover_size;
    j["oracle_optimum"] = detail::optional_json(t.oracle_optimum);
    j["empirical_ratio"] = detail::optional_json(t.empirical_ratio);
    j["certificate_violated"] = t.certificate_violated;
    j["timings_ms"] = t.timings_ms;
    return j;
}

/// One line for standard output.
inline std::string summary_line(const RunTrace& t) {
    std::string s = "n=" + std::to_string(t.n) + " m=" + std::to_string(t.m) + " step=" + to_string(t.step) +
                    " cover=" + std::to_string(t.cover_size);
    if (t.oracle_optimum) s += " optimum=" + std::to_string(*t.oracle_optimum);
    if (t.empirical_ratio) s += " ratio=" + std::to_string(*t.empirical_ratio);
    for (const auto& f : t.flags) s += " [" + f + "]";
    return s;
}

} // namespace vcgap
