#pragma once

// Instance generation, batch experiments and report emission.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include "json.hpp"
#include "vcgap/errors.hpp"
#include "vcgap/exact.hpp"
#include "vcgap/graph.hpp"
#include "vcgap/pipeline.hpp"

namespace vcgap {

/// SplitMix64 (Steele, Lea, Flood). Streams for different instances are
/// derived from (seed, index) so they do not depend on execution order.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform in [0, bound).
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) throw ArgumentError("empty range");
        const std::uint64_t limit = -bound % bound;
        for (;;) {
            const std::uint64_t x = next();
            if (x >= limit) return x % bound;
        }
    }

    SplitMix64 split(std::uint64_t stream) const { return SplitMix64(SplitMix64(state_ ^ stream).next()); }

private:
    std::uint64_t state_;
};

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    return SplitMix64(base).split(index + 1).next();
}

enum class GraphModel { gnp, bipartite_gnp, odd_cycle_rich, star_union };

inline const char* to_string(GraphModel m) {
    switch (m) {
    case GraphModel::gnp: return "gnp";
    case GraphModel::bipartite_gnp: return "bipartite_gnp";
    case GraphModel::odd_cycle_rich: return "odd_cycle_rich";
    case GraphModel::star_union: return "star_union";
    }
    return "?";
}

inline GraphModel graph_model_from_string(const std::string& s) {
    if (s == "gnp") return GraphModel::gnp;
    if (s == "bipartite_gnp") return GraphModel::bipartite_gnp;
    if (s == "odd_cycle_rich") return GraphModel::odd_cycle_rich;
    if (s == "star_union") return GraphModel::star_union;
    throw ArgumentError("unknown graph model '" + s + "'");
}

/// `parameter` is the edge probability, except for star_union where it is
/// the number of stars.
struct GraphSpec {
    GraphModel model = GraphModel::gnp;
    std::size_t n = 0;
    double parameter = 0.0;
    std::uint64_t seed = 0;
};

inline Graph generate_graph(const GraphSpec& spec) {
    const std::size_t n = spec.n;
    SplitMix64 rng(spec.seed);
    std::vector<std::pair<VertexId, VertexId>> edges;
    auto vid = [](std::size_t i) { return static_cast<VertexId>(i); };
    auto check_probability = [&] {
        if (!(spec.parameter >= 0.0 && spec.parameter <= 1.0)) throw ArgumentError("edge probability must be in [0,1]");
    };
    // uniform() < 1 always, so p = 1 keeps every pair and p = 0 none.
    auto coin = [&](double p) { return rng.uniform() < p; };

    switch (spec.model) {
    case GraphModel::gnp:
        check_probability();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (coin(spec.parameter)) edges.emplace_back(vid(i), vid(j));
        break;
    case GraphModel::bipartite_gnp: {
        check_probability();
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
        std::vector<bool> left(n, false);
        for (std::size_t k = 0; k < n / 2; ++k) left[order[k]] = true;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (left[i] != left[j] && coin(spec.parameter)) edges.emplace_back(vid(i), vid(j));
        break;
    }
    case GraphModel::odd_cycle_rich: {
        check_probability();
        // Disjoint cycles of length 3, 5 or 7, then chords with probability p.
        std::size_t start = 0;
        while (n - start >= 3) {
            std::size_t len = 3 + 2 * rng.below(3);
            while (len > n - start) len -= 2;
            for (std::size_t k = 0; k < len; ++k) edges.emplace_back(vid(start + k), vid(start + (k + 1) % len));
            start += len;
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (coin(spec.parameter)) edges.emplace_back(vid(i), vid(j));
        break;
    }
    case GraphModel::star_union: {
        const double k_real = spec.parameter;
        if (n == 0 && k_real == 0.0) break;
        if (!(k_real >= 1.0) || k_real != std::floor(k_real) || 2.0 * k_real > static_cast<double>(n)) {
            throw ArgumentError("star count must be an integer in [1, n/2]");
        }
        const auto k = static_cast<std::size_t>(k_real);
        std::size_t start = 0;
        for (std::size_t s = 0; s < k; ++s) {
            const std::size_t size = n / k + (s < n % k ? 1 : 0);
            for (std::size_t leaf = 1; leaf < size; ++leaf) edges.emplace_back(vid(start), vid(start + leaf));
            start += size;
        }
        break;
    }
    }
    return Graph::with_order(n, edges);
}

inline std::string describe(const GraphSpec& spec) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", spec.parameter);
    return std::string(to_string(spec.model)) + "_n" + std::to_string(spec.n) + "_p" + buf + "_s" +
           std::to_string(spec.seed);
}

// ---------------------------------------------------------------------------
// Configuration

struct CorpusEntry {
    std::optional<GraphSpec> spec;
    std::size_t count = 1;
    /// Instance i gets seed base + i; otherwise seeds derive from the batch seed.
    std::optional<std::uint64_t> seed_base;
    /// Read a DIMACS file instead of generating.
    std::optional<std::string> dimacs_path;
};

struct HarnessConfig {
    PipelineConfig pipeline;
    std::uint64_t node_budget = default_node_budget;
    std::uint64_t seed = 1;
    std::size_t jobs = 1;
    std::vector<CorpusEntry> corpus;
};

namespace detail {

template <class T>
void read_if(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

} // namespace detail

/// Every field is optional; missing ones keep their defaults.
inline HarnessConfig config_from_json(const nlohmann::json& j) {
    HarnessConfig c;
    if (!j.is_object()) throw ArgumentError("config must be a JSON object");
    try {
        if (j.contains("lp")) {
            const auto& lp = j.at("lp");
            detail::read_if(lp, "tau_lp", c.pipeline.lp.tol.lp);
            detail::read_if(lp, "tau_half", c.pipeline.lp.tol.half);
            if (lp.contains("order")) {
                const auto o = lp.at("order").get<std::string>();
                if (o == "ascending_id") c.pipeline.lp.order = RefineOrder::ascending_id;
                else if (o == "descending_id") c.pipeline.lp.order = RefineOrder::descending_id;
                else throw ArgumentError("unknown refinement order '" + o + "'");
            }
        }
        if (j.contains("sdp")) {
            const auto& s = j.at("sdp");
            auto& t = c.pipeline.sdp;
            detail::read_if(s, "tau_feas", t.tau_feas);
            detail::read_if(s, "tau_psd", t.tau_psd);
            detail::read_if(s, "tau_obj", t.tau_obj);
            detail::read_if(s, "tau_dual", t.tau_dual);
            detail::read_if(s, "tau_factor", t.tau_factor);
            detail::read_if(s, "tau_cmp", t.tau_cmp);
            detail::read_if(s, "max_iter", t.max_iter);
            detail::read_if(s, "step", t.step);
            detail::read_if(s, "balance_ratio", t.balance_ratio);
            detail::read_if(s, "over_relaxation", t.over_relaxation);
            detail::read_if(s, "anderson_memory", t.anderson_memory);
        }
        if (j.contains("thresholds")) {
            const auto& s = j.at("thresholds");
            auto& t = c.pipeline.thresholds;
            detail::read_if(s, "below_half_fraction", t.below_half_fraction);
            detail::read_if(s, "above_band_fraction", t.above_band_fraction);
            detail::read_if(s, "epsilon", t.epsilon);
            detail::read_if(s, "cut", t.cut);
            t.validate();
        }
        if (j.contains("pipeline")) {
            const auto& s = j.at("pipeline");
            detail::read_if(s, "tau_ratio", c.pipeline.tau_ratio);
            detail::read_if(s, "solve_single_sdp", c.pipeline.solve_single_sdp);
            detail::read_if(s, "probe_tol", c.pipeline.probe_tol);
        }
        if (j.contains("oracle")) detail::read_if(j.at("oracle"), "node_budget", c.node_budget);
        detail::read_if(j, "seed", c.seed);
        detail::read_if(j, "jobs", c.jobs);
        if (j.contains("corpus")) {
            for (const auto& e : j.at("corpus")) {
                CorpusEntry entry;
                if (e.contains("dimacs")) {
                    entry.dimacs_path = e.at("dimacs").get<std::string>();
                } else {
                    GraphSpec spec;
                    spec.model = graph_model_from_string(e.at("model").get<std::string>());
                    spec.n = e.at("n").get<std::size_t>();
                    spec.parameter = e.at("parameter").get<double>();
                    entry.spec = spec;
                    detail::read_if(e, "count", entry.count);
                    if (e.contains("seed")) entry.seed_base = e.at("seed").get<std::uint64_t>();
                }
                c.corpus.push_back(entry);
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ArgumentError(std::string("bad config: ") + e.what());
    }
    return c;
}

inline nlohmann::json to_json(const HarnessConfig& c) {
    const auto& p = c.pipeline;
    nlohmann::json j;
    j["lp"] = {{"tau_lp", p.lp.tol.lp},
               {"tau_half", p.lp.tol.half},
               {"order", p.lp.order == RefineOrder::ascending_id ? "ascending_id" : "descending_id"}};
    j["sdp"] = {{"tau_feas", p.sdp.tau_feas},       {"tau_psd", p.sdp.tau_psd},
                {"tau_obj", p.sdp.tau_obj},         {"tau_dual", p.sdp.tau_dual},
                {"tau_factor", p.sdp.tau_factor},   {"tau_cmp", p.sdp.tau_cmp},
                {"max_iter", p.sdp.max_iter},       {"step", p.sdp.step},
                {"balance_ratio", p.sdp.balance_ratio}, {"over_relaxation", p.sdp.over_relaxation},
                {"anderson_memory", p.sdp.anderson_memory}};
    j["thresholds"] = {{"below_half_fraction", p.thresholds.below_half_fraction},
                       {"above_band_fraction", p.thresholds.above_band_fraction},
                       {"epsilon", p.thresholds.epsilon},
                       {"cut", p.thresholds.cut}};
    j["pipeline"] = {{"tau_ratio", p.tau_ratio}, {"solve_single_sdp", p.solve_single_sdp}, {"probe_tol", p.probe_tol}};
    j["oracle"] = {{"node_budget", c.node_budget}};
    j["seed"] = c.seed;
    j["jobs"] = c.jobs;
    j["corpus"] = nlohmann::json::array();
    for (const auto& e : c.corpus) {
        if (e.dimacs_path) {
            j["corpus"].push_back({{"dimacs", *e.dimacs_path}});
            continue;
        }
        nlohmann::json entry = {{"model", to_string(e.spec->model)},
                                {"n", e.spec->n},
                                {"parameter", e.spec->parameter},
                                {"count", e.count}};
        if (e.seed_base) entry["seed"] = *e.seed_base;
        j["corpus"].push_back(entry);
    }
    return j;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

inline HarnessConfig load_config(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ArgumentError("config " + path + " is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

/// The --config flag wins; otherwise VCGAP_CONFIG; otherwise none.
inline std::optional<std::string> resolve_config_path(const std::optional<std::string>& flag) {
    if (flag && !flag->empty()) return flag;
    if (const char* env = std::getenv("VCGAP_CONFIG"); env != nullptr && *env != '\0') return std::string(env);
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Batch

struct Instance {
    std::string id;
    Graph graph;
};

/// Expands the corpus in order; instance seeds never depend on scheduling.
inline std::vector<Instance> expand_corpus(const HarnessConfig& cfg) {
    std::vector<Instance> out;
    std::uint64_t index = 0;
    for (const auto& entry : cfg.corpus) {
        if (entry.dimacs_path) {
            out.push_back({std::filesystem::path(*entry.dimacs_path).filename().string(),
                           parse_dimacs(read_text_file(*entry.dimacs_path))});
            ++index;
            continue;
        }
        for (std::size_t i = 0; i < entry.count; ++i, ++index) {
            GraphSpec spec = *entry.spec;
            spec.seed = entry.seed_base ? *entry.seed_base + i : derive_seed(cfg.seed, index);
            out.push_back({describe(spec), generate_graph(spec)});
        }
    }
    return out;
}

struct BatchRow {
    std::string instance_id;
    std::size_t n = 0;
    std::size_t m = 0;
    double z_lp = 0.0;
    std::optional<double> z_sdp_single;
    std::optional<double> z_sdp_doubled;
    std::optional<std::size_t> z_exact;
    std::size_t cover_size = 0;
    std::optional<double> ratio;
    std::string step_taken;
    /// Both copies pass the distribution test; empty when no SDP ran.
    std::optional<bool> p1_holds;
    /// Smallest claimed ratio bound among the emitted certificates.
    std::optional<double> certificate;
    std::vector<std::string> flags;

    bool feasible = false;
    bool kernelized = false;
    std::size_t baseline_size = 0;
    std::optional<double> baseline_ratio;
    std::optional<double> lemma2_lower_margin;
    std::optional<double> lemma2_upper_margin;
    bool sdp_converged = false;
    std::vector<double> edge_defects;
    std::vector<double> collapse_defects;
    std::string error;

    double density() const {
        if (n < 2) return 0.0;
        return 2.0 * static_cast<double>(m) / (static_cast<double>(n) * static_cast<double>(n - 1));
    }

    bool has_flag(const std::string& f) const { return std::find(flags.begin(), flags.end(), f) != flags.end(); }

    friend bool operator==(const BatchRow&, const BatchRow&) = default;
};

struct BatchSummary {
    std::size_t instances = 0;
    std::size_t feasible = 0;
    std::size_t errors = 0;
    std::size_t oracle_known = 0;
    double max_ratio = 0.0;
    double mean_ratio = 0.0;
    double baseline_max_ratio = 0.0;
    double baseline_mean_ratio = 0.0;
    std::map<std::string, std::size_t> step_histogram;
    std::size_t p1_evaluated = 0;
    std::size_t p1_holds = 0;
    std::size_t sdp_runs = 0;
    std::size_t sdp_converged = 0;
    std::optional<double> min_lemma2_lower_margin;
    std::optional<double> min_lemma2_upper_margin;
    std::size_t certificate_violations = 0;
    std::size_t theorem6_violations = 0;
};

struct BatchTable {
    std::vector<BatchRow> rows;
};

inline BatchRow make_row(const std::string& id, const Graph& g, const RunTrace& trace, const RunTrace& baseline) {
    BatchRow r;
    r.instance_id = id;
    r.n = trace.n;
    r.m = trace.m;
    r.z_lp = trace.z_lp;
    r.z_sdp_single = trace.z_sdp_single;
    r.z_sdp_doubled = trace.z_sdp_doubled;
    r.z_exact = trace.oracle_optimum;
    r.cover_size = trace.cover_size;
    r.ratio = trace.empirical_ratio;
    r.step_taken = to_string(trace.step);
    if (trace.property_prime && trace.property_double_prime) {
        r.p1_holds = trace.property_prime->holds() && trace.property_double_prime->holds();
    }
    for (const auto& c : trace.certificates) {
        if (!r.certificate || c.claimed_ratio_bound < *r.certificate) r.certificate = c.claimed_ratio_bound;
    }
    r.flags = trace.flags;
    r.feasible = verify_cover(g, trace.cover).feasible;
    r.kernelized = trace.kernelized;
    r.baseline_size = baseline.cover_size;
    r.baseline_ratio = baseline.empirical_ratio;
    r.lemma2_lower_margin = trace.lemma2_lower_margin;
    r.lemma2_upper_margin = trace.lemma2_upper_margin;
    r.sdp_converged = trace.sdp_converged;
    if (trace.probe) {
        r.edge_defects = trace.probe->edge_defects;
        r.collapse_defects = trace.probe->collapse_defects;
    }
    return r;
}

/// Pipeline, oracle and baseline for one instance. Failures become an
/// error row instead of propagating.
inline BatchRow run_instance(const Instance& inst, const HarnessConfig& cfg) {
    try {
        ExactResult oracle;
        if (inst.graph.order() <= max_exact_order) oracle = exact_vc(inst.graph, cfg.node_budget);
        auto trace = evaluate_ratio(mahdis_run(inst.graph, cfg.pipeline), oracle, cfg.pipeline.tau_ratio);
        auto baseline = evaluate_ratio(two_approx_baseline(inst.graph), oracle, cfg.pipeline.tau_ratio);
        if (!oracle.known()) trace.flags.push_back("oracle_unknown");
        return make_row(inst.id, inst.graph, trace, baseline);
    } catch (const std::exception& e) {
        BatchRow r;
        r.instance_id = inst.id;
        r.n = inst.graph.order();
        r.m = inst.graph.size();
        r.step_taken = "error";
        r.error = e.what();
        r.flags.push_back("error");
        return r;
    }
}

/// Worker pool over instances; rows come back in corpus order.
inline BatchTable run_batch(const std::vector<Instance>& instances, const HarnessConfig& cfg) {
    BatchTable table;
    table.rows.resize(instances.size());
    const std::size_t workers = std::max<std::size_t>(1, std::min(cfg.jobs, instances.size()));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < instances.size(); i = next++) table.rows[i] = run_instance(instances[i], cfg);
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    return table;
}

inline BatchTable run_batch(const HarnessConfig& cfg) { return run_batch(expand_corpus(cfg), cfg); }

inline BatchSummary summarize(const BatchTable& table) {
    BatchSummary s;
    s.instances = table.rows.size();
    double sum = 0.0;
    double baseline_sum = 0.0;
    for (const auto& r : table.rows) {
        if (!r.error.empty()) ++s.errors;
        if (r.feasible) ++s.feasible;
        ++s.step_histogram[r.step_taken];
        if (r.ratio) {
            ++s.oracle_known;
            s.max_ratio = std::max(s.max_ratio, *r.ratio);
            sum += *r.ratio;
        }
        if (r.baseline_ratio) {
            s.baseline_max_ratio = std::max(s.baseline_max_ratio, *r.baseline_ratio);
            baseline_sum += *r.baseline_ratio;
        }
        if (r.p1_holds) {
            ++s.p1_evaluated;
            if (*r.p1_holds) ++s.p1_holds;
        }
        if (r.z_sdp_doubled) {
            ++s.sdp_runs;
            if (r.sdp_converged) ++s.sdp_converged;
        }
        auto fold_min = [](std::optional<double>& acc, const std::optional<double>& v) {
            if (v && (!acc || *v < *acc)) acc = v;
        };
        fold_min(s.min_lemma2_lower_margin, r.lemma2_lower_margin);
        fold_min(s.min_lemma2_upper_margin, r.lemma2_upper_margin);
        if (r.has_flag("certificate_violated")) ++s.certificate_violations;
        if (r.has_flag("theorem6_violation")) ++s.theorem6_violations;
    }
    if (s.oracle_known > 0) {
        s.mean_ratio = sum / static_cast<double>(s.oracle_known);
        s.baseline_mean_ratio = baseline_sum / static_cast<double>(s.oracle_known);
    }
    return s;
}

// ---------------------------------------------------------------------------
// Reports

enum class ReportFormat { json, csv, plotdata };

inline ReportFormat report_format_from_string(const std::string& s) {
    if (s == "json") return ReportFormat::json;
    if (s == "csv") return ReportFormat::csv;
    if (s == "plotdata") return ReportFormat::plotdata;
    throw ArgumentError("unknown report format '" + s + "'");
}

inline const std::vector<std::string>& csv_columns() {
    static const std::vector<std::string> cols = {"instance_id", "n",           "m",         "z_lp",        "z_sdp_single",
                                                  "z_sdp_doubled", "z_exact", "cover_size", "ratio",       "step_taken",
                                                  "p1_holds",    "certificate", "flags"};
    return cols;
}

namespace detail {

inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string join(const std::vector<std::string>& parts, char sep) {
    std::string s;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) s += sep;
        s += parts[i];
    }
    return s;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

template <class T>
std::string opt_field(const std::optional<T>& v) {
    if (!v) return "";
    if constexpr (std::is_same_v<T, double>) return format_double(*v);
    else if constexpr (std::is_same_v<T, bool>) return *v ? "true" : "false";
    else return std::to_string(*v);
}

inline std::optional<double> parse_opt_double(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return std::strtod(s.c_str(), nullptr);
}

/// Keeps ids and flags from breaking the CSV layout.
inline std::string csv_safe(std::string s) {
    for (char& c : s) {
        if (c == ',' || c == '\n' || c == '\r') c = ' ';
    }
    return s;
}

} // namespace detail

/// Fixed columns; missing values are empty fields; doubles use %.17g.
inline std::string emit_csv(const BatchTable& table) {
    std::string out = detail::join(csv_columns(), ',') + "\n";
    for (const auto& r : table.rows) {
        std::vector<std::string> f = {detail::csv_safe(r.instance_id),
                                      std::to_string(r.n),
                                      std::to_string(r.m),
                                      detail::format_double(r.z_lp),
                                      detail::opt_field(r.z_sdp_single),
                                      detail::opt_field(r.z_sdp_doubled),
                                      detail::opt_field(r.z_exact),
                                      std::to_string(r.cover_size),
                                      detail::opt_field(r.ratio),
                                      r.step_taken,
                                      detail::opt_field(r.p1_holds),
                                      detail::opt_field(r.certificate),
                                      detail::csv_safe(detail::join(r.flags, ';'))};
        out += detail::join(f, ',') + "\n";
    }
    return out;
}

/// Reads back the CSV columns of emit_csv; other row fields stay default.
inline BatchTable parse_csv(const std::string& text) {
    BatchTable table;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != detail::join(csv_columns(), ',')) throw ArgumentError("unexpected CSV header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = detail::split(line, ',');
        if (f.size() != csv_columns().size()) throw ArgumentError("CSV row has " + std::to_string(f.size()) + " fields");
        BatchRow r;
        r.instance_id = f[0];
        r.n = std::stoull(f[1]);
        r.m = std::stoull(f[2]);
        r.z_lp = std::strtod(f[3].c_str(), nullptr);
        r.z_sdp_single = detail::parse_opt_double(f[4]);
        r.z_sdp_doubled = detail::parse_opt_double(f[5]);
        if (!f[6].empty()) r.z_exact = std::stoull(f[6]);
        r.cover_size = std::stoull(f[7]);
        r.ratio = detail::parse_opt_double(f[8]);
        r.step_taken = f[9];
        if (!f[10].empty()) r.p1_holds = f[10] == "true";
        r.certificate = detail::parse_opt_double(f[11]);
        if (!f[12].empty()) r.flags = detail::split(f[12], ';');
        table.rows.push_back(std::move(r));
    }
    return table;
}

inline nlohmann::json to_json(const BatchRow& r) {
    using detail::optional_json;
    return {{"instance_id", r.instance_id},
            {"n", r.n},
            {"m", r.m},
            {"z_lp", r.z_lp},
            {"z_sdp_single", optional_json(r.z_sdp_single)},
            {"z_sdp_doubled", optional_json(r.z_sdp_doubled)},
            {"z_exact", optional_json(r.z_exact)},
            {"cover_size", r.cover_size},
            {"ratio", optional_json(r.ratio)},
            {"step_taken", r.step_taken},
            {"p1_holds", optional_json(r.p1_holds)},
            {"certificate", optional_json(r.certificate)},
            {"flags", r.flags},
            {"feasible", r.feasible},
            {"kernelized", r.kernelized},
            {"baseline_size", r.baseline_size},
            {"baseline_ratio", optional_json(r.baseline_ratio)},
            {"lemma2_lower_margin", optional_json(r.lemma2_lower_margin)},
            {"lemma2_upper_margin", optional_json(r.lemma2_upper_margin)},
            {"sdp_converged", r.sdp_converged},
            {"edge_defects", r.edge_defects},
            {"collapse_defects", r.collapse_defects},
            {"error", r.error}};
}

namespace detail {

template <class T>
std::optional<T> get_optional(const nlohmann::json& j, const char* key) {
    const auto& v = j.at(key);
    if (v.is_null()) return std::nullopt;
    return v.get<T>();
}

} // namespace detail

inline BatchRow row_from_json(const nlohmann::json& j) {
    using detail::get_optional;
    BatchRow r;
    r.instance_id = j.at("instance_id").get<std::string>();
    r.n = j.at("n").get<std::size_t>();
    r.m = j.at("m").get<std::size_t>();
    r.z_lp = j.at("z_lp").get<double>();
    r.z_sdp_single = get_optional<double>(j, "z_sdp_single");
    r.z_sdp_doubled = get_optional<double>(j, "z_sdp_doubled");
    r.z_exact = get_optional<std::size_t>(j, "z_exact");
    r.cover_size = j.at("cover_size").get<std::size_t>();
    r.ratio = get_optional<double>(j, "ratio");
    r.step_taken = j.at("step_taken").get<std::string>();
    r.p1_holds = get_optional<bool>(j, "p1_holds");
    r.certificate = get_optional<double>(j, "certificate");
    r.flags = j.at("flags").get<std::vector<std::string>>();
    r.feasible = j.at("feasible").get<bool>();
    r.kernelized = j.at("kernelized").get<bool>();
    r.baseline_size = j.at("baseline_size").get<std::size_t>();
    r.baseline_ratio = get_optional<double>(j, "baseline_ratio");
    r.lemma2_lower_margin = get_optional<double>(j, "lemma2_lower_margin");
    r.lemma2_upper_margin = get_optional<double>(j, "lemma2_upper_margin");
    r.sdp_converged = j.at("sdp_converged").get<bool>();
    r.edge_defects = j.at("edge_defects").get<std::vector<double>>();
    r.collapse_defects = j.at("collapse_defects").get<std::vector<double>>();
    r.error = j.at("error").get<std::string>();
    return r;
}

inline nlohmann::json to_json(const BatchSummary& s) {
    using detail::optional_json;
    return {{"instances", s.instances},
            {"feasible", s.feasible},
            {"errors", s.errors},
            {"oracle_known", s.oracle_known},
            {"max_ratio", s.max_ratio},
            {"mean_ratio", s.mean_ratio},
            {"baseline_max_ratio", s.baseline_max_ratio},
            {"baseline_mean_ratio", s.baseline_mean_ratio},
            {"step_histogram", s.step_histogram},
            {"p1_evaluated", s.p1_evaluated},
            {"p1_holds", s.p1_holds},
            {"sdp_runs", s.sdp_runs},
            {"sdp_converged", s.sdp_converged},
            {"min_lemma2_lower_margin", optional_json(s.min_lemma2_lower_margin)},
            {"min_lemma2_upper_margin", optional_json(s.min_lemma2_upper_margin)},
            {"certificate_violations", s.certificate_violations},
            {"theorem6_violations", s.theorem6_violations}};
}

inline nlohmann::json to_json(const BatchTable& t) {
    nlohmann::json j;
    j["schema_version"] = trace_schema_version;
    j["rows"] = nlohmann::json::array();
    for (const auto& r : t.rows) j["rows"].push_back(to_json(r));
    j["summary"] = to_json(summarize(t));
    return j;
}

inline BatchTable table_from_json(const nlohmann::json& j) {
    BatchTable t;
    for (const auto& r : j.at("rows")) t.rows.push_back(row_from_json(r));
    return t;
}

inline std::string emit_json(const BatchTable& t) { return to_json(t).dump(2) + "\n"; }

/// Long-format series: ratio against edge density, and per-position
/// defects of any odd-cycle probe.
inline std::string emit_plotdata(const BatchTable& t) {
    std::string out = "series,instance_id,x,y\n";
    for (const auto& r : t.rows) {
        if (r.ratio) {
            out += "ratio_vs_density," + detail::csv_safe(r.instance_id) + "," + detail::format_double(r.density()) +
                   "," + detail::format_double(*r.ratio) + "\n";
        }
    }
    for (const auto& r : t.rows) {
        for (std::size_t k = 0; k < r.edge_defects.size(); ++k) {
            out += "edge_defect," + detail::csv_safe(r.instance_id) + "," + std::to_string(k) + "," +
                   detail::format_double(r.edge_defects[k]) + "\n";
        }
        for (std::size_t k = 0; k < r.collapse_defects.size(); ++k) {
            out += "collapse_defect," + detail::csv_safe(r.instance_id) + "," + std::to_string(k) + "," +
                   detail::format_double(r.collapse_defects[k]) + "\n";
        }
    }
    return out;
}

inline std::string report_file_name(ReportFormat f) {
    switch (f) {
    case ReportFormat::json: return "report.json";
    case ReportFormat::csv: return "report.csv";
    case ReportFormat::plotdata: return "plotdata.csv";
    }
    return "report";
}

inline std::string render_report(const BatchTable& t, ReportFormat f) {
    switch (f) {
    case ReportFormat::json: return emit_json(t);
    case ReportFormat::csv: return emit_csv(t);
    case ReportFormat::plotdata: return emit_plotdata(t);
    }
    return {};
}

/// Writes the report into `dir` (created if needed); returns the file path.
inline std::filesystem::path emit_report(const BatchTable& t, ReportFormat f, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    const auto path = dir / report_file_name(f);
    write_text_file(path, render_report(t, f));
    return path;
}

/// Distribution tests, band subgraphs and the odd-cycle probe for a stored
/// doubled Gram matrix of `g`.
inline nlohmann::json probe_report(const Graph& g, const GramSolution& gram, const PipelineConfig& cfg = {}) {
    const std::size_t n = g.order();
    if (gram.matrix.dim() != 2 * n + 1) {
        throw ArgumentError("Gram dimension " + std::to_string(gram.matrix.dim()) + " does not match a doubled graph on " +
                            std::to_string(n) + " vertices");
    }
    const auto emb = extract_vectors(gram, cfg.sdp.tau_factor);
    const auto& th = cfg.thresholds;
    nlohmann::json j;
    j["reconstruction_error"] = emb.reconstruction_error();
    j["property_prime"] = to_json(classify_property1(emb, index_range(1, n), th));
    j["property_double_prime"] = to_json(classify_property1(emb, index_range(1 + n, n), th));
    const auto eps = build_epsilon_subgraph(emb, g, 1, th);
    const auto other = build_epsilon_subgraph(emb, g, 1 + n, th);
    j["epsilon_prime"] = {{"vertices", eps.v_eps}, {"coverage", eps.coverage_fraction}};
    j["epsilon_double_prime"] = {{"vertices", other.v_eps}, {"coverage", other.coverage_fraction}};
    std::optional<std::pair<std::size_t, std::size_t>> anchor;
    if (other.graph.size() > 0) {
        const auto& e = other.graph.edges().front();
        anchor = std::make_pair(1 + n + g.index_of(e.u), 1 + n + g.index_of(e.v));
    }
    j["probe"] = to_json(odd_cycle_probe(emb, eps, anchor, cfg.probe_tol));
    return j;
}

} // namespace vcgap
