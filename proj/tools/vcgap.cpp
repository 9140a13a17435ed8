// Command-line front end: solve, exact, baseline, gen, batch, probe.
//
// Exit codes: 0 success, 1 usage error, 2 contract violation, 3 I/O.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "vcgap/harness.hpp"

namespace {

constexpr int exit_usage = 1;
constexpr int exit_contract = 2;
constexpr int exit_io = 3;

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> jobs;
    std::string format;
    std::string out_dir;
    std::string input;
};

vcgap::HarnessConfig load_harness_config(const Options& opt, const std::string& positional = {}) {
    std::optional<std::string> flag;
    if (!positional.empty()) flag = positional;
    else if (!opt.config_path.empty()) flag = opt.config_path;
    vcgap::HarnessConfig cfg;
    if (auto path = vcgap::resolve_config_path(flag)) cfg = vcgap::load_config(*path);
    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.jobs) cfg.jobs = *opt.jobs;
    return cfg;
}

vcgap::Graph read_graph(const std::string& path) { return vcgap::parse_dimacs(vcgap::read_text_file(path)); }

/// Writes to --out/<name> when --out is given, else to stdout.
void deliver(const Options& opt, const std::string& name, const std::string& text) {
    if (opt.out_dir.empty()) {
        std::cout << text;
        return;
    }
    std::error_code ec;
    std::filesystem::create_directories(opt.out_dir, ec);
    if (ec) throw vcgap::IoError("cannot create " + opt.out_dir + ": " + ec.message());
    const auto path = std::filesystem::path(opt.out_dir) / name;
    vcgap::write_text_file(path, text);
    std::cerr << "wrote " << path.string() << "\n";
}

nlohmann::json cover_json(const vcgap::CoverPartition& p) {
    return {{"cover", p.in_cover}, {"size", p.cover_size()}};
}

int run_solve(const Options& opt, bool baseline) {
    auto cfg = load_harness_config(opt);
    cfg.pipeline.keep_gram = !opt.out_dir.empty() && !baseline;
    const auto g = read_graph(opt.input);
    vcgap::ExactResult oracle;
    if (g.order() <= vcgap::max_exact_order) oracle = vcgap::exact_vc(g, cfg.node_budget);
    auto trace = baseline ? vcgap::two_approx_baseline(g) : vcgap::mahdis_run(g, cfg.pipeline);
    trace = vcgap::evaluate_ratio(std::move(trace), oracle, cfg.pipeline.tau_ratio);
    if (opt.format == "json" || !opt.out_dir.empty()) {
        deliver(opt, baseline ? "baseline.json" : "trace.json", vcgap::to_json(trace).dump(2) + "\n");
    }
    if (trace.gram) {
        const auto residual = vcgap::induced_subgraph(g, trace.decomposition.v_half);
        const nlohmann::json gram = {{"graph", vcgap::to_json(residual)}, {"gram", vcgap::to_json(*trace.gram)}};
        deliver(opt, "gram.json", gram.dump() + "\n");
    }
    if (opt.format != "json" || !opt.out_dir.empty()) std::cout << vcgap::summary_line(trace) << "\n";
    return 0;
}

int run_exact(const Options& opt) {
    const auto cfg = load_harness_config(opt);
    const auto g = read_graph(opt.input);
    const auto r = vcgap::exact_vc(g, cfg.node_budget);
    if (opt.format == "json") {
        nlohmann::json j = {{"status", vcgap::to_string(r.status)}, {"nodes", r.nodes}};
        if (r.known()) j.update(cover_json(*r.cover));
        deliver(opt, "exact.json", j.dump(2) + "\n");
        return 0;
    }
    if (!r.known()) {
        std::cout << "unknown (node budget " << cfg.node_budget << " exhausted)\n";
        return 0;
    }
    std::cout << "optimum " << *r.optimum << "\ncover";
    for (auto id : r.cover->in_cover) std::cout << ' ' << id + 1;
    std::cout << "\n";
    return 0;
}

vcgap::GraphSpec parse_spec(const std::string& text, std::uint64_t seed) {
    // model:n:parameter
    const auto parts = vcgap::detail::split(text, ':');
    if (parts.size() != 3) throw vcgap::ArgumentError("graph spec must look like model:n:parameter");
    vcgap::GraphSpec spec;
    spec.model = vcgap::graph_model_from_string(parts[0]);
    try {
        spec.n = std::stoull(parts[1]);
        spec.parameter = std::stod(parts[2]);
    } catch (const std::exception&) {
        throw vcgap::ArgumentError("graph spec has a non-numeric field: " + text);
    }
    spec.seed = seed;
    return spec;
}

int run_gen(const Options& opt) {
    const auto spec = parse_spec(opt.input, opt.seed.value_or(1));
    const auto g = vcgap::generate_graph(spec);
    if (opt.format == "json") {
        deliver(opt, vcgap::describe(spec) + ".json", vcgap::to_json(g).dump() + "\n");
    } else {
        std::ostringstream out;
        out << "c " << vcgap::describe(spec) << "\n";
        vcgap::write_dimacs(out, g);
        deliver(opt, vcgap::describe(spec) + ".dimacs", out.str());
    }
    return 0;
}

int run_batch(const Options& opt) {
    const auto cfg = load_harness_config(opt, opt.input);
    const auto table = vcgap::run_batch(cfg);
    if (opt.format == "text") {
        if (!opt.out_dir.empty()) throw vcgap::ArgumentError("--format text writes to stdout only");
        for (const auto& r : table.rows) {
            std::cout << r.instance_id << " step=" << r.step_taken << " cover=" << r.cover_size;
            if (r.ratio) std::cout << " ratio=" << *r.ratio;
            if (!r.error.empty()) std::cout << " error=" << r.error;
            std::cout << "\n";
        }
        std::cout << vcgap::to_json(vcgap::summarize(table)).dump(2) << "\n";
        return 0;
    }
    const auto format = vcgap::report_format_from_string(opt.format.empty() ? "csv" : opt.format);
    if (opt.out_dir.empty()) {
        std::cout << vcgap::render_report(table, format);
    } else {
        const auto path = vcgap::emit_report(table, format, opt.out_dir);
        std::cerr << "wrote " << path.string() << "\n";
    }
    const auto s = vcgap::summarize(table);
    std::cerr << "instances " << s.instances << ", feasible " << s.feasible << ", errors " << s.errors
              << ", max ratio " << s.max_ratio << ", certificate violations " << s.certificate_violations
              << ", odd-cycle fallbacks " << s.theorem6_violations << "\n";
    return 0;
}

int run_probe(const Options& opt) {
    const auto cfg = load_harness_config(opt);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(vcgap::read_text_file(opt.input));
    } catch (const nlohmann::json::parse_error& e) {
        throw vcgap::ArgumentError(std::string("probe input is not JSON: ") + e.what());
    }
    if (!j.contains("graph") || !j.contains("gram")) throw vcgap::ArgumentError("probe input needs 'graph' and 'gram'");
    const auto g = vcgap::graph_from_json(j.at("graph"));
    const auto gram = vcgap::gram_from_json(j.at("gram"));
    deliver(opt, "probe.json", vcgap::probe_report(g, gram, cfg.pipeline).dump(2) + "\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Vertex cover LP/SDP rounding experiments"};
    app.require_subcommand(1);
    Options opt;
    std::uint64_t seed = 0;
    std::size_t jobs = 0;
    app.add_option("--config", opt.config_path, "JSON config file (falls back to $VCGAP_CONFIG)");
    auto* seed_opt = app.add_option("--seed", seed, "64-bit seed");
    auto* jobs_opt = app.add_option("--jobs", jobs, "worker threads for batch")->check(CLI::PositiveNumber);
    app.add_option("--format", opt.format, "json, csv, plotdata or text")
        ->check(CLI::IsMember({"json", "csv", "plotdata", "text"}));
    app.add_option("--out", opt.out_dir, "output directory");

    auto* solve = app.add_subcommand("solve", "run the rounding pipeline on a DIMACS file");
    auto* exact = app.add_subcommand("exact", "exact minimum vertex cover of a DIMACS file");
    auto* baseline = app.add_subcommand("baseline", "maximal-matching cover of a DIMACS file");
    auto* gen = app.add_subcommand("gen", "generate a graph from model:n:parameter");
    auto* batch = app.add_subcommand("batch", "run a batch described by a config file");
    auto* probe = app.add_subcommand("probe", "inspect a stored doubled Gram matrix");
    for (auto* sub : {solve, exact, baseline, gen, probe}) {
        sub->add_option("input", opt.input)->required();
        sub->fallthrough();
    }
    batch->add_option("config", opt.input);
    batch->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_usage;
    }
    if (seed_opt->count()) opt.seed = seed;
    if (jobs_opt->count()) opt.jobs = jobs;

    try {
        if (solve->parsed()) return run_solve(opt, false);
        if (baseline->parsed()) return run_solve(opt, true);
        if (exact->parsed()) return run_exact(opt);
        if (gen->parsed()) return run_gen(opt);
        if (batch->parsed()) return run_batch(opt);
        if (probe->parsed()) return run_probe(opt);
    } catch (const vcgap::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_io;
    } catch (const vcgap::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_io;
    } catch (const vcgap::ArgumentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "contract violation: " << e.what() << "\n";
        return exit_contract;
    }
    return exit_usage;
}
