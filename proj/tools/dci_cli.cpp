// dci: build, query and benchmark dynamic continuous indices from the shell.
//
// Data goes to stdout or --out; diagnostics, including the effective seed,
// go to stderr. Exit status is 0 only when the command completed.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dci/analysis.hpp"
#include "dci/bench.hpp"
#include "dci/dataset_io.hpp"
#include "dci/dci_index.hpp"
#include "dci/query.hpp"

namespace {

using nlohmann::ordered_json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

dci::DatasetFormat format_from(const std::string& name) {
    auto f = dci::parse_dataset_format(name);
    if (!f) throw UsageError("unknown format '" + name + "' (expected csv or bin)");
    return *f;
}

std::vector<double> parse_vector(const std::string& text) {
    std::istringstream in(text);
    dci::Dataset one = dci::read_csv(in, {}, "--q");
    if (one.size() != 1) throw UsageError("--q must hold exactly one comma-separated vector");
    auto row = one.row(0);
    return {row.begin(), row.end()};
}

ordered_json report_json(const dci::QueryReport& rep) {
    ordered_json j;
    j["neighbours"] = ordered_json::array();
    for (const auto& nb : rep.neighbours) j["neighbours"].push_back({{"id", nb.id}, {"dist", nb.dist}});
    j["candidates"] = rep.unique_candidates;
    j["iterations"] = rep.outer_iterations;
    j["termination"] = std::string(dci::to_string(rep.termination));
    return j;
}

struct BuildArgs {
    std::string data, format = "csv", out;
    bool id_column = false;
    std::size_t m = 15, L = 3;
    std::uint64_t seed = 0;
};

int run_build(const BuildArgs& a) {
    const auto data = dci::load_dataset(a.data, format_from(a.format), {a.id_column});
    std::cerr << "seed: " << a.seed << '\n';
    const auto index = dci::DciIndex::construct(data, {a.m, a.L}, a.seed);
    index.save(a.out);
    std::cout << "n=" << index.size() << " d=" << index.dim() << " m=" << a.m << " L=" << a.L << '\n';
    return 0;
}

struct QueryArgs {
    std::string index, q, q_file;
    std::size_t k = 1;
    std::optional<std::size_t> k_tilde;
    std::optional<double> epsilon;
};

int run_query(const QueryArgs& a) {
    if (a.k_tilde.has_value() == a.epsilon.has_value()) {
        throw UsageError("exactly one of --k-tilde or --epsilon is required");
    }
    if (a.q.empty() == a.q_file.empty()) throw UsageError("exactly one of --q or --q-file is required");

    const auto index = dci::DciIndex::load(a.index);
    std::cerr << "seed: " << index.seed() << '\n';
    dci::QueryParams params{a.k, dci::Adaptive{}};
    if (a.k_tilde) params.mode = dci::FixedIterations{*a.k_tilde};
    else params.mode = dci::Adaptive{*a.epsilon};

    if (!a.q.empty()) {
        std::cout << report_json(dci::query(index, parse_vector(a.q), params)).dump() << '\n';
        return 0;
    }
    const auto queries = dci::load_dataset(a.q_file, dci::DatasetFormat::Csv);
    for (std::size_t r = 0; r < queries.size(); ++r) {
        std::cout << report_json(dci::query(index, queries.row(r), params)).dump() << '\n';
    }
    return 0;
}

int run_bench(const std::string& config_path) {
    const auto cfg = dci::load_bench_config(config_path);
    std::cerr << "seed: " << cfg.seed << '\n';
    const auto res = dci::run_bench(cfg);
    if (cfg.output.empty()) dci::write_curve_csv(std::cout, res.curve);
    else std::cerr << "wrote " << res.curve.size() << " rows to " << cfg.output.string() << '\n';
    return 0;
}

struct SparsityArgs {
    std::string data, format = "csv";
    bool id_column = false;
    std::size_t tau = 1;
};

int run_sparsity(const SparsityArgs& a) {
    const auto data = dci::load_dataset(a.data, format_from(a.format), {a.id_column});
    std::cerr << "seed: none (deterministic)\n";
    const auto prof = dci::estimate_global_sparsity(data, a.tau);
    ordered_json j;
    j["tau"] = prof.tau;
    j["gamma"] = prof.gamma;
    if (std::isinf(prof.intrinsic_dim)) j["intrinsic_dim"] = "inf";
    else j["intrinsic_dim"] = prof.intrinsic_dim;
    std::cout << j.dump() << '\n';
    return 0;
}

struct SynthArgs {
    std::string kind, out, format = "csv";
    std::size_t n = 0, d = 0;
    std::uint64_t seed = 0;
    dci::SynthOptions opts;
};

int run_synth(const SynthArgs& a) {
    auto kind = dci::parse_synth_kind(a.kind);
    if (!kind) throw UsageError("unknown kind '" + a.kind + "'");
    std::cerr << "seed: " << a.seed << '\n';
    const auto data = dci::synth_dataset(*kind, a.n, a.d, a.seed, a.opts);
    if (format_from(a.format) == dci::DatasetFormat::Csv) dci::save_csv(a.out, data);
    else dci::save_packed_binary(a.out, data);
    std::cout << "n=" << data.size() << " d=" << data.dim() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dynamic continuous indexing for k-nearest-neighbour search"};
    app.require_subcommand(1);

    BuildArgs build;
    auto* build_cmd = app.add_subcommand("build", "Build an index snapshot from a dataset");
    build_cmd->add_option("--data", build.data, "Dataset path")->required();
    build_cmd->add_option("--format", build.format, "csv or bin")->capture_default_str();
    build_cmd->add_flag("--id-column", build.id_column, "CSV has a leading id column");
    build_cmd->add_option("--m", build.m, "Simple indices per composite index")->capture_default_str();
    build_cmd->add_option("--L", build.L, "Composite indices")->capture_default_str();
    build_cmd->add_option("--seed", build.seed, "Direction seed")->capture_default_str();
    build_cmd->add_option("--out", build.out, "Snapshot output path")->required();

    QueryArgs qa;
    auto* query_cmd = app.add_subcommand("query", "Query an index snapshot; prints JSON");
    query_cmd->add_option("--index", qa.index, "Snapshot path")->required();
    query_cmd->add_option("--q", qa.q, "Query vector as comma-separated reals");
    query_cmd->add_option("--q-file", qa.q_file, "CSV file of query vectors, one per line");
    query_cmd->add_option("--k", qa.k, "Number of neighbours")->required();
    query_cmd->add_option("--k-tilde", qa.k_tilde, "Fixed number of outer iterations");
    query_cmd->add_option("--epsilon", qa.epsilon, "Maximum tolerable failure probability");

    std::string bench_config;
    auto* bench_cmd = app.add_subcommand("bench", "Run a cross-validated benchmark");
    bench_cmd->add_option("--config", bench_config, "key=value config file")->required();

    SparsityArgs sp;
    auto* sparsity_cmd = app.add_subcommand("sparsity", "Estimate global relative sparsity");
    sparsity_cmd->add_option("--data", sp.data, "Dataset path")->required();
    sparsity_cmd->add_option("--format", sp.format, "csv or bin")->capture_default_str();
    sparsity_cmd->add_flag("--id-column", sp.id_column, "CSV has a leading id column");
    sparsity_cmd->add_option("--tau", sp.tau, "Minimum ball population")->required();

    SynthArgs sy;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic dataset");
    synth_cmd->add_option("--kind", sy.kind, "uniform-cube, gaussian-mixture or two-scale-clusters")->required();
    synth_cmd->add_option("--n", sy.n, "Number of points")->required();
    synth_cmd->add_option("--d", sy.d, "Dimension")->required();
    synth_cmd->add_option("--seed", sy.seed, "Generator seed")->required();
    synth_cmd->add_option("--out", sy.out, "Output path")->required();
    synth_cmd->add_option("--format", sy.format, "csv or bin")->capture_default_str();
    synth_cmd->add_option("--clusters", sy.opts.clusters, "Cluster count")->capture_default_str();
    synth_cmd->add_option("--spread", sy.opts.spread, "Per-cluster standard deviation")->capture_default_str();
    synth_cmd->add_option("--scale-ratio", sy.opts.scale_ratio, "two-scale-clusters: outer/inner spread")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*build_cmd) return run_build(build);
        if (*query_cmd) return run_query(qa);
        if (*bench_cmd) return run_bench(bench_config);
        if (*sparsity_cmd) return run_sparsity(sp);
        if (*synth_cmd) return run_synth(sy);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
