// hnswlab: command-line front end for the library.
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hnswlab/dimest.hpp"
#include "hnswlab/error.hpp"
#include "hnswlab/hash.hpp"
#include "hnswlab/hnsw.hpp"
#include "hnswlab/io.hpp"
#include "hnswlab/knn.hpp"
#include "hnswlab/lab.hpp"
#include "hnswlab/orders.hpp"
#include "hnswlab/synth.hpp"

using namespace hnswlab;
using nlohmann::json;

namespace {

struct Globals {
    bool json = false;
    unsigned threads = 0;
};

// Emits the resolved configuration on stderr so stdout stays machine-readable.
void announce(const std::string& command, const json& config) {
    std::cerr << "# " << command << " " << config.dump() << "\n";
}

void emit(const Globals& g, const json& doc, const std::string& text) {
    if (g.json) {
        std::cout << doc.dump(2) << "\n";
    } else {
        std::cout << text;
    }
}

Metric metric_or(const std::string& name, Metric fallback) { return name.empty() ? fallback : parse_metric(name); }

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream in(s);
    for (std::string part; std::getline(in, part, sep);) {
        if (!part.empty()) out.push_back(part);
    }
    return out;
}

// ---------------------------------------------------------------- synth-gen

struct SynthArgs {
    std::size_t d = 256, k = 16, n = 10000, queries = 0;
    std::uint64_t seed = 42;
    std::string out, queries_out;
};

void add_synth(CLI::App& app, SynthArgs& a) {
    auto* c = app.add_subcommand("synth-gen", "Generate X = C·U with a random orthonormal basis U of k rows");
    c->add_option("--d", a.d, "Ambient dimension")->capture_default_str();
    c->add_option("--k", a.k, "Basis count (1 <= k <= d)")->capture_default_str();
    c->add_option("--n", a.n, "Number of points")->capture_default_str();
    c->add_option("--seed", a.seed, "Seed for basis and coefficients")->capture_default_str();
    c->add_option("--out", a.out, "Output fvecs path (a .json sidecar is written next to it)")->required();
    c->add_option("--queries", a.queries, "Also draw this many queries from the same basis")->capture_default_str();
    c->add_option("--queries-out", a.queries_out, "Query fvecs path (required with --queries)");
}

int run_synth(const Globals& g, const SynthArgs& a) {
    synth::SynthSpec spec{a.d, a.k, a.n, a.seed};
    json cfg = {{"d", a.d}, {"k", a.k}, {"n", a.n}, {"seed", a.seed}, {"out", a.out}, {"queries", a.queries}};
    announce("synth-gen", cfg);
    spec.validate();
    if (a.queries > 0 && a.queries_out.empty()) throw UsageError("--queries needs --queries-out");
    const auto basis = synth::generate_basis(a.d, a.k, derive_seed(a.seed, "basis"));
    const auto data = synth::generate_dataset(basis, a.n, derive_seed(a.seed, "data"), g.threads);
    io::write_fvecs(data, a.out);
    json sidecar = {{"format", "hnswlab-synth"},
                    {"version", io::kFormatVersion},
                    {"spec", {{"d", a.d}, {"k", a.k}, {"n", a.n}, {"seed", a.seed}}},
                    {"dataset_hash", data.content_hash()}};
    if (a.queries > 0) {
        const auto q = synth::generate_query_set(basis, a.queries, derive_seed(a.seed, "queries"), g.threads);
        io::write_fvecs(q, a.queries_out);
        sidecar["queries"] = {{"n", a.queries}, {"path", a.queries_out}, {"query_hash", q.content_hash()}};
    }
    io::write_json_atomic(a.out + ".json", sidecar);
    emit(g, sidecar, "wrote " + std::to_string(a.n) + " x " + std::to_string(a.d) + " to " + a.out + "\n");
    return 0;
}

// ---------------------------------------------------------------- id-estimate

struct IdArgs {
    double theta = dimest::kDefaultTheta;
    std::string data;
};

void add_id(CLI::App& app, IdArgs& a) {
    auto* c = app.add_subcommand("id-estimate", "PCA intrinsic dimensionality: smallest k with C(k) >= theta");
    c->add_option("--theta", a.theta, "Cumulative variance threshold")->capture_default_str();
    c->add_option("data", a.data, "Dataset fvecs")->required();
}

int run_id(const Globals& g, const IdArgs& a) {
    announce("id-estimate", {{"theta", a.theta}, {"data", a.data}});
    const auto data = io::read_fvecs(a.data);
    const auto r = dimest::pca_intrinsic_dim(data, a.theta);
    std::ostringstream text;
    text.precision(17);
    text << "k_intrinsic," << r.k_intrinsic << "\nk,explained_variance_ratio,cumulative\n";
    for (std::size_t i = 0; i < r.cumulative.size(); ++i) {
        text << i + 1 << ',' << r.explained_variance_ratios[i] << ',' << r.cumulative[i] << '\n';
    }
    emit(g, io::to_json(r), text.str());
    return 0;
}

// ---------------------------------------------------------------- lid-profile

struct LidArgs {
    std::size_t k = dimest::kDefaultLidNeighbours;
    std::string metric = "l2";
    std::string data, out;
};

void add_lid(CLI::App& app, LidArgs& a) {
    auto* c = app.add_subcommand("lid-profile", "Per-point LID by MLE over exact nearest-neighbour distances");
    c->add_option("--k", a.k, "Neighbours per point")->capture_default_str();
    c->add_option("--metric", a.metric, "l2 | cosine | ip")->capture_default_str();
    c->add_option("--out", a.out, "Binary profile path (summary written to <out>.json)")->required();
    c->add_option("data", a.data, "Dataset fvecs")->required();
}

int run_lid(const Globals& g, const LidArgs& a) {
    announce("lid-profile", {{"k", a.k}, {"metric", a.metric}, {"data", a.data}, {"out", a.out}});
    const Metric metric = parse_metric(a.metric);
    const auto data = io::read_fvecs(a.data);
    const auto profile = dimest::lid_profile(data, a.k, metric, g.threads);
    io::save_lid_profile(profile, a.out);
    const auto s = dimest::summarize(profile);
    std::ostringstream text;
    text << "points " << s.count << "\nmean " << s.mean << "\nmedian " << s.median << "\nmin " << s.min << "\nmax "
         << s.max << "\nsentinels " << s.sentinel_count << "\n";
    emit(g, io::lid_summary_json(profile), text.str());
    return 0;
}

// ---------------------------------------------------------------- exact-baseline

struct BaselineArgs {
    std::size_t k = 10;
    std::string metric = "l2";
    std::string data, queries, out;
};

void add_baseline(CLI::App& app, BaselineArgs& a) {
    auto* c = app.add_subcommand("exact-baseline", "Brute-force top-k for every query");
    c->add_option("--data", a.data, "Dataset fvecs")->required();
    c->add_option("--queries", a.queries, "Query fvecs")->required();
    c->add_option("--k", a.k, "Neighbours per query")->capture_default_str();
    c->add_option("--metric", a.metric, "l2 | cosine | ip")->capture_default_str();
    c->add_option("--out", a.out, "Baseline path; defaults to the cache directory when set");
}

int run_baseline(const Globals& g, const BaselineArgs& a) {
    announce("exact-baseline",
             {{"data", a.data}, {"queries", a.queries}, {"k", a.k}, {"metric", a.metric}, {"out", a.out}});
    const Metric metric = parse_metric(a.metric);
    const auto data = io::read_fvecs(a.data);
    const auto queries = io::read_fvecs(a.queries);
    if (a.k == 0 || a.k > data.size()) throw UsageError("--k must lie in [1, dataset size]");
    lab::ExperimentConfig env;
    const auto cache = lab::resolve_cache_dir(env);
    if (a.out.empty() && cache.empty()) throw UsageError("--out is required when no cache directory is set");
    io::Baseline b{data.content_hash(), queries.content_hash(), a.k, metric,
                   lab::exact_baseline_cached(data, queries, a.k, metric, cache, g.threads)};
    if (!a.out.empty()) io::save_baseline(b, a.out);
    emit(g,
         {{"queries", queries.size()}, {"k", a.k}, {"dataset_hash", b.dataset_hash}, {"query_hash", b.query_hash}},
         "baseline for " + std::to_string(queries.size()) + " queries at k=" + std::to_string(a.k) + "\n");
    return 0;
}

// ---------------------------------------------------------------- build

struct BuildArgs {
    hnsw::HnswParams params;
    std::string metric = "l2";
    std::string select = "heuristic";
    std::optional<std::size_t> M0;
    std::optional<double> mL;
    std::string data, out;
    std::string order = "identity";
    std::uint64_t order_seed = 0;
    std::string order_plan, lid_profile, categories, sequence;
};

void add_build(CLI::App& app, BuildArgs& a) {
    auto* c = app.add_subcommand("build", "Build an HNSW index with a chosen insertion order");
    c->add_option("--data", a.data, "Dataset fvecs")->required();
    c->add_option("--out", a.out, "Index path")->required();
    c->add_option("--M", a.params.M, "Neighbour cap on upper layers (standard HNSW setting)")->capture_default_str();
    c->add_option("--M0", a.M0, "Neighbour cap on layer 0 [default: 2*M]");
    c->add_option("--ef-construction", a.params.ef_construction, "Candidate list size while inserting")
        ->capture_default_str();
    c->add_option("--ml", a.mL, "Level multiplier [default: 1/ln(M)]");
    c->add_option("--seed", a.params.seed, "Level assignment seed")->capture_default_str();
    c->add_option("--metric", a.metric, "l2 | cosine | ip")->capture_default_str();
    c->add_option("--neighbor-select", a.select, "simple | heuristic")->capture_default_str();
    c->add_option("--order", a.order, "identity | random | lid_asc | lid_desc | category")->capture_default_str();
    c->add_option("--order-seed", a.order_seed, "Seed for random and category orders")->capture_default_str();
    c->add_option("--order-plan", a.order_plan, "Use a saved order plan instead of --order");
    c->add_option("--lid-profile", a.lid_profile, "LID profile for lid_asc / lid_desc");
    c->add_option("--categories", a.categories, "JSONL {\"id\":..,\"category\":..} for category order");
    c->add_option("--sequence", a.sequence, "Comma-separated category sequence");
}

orders::OrderPlan plan_for(const BuildArgs& a, const Dataset& data) {
    if (!a.order_plan.empty()) {
        auto plan = io::load_order_plan(a.order_plan);
        orders::require_permutation(plan.ids, data.size());
        return plan;
    }
    const auto strategy = orders::parse_strategy(a.order);
    switch (strategy) {
        case orders::Strategy::Identity:
            return orders::order_identity(data.size());
        case orders::Strategy::Random: {
            const auto ids = data.ids();
            return orders::order_random(ids, a.order_seed);
        }
        case orders::Strategy::LidAsc:
        case orders::Strategy::LidDesc: {
            if (a.lid_profile.empty()) throw UsageError("--order " + a.order + " needs --lid-profile");
            const auto profile = io::load_lid_profile(a.lid_profile);
            if (profile.dataset_hash != data.content_hash()) {
                throw DataError(a.lid_profile + ": profile was computed for a different dataset");
            }
            return orders::order_by_lid(profile, strategy == orders::Strategy::LidAsc ? orders::Direction::Asc
                                                                                      : orders::Direction::Desc);
        }
        case orders::Strategy::Category: {
            if (a.categories.empty() || a.sequence.empty()) {
                throw UsageError("--order category needs --categories and --sequence");
            }
            const auto labels = io::read_categories(a.categories, data.size());
            return orders::order_by_category(labels, split(a.sequence, ','), a.order_seed);
        }
    }
    throw UsageError("unsupported order");
}

int run_build(const Globals& g, BuildArgs a) {
    a.params.metric = parse_metric(a.metric);
    a.params.neighbor_select = hnsw::parse_neighbor_select(a.select);
    a.params.M0 = a.M0.value_or(2 * a.params.M);
    a.params.mL = a.mL.value_or(1.0 / std::log(static_cast<double>(a.params.M)));
    json cfg = io::to_json(a.params);
    cfg["data"] = a.data;
    cfg["out"] = a.out;
    cfg["order"] = a.order_plan.empty() ? a.order : "plan:" + a.order_plan;
    announce("build", cfg);
    a.params.validate();
    const auto data = io::read_fvecs(a.data);
    const auto plan = plan_for(a, data);
    const auto index = hnsw::build(data, plan, a.params);
    index.check_invariants();
    io::save_index(index, data.content_hash(), a.out);
    json out = {{"nodes", index.size()},
                {"max_level", index.max_level()},
                {"entry_point", index.entry_point()},
                {"order_hash", plan.content_hash()}};
    emit(g, out, "built " + std::to_string(index.size()) + " nodes, max level " + std::to_string(index.max_level()) +
                     ", wrote " + a.out + "\n");
    return 0;
}

// ---------------------------------------------------------------- search-eval

struct EvalArgs {
    std::string index, data, queries, baseline, qrels;
    std::vector<std::size_t> ef_search{10};
    std::size_t k = 10;
    std::string gain = "linear";
};

void add_eval(CLI::App& app, EvalArgs& a) {
    auto* c = app.add_subcommand("search-eval", "Search an index and score recall (and NDCG with qrels)");
    c->add_option("--index", a.index, "Index path")->required();
    c->add_option("--data", a.data, "Dataset fvecs the index was built from")->required();
    c->add_option("--queries", a.queries, "Query fvecs")->required();
    c->add_option("--baseline", a.baseline, "Saved exact baseline (computed or read from cache when absent)");
    c->add_option("--ef-search", a.ef_search, "Search beam width; repeatable")->capture_default_str();
    c->add_option("--k", a.k, "Result depth")->capture_default_str();
    c->add_option("--qrels", a.qrels, "TSV qrels: query-id [iter] doc-id grade");
    c->add_option("--gain", a.gain, "NDCG gain: linear | exponential")->capture_default_str();
}

int run_eval(const Globals& g, const EvalArgs& a) {
    announce("search-eval", {{"index", a.index},
                             {"data", a.data},
                             {"queries", a.queries},
                             {"baseline", a.baseline},
                             {"ef_search", a.ef_search},
                             {"k", a.k},
                             {"qrels", a.qrels},
                             {"gain", a.gain}});
    if (a.k == 0) throw UsageError("--k must be >= 1");
    for (std::size_t ef : a.ef_search) {
        if (ef < a.k) throw UsageError("every --ef-search must be >= --k");
    }
    metrics::Gain gain = metrics::Gain::Linear;
    if (a.gain == "exponential") {
        gain = metrics::Gain::Exponential;
    } else if (a.gain != "linear") {
        throw UsageError("--gain must be linear or exponential");
    }
    const auto data = io::read_fvecs(a.data);
    const auto queries = io::read_fvecs(a.queries);
    const auto index = io::load_index(a.index, data);
    const Metric metric = index.params().metric;
    std::vector<SearchResult> baseline;
    if (!a.baseline.empty()) {
        auto b = io::load_baseline(a.baseline);
        if (b.dataset_hash != data.content_hash() || b.query_hash != queries.content_hash()) {
            throw DataError(a.baseline + ": baseline hashes do not match the dataset and queries");
        }
        if (b.k < a.k || b.metric != metric) throw DataError(a.baseline + ": baseline k or metric does not fit");
        for (auto& r : b.results) {
            r.ids.resize(a.k);
            r.distances.resize(a.k);
        }
        baseline = std::move(b.results);
    } else {
        baseline = lab::exact_baseline_cached(data, queries, a.k, metric, lab::resolve_cache_dir({}), g.threads);
    }
    std::optional<metrics::Qrels> qrels;
    if (!a.qrels.empty()) qrels = io::read_qrels(a.qrels);
    lab::EvalRequest req;
    req.k = a.k;
    req.qrels = qrels ? &*qrels : nullptr;
    req.gain = gain;
    req.threads = g.threads;
    json cells = json::array();
    std::ostringstream text;
    text << "ef_search,k,mean_recall,mean_ndcg,mean_hops,mean_distance_evals\n";
    for (std::size_t ef : a.ef_search) {
        const auto c = lab::evaluate_index(index, queries, baseline, ef, req);
        json cell = {{"ef_search", ef},
                     {"k", a.k},
                     {"mean_recall", c.summary.mean_recall},
                     {"mean_hops", c.mean_hops},
                     {"mean_distance_evals", c.mean_distance_evals}};
        if (qrels) {
            cell["mean_ndcg"] = c.summary.mean_ndcg;
            cell["ndcg_queries"] = c.summary.ndcg_queries;
        }
        cells.push_back(cell);
        text << ef << ',' << a.k << ',' << c.summary.mean_recall << ','
             << (qrels ? std::to_string(c.summary.mean_ndcg) : "") << ',' << c.mean_hops << ','
             << c.mean_distance_evals << '\n';
    }
    emit(g, cells, text.str());
    return 0;
}

// ---------------------------------------------------------------- graph-stats

struct StatsArgs {
    std::string index, data;
    std::size_t sources = hnsw::kDefaultPathSources;
    std::uint64_t seed = 0;
};

void add_stats(CLI::App& app, StatsArgs& a) {
    auto* c = app.add_subcommand("graph-stats", "Layer sizes, degree histograms, layer-0 path length, components");
    c->add_option("--index", a.index, "Index path")->required();
    c->add_option("--data", a.data, "Dataset fvecs the index was built from")->required();
    c->add_option("--sources", a.sources, "BFS sources sampled for path length")->capture_default_str();
    c->add_option("--seed", a.seed, "Source sampling seed")->capture_default_str();
}

int run_stats(const Globals& g, const StatsArgs& a) {
    announce("graph-stats", {{"index", a.index}, {"data", a.data}, {"sources", a.sources}, {"seed", a.seed}});
    const auto data = io::read_fvecs(a.data);
    const auto index = io::load_index(a.index, data);
    const auto s = hnsw::graph_stats(index, a.sources, a.seed);
    std::ostringstream text;
    text << "avg_path_length_layer0 " << s.avg_path_length_layer0 << "\nconnected_components_layer0 "
         << s.connected_components_layer0 << "\n";
    for (std::size_t l = 0; l < s.nodes_per_layer.size(); ++l) {
        text << "layer " << l << " nodes " << s.nodes_per_layer[l] << "\n";
    }
    emit(g, io::to_json(s), text.str());
    return 0;
}

// ---------------------------------------------------------------- experiment / report

struct ExperimentArgs {
    std::string config, out;
};

void add_experiment(CLI::App& app, ExperimentArgs& a) {
    auto* c = app.add_subcommand("experiment", "Run an experiment config and write report, plot data and manifest");
    c->add_option("--config", a.config, "Experiment JSON")->required();
    c->add_option("--out", a.out, "Output directory (overrides output_dir in the config)");
}

void print_summary(const Globals& g, const lab::RunReport& report) {
    std::ostringstream text;
    text << "seed,label,ef_search,mean_recall,avg_path_length_layer0\n";
    for (const auto& r : report.runs) {
        for (const auto& c : r.cells) {
            text << r.experiment_seed << ',' << r.label << ',' << c.ef_search << ',' << c.summary.mean_recall << ','
                 << r.graph.avg_path_length_layer0 << '\n';
        }
    }
    emit(g, lab::to_json(report), text.str());
}

int run_experiment(const Globals& g, const ExperimentArgs& a) {
    auto cfg = lab::config_from_json(io::read_json(a.config));
    if (!a.out.empty()) cfg.output_dir = a.out;
    if (g.threads != 0) cfg.threads = g.threads;
    if (cfg.output_dir.empty()) throw UsageError("no output directory: pass --out or set output_dir");
    announce("experiment", lab::to_json(cfg));
    const auto report = lab::run_experiment(cfg);
    lab::write_outputs(cfg, report, cfg.output_dir);
    print_summary(g, report);
    return 0;
}

struct ReportArgs {
    std::string manifest, out, compare;
};

void add_report(CLI::App& app, ReportArgs& a) {
    auto* c = app.add_subcommand("report", "Rerun a manifest and optionally compare with an earlier report");
    c->add_option("--manifest", a.manifest, "manifest.json from an earlier run")->required();
    c->add_option("--out", a.out, "Where to write the regenerated outputs");
    c->add_option("--compare", a.compare, "report.json whose numeric fields must match exactly");
}

int run_report(const Globals& g, const ReportArgs& a) {
    const auto manifest = io::read_json(a.manifest);
    announce("report", {{"manifest", a.manifest}, {"out", a.out}, {"compare", a.compare}});
    const auto report = lab::rerun_manifest(manifest, a.out);
    if (!a.out.empty()) {
        lab::write_outputs(lab::config_from_json(manifest.at("config")), report, a.out);
    }
    if (!a.compare.empty()) {
        json before = io::read_json(a.compare);
        json after = lab::to_json(report);
        before.erase("timing");
        after.erase("timing");
        if (before != after) throw DataError("rerun differs from " + a.compare);
        std::cerr << "# rerun matches " << a.compare << "\n";
    }
    print_summary(g, report);
    return 0;
}

int exit_code(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::Usage:
            return 2;
        case ErrorKind::Data:
            return 3;
        case ErrorKind::Invariant:
            return 4;
    }
    return 4;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hnswlab: HNSW insertion-order and intrinsic-dimensionality laboratory"};
    app.set_version_flag("--version", std::string(lab::tool_version()));
    app.require_subcommand(1);
    Globals g;
    app.add_flag("--json", g.json, "Machine-readable output on stdout");
    app.add_option("--threads", g.threads, "Worker threads (0 = all cores); results do not depend on it")
        ->capture_default_str();
    app.fallthrough();

    SynthArgs synth;
    IdArgs id;
    LidArgs lid;
    BaselineArgs baseline;
    BuildArgs build;
    EvalArgs eval;
    StatsArgs stats;
    ExperimentArgs experiment;
    ReportArgs report;
    add_synth(app, synth);
    add_id(app, id);
    add_lid(app, lid);
    add_baseline(app, baseline);
    add_build(app, build);
    add_eval(app, eval);
    add_stats(app, stats);
    add_experiment(app, experiment);
    add_report(app, report);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        if (name == "synth-gen") return run_synth(g, synth);
        if (name == "id-estimate") return run_id(g, id);
        if (name == "lid-profile") return run_lid(g, lid);
        if (name == "exact-baseline") return run_baseline(g, baseline);
        if (name == "build") return run_build(g, build);
        if (name == "search-eval") return run_eval(g, eval);
        if (name == "graph-stats") return run_stats(g, stats);
        if (name == "experiment") return run_experiment(g, experiment);
        if (name == "report") return run_report(g, report);
    } catch (const Error& e) {
        std::cerr << "hnswlab " << name << ": " << e.what() << "\n";
        if (e.kind() == ErrorKind::Usage) std::cerr << "see: hnswlab " << name << " --help\n";
        return exit_code(e);
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "hnswlab " << name << ": " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "hnswlab " << name << ": internal error: " << e.what() << "\n";
        return 4;
    }
    return 2;
}
