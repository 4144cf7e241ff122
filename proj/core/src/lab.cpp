#include "hnswlab/lab.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "hnswlab/hash.hpp"
#include "hnswlab/io.hpp"
#include "hnswlab/parallel.hpp"
#include "hnswlab/synth.hpp"

#ifndef HNSWLAB_VERSION
#define HNSWLAB_VERSION "0.0.0"
#endif

namespace hnswlab::lab {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view tool_version() noexcept { return HNSWLAB_VERSION; }

namespace {

/// Runs f, prefixing any error message with the stage name.
template <typename F>
auto in_stage(std::string_view stage, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        const std::string msg = "[" + std::string(stage) + "] " + e.what();
        switch (e.kind()) {
            case ErrorKind::Usage:
                throw UsageError(msg);
            case ErrorKind::Data:
                throw DataError(msg);
            case ErrorKind::Invariant:
                throw InvariantError(msg);
        }
        throw;
    } catch (const fs::filesystem_error& e) {
        throw DataError("[" + std::string(stage) + "] " + e.what());
    } catch (const json::exception& e) {
        throw DataError("[" + std::string(stage) + "] " + e.what());
    }
}

std::string join(const std::vector<std::string>& parts, char sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) out += sep;
        out += parts[i];
    }
    return out;
}

// A generative component: rows are C * basis + center.
struct Component {
    Matrix basis;
    std::vector<double> center;
    std::size_t count = 0;
    std::string label;
};

std::vector<double> draw_center(std::size_t d, double scale, std::uint64_t seed) {
    std::vector<double> c(d, 0.0);
    if (scale > 0.0) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal(0.0, scale);
        for (double& x : c) x = normal(rng);
    }
    return c;
}

std::vector<Component> components_of(const DatasetSource& source, const SeedPlan& seeds) {
    std::vector<Component> out;
    if (const auto* s = std::get_if<SynthSource>(&source)) {
        out.push_back({synth::generate_basis(s->d, s->k, seeds.basis), std::vector<double>(s->d, 0.0), s->n, "all"});
    } else if (const auto* m = std::get_if<MixtureSource>(&source)) {
        for (std::size_t c = 0; c < m->clusters; ++c) {
            out.push_back({synth::generate_basis(m->d, m->cluster_dim, derive_seed(seeds.basis, c)),
                           draw_center(m->d, m->center_scale, derive_seed(derive_seed(seeds.basis, "center"), c)),
                           m->cluster_size, "cluster" + std::to_string(c)});
        }
        if (m->background > 0) {
            out.push_back({synth::generate_basis(m->d, m->d, derive_seed(seeds.basis, "background")),
                           std::vector<double>(m->d, 0.0), m->background, "background"});
        }
    } else if (const auto* sc = std::get_if<SubspaceCategorySource>(&source)) {
        std::size_t total = 0;
        for (std::size_t dim : sc->dims) total += dim;
        const Matrix basis = synth::generate_basis(sc->d, total, seeds.basis);
        std::size_t row = 0;
        for (std::size_t c = 0; c < sc->dims.size(); ++c) {
            Matrix part(sc->dims[c], sc->d);
            for (std::size_t i = 0; i < sc->dims[c]; ++i, ++row) {
                std::copy(basis.row(row).begin(), basis.row(row).end(), part.row(i).begin());
            }
            out.push_back({std::move(part), std::vector<double>(sc->d, 0.0), sc->per_category, "cat" + std::to_string(c)});
        }
    }
    return out;
}

Dataset offset_by(Dataset part, const std::vector<double>& center) {
    if (std::all_of(center.begin(), center.end(), [](double x) { return x == 0.0; })) {
        return part;
    }
    Matrix m = part.matrix();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto row = m.row(i);
        for (std::size_t t = 0; t < row.size(); ++t) row[t] += center[t];
    }
    return Dataset(std::move(m));
}

bool is_generated(const DatasetSource& source) { return !std::holds_alternative<FvecsSource>(source); }

std::string run_label(const orders::OrderPlan& plan, std::uint64_t spec_seed) {
    switch (plan.strategy) {
        case orders::Strategy::Category:
            return "category:" + join(plan.category_sequence, '-');
        case orders::Strategy::Random:
            return spec_seed == 0 ? "random" : "random@" + std::to_string(spec_seed);
        default:
            return std::string(orders::to_string(plan.strategy));
    }
}

}  // namespace

// ------------------------------------------------------------------ config

Metric ExperimentConfig::resolved_metric() const {
    if (metric) return *metric;
    return is_generated(dataset) ? Metric::L2 : Metric::Cosine;
}

void ExperimentConfig::validate() const {
    auto fail = [](const std::string& what) { throw UsageError("config: " + what); };
    hnsw.validate();
    if (k == 0) fail("k must be >= 1");
    if (ef_search.empty()) fail("ef_search must list at least one value");
    if (*std::min_element(ef_search.begin(), ef_search.end()) < k) fail("every ef_search value must be >= k");
    if (seeds.empty()) fail("seeds must list at least one value");
    if (!(theta > 0.0 && theta <= 1.0)) fail("theta must lie in (0, 1]");
    if (kind == ExperimentKind::OrderStudy && orders.empty()) fail("at least one order strategy is required");
    if (kind == ExperimentKind::IdSweep) {
        const auto* s = std::get_if<SynthSource>(&dataset);
        if (s == nullptr) fail("id_sweep requires a synth dataset");
        if (basis_counts.empty()) fail("id_sweep requires basis_counts");
        for (std::size_t b : basis_counts) {
            if (b == 0 || b > s->d) fail("basis counts must lie in [1, d]");
        }
        if (s->n == 0) fail("synth dataset needs n >= 1");
        for (const auto& o : orders) {
            if (o.strategy != orders::Strategy::Random && o.strategy != orders::Strategy::Identity) {
                fail("id_sweep supports only random or identity orders");
            }
        }
    }
    if (const auto* s = std::get_if<SynthSource>(&dataset); s && kind == ExperimentKind::OrderStudy) {
        synth::SynthSpec{s->d, s->k, s->n, 0}.validate();
    }
    if (const auto* m = std::get_if<MixtureSource>(&dataset)) {
        if (m->cluster_dim == 0 || m->cluster_dim > m->d) fail("mixture cluster_dim must lie in [1, d]");
        if (m->clusters * m->cluster_size + m->background == 0) fail("mixture has no points");
        if (m->clusters > 0 && m->cluster_size == 0) fail("mixture cluster_size must be >= 1");
        if (m->center_scale < 0.0) fail("mixture center_scale must be >= 0");
    }
    if (const auto* sc = std::get_if<SubspaceCategorySource>(&dataset)) {
        std::size_t total = 0;
        for (std::size_t dim : sc->dims) {
            if (dim == 0) fail("subspace category dims must be >= 1");
            total += dim;
        }
        if (sc->dims.empty() || total > sc->d) fail("subspace category dims must be non-empty and sum to <= d");
        if (sc->per_category == 0) fail("per_category must be >= 1");
    }
    if (const auto* f = std::get_if<FvecsSource>(&dataset)) {
        if (f->path.empty()) fail("fvecs dataset needs a path");
        if (queries.fvecs_path.empty()) fail("fvecs datasets need queries.fvecs");
    } else if (queries.fvecs_path.empty() && queries.n == 0) {
        fail("queries.n must be >= 1");
    }
    for (const auto& o : orders) {
        if (o.strategy == orders::Strategy::Category && o.sequence.empty() && !o.all_sequences) {
            fail("category orders need a sequence or all_sequences");
        }
    }
}

namespace {

const std::set<std::string> kConfigKeys = {
    "kind", "name", "dataset", "queries", "metric", "hnsw", "ef_search", "k", "orders", "categories",
    "qrels", "ndcg_gain", "lid_neighbours", "theta", "seed", "seeds", "basis_counts", "path_sources",
    "output_dir", "cache_dir", "threads"};

json source_to_json(const DatasetSource& source) {
    if (const auto* s = std::get_if<SynthSource>(&source)) {
        return {{"type", "synth"}, {"d", s->d}, {"k", s->k}, {"n", s->n}};
    }
    if (const auto* m = std::get_if<MixtureSource>(&source)) {
        return {{"type", "mixture"},         {"d", m->d},
                {"clusters", m->clusters},   {"cluster_size", m->cluster_size},
                {"cluster_dim", m->cluster_dim}, {"background", m->background},
                {"center_scale", m->center_scale}};
    }
    if (const auto* sc = std::get_if<SubspaceCategorySource>(&source)) {
        return {{"type", "subspace_categories"}, {"d", sc->d}, {"dims", sc->dims}, {"per_category", sc->per_category}};
    }
    return {{"type", "fvecs"}, {"path", std::get<FvecsSource>(source).path}};
}

DatasetSource source_from_json(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "synth") {
        return SynthSource{j.at("d").get<std::size_t>(), j.value("k", std::size_t{0}), j.at("n").get<std::size_t>()};
    }
    if (type == "mixture") {
        MixtureSource m;
        m.d = j.value("d", m.d);
        m.clusters = j.value("clusters", m.clusters);
        m.cluster_size = j.value("cluster_size", m.cluster_size);
        m.cluster_dim = j.value("cluster_dim", m.cluster_dim);
        m.background = j.value("background", m.background);
        m.center_scale = j.value("center_scale", m.center_scale);
        return m;
    }
    if (type == "subspace_categories") {
        SubspaceCategorySource sc;
        sc.d = j.value("d", sc.d);
        sc.dims = j.value("dims", sc.dims);
        sc.per_category = j.value("per_category", sc.per_category);
        return sc;
    }
    if (type == "fvecs") {
        return FvecsSource{j.at("path").get<std::string>()};
    }
    throw UsageError("config: unknown dataset type '" + type + "'");
}

}  // namespace

ExperimentConfig config_from_json(const json& doc) {
    if (!doc.is_object()) {
        throw UsageError("config: expected a JSON object");
    }
    for (const auto& [key, value] : doc.items()) {
        if (!kConfigKeys.contains(key)) {
            throw UsageError("config: unknown key '" + key + "'");
        }
    }
    ExperimentConfig cfg;
    try {
        const std::string kind = doc.value("kind", std::string("order_study"));
        if (kind == "order_study") {
            cfg.kind = ExperimentKind::OrderStudy;
        } else if (kind == "id_sweep") {
            cfg.kind = ExperimentKind::IdSweep;
        } else {
            throw UsageError("config: unknown kind '" + kind + "' (expected order_study or id_sweep)");
        }
        cfg.name = doc.value("name", cfg.name);
        if (!doc.contains("dataset")) {
            throw UsageError("config: 'dataset' is required");
        }
        cfg.dataset = source_from_json(doc.at("dataset"));
        if (doc.contains("queries")) {
            const auto& q = doc.at("queries");
            cfg.queries.n = q.value("n", cfg.queries.n);
            cfg.queries.fvecs_path = q.value("fvecs", std::string());
        }
        if (doc.contains("metric")) cfg.metric = parse_metric(doc.at("metric").get<std::string>());
        if (doc.contains("hnsw")) cfg.hnsw = io::params_from_json(doc.at("hnsw"));
        cfg.ef_search = doc.value("ef_search", cfg.ef_search);
        cfg.k = doc.value("k", cfg.k);
        if (doc.contains("orders")) {
            for (const auto& o : doc.at("orders")) {
                OrderSpec spec;
                spec.strategy = orders::parse_strategy(o.at("strategy").get<std::string>());
                spec.seed = o.value("seed", std::uint64_t{0});
                spec.sequence = o.value("sequence", std::vector<std::string>{});
                spec.all_sequences = o.value("all_sequences", false);
                cfg.orders.push_back(std::move(spec));
            }
        } else if (cfg.kind == ExperimentKind::IdSweep) {
            cfg.orders.push_back(OrderSpec{});
        }
        cfg.categories_path = doc.value("categories", std::string());
        cfg.qrels_path = doc.value("qrels", std::string());
        const std::string gain = doc.value("ndcg_gain", std::string("linear"));
        if (gain == "linear") {
            cfg.ndcg_gain = metrics::Gain::Linear;
        } else if (gain == "exponential") {
            cfg.ndcg_gain = metrics::Gain::Exponential;
        } else {
            throw UsageError("config: ndcg_gain must be linear or exponential");
        }
        cfg.lid_neighbours = doc.value("lid_neighbours", cfg.lid_neighbours);
        cfg.theta = doc.value("theta", cfg.theta);
        if (doc.contains("seeds")) {
            cfg.seeds = doc.at("seeds").get<std::vector<std::uint64_t>>();
        } else if (doc.contains("seed")) {
            cfg.seeds = {doc.at("seed").get<std::uint64_t>()};
        }
        cfg.basis_counts = doc.value("basis_counts", cfg.basis_counts);
        cfg.path_sources = doc.value("path_sources", cfg.path_sources);
        cfg.output_dir = doc.value("output_dir", std::string());
        cfg.cache_dir = doc.value("cache_dir", std::string());
        cfg.threads = doc.value("threads", 0U);
    } catch (const json::exception& e) {
        throw UsageError(std::string("config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

json to_json(const ExperimentConfig& cfg) {
    json orders_json = json::array();
    for (const auto& o : cfg.orders) {
        json spec = {{"strategy", orders::to_string(o.strategy)}, {"seed", o.seed}};
        if (!o.sequence.empty()) spec["sequence"] = o.sequence;
        if (o.all_sequences) spec["all_sequences"] = true;
        orders_json.push_back(spec);
    }
    json queries = {{"n", cfg.queries.n}};
    if (!cfg.queries.fvecs_path.empty()) queries["fvecs"] = cfg.queries.fvecs_path;
    json hnsw = io::to_json(cfg.hnsw);
    hnsw.erase("seed");    // levels come from the experiment seed
    hnsw.erase("metric");  // top-level metric wins
    json out = {
        {"kind", cfg.kind == ExperimentKind::IdSweep ? "id_sweep" : "order_study"},
        {"name", cfg.name},
        {"dataset", source_to_json(cfg.dataset)},
        {"queries", queries},
        {"metric", to_string(cfg.resolved_metric())},
        {"hnsw", hnsw},
        {"ef_search", cfg.ef_search},
        {"k", cfg.k},
        {"orders", orders_json},
        {"ndcg_gain", cfg.ndcg_gain == metrics::Gain::Linear ? "linear" : "exponential"},
        {"lid_neighbours", cfg.lid_neighbours},
        {"theta", cfg.theta},
        {"seeds", cfg.seeds},
        {"path_sources", cfg.path_sources},
    };
    if (!cfg.basis_counts.empty()) out["basis_counts"] = cfg.basis_counts;
    if (!cfg.categories_path.empty()) out["categories"] = cfg.categories_path;
    if (!cfg.qrels_path.empty()) out["qrels"] = cfg.qrels_path;
    if (!cfg.output_dir.empty()) out["output_dir"] = cfg.output_dir;
    if (!cfg.cache_dir.empty()) out["cache_dir"] = cfg.cache_dir;
    return out;
}

// ------------------------------------------------------------------ seeds

SeedPlan SeedPlan::from(std::uint64_t experiment_seed) {
    SeedPlan p;
    p.experiment = experiment_seed;
    p.basis = derive_seed(experiment_seed, "basis");
    p.data = derive_seed(experiment_seed, "data");
    p.queries = derive_seed(experiment_seed, "queries");
    p.levels = derive_seed(experiment_seed, "levels");
    p.order = derive_seed(experiment_seed, "order");
    p.paths = derive_seed(experiment_seed, "paths");
    return p;
}

std::uint64_t SeedPlan::order_seed(std::uint64_t spec_seed) const { return derive_seed(order, spec_seed); }

// ------------------------------------------------------------------ data

Materialized materialize(const ExperimentConfig& cfg, const SeedPlan& seeds) {
    Materialized out;
    if (const auto* f = std::get_if<FvecsSource>(&cfg.dataset)) {
        out.data = io::read_fvecs(f->path);
        out.queries = io::read_fvecs(cfg.queries.fvecs_path);
    } else {
        const auto comps = components_of(cfg.dataset, seeds);
        std::size_t total = 0;
        for (const auto& c : comps) total += c.count;
        const std::size_t nq = cfg.queries.n;

        std::vector<Dataset> data_parts;
        std::vector<Dataset> query_parts;
        CategoryLabels labels;
        std::size_t cumulative = 0;
        for (std::size_t c = 0; c < comps.size(); ++c) {
            const auto& comp = comps[c];
            if (comp.count == 0) continue;
            data_parts.push_back(offset_by(
                synth::generate_dataset(comp.basis, comp.count, derive_seed(seeds.data, c), cfg.threads), comp.center));
            labels.insert(labels.end(), comp.count, comp.label);
            // Queries split across components in proportion to their sizes.
            const std::size_t q_begin = nq * cumulative / total;
            cumulative += comp.count;
            const std::size_t q_end = nq * cumulative / total;
            if (q_end > q_begin && cfg.queries.fvecs_path.empty()) {
                query_parts.push_back(offset_by(synth::generate_query_set(comp.basis, q_end - q_begin,
                                                                          derive_seed(seeds.queries, c), cfg.threads),
                                                comp.center));
            }
        }
        out.data = concatenate(data_parts);
        out.queries = cfg.queries.fvecs_path.empty() ? concatenate(query_parts) : io::read_fvecs(cfg.queries.fvecs_path);
        if (!std::holds_alternative<SynthSource>(cfg.dataset)) {
            out.categories = std::move(labels);
        }
    }
    if (out.queries.dim() != out.data.dim()) {
        throw DataError("queries have dimension " + std::to_string(out.queries.dim()) + " but the dataset has " +
                        std::to_string(out.data.dim()));
    }
    if (!cfg.categories_path.empty()) {
        out.categories = io::read_categories(cfg.categories_path, out.data.size());
    }
    if (!cfg.qrels_path.empty()) {
        out.qrels = io::read_qrels(cfg.qrels_path);
    }
    return out;
}

fs::path resolve_cache_dir(const ExperimentConfig& cfg) {
    if (!cfg.cache_dir.empty()) return cfg.cache_dir;
    if (const char* env = std::getenv("HNSWLAB_CACHE_DIR"); env != nullptr && *env != '\0') return env;
    return {};
}

std::vector<SearchResult> exact_baseline_cached(const Dataset& data, const Dataset& queries, std::size_t k,
                                                Metric metric, const fs::path& cache_dir, unsigned threads) {
    const std::string dh = data.content_hash();
    const std::string qh = queries.content_hash();
    fs::path file;
    if (!cache_dir.empty()) {
        const std::string key = Sha256()
                                    .update("hnswlab-baseline|" + dh + "|" + qh + "|" + std::to_string(k) + "|")
                                    .update(to_string(metric))
                                    .hex_digest();
        file = cache_dir / ("baseline-" + key.substr(0, 32) + ".hlb");
        if (fs::exists(file)) {
            try {
                io::Baseline cached = io::load_baseline(file);
                if (cached.dataset_hash == dh && cached.query_hash == qh && cached.k == k && cached.metric == metric &&
                    cached.results.size() == queries.size()) {
                    return std::move(cached.results);
                }
            } catch (const DataError&) {
                // unreadable cache entry: recompute and overwrite
            }
        }
    }
    io::Baseline b{dh, qh, k, metric, knn::exact_search_batch(data, queries, k, metric, threads)};
    if (!file.empty()) {
        io::save_baseline(b, file);
    }
    return std::move(b.results);
}

// ------------------------------------------------------------------ runs

const EvalCell& OrderRun::cell(std::size_t ef_search) const {
    for (const auto& c : cells) {
        if (c.ef_search == ef_search) return c;
    }
    throw UsageError("run '" + label + "' has no cell for ef_search=" + std::to_string(ef_search));
}

EvalCell evaluate_index(const hnsw::HnswIndex& index, const Dataset& queries, const std::vector<SearchResult>& baseline,
                        std::size_t ef_search, const EvalRequest& request) {
    if (baseline.size() != queries.size()) {
        throw InvariantError("baseline covers " + std::to_string(baseline.size()) + " queries, expected " +
                             std::to_string(queries.size()));
    }
    const std::size_t nq = queries.size();
    EvalCell cell;
    cell.ef_search = ef_search;
    cell.summary.k = request.k;
    cell.summary.recall.assign(nq, 0.0);
    std::vector<hnsw::SearchStats> stats(nq);
    std::vector<SearchResult> results(nq);
    parallel_for(nq, request.threads, [&](std::size_t q) {
        auto out = index.search(queries[static_cast<VectorId>(q)], request.k, ef_search);
        cell.summary.recall[q] = metrics::recall_at_k(out.result.ids, baseline[q].ids, request.k);
        stats[q] = out.stats;
        results[q] = std::move(out.result);
    });
    cell.summary.mean_recall = metrics::mean_recall(cell.summary.recall);
    double hops = 0.0, evals = 0.0;
    for (const auto& s : stats) {
        hops += static_cast<double>(s.hops);
        evals += static_cast<double>(s.distance_evals);
    }
    cell.mean_hops = hops / static_cast<double>(nq);
    cell.mean_distance_evals = evals / static_cast<double>(nq);

    if (request.qrels != nullptr) {
        cell.summary.ndcg.assign(nq, std::numeric_limits<double>::quiet_NaN());
        double sum = 0.0;
        for (std::size_t q = 0; q < nq; ++q) {
            const auto it = request.qrels->find(std::to_string(q));
            if (it == request.qrels->end()) {
                ++cell.summary.ndcg_excluded;
                continue;
            }
            std::vector<std::string> docs;
            for (VectorId id : results[q].ids) docs.push_back(std::to_string(id));
            const auto v = metrics::ndcg_at_k(docs, it->second, request.k, request.gain);
            if (!v.has_relevant) ++cell.summary.ndcg_no_relevant;
            cell.summary.ndcg[q] = v.value;
            sum += v.value;
            ++cell.summary.ndcg_queries;
        }
        cell.summary.mean_ndcg =
            cell.summary.ndcg_queries == 0 ? 0.0 : sum / static_cast<double>(cell.summary.ndcg_queries);
    }
    return cell;
}

OrderRun evaluate_order(const Dataset& data, const Dataset& queries, const std::vector<SearchResult>& baseline,
                        const orders::OrderPlan& plan, const hnsw::HnswParams& params, const EvalRequest& request) {
    OrderRun run;
    run.strategy = plan.strategy;
    run.order_seed = plan.seed;
    run.sequence = plan.category_sequence;
    run.order_hash = plan.content_hash();
    run.label = run_label(plan, 0);

    const auto start = std::chrono::steady_clock::now();
    const hnsw::HnswIndex index = in_stage("build", [&] { return hnsw::build(data, plan, params); });
    run.build_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    in_stage("invariants", [&] { index.check_invariants(); });
    run.graph = hnsw::graph_stats(index, request.path_sources, request.path_seed);
    for (std::size_t ef : request.ef_search) {
        run.cells.push_back(in_stage("search", [&] { return evaluate_index(index, queries, baseline, ef, request); }));
    }
    return run;
}

std::vector<Correlation> correlate_runs(const std::vector<OrderRun>& runs) {
    std::vector<Correlation> out;
    if (runs.empty()) return out;
    for (const auto& first : runs.front().cells) {
        const std::size_t ef = first.ef_search;
        std::vector<double> recall, path, hops, ndcg;
        bool has_ndcg = true;
        for (const auto& run : runs) {
            const auto& c = run.cell(ef);
            recall.push_back(c.summary.mean_recall);
            path.push_back(run.graph.avg_path_length_layer0);
            hops.push_back(c.mean_hops);
            has_ndcg = has_ndcg && c.summary.ndcg_queries > 0;
            ndcg.push_back(c.summary.mean_ndcg);
        }
        auto r = [](const std::vector<double>& xs, const std::vector<double>& ys) -> std::optional<double> {
            try {
                return metrics::pearson(xs, ys);
            } catch (const DataError&) {
                return std::nullopt;
            }
        };
        out.push_back({ef, "mean_recall", "avg_path_length_layer0", r(recall, path)});
        out.push_back({ef, "mean_recall", "mean_search_hops", r(recall, hops)});
        if (has_ndcg) out.push_back({ef, "mean_recall", "mean_ndcg", r(recall, ndcg)});
    }
    return out;
}

namespace {

std::vector<orders::OrderPlan> plans_for(const OrderSpec& spec, const SeedPlan& seeds, std::size_t n,
                                         const std::optional<dimest::LidProfile>& profile,
                                         const std::optional<CategoryLabels>& categories) {
    std::vector<orders::OrderPlan> plans;
    switch (spec.strategy) {
        case orders::Strategy::Identity:
            plans.push_back(orders::order_identity(n));
            break;
        case orders::Strategy::Random: {
            const auto ids = orders::order_identity(n).ids;
            plans.push_back(orders::order_random(ids, seeds.order_seed(spec.seed)));
            break;
        }
        case orders::Strategy::LidAsc:
        case orders::Strategy::LidDesc:
            plans.push_back(orders::order_by_lid(
                *profile, spec.strategy == orders::Strategy::LidAsc ? orders::Direction::Asc : orders::Direction::Desc));
            break;
        case orders::Strategy::Category: {
            if (!categories) throw UsageError("category order requested but the dataset has no categories");
            const auto sequences = spec.all_sequences ? all_sequences(*categories)
                                                      : std::vector<std::vector<std::string>>{spec.sequence};
            for (const auto& seq : sequences) {
                plans.push_back(orders::order_by_category(*categories, seq, seeds.order_seed(spec.seed)));
            }
            break;
        }
    }
    return plans;
}

EvalRequest eval_request(const ExperimentConfig& cfg, const SeedPlan& seeds, const Materialized& m) {
    EvalRequest req;
    req.ef_search = cfg.ef_search;
    req.k = cfg.k;
    req.qrels = m.qrels ? &*m.qrels : nullptr;
    req.gain = cfg.ndcg_gain;
    req.path_sources = cfg.path_sources;
    req.path_seed = seeds.paths;
    req.threads = cfg.threads;
    return req;
}

SeedContext context_for(std::uint64_t seed, const Materialized& m) {
    SeedContext ctx;
    ctx.seed = seed;
    ctx.dataset_hash = m.data.content_hash();
    ctx.query_hash = m.queries.content_hash();
    ctx.dataset_size = m.data.size();
    ctx.query_count = m.queries.size();
    ctx.dim = m.data.dim();
    return ctx;
}

void run_order_study(const ExperimentConfig& cfg, RunReport& report) {
    const Metric metric = cfg.resolved_metric();
    const fs::path cache = resolve_cache_dir(cfg);
    const bool need_lid = std::any_of(cfg.orders.begin(), cfg.orders.end(), [](const OrderSpec& o) {
        return o.strategy == orders::Strategy::LidAsc || o.strategy == orders::Strategy::LidDesc;
    });
    for (std::uint64_t seed : cfg.seeds) {
        const SeedPlan seeds = SeedPlan::from(seed);
        const Materialized m = in_stage("materialize", [&] { return materialize(cfg, seeds); });
        const auto baseline = in_stage("exact-baseline", [&] {
            return exact_baseline_cached(m.data, m.queries, cfg.k, metric, cache, cfg.threads);
        });
        SeedContext ctx = context_for(seed, m);
        std::optional<dimest::LidProfile> profile;
        if (need_lid) {
            profile = in_stage("lid-profile", [&] { return dimest::lid_profile(m.data, cfg.lid_neighbours, metric, cfg.threads); });
            ctx.lid = dimest::summarize(*profile);
        }
        if (m.categories) {
            ctx.category_pca =
                in_stage("category-pca", [&] { return dimest::per_category_intrinsic_dim(m.data, *m.categories, cfg.theta); });
        }
        hnsw::HnswParams params = cfg.hnsw;
        params.metric = metric;
        params.seed = seeds.levels;
        const EvalRequest req = eval_request(cfg, seeds, m);
        for (const auto& spec : cfg.orders) {
            const auto plans = in_stage("orders", [&] { return plans_for(spec, seeds, m.data.size(), profile, m.categories); });
            for (const auto& plan : plans) {
                OrderRun run = evaluate_order(m.data, m.queries, baseline, plan, params, req);
                run.experiment_seed = seed;
                run.label = run_label(plan, spec.seed);
                report.runs.push_back(std::move(run));
            }
        }
        report.contexts.push_back(std::move(ctx));
    }
}

void run_id_sweep(const ExperimentConfig& cfg, RunReport& report) {
    const Metric metric = cfg.resolved_metric();
    const fs::path cache = resolve_cache_dir(cfg);
    const auto base = std::get<SynthSource>(cfg.dataset);
    for (std::uint64_t seed : cfg.seeds) {
        for (std::size_t b : cfg.basis_counts) {
            // Each basis count gets its own data substream.
            const SeedPlan seeds = SeedPlan::from(derive_seed(seed, static_cast<std::uint64_t>(b)));
            ExperimentConfig one = cfg;
            one.dataset = SynthSource{base.d, b, base.n};
            const Materialized m = in_stage("materialize", [&] { return materialize(one, seeds); });
            const auto pca = in_stage("pca", [&] { return dimest::pca_intrinsic_dim(m.data, cfg.theta); });
            const auto baseline = in_stage("exact-baseline", [&] {
                return exact_baseline_cached(m.data, m.queries, cfg.k, metric, cache, cfg.threads);
            });
            hnsw::HnswParams params = cfg.hnsw;
            params.metric = metric;
            params.seed = seeds.levels;
            const EvalRequest req = eval_request(cfg, seeds, m);
            const auto plans = plans_for(cfg.orders.front(), seeds, m.data.size(), std::nullopt, std::nullopt);
            OrderRun run = evaluate_order(m.data, m.queries, baseline, plans.front(), params, req);
            run.experiment_seed = seed;
            run.label = "basis=" + std::to_string(b);
            run.basis_count = b;
            run.k_intrinsic = pca.k_intrinsic;
            report.runs.push_back(std::move(run));
            SeedContext ctx = context_for(seed, m);
            report.contexts.push_back(std::move(ctx));
        }
    }
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& cfg) {
    in_stage("config", [&] { cfg.validate(); });
    RunReport report;
    report.config = to_json(cfg);
    report.config.erase("output_dir");  // where results go is not part of the result
    report.config.erase("cache_dir");
    if (cfg.kind == ExperimentKind::IdSweep) {
        run_id_sweep(cfg, report);
    } else {
        run_order_study(cfg, report);
    }
    report.correlations = correlate_runs(report.runs);
    return report;
}

// ------------------------------------------------------------------ output

namespace {

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json lid_json(const dimest::LidSummary& s) {
    return {{"count", s.count}, {"sentinel_count", s.sentinel_count}, {"mean", s.mean},
            {"median", s.median}, {"min", s.min},   {"max", s.max}};
}

json category_pca_json(const dimest::CategoryPca& pca) {
    json per = json::object();
    for (const auto& [name, r] : pca.per_category) per[name] = io::to_json(r);
    return {{"whole", io::to_json(pca.whole)}, {"per_category", per}};
}

}  // namespace

json to_json(const RunReport& report) {
    json contexts = json::array();
    for (const auto& c : report.contexts) {
        json ctx = {{"seed", c.seed},
                    {"dataset_hash", c.dataset_hash},
                    {"query_hash", c.query_hash},
                    {"dataset_size", c.dataset_size},
                    {"query_count", c.query_count},
                    {"dim", c.dim}};
        if (c.lid) ctx["lid"] = lid_json(*c.lid);
        if (c.category_pca) ctx["category_pca"] = category_pca_json(*c.category_pca);
        contexts.push_back(ctx);
    }
    json runs = json::array();
    json timing = json::array();
    for (const auto& r : report.runs) {
        json cells = json::array();
        for (const auto& c : r.cells) {
            json cell = {{"ef_search", c.ef_search},
                         {"k", c.summary.k},
                         {"mean_recall", c.summary.mean_recall},
                         {"recall", c.summary.recall},
                         {"mean_hops", c.mean_hops},
                         {"mean_distance_evals", c.mean_distance_evals}};
            if (!c.summary.ndcg.empty()) {
                json ndcg = json::array();
                for (double v : c.summary.ndcg) ndcg.push_back(nullable(v));
                cell["mean_ndcg"] = c.summary.mean_ndcg;
                cell["ndcg"] = ndcg;
                cell["ndcg_queries"] = c.summary.ndcg_queries;
                cell["ndcg_excluded"] = c.summary.ndcg_excluded;
                cell["ndcg_no_relevant"] = c.summary.ndcg_no_relevant;
            }
            cells.push_back(cell);
        }
        json run = {{"seed", r.experiment_seed},
                    {"label", r.label},
                    {"strategy", orders::to_string(r.strategy)},
                    {"order_seed", r.order_seed},
                    {"order_hash", r.order_hash},
                    {"graph", io::to_json(r.graph)},
                    {"cells", cells}};
        if (!r.sequence.empty()) run["sequence"] = r.sequence;
        if (r.basis_count) run["basis_count"] = *r.basis_count;
        if (r.k_intrinsic) run["k_intrinsic"] = *r.k_intrinsic;
        runs.push_back(run);
        timing.push_back({{"seed", r.experiment_seed}, {"label", r.label}, {"build_seconds", r.build_seconds}});
    }
    json corr = json::array();
    for (const auto& c : report.correlations) {
        corr.push_back({{"ef_search", c.ef_search}, {"x", c.x}, {"y", c.y}, {"r", c.r ? json(*c.r) : json(nullptr)}});
    }
    return {{"format", "hnswlab-report"},
            {"version", io::kFormatVersion},
            {"tool_version", tool_version()},
            {"config", report.config},
            {"contexts", contexts},
            {"runs", runs},
            {"correlations", corr},
            {"timing", {{"runs", timing}}}};
}

std::string report_csv(const RunReport& report) {
    std::ostringstream out;
    out.precision(17);
    out << "seed,label,strategy,basis_count,k_intrinsic,ef_search,k,mean_recall,mean_ndcg,avg_path_length_layer0,"
           "components_layer0,mean_hops,build_seconds\n";
    for (const auto& r : report.runs) {
        for (const auto& c : r.cells) {
            out << r.experiment_seed << ',' << r.label << ',' << orders::to_string(r.strategy) << ','
                << (r.basis_count ? std::to_string(*r.basis_count) : "") << ','
                << (r.k_intrinsic ? std::to_string(*r.k_intrinsic) : "") << ',' << c.ef_search << ','
                << c.summary.k << ',' << c.summary.mean_recall << ',';
            if (c.summary.ndcg_queries > 0) out << c.summary.mean_ndcg;
            out << ',' << r.graph.avg_path_length_layer0 << ',' << r.graph.connected_components_layer0 << ','
                << c.mean_hops << ',' << r.build_seconds << '\n';
        }
    }
    return out.str();
}

json make_manifest(const ExperimentConfig& cfg, const RunReport& report) {
    json inputs = json::array();
    for (const auto& c : report.contexts) {
        inputs.push_back({{"seed", c.seed}, {"dataset_hash", c.dataset_hash}, {"query_hash", c.query_hash}});
    }
    json plans = json::array();
    for (const auto& r : report.runs) {
        plans.push_back({{"seed", r.experiment_seed}, {"label", r.label}, {"order_hash", r.order_hash}});
    }
    json params = io::to_json(cfg.hnsw);
    params.erase("seed");
    return {{"format", "hnswlab-manifest"},
            {"version", io::kFormatVersion},
            {"tool_version", tool_version()},
            {"config", to_json(cfg)},
            {"hnsw_params", params},
            {"metric", to_string(cfg.resolved_metric())},
            {"ef_search", cfg.ef_search},
            {"seeds", cfg.seeds},
            {"inputs", inputs},
            {"order_plans", plans}};
}

void write_outputs(const ExperimentConfig& cfg, const RunReport& report, const fs::path& dir) {
    fs::create_directories(dir / "plotdata");
    io::write_json_atomic(dir / "report.json", to_json(report));
    io::write_file_atomic(dir / "report.csv", report_csv(report));
    std::ostringstream plot;
    plot.precision(17);
    if (cfg.kind == ExperimentKind::IdSweep) {
        plot << "seed,basis_count,k_intrinsic,ef_search,mean_recall\n";
        for (const auto& r : report.runs) {
            for (const auto& c : r.cells) {
                plot << r.experiment_seed << ',' << r.basis_count.value_or(0) << ',' << r.k_intrinsic.value_or(0) << ','
                     << c.ef_search << ',' << c.summary.mean_recall << '\n';
            }
        }
        io::write_file_atomic(dir / "plotdata" / "recall_vs_basis.csv", plot.str());
    } else {
        plot << "seed,order,ef_search,mean_recall,avg_path_length_layer0\n";
        for (const auto& r : report.runs) {
            for (const auto& c : r.cells) {
                plot << r.experiment_seed << ',' << r.label << ',' << c.ef_search << ',' << c.summary.mean_recall << ','
                     << r.graph.avg_path_length_layer0 << '\n';
            }
        }
        io::write_file_atomic(dir / "plotdata" / "recall_vs_order.csv", plot.str());
    }
    io::write_json_atomic(dir / "manifest.json", make_manifest(cfg, report));
}

RunReport rerun_manifest(const json& manifest, const std::string& output_dir_override) {
    if (manifest.value("format", "") != "hnswlab-manifest") {
        throw DataError("not a run manifest");
    }
    if (manifest.value("version", 0U) != io::kFormatVersion) {
        throw DataError("unsupported manifest version");
    }
    if (manifest.value("tool_version", "") != tool_version()) {
        throw DataError("manifest was written by hnswlab " + manifest.value("tool_version", std::string("?")) +
                        ", this is " + std::string(tool_version()));
    }
    ExperimentConfig cfg = config_from_json(manifest.at("config"));
    if (!output_dir_override.empty()) cfg.output_dir = output_dir_override;
    RunReport report = run_experiment(cfg);
    const auto& inputs = manifest.at("inputs");
    if (inputs.size() != report.contexts.size()) {
        throw DataError("manifest rerun produced a different number of inputs");
    }
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (inputs[i].at("dataset_hash") != report.contexts[i].dataset_hash ||
            inputs[i].at("query_hash") != report.contexts[i].query_hash) {
            throw DataError("manifest input hash mismatch for seed " + std::to_string(report.contexts[i].seed));
        }
    }
    const auto& plans = manifest.at("order_plans");
    if (plans.size() != report.runs.size()) {
        throw DataError("manifest rerun produced a different number of runs");
    }
    for (std::size_t i = 0; i < plans.size(); ++i) {
        if (plans[i].at("order_hash") != report.runs[i].order_hash) {
            throw DataError("manifest order plan hash mismatch for run '" + report.runs[i].label + "'");
        }
    }
    return report;
}

// ------------------------------------------------------------------ studies

std::vector<SweepRow> synthetic_id_sweep(const SweepRequest& request) {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::IdSweep;
    cfg.dataset = SynthSource{request.d, request.d, request.n};
    cfg.queries.n = request.n_queries;
    cfg.metric = request.params.metric;
    cfg.hnsw = request.params;
    cfg.ef_search = request.ef_search;
    cfg.k = request.k;
    cfg.orders = {OrderSpec{}};
    cfg.theta = request.theta;
    cfg.seeds = {request.seed};
    cfg.basis_counts = request.basis_counts;
    cfg.threads = request.threads;
    const RunReport report = run_experiment(cfg);
    std::vector<SweepRow> rows;
    for (const auto& r : report.runs) {
        SweepRow row;
        row.seed = r.experiment_seed;
        row.basis_count = r.basis_count.value_or(0);
        row.k_intrinsic = r.k_intrinsic.value_or(0);
        for (const auto& c : r.cells) row.mean_recall.emplace_back(c.ef_search, c.summary.mean_recall);
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

EvalRequest study_request(const StudyRequest& request, const SeedPlan& seeds) {
    EvalRequest req;
    req.ef_search = request.ef_search;
    req.k = request.k;
    req.path_seed = seeds.paths;
    req.threads = request.threads;
    return req;
}

}  // namespace

LidOrderStudy lid_order_study(const Dataset& data, const Dataset& queries, const StudyRequest& request) {
    if (data.size() <= request.lid_neighbours) {
        throw DataError("lid_order_study: dataset must be larger than lid_neighbours");
    }
    LidOrderStudy study;
    const auto profile = in_stage("lid-profile", [&] {
        return dimest::lid_profile(data, request.lid_neighbours, request.metric, request.threads);
    });
    study.lid = dimest::summarize(profile);
    const auto baseline = in_stage("exact-baseline", [&] {
        return knn::exact_search_batch(data, queries, request.k, request.metric, request.threads);
    });
    const auto desc = orders::order_by_lid(profile, orders::Direction::Desc);
    const auto asc = orders::order_by_lid(profile, orders::Direction::Asc);
    for (std::uint64_t seed : request.seeds) {
        const SeedPlan seeds = SeedPlan::from(seed);
        hnsw::HnswParams params = request.params;
        params.metric = request.metric;
        params.seed = seeds.levels;
        const auto random = orders::order_random(orders::order_identity(data.size()).ids, seeds.order_seed(0));
        for (const auto* plan : {&desc, &asc, &random}) {
            OrderRun run = evaluate_order(data, queries, baseline, *plan, params, study_request(request, seeds));
            run.experiment_seed = seed;
            study.runs.push_back(std::move(run));
        }
    }
    study.correlations = correlate_runs(study.runs);
    return study;
}

std::vector<std::vector<std::string>> all_sequences(const CategoryLabels& categories) {
    auto names = orders::distinct_categories(categories);
    if (names.size() > 8) {
        throw UsageError("all_sequences: " + std::to_string(names.size()) +
                         " categories give too many orderings; list sequences explicitly");
    }
    std::vector<std::vector<std::string>> out;
    do {
        out.push_back(names);
    } while (std::next_permutation(names.begin(), names.end()));
    return out;
}

CategoryOrderStudy category_order_study(const Dataset& data, const Dataset& queries, const CategoryLabels& categories,
                                        const std::vector<std::vector<std::string>>& sequences,
                                        const StudyRequest& request, double theta) {
    if (sequences.empty()) {
        throw UsageError("category_order_study: at least one sequence is required");
    }
    CategoryOrderStudy study;
    study.pca = in_stage("category-pca", [&] { return dimest::per_category_intrinsic_dim(data, categories, theta); });
    const auto baseline = in_stage("exact-baseline", [&] {
        return knn::exact_search_batch(data, queries, request.k, request.metric, request.threads);
    });
    for (std::uint64_t seed : request.seeds) {
        const SeedPlan seeds = SeedPlan::from(seed);
        hnsw::HnswParams params = request.params;
        params.metric = request.metric;
        params.seed = seeds.levels;
        for (const auto& seq : sequences) {
            const auto plan = orders::order_by_category(categories, seq, seeds.order_seed(0));
            OrderRun run = evaluate_order(data, queries, baseline, plan, params, study_request(request, seeds));
            run.experiment_seed = seed;
            study.runs.push_back(std::move(run));
        }
    }
    return study;
}

}  // namespace hnswlab::lab
