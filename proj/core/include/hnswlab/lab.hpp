#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "hnswlab/dataset.hpp"
#include "hnswlab/dimest.hpp"
#include "hnswlab/hnsw.hpp"
#include "hnswlab/knn.hpp"
#include "hnswlab/metrics.hpp"
#include "hnswlab/orders.hpp"

namespace hnswlab::lab {

std::string_view tool_version() noexcept;

// ------------------------------------------------------------------ sources

/// n vectors spanned by k random orthonormal directions of R^d.
struct SynthSource {
    std::size_t d = 0;
    std::size_t k = 0;
    std::size_t n = 0;
};

/// `clusters` groups of `cluster_size` points, each in its own random
/// `cluster_dim`-dimensional subspace of R^d, plus `background` full-rank
/// points. Each cluster is offset by a N(0, center_scale^2 I) center, so at
/// the default scale centers are spread like the background points; 0 puts
/// every cluster through the origin. Labels: "cluster<i>" and "background".
struct MixtureSource {
    std::size_t d = 256;
    std::size_t clusters = 8;
    std::size_t cluster_size = 1000;
    std::size_t cluster_dim = 8;
    std::size_t background = 2000;
    double center_scale = 1.0;
};

/// Categories living in mutually orthogonal subspaces of R^d with the given
/// dimensions, `per_category` points each. Labels: "cat<i>".
struct SubspaceCategorySource {
    std::size_t d = 128;
    std::vector<std::size_t> dims{4, 8, 16};
    std::size_t per_category = 2000;
};

struct FvecsSource {
    std::string path;
};

using DatasetSource = std::variant<SynthSource, MixtureSource, SubspaceCategorySource, FvecsSource>;

/// Generated sources draw `n` queries from the same generative model as the
/// data (independent coefficients). External datasets need `fvecs_path`.
struct QuerySource {
    std::size_t n = 1000;
    std::string fvecs_path;
};

// ------------------------------------------------------------------ config

enum class ExperimentKind { OrderStudy, IdSweep };

struct OrderSpec {
    orders::Strategy strategy = orders::Strategy::Random;
    std::uint64_t seed = 0;
    std::vector<std::string> sequence;  // Category: explicit block order
    bool all_sequences = false;         // Category: every permutation of the categories
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::OrderStudy;
    std::string name = "experiment";
    DatasetSource dataset = SynthSource{};
    QuerySource queries;
    std::optional<Metric> metric;  // default: l2 for generated data, cosine for fvecs
    hnsw::HnswParams hnsw;
    std::vector<std::size_t> ef_search{10, 40};
    std::size_t k = 10;
    std::vector<OrderSpec> orders;
    std::string categories_path;
    std::string qrels_path;
    metrics::Gain ndcg_gain = metrics::Gain::Linear;
    std::size_t lid_neighbours = dimest::kDefaultLidNeighbours;
    double theta = dimest::kDefaultTheta;
    std::vector<std::uint64_t> seeds{42};
    std::vector<std::size_t> basis_counts;  // IdSweep only
    std::size_t path_sources = hnsw::kDefaultPathSources;
    std::string output_dir;
    std::string cache_dir;
    unsigned threads = 0;

    Metric resolved_metric() const;
    /// Throws UsageError describing the first problem found.
    void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const ExperimentConfig& cfg);

// ------------------------------------------------------------------ seeds

/// Substreams of one experiment seed. Varying one factor holds the others fixed.
struct SeedPlan {
    std::uint64_t experiment = 0;
    std::uint64_t basis = 0;
    std::uint64_t data = 0;
    std::uint64_t queries = 0;
    std::uint64_t levels = 0;
    std::uint64_t order = 0;
    std::uint64_t paths = 0;

    static SeedPlan from(std::uint64_t experiment_seed);
    /// Seed for one order spec.
    std::uint64_t order_seed(std::uint64_t spec_seed) const;
};

// ------------------------------------------------------------------ data

struct Materialized {
    Dataset data;
    Dataset queries;
    std::optional<CategoryLabels> categories;
    std::optional<metrics::Qrels> qrels;
};

Materialized materialize(const ExperimentConfig& cfg, const SeedPlan& seeds);

/// Exact baseline, content-addressed by (dataset hash, query hash, k, metric)
/// under `cache_dir` when it is non-empty.
std::vector<SearchResult> exact_baseline_cached(const Dataset& data, const Dataset& queries, std::size_t k,
                                                Metric metric, const std::filesystem::path& cache_dir,
                                                unsigned threads = 0);

/// cfg.cache_dir, else $HNSWLAB_CACHE_DIR, else empty (no caching).
std::filesystem::path resolve_cache_dir(const ExperimentConfig& cfg);

// ------------------------------------------------------------------ runs

struct EvalCell {
    std::size_t ef_search = 0;
    metrics::EvalSummary summary;
    double mean_hops = 0.0;
    double mean_distance_evals = 0.0;
};

/// One index build (one order over one dataset) evaluated at several ef_search.
struct OrderRun {
    std::uint64_t experiment_seed = 0;
    std::string label;
    orders::Strategy strategy = orders::Strategy::Random;
    std::uint64_t order_seed = 0;
    std::vector<std::string> sequence;
    std::string order_hash;
    std::optional<std::size_t> basis_count;  // IdSweep rows
    std::optional<std::size_t> k_intrinsic;  // IdSweep rows
    hnsw::GraphStats graph;
    double build_seconds = 0.0;
    std::vector<EvalCell> cells;

    const EvalCell& cell(std::size_t ef_search) const;
};

struct EvalRequest {
    std::vector<std::size_t> ef_search{10, 40};
    std::size_t k = 10;
    const metrics::Qrels* qrels = nullptr;
    metrics::Gain gain = metrics::Gain::Linear;
    std::size_t path_sources = hnsw::kDefaultPathSources;
    std::uint64_t path_seed = 0;
    unsigned threads = 0;
};

/// Builds an index in `plan` order and scores every ef_search against the baseline.
OrderRun evaluate_order(const Dataset& data, const Dataset& queries, const std::vector<SearchResult>& baseline,
                        const orders::OrderPlan& plan, const hnsw::HnswParams& params, const EvalRequest& request);

/// Per-query recall (and NDCG when qrels are given) for one search setting.
EvalCell evaluate_index(const hnsw::HnswIndex& index, const Dataset& queries,
                        const std::vector<SearchResult>& baseline, std::size_t ef_search,
                        const EvalRequest& request);

struct SeedContext {
    std::uint64_t seed = 0;
    std::string dataset_hash;
    std::string query_hash;
    std::size_t dataset_size = 0;
    std::size_t query_count = 0;
    std::size_t dim = 0;
    std::optional<dimest::LidSummary> lid;
    std::optional<dimest::CategoryPca> category_pca;
};

struct Correlation {
    std::size_t ef_search = 0;
    std::string x;
    std::string y;
    std::optional<double> r;  // empty when undefined (fewer than 2 runs or zero variance)
};

struct RunReport {
    nlohmann::json config;
    std::vector<SeedContext> contexts;
    std::vector<OrderRun> runs;
    std::vector<Correlation> correlations;
};

RunReport run_experiment(const ExperimentConfig& cfg);

/// Numeric report contents; timings live under "timing" so reruns can be
/// compared on everything else.
nlohmann::json to_json(const RunReport& report);
std::string report_csv(const RunReport& report);

/// Writes report.json, report.csv, plotdata/*.csv and manifest.json into dir.
void write_outputs(const ExperimentConfig& cfg, const RunReport& report, const std::filesystem::path& dir);

/// Everything needed to rerun an experiment and check its inputs.
nlohmann::json make_manifest(const ExperimentConfig& cfg, const RunReport& report);
/// Reruns a manifest; throws DataError if regenerated inputs hash differently.
RunReport rerun_manifest(const nlohmann::json& manifest, const std::string& output_dir_override = {});

// ------------------------------------------------------------------ studies

/// basis_count -> (k_intrinsic, recall) over fresh synthetic data per count.
struct SweepRow {
    std::uint64_t seed = 0;
    std::size_t basis_count = 0;
    std::size_t k_intrinsic = 0;
    std::vector<std::pair<std::size_t, double>> mean_recall;  // (ef_search, recall)
};

struct SweepRequest {
    std::size_t d = 256;
    std::size_t n = 10000;
    std::size_t n_queries = 1000;
    std::vector<std::size_t> basis_counts;
    hnsw::HnswParams params;
    std::vector<std::size_t> ef_search{40};
    std::size_t k = 10;
    double theta = dimest::kDefaultTheta;
    std::uint64_t seed = 42;
    unsigned threads = 0;
};

std::vector<SweepRow> synthetic_id_sweep(const SweepRequest& request);

struct StudyRequest {
    hnsw::HnswParams params;
    std::vector<std::size_t> ef_search{10};
    std::size_t k = 10;
    Metric metric = Metric::L2;
    std::size_t lid_neighbours = dimest::kDefaultLidNeighbours;
    std::vector<std::uint64_t> seeds{42};  // vary level and random-order substreams
    unsigned threads = 0;
};

struct LidOrderStudy {
    dimest::LidSummary lid;
    std::vector<OrderRun> runs;  // per seed: lid_desc, lid_asc, random
    std::vector<Correlation> correlations;
};

/// DESC / ASC / RANDOM insertion orders per seed over one dataset.
LidOrderStudy lid_order_study(const Dataset& data, const Dataset& queries, const StudyRequest& request);

struct CategoryOrderStudy {
    dimest::CategoryPca pca;
    std::vector<OrderRun> runs;  // per seed and sequence
};

CategoryOrderStudy category_order_study(const Dataset& data, const Dataset& queries,
                                        const CategoryLabels& categories,
                                        const std::vector<std::vector<std::string>>& sequences,
                                        const StudyRequest& request, double theta = dimest::kDefaultTheta);

/// Every ordering of the distinct categories (at most 8 categories).
std::vector<std::vector<std::string>> all_sequences(const CategoryLabels& categories);

/// Pearson correlations of mean recall with layer-0 path length and search
/// hops across runs, per ef_search.
std::vector<Correlation> correlate_runs(const std::vector<OrderRun>& runs);

}  // namespace hnswlab::lab
