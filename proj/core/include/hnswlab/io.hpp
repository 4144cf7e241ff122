#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hnswlab/dataset.hpp"
#include "hnswlab/dimest.hpp"
#include "hnswlab/hnsw.hpp"
#include "hnswlab/knn.hpp"
#include "hnswlab/metrics.hpp"
#include "hnswlab/orders.hpp"

namespace hnswlab::io {

namespace fs = std::filesystem;

/// Version written into every binary artifact and JSON sidecar.
inline constexpr std::uint32_t kFormatVersion = 1;

// Whole-file helpers. Writes go to a temporary file in the target directory
// and are renamed into place.
std::string read_file(const fs::path& path);
void write_file_atomic(const fs::path& path, std::string_view contents);
nlohmann::json read_json(const fs::path& path);
void write_json_atomic(const fs::path& path, const nlohmann::json& doc);

/// fvecs: per record a little-endian int32 dim then dim float32 values.
/// Values are widened to double on load; ids follow record position.
Dataset read_fvecs(const fs::path& path);
void write_fvecs(const Dataset& data, const fs::path& path);

/// Newline-delimited JSON objects {"id": <int>, "category": <string>}.
std::map<VectorId, std::string> read_category_map(const fs::path& path);
/// Total labelling for ids 0..n-1; missing or extra ids raise DataError.
CategoryLabels join_categories(const std::map<VectorId, std::string>& labels, std::size_t n);
CategoryLabels read_categories(const fs::path& path, std::size_t n);
void write_categories(const CategoryLabels& labels, const fs::path& path);

/// TSV "query_id<TAB>doc_id<TAB>grade"; the four-column TREC layout
/// "query_id iter doc_id grade" is accepted too.
metrics::Qrels read_qrels(const fs::path& path);
void write_qrels(const metrics::Qrels& qrels, const fs::path& path);

/// Exact top-k results for a query set against a dataset.
struct Baseline {
    std::string dataset_hash;
    std::string query_hash;
    std::size_t k = 0;
    Metric metric = Metric::L2;
    std::vector<SearchResult> results;

    friend bool operator==(const Baseline&, const Baseline&) = default;
};

void save_baseline(const Baseline& baseline, const fs::path& path);
Baseline load_baseline(const fs::path& path);

/// Binary table (lid per id, then the neighbour distance rows) plus a JSON
/// summary written to `<path>.json`.
void save_lid_profile(const dimest::LidProfile& profile, const fs::path& path);
dimest::LidProfile load_lid_profile(const fs::path& path);
nlohmann::json lid_summary_json(const dimest::LidProfile& profile);

/// One JSON header line followed by one id per line.
void save_order_plan(const orders::OrderPlan& plan, const fs::path& path);
orders::OrderPlan load_order_plan(const fs::path& path);

/// Params block, levels, per-layer CSR adjacency and the insertion log.
/// Vectors are not stored; load() takes them from `data`, whose content
/// hash must match the one recorded at save time.
void save_index(const hnsw::HnswIndex& index, std::string_view dataset_hash, const fs::path& path);
hnsw::HnswIndex load_index(const fs::path& path, const Dataset& data);
/// Dataset hash recorded in an index file.
std::string index_dataset_hash(const fs::path& path);

nlohmann::json to_json(const hnsw::HnswParams& params);
hnsw::HnswParams params_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const hnsw::GraphStats& stats);
nlohmann::json to_json(const dimest::PcaReport& report);

}  // namespace hnswlab::io
