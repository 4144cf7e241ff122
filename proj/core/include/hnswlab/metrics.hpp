#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hnswlab/dataset.hpp"

namespace hnswlab::metrics {

/// Relevance grades: query id -> (doc id -> grade >= 0).
using Qrels = std::map<std::string, std::map<std::string, int>>;

/// |top-k(approx) ∩ top-k(exact)| / |top-k(exact)|, with set semantics.
double recall_at_k(std::span<const VectorId> approx, std::span<const VectorId> exact, std::size_t k);

/// Arithmetic mean; throws on an empty input.
double mean(std::span<const double> values);

/// Mean of per-query recall values.
double mean_recall(std::span<const double> per_query_recall);

enum class Gain {
    Linear,       // rel
    Exponential,  // 2^rel - 1
};

struct NdcgValue {
    double value = 0.0;
    bool has_relevant = false;  // false when the query has no grade > 0
};

/// DCG@k / IDCG@k with a log2(rank + 1) discount.
NdcgValue ndcg_at_k(std::span<const std::string> ranked_docs, const std::map<std::string, int>& grades,
                    std::size_t k, Gain gain = Gain::Linear);

/// Per-model rank deltas: rank under exact scores minus rank under approximate
/// scores, where rank 1 is the highest score and ties go to the smaller name.
/// Positive means the model moved up.
std::map<std::string, int> rank_change(const std::map<std::string, double>& exact_scores,
                                       const std::map<std::string, double>& approx_scores);

/// Sample Pearson correlation.
double pearson(std::span<const double> xs, std::span<const double> ys);

struct EvalSummary {
    std::size_t k = 0;
    std::vector<double> recall;        // per query
    double mean_recall = 0.0;
    std::vector<double> ndcg;          // per query; NaN when the query has no judgments
    double mean_ndcg = 0.0;
    std::size_t ndcg_queries = 0;      // queries counted in mean_ndcg
    std::size_t ndcg_excluded = 0;     // queries absent from qrels
    std::size_t ndcg_no_relevant = 0;  // judged queries with no relevant docs (scored 0)
};

}  // namespace hnswlab::metrics
