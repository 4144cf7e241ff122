#include "hnswlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "hnswlab/error.hpp"

namespace hnswlab::metrics {

double recall_at_k(std::span<const VectorId> approx, std::span<const VectorId> exact, std::size_t k) {
    if (k == 0) {
        throw UsageError("recall_at_k: k must be >= 1");
    }
    const auto exact_top = exact.first(std::min(k, exact.size()));
    if (exact_top.empty()) {
        throw DataError("recall_at_k: exact result set is empty");
    }
    const std::set<VectorId> truth(exact_top.begin(), exact_top.end());
    const auto approx_top = approx.first(std::min(k, approx.size()));
    const std::set<VectorId> found(approx_top.begin(), approx_top.end());
    std::size_t hits = 0;
    for (VectorId id : found) {
        hits += truth.count(id);
    }
    return static_cast<double>(hits) / static_cast<double>(truth.size());
}

double mean(std::span<const double> values) {
    if (values.empty()) {
        throw DataError("mean of an empty set");
    }
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double mean_recall(std::span<const double> per_query_recall) {
    if (per_query_recall.empty()) {
        throw DataError("mean_recall: no queries");
    }
    return mean(per_query_recall);
}

namespace {

double gain_of(int grade, Gain gain) {
    return gain == Gain::Linear ? static_cast<double>(grade) : std::exp2(static_cast<double>(grade)) - 1.0;
}

}  // namespace

NdcgValue ndcg_at_k(std::span<const std::string> ranked_docs, const std::map<std::string, int>& grades,
                    std::size_t k, Gain gain) {
    if (k == 0) {
        throw UsageError("ndcg_at_k: k must be >= 1");
    }
    std::vector<int> ideal;
    for (const auto& [doc, grade] : grades) {
        if (grade < 0) {
            throw DataError("ndcg_at_k: negative relevance grade for doc '" + doc + "'");
        }
        if (grade > 0) {
            ideal.push_back(grade);
        }
    }
    if (ideal.empty()) {
        return {0.0, false};
    }
    std::sort(ideal.begin(), ideal.end(), std::greater<>());

    double idcg = 0.0;
    for (std::size_t i = 0; i < std::min(k, ideal.size()); ++i) {
        idcg += gain_of(ideal[i], gain) / std::log2(static_cast<double>(i) + 2.0);
    }
    double dcg = 0.0;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < std::min(k, ranked_docs.size()); ++i) {
        if (!seen.insert(ranked_docs[i]).second) {
            continue;
        }
        const auto it = grades.find(ranked_docs[i]);
        if (it != grades.end() && it->second > 0) {
            dcg += gain_of(it->second, gain) / std::log2(static_cast<double>(i) + 2.0);
        }
    }
    return {std::clamp(dcg / idcg, 0.0, 1.0), true};
}

std::map<std::string, int> rank_change(const std::map<std::string, double>& exact_scores,
                                       const std::map<std::string, double>& approx_scores) {
    if (exact_scores.size() != approx_scores.size() ||
        !std::equal(exact_scores.begin(), exact_scores.end(), approx_scores.begin(),
                    [](const auto& a, const auto& b) { return a.first == b.first; })) {
        throw DataError("rank_change: exact and approximate leaderboards cover different models");
    }
    auto ranks = [](const std::map<std::string, double>& scores) {
        std::vector<std::pair<std::string, double>> rows(scores.begin(), scores.end());
        std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
        std::map<std::string, int> out;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            out[rows[i].first] = static_cast<int>(i) + 1;
        }
        return out;
    };
    const auto exact_rank = ranks(exact_scores);
    const auto approx_rank = ranks(approx_scores);
    std::map<std::string, int> delta;
    for (const auto& [model, r] : exact_rank) {
        delta[model] = r - approx_rank.at(model);
    }
    return delta;
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2) {
        throw DataError("pearson: need two equal-length sequences of at least 2 values");
    }
    const double mx = mean(xs);
    const double my = mean(ys);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw DataError("pearson: zero variance");
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace hnswlab::metrics
