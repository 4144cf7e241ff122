#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "hnswlab/knn.hpp"
#include "test_support.hpp"

using namespace hnswlab;
using hnswlab::fixtures::rows;

namespace {

// Full sort over (distance, id): the reference answer.
SearchResult sorted_oracle(const Dataset& data, std::span<const double> q, std::size_t k, Metric metric) {
    std::vector<std::pair<double, VectorId>> all;
    for (VectorId i = 0; i < data.size(); ++i) all.emplace_back(distance(data[i], q, metric), i);
    std::sort(all.begin(), all.end());
    SearchResult r;
    for (std::size_t i = 0; i < std::min(k, all.size()); ++i) {
        r.ids.push_back(all[i].second);
        r.distances.push_back(all[i].first);
    }
    return r;
}

}  // namespace

TEST(ExactSearch, HandCase) {
    const auto data = rows({{0, 0}, {1, 0}, {5, 0}});
    const std::vector<double> q{0.9, 0};
    const auto r = knn::exact_search(data, q, 2, Metric::L2);
    EXPECT_EQ(r.ids, (std::vector<VectorId>{1, 0}));
    EXPECT_NEAR(r.distances[0], 0.1, 1e-12);
    EXPECT_NEAR(r.distances[1], 0.9, 1e-12);
}

TEST(ExactSearch, KAboveSizeReturnsEverythingSorted) {
    const auto data = rows({{3}, {1}, {2}});
    const std::vector<double> q{0};
    const auto r = knn::exact_search(data, q, 10, Metric::L2);
    EXPECT_EQ(r.ids, (std::vector<VectorId>{1, 2, 0}));
}

TEST(ExactSearch, TiesGoToLowerId) {
    const auto data = rows({{5, 5}, {1, 0}, {-1, 0}, {0, 1}});
    const std::vector<double> q{0, 0};
    EXPECT_EQ(knn::exact_search(data, q, 1, Metric::L2).ids, (std::vector<VectorId>{1}));
    EXPECT_EQ(knn::exact_search(data, q, 3, Metric::L2).ids, (std::vector<VectorId>{1, 2, 3}));
}

TEST(ExactSearch, MatchesFullSortOracle) {
    const auto data = fixtures::random_dataset(400, 12, 5);
    const auto queries = fixtures::random_dataset(20, 12, 6);
    for (Metric metric : {Metric::L2, Metric::Cosine, Metric::InnerProduct}) {
        for (VectorId q = 0; q < queries.size(); ++q) {
            EXPECT_EQ(knn::exact_search(data, queries[q], 15, metric), sorted_oracle(data, queries[q], 15, metric));
        }
    }
}

TEST(ExactSearch, RejectsBadArguments) {
    const auto data = rows({{1, 2}});
    const std::vector<double> wrong{1, 2, 3};
    EXPECT_THROW(knn::exact_search(data, wrong, 1, Metric::L2), UsageError);
    EXPECT_THROW(knn::exact_search(data, data[0], 0, Metric::L2), UsageError);
}

TEST(ExactSearchBatch, BatchOfOneEqualsSingleCall) {
    const auto data = fixtures::random_dataset(100, 6, 1);
    const auto queries = fixtures::random_dataset(1, 6, 2);
    const auto batch = knn::exact_search_batch(data, queries, 5, Metric::L2);
    ASSERT_EQ(batch.size(), 1u);
    EXPECT_EQ(batch[0], knn::exact_search(data, queries[0], 5, Metric::L2));
}

TEST(ExactSearchBatch, IndependentOfThreadCount) {
    const auto data = fixtures::random_dataset(500, 8, 1);
    const auto queries = fixtures::random_dataset(64, 8, 2);
    EXPECT_EQ(knn::exact_search_batch(data, queries, 10, Metric::L2, 1),
              knn::exact_search_batch(data, queries, 10, Metric::L2, 4));
}

TEST(ExactNeighboursOf, ExcludesSelf) {
    const auto data = rows({{0}, {1}, {3}, {6}});
    const auto r = knn::exact_neighbours_of(data, 1, 2, Metric::L2);
    EXPECT_EQ(r.ids, (std::vector<VectorId>{0, 2}));
    EXPECT_EQ(r.distances, (std::vector<double>{1, 2}));
}

TEST(ExactNeighboursOf, KeepsDuplicatesOfSelf) {
    const auto data = rows({{1}, {1}, {4}});
    const auto r = knn::exact_neighbours_of(data, 1, 1, Metric::L2);
    EXPECT_EQ(r.ids, (std::vector<VectorId>{0}));
    EXPECT_EQ(r.distances[0], 0.0);
}
