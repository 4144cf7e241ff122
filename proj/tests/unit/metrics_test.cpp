#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "hnswlab/metrics.hpp"

using namespace hnswlab;

namespace {

std::vector<VectorId> range(VectorId from, VectorId to) {
    std::vector<VectorId> v(to - from);
    std::iota(v.begin(), v.end(), from);
    return v;
}

}  // namespace

TEST(RecallAtK, HandCases) {
    EXPECT_EQ(metrics::recall_at_k(range(0, 10), range(0, 10), 10), 1.0);
    EXPECT_EQ(metrics::recall_at_k(range(0, 10), range(10, 20), 10), 0.0);
    EXPECT_EQ(metrics::recall_at_k(range(0, 10), range(5, 15), 10), 0.5);
}

TEST(RecallAtK, OrderInsideTopKDoesNotMatter) {
    auto shuffled = range(0, 10);
    std::reverse(shuffled.begin(), shuffled.end());
    EXPECT_EQ(metrics::recall_at_k(shuffled, range(0, 10), 10), 1.0);
}

TEST(RecallAtK, OnlyTopKOfEachListCounts) {
    EXPECT_EQ(metrics::recall_at_k(range(0, 20), range(5, 15), 10), 0.5);
}

TEST(RecallAtK, RejectsZeroK) { EXPECT_THROW(metrics::recall_at_k(range(0, 1), range(0, 1), 0), UsageError); }

TEST(MeanRecall, HandCase) {
    const std::vector<double> r{1.0, 0.5};
    EXPECT_EQ(metrics::mean_recall(r), 0.75);
    const std::vector<double> one{metrics::recall_at_k(range(0, 10), range(5, 15), 10)};
    EXPECT_EQ(metrics::mean_recall(one), 0.5);
}

TEST(Ndcg, PerfectRankingIsOne) {
    const std::map<std::string, int> grades{{"a", 3}, {"b", 2}, {"c", 1}};
    const std::vector<std::string> docs{"a", "b", "c"};
    const auto v = metrics::ndcg_at_k(docs, grades, 3);
    EXPECT_DOUBLE_EQ(v.value, 1.0);
    EXPECT_TRUE(v.has_relevant);
}

TEST(Ndcg, NoRelevantRetrievedIsZero) {
    const std::map<std::string, int> grades{{"a", 1}};
    const std::vector<std::string> docs{"x", "y"};
    EXPECT_EQ(metrics::ndcg_at_k(docs, grades, 2).value, 0.0);
}

TEST(Ndcg, HandValue) {
    // Retrieved grades (0, 2, 1): DCG = 2/log2(3) + 1/2, IDCG = 2 + 1/log2(3).
    const std::map<std::string, int> grades{{"d1", 0}, {"d2", 2}, {"d3", 1}};
    const std::vector<std::string> docs{"d1", "d2", "d3"};
    const auto v = metrics::ndcg_at_k(docs, grades, 3);
    EXPECT_NEAR(v.value, 0.66967181649423, 1e-12);
    EXPECT_NEAR(2.0 / std::log2(3.0) + 0.5, 1.761859507142915, 1e-12);
    EXPECT_NEAR(2.0 + 1.0 / std::log2(3.0), 2.6309297535714578, 1e-12);
}

TEST(Ndcg, ExponentialGain) {
    const std::map<std::string, int> grades{{"d1", 0}, {"d2", 2}, {"d3", 1}};
    const std::vector<std::string> docs{"d1", "d2", "d3"};
    const double dcg = 3.0 / std::log2(3.0) + 1.0 / 2.0;
    const double idcg = 3.0 + 1.0 / std::log2(3.0);
    EXPECT_NEAR(metrics::ndcg_at_k(docs, grades, 3, metrics::Gain::Exponential).value, dcg / idcg, 1e-12);
}

TEST(Ndcg, NoJudgedRelevantDocsFlagged) {
    const std::map<std::string, int> grades{{"a", 0}};
    const std::vector<std::string> docs{"a"};
    const auto v = metrics::ndcg_at_k(docs, grades, 1);
    EXPECT_FALSE(v.has_relevant);
    EXPECT_EQ(v.value, 0.0);
}

TEST(RankChange, IdenticalOrderingsAreZero) {
    const std::map<std::string, double> s{{"a", 0.9}, {"b", 0.5}, {"c", 0.1}};
    for (const auto& [name, delta] : metrics::rank_change(s, s)) EXPECT_EQ(delta, 0) << name;
}

TEST(RankChange, SwapGivesPlusAndMinusOne) {
    const std::map<std::string, double> exact{{"a", 0.9}, {"b", 0.8}, {"c", 0.1}};
    const std::map<std::string, double> approx{{"a", 0.7}, {"b", 0.75}, {"c", 0.1}};
    const auto d = metrics::rank_change(exact, approx);
    EXPECT_EQ(d.at("a"), -1);
    EXPECT_EQ(d.at("b"), 1);
    EXPECT_EQ(d.at("c"), 0);
}

TEST(RankChange, DeltasSumToZero) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::map<std::string, double> exact, approx;
        for (int m = 0; m < 2 + trial % 15; ++m) {
            const std::string name = "model" + std::to_string(m);
            exact[name] = u(rng);
            approx[name] = trial % 4 == 0 ? std::round(u(rng) * 4) / 4 : u(rng);  // some ties
        }
        int sum = 0;
        for (const auto& [name, delta] : metrics::rank_change(exact, approx)) sum += delta;
        EXPECT_EQ(sum, 0);
    }
}

TEST(RankChange, ModelSetsMustMatch) {
    EXPECT_THROW(metrics::rank_change({{"a", 1.0}}, {{"b", 1.0}}), DataError);
}

TEST(Pearson, HandCases) {
    const std::vector<double> xs{1, 2, 3, 4};
    std::vector<double> lin, neg;
    for (double x : xs) {
        lin.push_back(2 * x + 1);
        neg.push_back(-x);
    }
    EXPECT_NEAR(metrics::pearson(xs, lin), 1.0, 1e-15);
    EXPECT_NEAR(metrics::pearson(xs, neg), -1.0, 1e-15);
    EXPECT_NEAR(metrics::pearson(std::vector<double>{1, 2, 3}, std::vector<double>{1, 3, 2}), 0.5, 1e-15);
}

TEST(Pearson, DegenerateInputsAreErrors) {
    EXPECT_THROW(metrics::pearson(std::vector<double>{1}, std::vector<double>{1}), DataError);
    EXPECT_THROW(metrics::pearson(std::vector<double>{1, 1}, std::vector<double>{1, 2}), DataError);
    EXPECT_THROW(metrics::pearson(std::vector<double>{1, 2}, std::vector<double>{1}), DataError);
}
