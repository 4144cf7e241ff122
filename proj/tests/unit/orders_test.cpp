#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "hnswlab/orders.hpp"

using namespace hnswlab;

namespace {

dimest::LidProfile profile_of(std::vector<double> lids) {
    dimest::LidProfile p;
    p.lid = std::move(lids);
    return p;
}

bool is_permutation_of_n(const std::vector<VectorId>& ids, std::size_t n) {
    std::vector<VectorId> sorted(ids);
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (sorted[i] != i) return false;
    }
    return sorted.size() == n;
}

}  // namespace

TEST(OrderRandom, SingleElement) {
    const std::vector<VectorId> ids{0};
    EXPECT_EQ(orders::order_random(ids, 4).ids, ids);
}

TEST(OrderRandom, DeterministicPerSeed) {
    const auto ids = orders::order_identity(500).ids;
    EXPECT_EQ(orders::order_random(ids, 1), orders::order_random(ids, 1));
    EXPECT_NE(orders::order_random(ids, 1).ids, orders::order_random(ids, 2).ids);
}

TEST(OrderRandom, IsAPermutation) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto ids = orders::order_identity(97).ids;
        EXPECT_TRUE(is_permutation_of_n(orders::order_random(ids, seed).ids, 97));
    }
}

TEST(OrderByLid, HandCase) {
    const auto p = profile_of({2.0, 5.0, 3.5});
    EXPECT_EQ(orders::order_by_lid(p, orders::Direction::Desc).ids, (std::vector<VectorId>{1, 2, 0}));
    EXPECT_EQ(orders::order_by_lid(p, orders::Direction::Asc).ids, (std::vector<VectorId>{0, 2, 1}));
}

TEST(OrderByLid, AscIsReverseOfDescForDistinctValues) {
    std::vector<double> lids;
    for (int i = 0; i < 50; ++i) lids.push_back(std::fmod(i * 7.31, 13.0));
    const auto p = profile_of(lids);
    auto desc = orders::order_by_lid(p, orders::Direction::Desc).ids;
    std::reverse(desc.begin(), desc.end());
    EXPECT_EQ(orders::order_by_lid(p, orders::Direction::Asc).ids, desc);
}

TEST(OrderByLid, TiesKeepAscendingId) {
    const auto p = profile_of({1.0, 2.0, 1.0, 2.0});
    EXPECT_EQ(orders::order_by_lid(p, orders::Direction::Desc).ids, (std::vector<VectorId>{1, 3, 0, 2}));
    EXPECT_EQ(orders::order_by_lid(p, orders::Direction::Asc).ids, (std::vector<VectorId>{0, 2, 1, 3}));
}

TEST(OrderByLid, SentinelsComeFirstWhenDescending) {
    const auto p = profile_of({1.0, dimest::kLidSentinel, 3.0});
    EXPECT_EQ(orders::order_by_lid(p, orders::Direction::Desc).ids, (std::vector<VectorId>{1, 2, 0}));
}

TEST(OrderByCategory, BlocksFollowSequence) {
    const CategoryLabels labels{"A", "A", "A", "B"};
    const std::vector<std::string> seq{"B", "A"};
    const auto plan = orders::order_by_category(labels, seq, 3);
    ASSERT_EQ(plan.ids.size(), 4u);
    EXPECT_EQ(plan.ids[0], 3u);
    EXPECT_EQ(std::set<VectorId>(plan.ids.begin() + 1, plan.ids.end()), (std::set<VectorId>{0, 1, 2}));
    EXPECT_EQ(plan.category_sequence, seq);
}

TEST(OrderByCategory, SingleCategoryIsAPlainShuffle) {
    const CategoryLabels labels(200, "only");
    const std::vector<std::string> seq{"only"};
    const auto plan = orders::order_by_category(labels, seq, 5);
    EXPECT_TRUE(is_permutation_of_n(plan.ids, 200));
    EXPECT_NE(plan.ids, orders::order_identity(200).ids);
}

TEST(OrderByCategory, BlockOrderDoesNotDependOnOtherCategories) {
    const CategoryLabels labels{"A", "B", "A", "B", "A", "C"};
    const std::vector<std::string> ab{"A", "B", "C"}, ba{"B", "A", "C"};
    const auto x = orders::order_by_category(labels, ab, 9);
    const auto y = orders::order_by_category(labels, ba, 9);
    EXPECT_EQ(std::vector<VectorId>(x.ids.begin(), x.ids.begin() + 3), std::vector<VectorId>(y.ids.begin() + 2, y.ids.begin() + 5));
}

TEST(OrderByCategory, SequenceMustCoverEachCategoryOnce) {
    const CategoryLabels labels{"A", "B"};
    EXPECT_THROW(orders::order_by_category(labels, std::vector<std::string>{"A"}, 0), UsageError);
    EXPECT_THROW(orders::order_by_category(labels, std::vector<std::string>{"A", "B", "A"}, 0), UsageError);
    EXPECT_THROW(orders::order_by_category(labels, std::vector<std::string>{"A", "Z"}, 0), UsageError);
}

TEST(RequirePermutation, RejectsRepeatsAndGaps) {
    EXPECT_NO_THROW(orders::require_permutation(std::vector<VectorId>{2, 0, 1}, 3));
    EXPECT_THROW(orders::require_permutation(std::vector<VectorId>{0, 0, 1}, 3), DataError);
    EXPECT_THROW(orders::require_permutation(std::vector<VectorId>{0, 1, 3}, 3), DataError);
    EXPECT_THROW(orders::require_permutation(std::vector<VectorId>{0, 1}, 3), DataError);
}

TEST(OrderPlan, HashCoversIdsAndStrategy) {
    auto a = orders::order_identity(10);
    auto b = a;
    EXPECT_EQ(a.content_hash(), b.content_hash());
    std::swap(b.ids[0], b.ids[1]);
    EXPECT_NE(a.content_hash(), b.content_hash());
    b = a;
    b.strategy = orders::Strategy::Random;
    EXPECT_NE(a.content_hash(), b.content_hash());
}

TEST(Strategy, ParseRoundTrip) {
    for (auto s : {orders::Strategy::Identity, orders::Strategy::Random, orders::Strategy::LidAsc,
                   orders::Strategy::LidDesc, orders::Strategy::Category}) {
        EXPECT_EQ(orders::parse_strategy(orders::to_string(s)), s);
    }
    EXPECT_THROW(orders::parse_strategy("sideways"), UsageError);
}
