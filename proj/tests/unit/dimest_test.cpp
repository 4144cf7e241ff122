#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "hnswlab/dimest.hpp"
#include "hnswlab/synth.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace hnswlab;

TEST(LidMle, SingleTerm) {
    const std::vector<double> t{1.0, std::exp(1.0)};
    EXPECT_NEAR(dimest::lid_mle(t), 1.0, 1e-15);
}

TEST(LidMle, HandValue) {
    const std::vector<double> t{2, 4, 8};
    EXPECT_NEAR(dimest::lid_mle(t), 0.9617966939259757, 1e-15);
    EXPECT_NEAR(dimest::lid_mle(t), 1.0 / (1.5 * std::log(2.0)), 1e-15);
}

TEST(LidMle, AllEqualIsSentinel) {
    const std::vector<double> t{3, 3, 3, 3};
    EXPECT_EQ(dimest::lid_mle(t), dimest::kLidSentinel);
}

TEST(LidMle, ZeroLeadingDistanceIsClampedNotInfinite) {
    const std::vector<double> t{0, 1, 2};
    const double lid = dimest::lid_mle(t);
    EXPECT_TRUE(std::isfinite(lid));
    EXPECT_GT(lid, 0.0);
}

TEST(LidMle, RejectsInvalidInput) {
    EXPECT_THROW(dimest::lid_mle(std::vector<double>{1}), UsageError);
    EXPECT_THROW(dimest::lid_mle(std::vector<double>{0, 0}), DataError);
    EXPECT_THROW(dimest::lid_mle(std::vector<double>{2, 1}), DataError);
}

TEST(LidMle, MatchesFormulaOracle) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.01, 10.0);
    std::uniform_int_distribution<int> len(2, 120);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> t(static_cast<std::size_t>(len(rng)));
        for (double& x : t) x = u(rng);
        std::sort(t.begin(), t.end());
        if (t.front() == t.back()) continue;
        EXPECT_NEAR(dimest::lid_mle(t), oracle::lid_mle(t), 1e-9);
    }
}

TEST(LidMle, ScaleInvariant) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    std::vector<double> t(50);
    for (double& x : t) x = u(rng);
    std::sort(t.begin(), t.end());
    const double base = dimest::lid_mle(t);
    for (double c : {1e-3, 0.5, 7.0, 1e4}) {
        std::vector<double> scaled(t);
        for (double& x : scaled) x *= c;
        EXPECT_NEAR(dimest::lid_mle(scaled) / base, 1.0, 1e-12) << "c=" << c;
    }
}

TEST(ComponentsFor, SmallestKReachingTheta) {
    const std::vector<double> c{0.5, 0.8, 0.95, 1.0};
    EXPECT_EQ(dimest::components_for(c, 0.5), 1u);
    EXPECT_EQ(dimest::components_for(c, 0.81), 3u);
    EXPECT_EQ(dimest::components_for(c, 0.95), 3u);
    EXPECT_EQ(dimest::components_for(c, 1.0), 4u);
}

TEST(PcaIntrinsicDim, BasisBoundsK) {
    for (std::size_t k : {1u, 3u, 8u}) {
        const auto data = synth::generate(synth::SynthSpec{20, k, 300, k});
        const auto r = dimest::pca_intrinsic_dim(data, 0.99);
        EXPECT_LE(r.k_intrinsic, k);
        EXPECT_NEAR(r.cumulative.back(), 1.0, 0.0);
    }
}

TEST(PcaIntrinsicDim, ThetaOneOnFullRankGivesMinOfNMinusOneAndD) {
    EXPECT_EQ(dimest::pca_intrinsic_dim(fixtures::random_dataset(100, 12, 1), 1.0).k_intrinsic, 12u);
    EXPECT_EQ(dimest::pca_intrinsic_dim(fixtures::random_dataset(6, 12, 2), 1.0).k_intrinsic, 5u);
}

TEST(PcaIntrinsicDim, RatiosAreSortedAndSumToOne) {
    const auto r = dimest::pca_intrinsic_dim(fixtures::random_dataset(80, 10, 3));
    EXPECT_NEAR(std::accumulate(r.explained_variance_ratios.begin(), r.explained_variance_ratios.end(), 0.0), 1.0, 1e-12);
    EXPECT_TRUE(std::is_sorted(r.explained_variance_ratios.rbegin(), r.explained_variance_ratios.rend()));
    EXPECT_TRUE(std::is_sorted(r.cumulative.begin(), r.cumulative.end()));
}

TEST(PcaIntrinsicDim, FlatSpectrumMatchesEigenOracle) {
    const auto data = synth::generate(synth::SynthSpec{220, 200, 2000, 8});
    const auto r = dimest::pca_intrinsic_dim(data, 0.99);
    EXPECT_EQ(r.k_intrinsic, oracle::pca_k(data, 0.99));
    EXPECT_LE(r.k_intrinsic, 200u);
}

TEST(PcaIntrinsicDim, RejectsDegenerateInput) {
    EXPECT_THROW(dimest::pca_intrinsic_dim(fixtures::random_dataset(1, 4, 1)), DataError);
    EXPECT_THROW(dimest::pca_intrinsic_dim(fixtures::rows({{1, 2}, {1, 2}})), DataError);
    EXPECT_THROW(dimest::pca_intrinsic_dim(fixtures::random_dataset(5, 4, 1), 0.0), UsageError);
}

TEST(LidProfile, LineSegmentHasLidNearOne) {
    const std::size_t n = 10001, d = 64;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> dir(d);
    std::normal_distribution<double> normal;
    for (double& x : dir) x = normal(rng);
    const double len = norm(dir);
    Matrix m(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = u(rng);
        for (std::size_t j = 0; j < d; ++j) m(i, j) = t * dir[j] / len;
    }
    const auto s = dimest::summarize(dimest::lid_profile(Dataset(std::move(m)), 100));
    EXPECT_GE(s.mean, 0.7);
    EXPECT_LE(s.mean, 1.3);
    EXPECT_EQ(s.sentinel_count, 0u);
}

TEST(LidProfile, DuplicateSaturatedPointIsNamedError) {
    Matrix m(250, 3);
    for (std::size_t i = 0; i < 250; ++i) m(i, 0) = static_cast<double>(i / 200);  // 200 copies of (0,0,0)
    try {
        dimest::lid_profile(Dataset(std::move(m)), 100);
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("point "), std::string::npos) << e.what();
    }
}

TEST(LidProfile, InvariantToRowOrder) {
    const auto data = fixtures::random_dataset(300, 6, 9);
    std::vector<VectorId> perm(data.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), std::mt19937_64(1));
    const auto a = dimest::lid_profile(data, 20);
    const auto b = dimest::lid_profile(data.subset(perm), 20);
    for (std::size_t i = 0; i < perm.size(); ++i) EXPECT_EQ(b.lid[i], a.lid[perm[i]]);
}

TEST(LidProfile, IndependentOfThreadCount) {
    const auto data = fixtures::random_dataset(400, 6, 10);
    EXPECT_EQ(dimest::lid_profile(data, 30, Metric::L2, 1).lid, dimest::lid_profile(data, 30, Metric::L2, 3).lid);
}

TEST(LidProfile, NeedsMorePointsThanNeighbours) {
    EXPECT_THROW(dimest::lid_profile(fixtures::random_dataset(10, 3, 1), 10), DataError);
}

TEST(CategoryPca, OrthogonalSubspacesAreAdditive) {
    const auto basis = synth::generate_basis(16, 7, 4);
    Matrix a(3, 16), b(4, 16);
    for (std::size_t i = 0; i < 3; ++i) std::copy(basis.row(i).begin(), basis.row(i).end(), a.row(i).begin());
    for (std::size_t i = 0; i < 4; ++i) std::copy(basis.row(3 + i).begin(), basis.row(3 + i).end(), b.row(i).begin());
    const std::vector<Dataset> parts{synth::generate_dataset(a, 200, 1), synth::generate_dataset(b, 200, 2)};
    const auto data = concatenate(parts);
    CategoryLabels labels(200, "A");
    labels.insert(labels.end(), 200, "B");
    const auto r = dimest::per_category_intrinsic_dim(data, labels, 0.99);
    EXPECT_LE(r.per_category.at("A").k_intrinsic, 3u);
    EXPECT_LE(r.per_category.at("B").k_intrinsic, 4u);
    EXPECT_LE(r.whole.k_intrinsic, 7u);
}

TEST(CategoryPca, SingleCategoryEqualsWhole) {
    const auto data = fixtures::random_dataset(50, 5, 3);
    const auto r = dimest::per_category_intrinsic_dim(data, CategoryLabels(50, "all"));
    EXPECT_EQ(r.per_category.at("all").explained_variance_ratios, r.whole.explained_variance_ratios);
    EXPECT_EQ(r.per_category.at("all").k_intrinsic, r.whole.k_intrinsic);
}

TEST(CategoryPca, LabelCountMustMatch) {
    EXPECT_THROW(dimest::per_category_intrinsic_dim(fixtures::random_dataset(10, 3, 1), CategoryLabels(9, "x")),
                 DataError);
}
