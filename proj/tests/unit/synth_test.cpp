#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <set>
#include <vector>

#include "hnswlab/synth.hpp"

using namespace hnswlab;

namespace {

double orthonormality_error(const Matrix& u) {
    double worst = 0.0;
    for (std::size_t i = 0; i < u.rows(); ++i) {
        for (std::size_t j = 0; j < u.rows(); ++j) {
            worst = std::max(worst, std::abs(dot(u.row(i), u.row(j)) - (i == j ? 1.0 : 0.0)));
        }
    }
    return worst;
}

Eigen::VectorXd singular_values(const Dataset& data) {
    Eigen::MatrixXd m(data.size(), data.dim());
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t j = 0; j < data.dim(); ++j) m(i, j) = data.matrix()(i, j);
    }
    return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues();
}

}  // namespace

TEST(GenerateBasis, FullRankIsOrthonormal) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        EXPECT_LE(orthonormality_error(synth::generate_basis(8, 8, seed)), 1e-6) << "seed " << seed;
    }
}

TEST(GenerateBasis, SingleVectorHasUnitNorm) {
    const auto u = synth::generate_basis(4, 1, 9);
    ASSERT_EQ(u.rows(), 1u);
    EXPECT_NEAR(norm(u.row(0)), 1.0, 1e-12);
}

TEST(GenerateBasis, DeterministicPerSeed) {
    EXPECT_EQ(synth::generate_basis(32, 7, 5), synth::generate_basis(32, 7, 5));
    EXPECT_NE(synth::generate_basis(32, 7, 5), synth::generate_basis(32, 7, 6));
}

TEST(GenerateBasis, PrefixIsStableInK) {
    // Row i draws from its own substream, so a larger k extends a smaller one.
    const auto small = synth::generate_basis(16, 3, 1);
    const auto large = synth::generate_basis(16, 6, 1);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 16; ++j) EXPECT_EQ(small(i, j), large(i, j));
    }
}

TEST(SynthSpec, RejectsBadShapes) {
    EXPECT_THROW((synth::SynthSpec{4, 5, 10, 0}.validate()), UsageError);
    EXPECT_THROW((synth::SynthSpec{4, 0, 10, 0}.validate()), UsageError);
    EXPECT_THROW((synth::SynthSpec{4, 2, 0, 0}.validate()), UsageError);
    EXPECT_NO_THROW((synth::SynthSpec{4, 4, 1, 0}.validate()));
}

TEST(GenerateDataset, RankOneRowsAreCollinear) {
    const auto data = synth::generate(synth::SynthSpec{12, 1, 50, 3});
    for (std::size_t i = 1; i < data.size(); ++i) {
        const double c = dot(data[0], data[static_cast<VectorId>(i)]) / (norm(data[0]) * norm(data[static_cast<VectorId>(i)]));
        EXPECT_NEAR(std::abs(c), 1.0, 1e-9);
    }
}

TEST(GenerateDataset, NumericalRankAtMostK) {
    for (std::size_t k : {1u, 3u, 6u}) {
        const auto data = synth::generate(synth::SynthSpec{10, k, 60, 21});
        const auto s = singular_values(data);
        for (Eigen::Index i = static_cast<Eigen::Index>(k); i < s.size(); ++i) {
            EXPECT_LE(s(i), 1e-8 * s(0)) << "k=" << k << " sigma_" << i;
        }
        EXPECT_GT(s(static_cast<Eigen::Index>(k) - 1), 1e-3 * s(0));
    }
}

TEST(GenerateDataset, IndependentOfThreadCount) {
    const auto basis = synth::generate_basis(16, 5, 2);
    EXPECT_EQ(synth::generate_dataset(basis, 300, 7, 1), synth::generate_dataset(basis, 300, 7, 4));
}

TEST(GenerateDataset, RowsAreStableInN) {
    const auto basis = synth::generate_basis(16, 5, 2);
    const auto a = synth::generate_dataset(basis, 10, 7);
    const auto b = synth::generate_dataset(basis, 20, 7);
    for (VectorId i = 0; i < 10; ++i) {
        EXPECT_TRUE(std::equal(a[i].begin(), a[i].end(), b[i].begin()));
    }
}

TEST(GenerateQuerySet, SameSeedSharesCodePath) {
    const auto basis = synth::generate_basis(8, 4, 1);
    EXPECT_EQ(synth::generate_query_set(basis, 25, 99), synth::generate_dataset(basis, 25, 99));
}

TEST(GenerateQuerySet, DistinctSeedHasNoDuplicateRows) {
    const auto basis = synth::generate_basis(8, 4, 1);
    const auto data = synth::generate_dataset(basis, 500, 1);
    const auto queries = synth::generate_query_set(basis, 200, 2);
    std::set<std::vector<double>> rows;
    for (VectorId i = 0; i < data.size(); ++i) rows.emplace(data[i].begin(), data[i].end());
    for (VectorId q = 0; q < queries.size(); ++q) {
        EXPECT_FALSE(rows.contains(std::vector<double>(queries[q].begin(), queries[q].end())));
    }
}
