#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hnswlab/dataset.hpp"
#include "hnswlab/vecmath.hpp"

namespace hnswlab::dimest {

inline constexpr double kDefaultTheta = 0.99;
inline constexpr std::size_t kDefaultLidNeighbours = 100;

/// Lower clamp for zero neighbour distances, relative to the k-th distance.
inline constexpr double kLidZeroClamp = 1e-12;

/// Marks a point whose neighbour distances are all equal.
inline constexpr double kLidSentinel = std::numeric_limits<double>::infinity();

/// PCA spectrum of a centred dataset and the component count reaching theta.
struct PcaReport {
    std::vector<double> explained_variance_ratios;  // non-increasing, sums to 1
    std::vector<double> cumulative;                 // cumulative[i] = C(i + 1)
    std::size_t k_intrinsic = 0;
    double theta = kDefaultTheta;
};

/// Smallest k (1-based) with cumulative[k-1] >= theta.
std::size_t components_for(std::span<const double> cumulative, double theta);

/// Centres X by column means, takes singular values s_i and reports
/// lambda_i = s_i^2 / sum_j s_j^2. Throws DataError for zero-variance data.
PcaReport pca_intrinsic_dim(const Dataset& data, double theta = kDefaultTheta);

/// Maximum-likelihood LID from ascending neighbour distances T_1..T_k:
/// [ 1/(k-1) * sum_{j<k} ln(T_k / T_j) ]^-1. Zero T_j are clamped to
/// kLidZeroClamp * T_k. Returns kLidSentinel when every T_j equals T_k.
double lid_mle(std::span<const double> distances);

/// Per-point LID over exact neighbours (self excluded, ties by ascending id).
struct LidProfile {
    std::size_t k_neighbours = kDefaultLidNeighbours;
    Metric metric = Metric::L2;
    std::vector<double> lid;  // indexed by dataset id
    /// size() x k_neighbours, row i holds T_1..T_k for point i.
    Matrix neighbour_distances;
    std::string dataset_hash;

    std::size_t size() const noexcept { return lid.size(); }
    std::size_t sentinel_count() const noexcept;
};

struct LidSummary {
    std::size_t count = 0;
    std::size_t sentinel_count = 0;
    double mean = 0.0;    // over finite values
    double median = 0.0;  // over finite values
    double min = 0.0;
    double max = 0.0;
};

LidSummary summarize(const LidProfile& profile);

/// Requires data.size() > k_neighbours. A point with k_neighbours exact
/// duplicates has T_k = 0 and raises DataError naming it.
LidProfile lid_profile(const Dataset& data, std::size_t k_neighbours = kDefaultLidNeighbours,
                       Metric metric = Metric::L2, unsigned threads = 0);

struct CategoryPca {
    std::map<std::string, PcaReport> per_category;
    PcaReport whole;
};

/// pca_intrinsic_dim for each category and for the union. Every category
/// needs at least two distinct rows.
CategoryPca per_category_intrinsic_dim(const Dataset& data, const CategoryLabels& categories,
                                       double theta = kDefaultTheta);

}  // namespace hnswlab::dimest
