#include "hnswlab/dimest.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "hnswlab/knn.hpp"
#include "hnswlab/parallel.hpp"

namespace hnswlab::dimest {

std::size_t components_for(std::span<const double> cumulative, double theta) {
    for (std::size_t i = 0; i < cumulative.size(); ++i) {
        if (cumulative[i] >= theta) {
            return i + 1;
        }
    }
    return cumulative.size();
}

PcaReport pca_intrinsic_dim(const Dataset& data, double theta) {
    if (!(theta > 0.0 && theta <= 1.0)) {
        throw UsageError("pca_intrinsic_dim: theta must lie in (0, 1]");
    }
    if (data.size() < 2) {
        throw DataError("pca_intrinsic_dim: need at least 2 rows");
    }
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const Eigen::Map<const RowMajor> x(data.matrix().data().data(), static_cast<Eigen::Index>(data.size()),
                                       static_cast<Eigen::Index>(data.dim()));
    const Eigen::RowVectorXd mean = x.colwise().mean();
    const Eigen::MatrixXd centred = x.rowwise() - mean;

    Eigen::BDCSVD<Eigen::MatrixXd> svd(centred);
    const Eigen::VectorXd& sigma = svd.singularValues();

    std::vector<double> variance(static_cast<std::size_t>(sigma.size()));
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
        variance[static_cast<std::size_t>(i)] = sigma[i] * sigma[i];
    }
    std::sort(variance.begin(), variance.end(), std::greater<>());
    const double total = std::accumulate(variance.begin(), variance.end(), 0.0);
    if (!(total > 0.0)) {
        throw DataError("pca_intrinsic_dim: data has zero variance (all rows identical)");
    }

    PcaReport report;
    report.theta = theta;
    report.explained_variance_ratios.resize(variance.size());
    report.cumulative.resize(variance.size());
    double prefix = 0.0;
    for (std::size_t i = 0; i < variance.size(); ++i) {
        report.explained_variance_ratios[i] = variance[i] / total;
        prefix += variance[i];
        report.cumulative[i] = prefix / total;
    }
    report.cumulative.back() = 1.0;
    report.k_intrinsic = components_for(report.cumulative, theta);
    return report;
}

double lid_mle(std::span<const double> distances) {
    const std::size_t k = distances.size();
    if (k < 2) {
        throw UsageError("lid_mle: need at least 2 neighbour distances");
    }
    const double tk = distances[k - 1];
    if (!(tk > 0.0) || !std::isfinite(tk)) {
        throw DataError("lid_mle: k-th neighbour distance must be positive and finite");
    }
    double sum = 0.0;
    for (std::size_t j = 0; j + 1 < k; ++j) {
        if (distances[j] > tk || distances[j] < 0.0) {
            throw DataError("lid_mle: distances must be ascending and non-negative");
        }
        const double tj = std::max(distances[j], kLidZeroClamp * tk);
        sum += std::log(tk / tj);
    }
    if (sum == 0.0) {
        return kLidSentinel;
    }
    return static_cast<double>(k - 1) / sum;
}

std::size_t LidProfile::sentinel_count() const noexcept {
    return static_cast<std::size_t>(std::count_if(lid.begin(), lid.end(), [](double v) { return std::isinf(v); }));
}

LidSummary summarize(const LidProfile& profile) {
    LidSummary s;
    s.count = profile.size();
    std::vector<double> finite;
    finite.reserve(profile.size());
    for (double v : profile.lid) {
        if (std::isfinite(v)) {
            finite.push_back(v);
        } else {
            ++s.sentinel_count;
        }
    }
    if (finite.empty()) {
        return s;
    }
    s.mean = std::accumulate(finite.begin(), finite.end(), 0.0) / static_cast<double>(finite.size());
    std::sort(finite.begin(), finite.end());
    const std::size_t mid = finite.size() / 2;
    s.median = finite.size() % 2 == 1 ? finite[mid] : 0.5 * (finite[mid - 1] + finite[mid]);
    s.min = finite.front();
    s.max = finite.back();
    return s;
}

LidProfile lid_profile(const Dataset& data, std::size_t k_neighbours, Metric metric, unsigned threads) {
    if (k_neighbours < 2) {
        throw UsageError("lid_profile: k_neighbours must be >= 2");
    }
    if (data.size() <= k_neighbours) {
        std::ostringstream msg;
        msg << "lid_profile: dataset of " << data.size() << " points is too small for " << k_neighbours
            << " neighbours (need at least " << k_neighbours + 1 << ")";
        throw DataError(msg.str());
    }
    LidProfile profile;
    profile.k_neighbours = k_neighbours;
    profile.metric = metric;
    profile.lid.assign(data.size(), 0.0);
    profile.neighbour_distances = Matrix(data.size(), k_neighbours);
    profile.dataset_hash = data.content_hash();

    parallel_for(data.size(), threads, [&](std::size_t i) {
        const auto id = static_cast<VectorId>(i);
        const SearchResult nn = knn::exact_neighbours_of(data, id, k_neighbours, metric);
        auto row = profile.neighbour_distances.row(i);
        std::copy(nn.distances.begin(), nn.distances.end(), row.begin());
        if (!(row.back() > 0.0)) {
            std::ostringstream msg;
            msg << "lid_profile: point " << i << " has " << k_neighbours
                << " or more exact duplicates; its LID is undefined";
            throw DataError(msg.str());
        }
        profile.lid[i] = lid_mle(row);
    });
    return profile;
}

CategoryPca per_category_intrinsic_dim(const Dataset& data, const CategoryLabels& categories, double theta) {
    if (categories.size() != data.size()) {
        std::ostringstream msg;
        msg << "per_category_intrinsic_dim: " << categories.size() << " labels for " << data.size() << " points";
        throw DataError(msg.str());
    }
    std::map<std::string, std::vector<VectorId>> members;
    for (std::size_t i = 0; i < categories.size(); ++i) {
        members[categories[i]].push_back(static_cast<VectorId>(i));
    }
    std::vector<std::string> degenerate;
    for (const auto& [name, ids] : members) {
        const auto first = data[ids.front()];
        const bool distinct = std::any_of(ids.begin() + 1, ids.end(), [&](VectorId id) {
            const auto row = data[id];
            return !std::equal(row.begin(), row.end(), first.begin());
        });
        if (!distinct) {
            degenerate.push_back(name);
        }
    }
    if (!degenerate.empty()) {
        std::ostringstream msg;
        msg << "per_category_intrinsic_dim: categories with fewer than 2 distinct rows:";
        for (const auto& name : degenerate) {
            msg << " '" << name << "'";
        }
        throw DataError(msg.str());
    }

    CategoryPca out;
    for (const auto& [name, ids] : members) {
        out.per_category.emplace(name, pca_intrinsic_dim(data.subset(ids), theta));
    }
    out.whole = pca_intrinsic_dim(data, theta);
    return out;
}

}  // namespace hnswlab::dimest
