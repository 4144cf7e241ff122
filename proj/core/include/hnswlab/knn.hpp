#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hnswlab/dataset.hpp"
#include "hnswlab/vecmath.hpp"

namespace hnswlab {

/// Ranked ids, best first, with their distances (non-decreasing).
struct SearchResult {
    std::vector<VectorId> ids;
    std::vector<double> distances;

    std::size_t size() const noexcept { return ids.size(); }
    friend bool operator==(const SearchResult&, const SearchResult&) = default;
};

namespace knn {

/// The k closest dataset rows to q by brute force, ties broken by ascending id.
/// Returns every row when k >= dataset size.
SearchResult exact_search(const Dataset& data, std::span<const double> query, std::size_t k, Metric metric);

/// exact_search for every query row; output order follows the query order.
std::vector<SearchResult> exact_search_batch(const Dataset& data, const Dataset& queries, std::size_t k,
                                             Metric metric, unsigned threads = 0);

/// The k closest rows to data[self] other than self itself.
SearchResult exact_neighbours_of(const Dataset& data, VectorId self, std::size_t k, Metric metric);

}  // namespace knn
}  // namespace hnswlab
