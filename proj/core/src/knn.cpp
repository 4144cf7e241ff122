#include "hnswlab/knn.hpp"

#include <algorithm>
#include <optional>
#include <queue>
#include <sstream>
#include <utility>

#include "hnswlab/parallel.hpp"

namespace hnswlab::knn {

namespace {

using Candidate = std::pair<double, VectorId>;

SearchResult top_k(const Dataset& data, std::span<const double> query, std::size_t k, Metric metric,
                   std::optional<VectorId> skip) {
    if (k == 0) {
        throw UsageError("exact_search: k must be >= 1");
    }
    if (query.size() != data.dim()) {
        std::ostringstream msg;
        msg << "exact_search: query dimension " << query.size() << " != dataset dimension " << data.dim();
        throw UsageError(msg.str());
    }
    // Max-heap on (distance, id): the worst kept candidate sits on top, and a
    // larger id loses a distance tie.
    std::priority_queue<Candidate> heap;
    const auto n = static_cast<VectorId>(data.size());
    for (VectorId id = 0; id < n; ++id) {
        if (skip && *skip == id) {
            continue;
        }
        const Candidate c{distance(data[id], query, metric), id};
        if (heap.size() < k) {
            heap.push(c);
        } else if (c < heap.top()) {
            heap.pop();
            heap.push(c);
        }
    }
    SearchResult out;
    out.ids.resize(heap.size());
    out.distances.resize(heap.size());
    for (std::size_t i = heap.size(); i-- > 0;) {
        out.distances[i] = heap.top().first;
        out.ids[i] = heap.top().second;
        heap.pop();
    }
    return out;
}

}  // namespace

SearchResult exact_search(const Dataset& data, std::span<const double> query, std::size_t k, Metric metric) {
    return top_k(data, query, k, metric, std::nullopt);
}

std::vector<SearchResult> exact_search_batch(const Dataset& data, const Dataset& queries, std::size_t k,
                                             Metric metric, unsigned threads) {
    if (queries.dim() != data.dim()) {
        std::ostringstream msg;
        msg << "exact_search_batch: query dimension " << queries.dim() << " != dataset dimension " << data.dim();
        throw UsageError(msg.str());
    }
    std::vector<SearchResult> out(queries.size());
    parallel_for(queries.size(), threads, [&](std::size_t q) {
        out[q] = exact_search(data, queries[static_cast<VectorId>(q)], k, metric);
    });
    return out;
}

SearchResult exact_neighbours_of(const Dataset& data, VectorId self, std::size_t k, Metric metric) {
    if (self >= data.size()) {
        throw UsageError("exact_neighbours_of: id out of range");
    }
    return top_k(data, data[self], k, metric, self);
}

}  // namespace hnswlab::knn
