#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hnswlab/dataset.hpp"
#include "hnswlab/knn.hpp"
#include "hnswlab/orders.hpp"
#include "hnswlab/vecmath.hpp"

namespace hnswlab::hnsw {

enum class NeighborSelect {
    Simple,     // keep the M closest candidates
    Heuristic,  // diversity pruning: keep e only if it is closer to the base than to every kept neighbour
};

std::string_view to_string(NeighborSelect s) noexcept;
NeighborSelect parse_neighbor_select(std::string_view name);

struct HnswParams {
    std::size_t M = 16;
    std::size_t M0 = 32;  // layer-0 cap, 2*M by convention
    std::size_t ef_construction = 128;
    double mL = 1.0 / std::log(16.0);
    std::uint64_t seed = 100;
    Metric metric = Metric::L2;
    NeighborSelect neighbor_select = NeighborSelect::Heuristic;

    /// Params with M set and M0 = 2*M, mL = 1/ln(M) derived from it.
    static HnswParams with_M(std::size_t M);

    void validate() const;
    friend bool operator==(const HnswParams&, const HnswParams&) = default;
};

struct SearchStats {
    std::size_t hops = 0;            // greedy moves plus layer-0 expansions
    std::size_t distance_evals = 0;
};

struct SearchOutput {
    SearchResult result;
    SearchStats stats;
};

/// Layer-0 connectivity and degree statistics.
struct GraphStats {
    double avg_path_length_layer0 = 0.0;  // mean BFS hops over reachable (source, target) pairs
    std::size_t reachable_pairs = 0;
    std::size_t sampled_sources = 0;
    std::size_t connected_components_layer0 = 0;
    /// degree_histogram[layer][degree] = number of nodes at that layer with that out-degree
    std::vector<std::map<std::size_t, std::size_t>> degree_histogram;
    std::vector<std::size_t> nodes_per_layer;
};

/// Raw graph contents in external-id space, used for persistence and for
/// assembling fixed graphs in tests.
struct GraphParts {
    HnswParams params;
    std::size_t dim = 0;
    std::vector<VectorId> insertion_log;
    std::vector<int> levels;                                  // by insertion position
    std::vector<std::vector<std::vector<VectorId>>> links;    // [position][layer] -> neighbour ids
    VectorId entry_point = 0;
};

/// Multi-layer proximity graph. Built by sequential insert(); after building
/// it is immutable and search() is safe to call concurrently.
class HnswIndex {
public:
    HnswIndex(HnswParams params, std::size_t dim);

    /// Adds `id`. The level is floor(-ln(u) * mL) with u ~ U(0, 1] drawn from
    /// the index's seeded generator, so levels depend only on insertion rank.
    void insert(VectorId id, std::span<const double> vector);

    /// Greedy descent to layer 0 followed by a best-first search bounded by
    /// ef_search. Requires ef_search >= k and a non-empty index.
    SearchOutput search(std::span<const double> query, std::size_t k, std::size_t ef_search) const;

    std::size_t size() const noexcept { return ids_.size(); }
    std::size_t dim() const noexcept { return dim_; }
    bool empty() const noexcept { return ids_.empty(); }
    const HnswParams& params() const noexcept { return params_; }

    int max_level() const noexcept { return max_level_; }
    VectorId entry_point() const;
    const std::vector<VectorId>& insertion_log() const noexcept { return ids_; }
    bool contains(VectorId id) const { return slot_of_.contains(id); }
    int level_of(VectorId id) const;
    std::vector<VectorId> neighbours(VectorId id, int layer) const;

    /// Checks degree caps, edge endpoints, and entry-point maximality.
    /// Throws InvariantError on the first violation.
    void check_invariants() const;

    GraphParts parts() const;
    /// Rebuilds an index from parts; `vectors` supplies the vector of every
    /// id in parts.insertion_log.
    static HnswIndex from_parts(const GraphParts& parts, const Dataset& vectors);

private:
    using Slot = std::uint32_t;
    using Candidate = std::pair<double, Slot>;

    std::span<const double> vec(Slot s) const noexcept { return {vectors_.data() + std::size_t{s} * dim_, dim_}; }
    std::size_t cap(int layer) const noexcept { return layer == 0 ? params_.M0 : params_.M; }
    int draw_level();

    Slot greedy_closest(std::span<const double> q, Slot start, int top, int bottom, SearchStats& stats) const;
    std::vector<Candidate> search_layer(std::span<const double> q, std::span<const Candidate> entry,
                                        std::size_t ef, int layer, SearchStats& stats) const;
    std::vector<Candidate> select_neighbours(std::vector<Candidate> candidates, std::size_t m) const;
    void add_link(Slot from, Slot to, int layer);

    HnswParams params_;
    std::size_t dim_;
    std::vector<double> vectors_;                      // by slot
    std::vector<VectorId> ids_;                        // slot -> id; doubles as the insertion log
    std::unordered_map<VectorId, Slot> slot_of_;
    std::vector<int> levels_;                          // by slot
    std::vector<std::vector<std::vector<Slot>>> links_;  // [slot][layer]
    Slot entry_ = 0;
    int max_level_ = -1;
};

inline constexpr std::size_t kDefaultPathSources = 64;

/// BFS over undirected layer-0 edges from `sample_sources` nodes sampled
/// without replacement (all nodes when fewer).
GraphStats graph_stats(const HnswIndex& index, std::size_t sample_sources = kDefaultPathSources,
                       std::uint64_t seed = 0);

/// graph_stats with explicit BFS sources.
GraphStats graph_stats_from(const HnswIndex& index, std::span<const VectorId> sources);

/// Inserts dataset rows sequentially in `order` (a permutation of ids).
HnswIndex build(const Dataset& data, std::span<const VectorId> order, const HnswParams& params);
HnswIndex build(const Dataset& data, const orders::OrderPlan& order, const HnswParams& params);

}  // namespace hnswlab::hnsw
