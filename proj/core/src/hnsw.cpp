#include "hnswlab/hnsw.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <random>
#include <sstream>

#include "hnswlab/hash.hpp"

namespace hnswlab::hnsw {

std::string_view to_string(NeighborSelect s) noexcept {
    return s == NeighborSelect::Simple ? "simple" : "heuristic";
}

NeighborSelect parse_neighbor_select(std::string_view name) {
    if (name == "simple" || name == "SIMPLE") return NeighborSelect::Simple;
    if (name == "heuristic" || name == "HEURISTIC") return NeighborSelect::Heuristic;
    throw UsageError("unknown neighbour selection '" + std::string(name) + "' (expected simple or heuristic)");
}

HnswParams HnswParams::with_M(std::size_t M) {
    HnswParams p;
    p.M = M;
    p.M0 = 2 * M;
    p.mL = M >= 2 ? 1.0 / std::log(static_cast<double>(M)) : 0.0;
    return p;
}

void HnswParams::validate() const {
    std::ostringstream msg;
    if (M < 2) {
        msg << "M must be >= 2 (got " << M << ")";
    } else if (M0 < M) {
        msg << "M0 must be >= M (got M0=" << M0 << ", M=" << M << ")";
    } else if (ef_construction < M) {
        msg << "ef_construction must be >= M (got " << ef_construction << " < " << M << ")";
    } else if (!(mL > 0.0) || !std::isfinite(mL)) {
        msg << "mL must be a positive finite number (got " << mL << ")";
    } else {
        return;
    }
    throw UsageError("hnsw params: " + msg.str());
}

HnswIndex::HnswIndex(HnswParams params, std::size_t dim) : params_(params), dim_(dim) {
    params_.validate();
    if (dim_ == 0) {
        throw UsageError("hnsw: dimension must be >= 1");
    }
}

VectorId HnswIndex::entry_point() const {
    if (empty()) {
        throw UsageError("hnsw: empty index has no entry point");
    }
    return ids_[entry_];
}

int HnswIndex::level_of(VectorId id) const {
    const auto it = slot_of_.find(id);
    if (it == slot_of_.end()) {
        throw UsageError("hnsw: id " + std::to_string(id) + " is not indexed");
    }
    return levels_[it->second];
}

std::vector<VectorId> HnswIndex::neighbours(VectorId id, int layer) const {
    const auto it = slot_of_.find(id);
    if (it == slot_of_.end()) {
        throw UsageError("hnsw: id " + std::to_string(id) + " is not indexed");
    }
    std::vector<VectorId> out;
    if (layer < 0 || layer > levels_[it->second]) {
        return out;
    }
    for (Slot s : links_[it->second][static_cast<std::size_t>(layer)]) {
        out.push_back(ids_[s]);
    }
    return out;
}

int HnswIndex::draw_level() {
    // Counter-based draw keyed by insertion rank: u in (0, 1].
    const std::uint64_t bits = mix64(derive_seed(params_.seed, static_cast<std::uint64_t>(ids_.size())));
    const double u = static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
    return static_cast<int>(std::floor(-std::log(u) * params_.mL));
}

HnswIndex::Slot HnswIndex::greedy_closest(std::span<const double> q, Slot start, int top, int bottom,
                                          SearchStats& stats) const {
    Slot cur = start;
    double cur_dist = distance(q, vec(cur), params_.metric);
    ++stats.distance_evals;
    for (int layer = top; layer >= bottom; --layer) {
        bool moved = true;
        while (moved) {
            moved = false;
            for (Slot nb : links_[cur][static_cast<std::size_t>(layer)]) {
                const double d = distance(q, vec(nb), params_.metric);
                ++stats.distance_evals;
                if (Candidate{d, nb} < Candidate{cur_dist, cur}) {
                    cur = nb;
                    cur_dist = d;
                    moved = true;
                }
            }
            if (moved) {
                ++stats.hops;
            }
        }
    }
    return cur;
}

std::vector<HnswIndex::Candidate> HnswIndex::search_layer(std::span<const double> q,
                                                          std::span<const Candidate> entry, std::size_t ef,
                                                          int layer, SearchStats& stats) const {
    std::vector<std::uint8_t> visited(ids_.size(), 0);
    std::priority_queue<Candidate, std::vector<Candidate>, std::greater<>> frontier;
    std::priority_queue<Candidate> best;  // worst kept result on top

    for (const Candidate& c : entry) {
        if (visited[c.second]) {
            continue;
        }
        visited[c.second] = 1;
        frontier.push(c);
        best.push(c);
        if (best.size() > ef) {
            best.pop();
        }
    }

    const auto L = static_cast<std::size_t>(layer);
    while (!frontier.empty()) {
        const Candidate c = frontier.top();
        if (best.size() >= ef && best.top() < c) {
            break;
        }
        frontier.pop();
        ++stats.hops;
        for (Slot nb : links_[c.second][L]) {
            if (visited[nb]) {
                continue;
            }
            visited[nb] = 1;
            const Candidate cand{distance(q, vec(nb), params_.metric), nb};
            ++stats.distance_evals;
            if (best.size() < ef || cand < best.top()) {
                frontier.push(cand);
                best.push(cand);
                if (best.size() > ef) {
                    best.pop();
                }
            }
        }
    }

    std::vector<Candidate> out(best.size());
    for (std::size_t i = out.size(); i-- > 0;) {
        out[i] = best.top();
        best.pop();
    }
    return out;
}

std::vector<HnswIndex::Candidate> HnswIndex::select_neighbours(std::vector<Candidate> candidates,
                                                               std::size_t m) const {
    std::sort(candidates.begin(), candidates.end());
    if (candidates.size() <= m && params_.neighbor_select == NeighborSelect::Simple) {
        return candidates;
    }
    if (params_.neighbor_select == NeighborSelect::Simple) {
        candidates.resize(m);
        return candidates;
    }
    std::vector<Candidate> kept;
    kept.reserve(m);
    for (const Candidate& c : candidates) {
        if (kept.size() >= m) {
            break;
        }
        bool diverse = true;
        for (const Candidate& r : kept) {
            if (distance(vec(c.second), vec(r.second), params_.metric) < c.first) {
                diverse = false;
                break;
            }
        }
        if (diverse) {
            kept.push_back(c);
        }
    }
    return kept;
}

void HnswIndex::add_link(Slot from, Slot to, int layer) {
    auto& list = links_[from][static_cast<std::size_t>(layer)];
    if (list.size() < cap(layer)) {
        list.push_back(to);
        return;
    }
    std::vector<Candidate> candidates;
    candidates.reserve(list.size() + 1);
    const auto base = vec(from);
    for (Slot s : list) {
        candidates.emplace_back(distance(base, vec(s), params_.metric), s);
    }
    candidates.emplace_back(distance(base, vec(to), params_.metric), to);
    const auto kept = select_neighbours(std::move(candidates), cap(layer));
    list.clear();
    for (const Candidate& c : kept) {
        list.push_back(c.second);
    }
}

void HnswIndex::insert(VectorId id, std::span<const double> vector) {
    if (vector.size() != dim_) {
        std::ostringstream msg;
        msg << "hnsw insert: vector dimension " << vector.size() << " != index dimension " << dim_;
        throw UsageError(msg.str());
    }
    if (slot_of_.contains(id)) {
        throw UsageError("hnsw insert: id " + std::to_string(id) + " is already indexed");
    }
    const int level = draw_level();
    const auto slot = static_cast<Slot>(ids_.size());
    vectors_.insert(vectors_.end(), vector.begin(), vector.end());
    ids_.push_back(id);
    slot_of_.emplace(id, slot);
    levels_.push_back(level);
    links_.emplace_back(static_cast<std::size_t>(level) + 1);

    if (slot == 0) {
        entry_ = slot;
        max_level_ = level;
        return;
    }

    const auto q = vec(slot);
    SearchStats stats;
    Slot cur = entry_;
    if (level < max_level_) {
        cur = greedy_closest(q, entry_, max_level_, level + 1, stats);
    }
    std::vector<Candidate> entry{{distance(q, vec(cur), params_.metric), cur}};
    for (int layer = std::min(level, max_level_); layer >= 0; --layer) {
        std::vector<Candidate> found = search_layer(q, entry, params_.ef_construction, layer, stats);
        const auto chosen = select_neighbours(found, params_.M);
        auto& own = links_[slot][static_cast<std::size_t>(layer)];
        for (const Candidate& c : chosen) {
            own.push_back(c.second);
        }
        for (const Candidate& c : chosen) {
            add_link(c.second, slot, layer);
        }
        entry = std::move(found);
    }
    if (level > max_level_) {
        entry_ = slot;
        max_level_ = level;
    }
}

SearchOutput HnswIndex::search(std::span<const double> query, std::size_t k, std::size_t ef_search) const {
    if (empty()) {
        throw UsageError("hnsw search: index is empty");
    }
    if (k == 0) {
        throw UsageError("hnsw search: k must be >= 1");
    }
    if (ef_search < k) {
        std::ostringstream msg;
        msg << "hnsw search: ef_search (" << ef_search << ") must be >= k (" << k << ")";
        throw UsageError(msg.str());
    }
    if (query.size() != dim_) {
        std::ostringstream msg;
        msg << "hnsw search: query dimension " << query.size() << " != index dimension " << dim_;
        throw UsageError(msg.str());
    }
    SearchOutput out;
    const Slot start = greedy_closest(query, entry_, max_level_, 1, out.stats);
    const Candidate entry[] = {{distance(query, vec(start), params_.metric), start}};
    ++out.stats.distance_evals;
    std::vector<Candidate> found = search_layer(query, entry, ef_search, 0, out.stats);

    std::vector<std::pair<double, VectorId>> ranked;
    ranked.reserve(found.size());
    for (const Candidate& c : found) {
        ranked.emplace_back(c.first, ids_[c.second]);
    }
    std::sort(ranked.begin(), ranked.end());
    if (ranked.size() > k) {
        ranked.resize(k);
    }
    for (const auto& [d, id] : ranked) {
        out.result.ids.push_back(id);
        out.result.distances.push_back(d);
    }
    return out;
}

void HnswIndex::check_invariants() const {
    auto fail = [](const std::string& what) { throw InvariantError("hnsw invariant: " + what); };
    for (Slot s = 0; s < ids_.size(); ++s) {
        if (links_[s].size() != static_cast<std::size_t>(levels_[s]) + 1) {
            fail("node " + std::to_string(ids_[s]) + " has link layers inconsistent with its level");
        }
        for (int layer = 0; layer <= levels_[s]; ++layer) {
            const auto& list = links_[s][static_cast<std::size_t>(layer)];
            if (list.size() > cap(layer)) {
                fail("node " + std::to_string(ids_[s]) + " exceeds degree cap at layer " + std::to_string(layer));
            }
            for (Slot nb : list) {
                if (nb >= ids_.size() || levels_[nb] < layer || nb == s) {
                    fail("node " + std::to_string(ids_[s]) + " has an invalid edge at layer " +
                         std::to_string(layer));
                }
            }
        }
    }
    if (!empty()) {
        if (levels_[entry_] != max_level_ || *std::max_element(levels_.begin(), levels_.end()) != max_level_) {
            fail("entry point does not hold the maximum level");
        }
    }
}

GraphParts HnswIndex::parts() const {
    GraphParts p;
    p.params = params_;
    p.dim = dim_;
    p.insertion_log = ids_;
    p.levels = levels_;
    p.links.resize(ids_.size());
    for (Slot s = 0; s < ids_.size(); ++s) {
        p.links[s].resize(links_[s].size());
        for (std::size_t layer = 0; layer < links_[s].size(); ++layer) {
            for (Slot nb : links_[s][layer]) {
                p.links[s][layer].push_back(ids_[nb]);
            }
        }
    }
    p.entry_point = empty() ? 0 : ids_[entry_];
    return p;
}

HnswIndex HnswIndex::from_parts(const GraphParts& parts, const Dataset& vectors) {
    HnswIndex index(parts.params, parts.dim);
    const std::size_t n = parts.insertion_log.size();
    if (parts.levels.size() != n || parts.links.size() != n) {
        throw DataError("hnsw from_parts: levels/links do not match the insertion log");
    }
    if (n > 0 && vectors.dim() != parts.dim) {
        throw DataError("hnsw from_parts: vector dimension does not match the index");
    }
    for (std::size_t s = 0; s < n; ++s) {
        const VectorId id = parts.insertion_log[s];
        if (id >= vectors.size()) {
            throw DataError("hnsw from_parts: id " + std::to_string(id) + " has no vector");
        }
        if (!index.slot_of_.emplace(id, static_cast<Slot>(s)).second) {
            throw DataError("hnsw from_parts: duplicate id " + std::to_string(id));
        }
        if (parts.levels[s] < 0) {
            throw DataError("hnsw from_parts: negative level");
        }
        const auto v = vectors[id];
        index.vectors_.insert(index.vectors_.end(), v.begin(), v.end());
        index.ids_.push_back(id);
        index.levels_.push_back(parts.levels[s]);
    }
    index.links_.resize(n);
    for (std::size_t s = 0; s < n; ++s) {
        if (parts.links[s].size() != static_cast<std::size_t>(parts.levels[s]) + 1) {
            throw DataError("hnsw from_parts: link layers do not match level of id " +
                            std::to_string(parts.insertion_log[s]));
        }
        index.links_[s].resize(parts.links[s].size());
        for (std::size_t layer = 0; layer < parts.links[s].size(); ++layer) {
            for (VectorId nb : parts.links[s][layer]) {
                const auto it = index.slot_of_.find(nb);
                if (it == index.slot_of_.end()) {
                    throw DataError("hnsw from_parts: edge to unknown id " + std::to_string(nb));
                }
                index.links_[s][layer].push_back(it->second);
            }
        }
    }
    if (n > 0) {
        const auto it = index.slot_of_.find(parts.entry_point);
        if (it == index.slot_of_.end()) {
            throw DataError("hnsw from_parts: entry point is not indexed");
        }
        index.entry_ = it->second;
        index.max_level_ = index.levels_[it->second];
    }
    try {
        index.check_invariants();
    } catch (const InvariantError& e) {
        throw DataError(std::string("hnsw from_parts: ") + e.what());
    }
    return index;
}

namespace {

std::vector<std::vector<std::size_t>> undirected_layer0(const HnswIndex& index,
                                                        std::unordered_map<VectorId, std::size_t>& pos) {
    const auto& log = index.insertion_log();
    for (std::size_t i = 0; i < log.size(); ++i) {
        pos.emplace(log[i], i);
    }
    std::vector<std::vector<std::size_t>> adj(log.size());
    for (std::size_t i = 0; i < log.size(); ++i) {
        for (VectorId nb : index.neighbours(log[i], 0)) {
            const std::size_t j = pos.at(nb);
            adj[i].push_back(j);
            adj[j].push_back(i);
        }
    }
    for (auto& list : adj) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    return adj;
}

}  // namespace

GraphStats graph_stats_from(const HnswIndex& index, std::span<const VectorId> sources) {
    GraphStats stats;
    if (index.empty()) {
        return stats;
    }
    std::unordered_map<VectorId, std::size_t> pos;
    const auto adj = undirected_layer0(index, pos);
    const std::size_t n = adj.size();

    std::vector<std::size_t> component(n, SIZE_MAX);
    for (std::size_t s = 0; s < n; ++s) {
        if (component[s] != SIZE_MAX) {
            continue;
        }
        const std::size_t c = stats.connected_components_layer0++;
        std::vector<std::size_t> stack{s};
        component[s] = c;
        while (!stack.empty()) {
            const std::size_t u = stack.back();
            stack.pop_back();
            for (std::size_t v : adj[u]) {
                if (component[v] == SIZE_MAX) {
                    component[v] = c;
                    stack.push_back(v);
                }
            }
        }
    }

    double total_hops = 0.0;
    std::vector<std::size_t> depth(n);
    std::vector<std::size_t> queue;
    queue.reserve(n);
    for (VectorId source : sources) {
        const std::size_t src = pos.at(source);
        std::fill(depth.begin(), depth.end(), SIZE_MAX);
        queue.clear();
        queue.push_back(src);
        depth[src] = 0;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const std::size_t u = queue[head];
            for (std::size_t v : adj[u]) {
                if (depth[v] == SIZE_MAX) {
                    depth[v] = depth[u] + 1;
                    total_hops += static_cast<double>(depth[v]);
                    ++stats.reachable_pairs;
                    queue.push_back(v);
                }
            }
        }
    }
    stats.sampled_sources = sources.size();
    stats.avg_path_length_layer0 =
        stats.reachable_pairs == 0 ? 0.0 : total_hops / static_cast<double>(stats.reachable_pairs);

    const auto levels = static_cast<std::size_t>(index.max_level()) + 1;
    stats.degree_histogram.resize(levels);
    stats.nodes_per_layer.assign(levels, 0);
    for (VectorId id : index.insertion_log()) {
        const int top = index.level_of(id);
        for (int layer = 0; layer <= top; ++layer) {
            const auto L = static_cast<std::size_t>(layer);
            ++stats.degree_histogram[L][index.neighbours(id, layer).size()];
            ++stats.nodes_per_layer[L];
        }
    }
    return stats;
}

GraphStats graph_stats(const HnswIndex& index, std::size_t sample_sources, std::uint64_t seed) {
    std::vector<VectorId> pool = index.insertion_log();
    std::sort(pool.begin(), pool.end());
    if (sample_sources < pool.size()) {
        std::mt19937_64 rng(seed);
        std::shuffle(pool.begin(), pool.end(), rng);
        pool.resize(sample_sources);
    }
    return graph_stats_from(index, pool);
}

HnswIndex build(const Dataset& data, std::span<const VectorId> order, const HnswParams& params) {
    orders::require_permutation(order, data.size());
    HnswIndex index(params, data.dim());
    for (VectorId id : order) {
        index.insert(id, data[id]);
    }
    return index;
}

HnswIndex build(const Dataset& data, const orders::OrderPlan& order, const HnswParams& params) {
    return build(data, std::span<const VectorId>(order.ids), params);
}

}  // namespace hnswlab::hnsw
