#include "hnswlab/orders.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "hnswlab/hash.hpp"

namespace hnswlab::orders {

std::string_view to_string(Strategy s) noexcept {
    switch (s) {
        case Strategy::Identity:
            return "identity";
        case Strategy::Random:
            return "random";
        case Strategy::LidAsc:
            return "lid_asc";
        case Strategy::LidDesc:
            return "lid_desc";
        case Strategy::Category:
            return "category";
    }
    return "unknown";
}

Strategy parse_strategy(std::string_view name) {
    std::string n(name);
    std::replace(n.begin(), n.end(), '-', '_');
    std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return std::tolower(c); });
    if (n == "identity") return Strategy::Identity;
    if (n == "random") return Strategy::Random;
    if (n == "lid_asc") return Strategy::LidAsc;
    if (n == "lid_desc") return Strategy::LidDesc;
    if (n == "category") return Strategy::Category;
    throw UsageError("unknown order strategy '" + std::string(name) +
                     "' (expected identity, random, lid_asc, lid_desc or category)");
}

std::string OrderPlan::content_hash() const {
    Sha256 h;
    h.update("hnswlab-order-v1");
    h.update(to_string(strategy));
    h.update_u64(seed);
    for (const auto& c : category_sequence) {
        h.update_u64(c.size());
        h.update(c);
    }
    h.update_u64(ids.size());
    h.update_values(std::span<const VectorId>(ids));
    return h.hex_digest();
}

void require_permutation(std::span<const VectorId> ids, std::size_t n) {
    if (ids.size() != n) {
        std::ostringstream msg;
        msg << "order has " << ids.size() << " ids but the dataset has " << n;
        throw DataError(msg.str());
    }
    std::vector<bool> seen(n, false);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const VectorId id = ids[i];
        if (id >= n || seen[id]) {
            std::ostringstream msg;
            msg << "order is not a permutation: position " << i << " holds "
                << (id >= n ? "out-of-range" : "repeated") << " id " << id;
            throw DataError(msg.str());
        }
        seen[id] = true;
    }
}

OrderPlan order_identity(std::size_t n) {
    OrderPlan plan;
    plan.ids.resize(n);
    std::iota(plan.ids.begin(), plan.ids.end(), VectorId{0});
    plan.strategy = Strategy::Identity;
    return plan;
}

OrderPlan order_random(std::span<const VectorId> ids, std::uint64_t seed) {
    if (ids.empty()) {
        throw UsageError("order_random: no ids to order");
    }
    OrderPlan plan;
    plan.ids.assign(ids.begin(), ids.end());
    std::mt19937_64 rng(seed);
    std::shuffle(plan.ids.begin(), plan.ids.end(), rng);
    plan.strategy = Strategy::Random;
    plan.seed = seed;
    return plan;
}

OrderPlan order_by_lid(const dimest::LidProfile& profile, Direction direction) {
    if (profile.lid.empty()) {
        throw DataError("order_by_lid: empty LID profile");
    }
    for (std::size_t i = 0; i < profile.lid.size(); ++i) {
        if (std::isnan(profile.lid[i])) {
            throw DataError("order_by_lid: missing LID for id " + std::to_string(i));
        }
    }
    OrderPlan plan = order_identity(profile.size());
    const auto& lid = profile.lid;
    if (direction == Direction::Asc) {
        std::stable_sort(plan.ids.begin(), plan.ids.end(), [&](VectorId a, VectorId b) { return lid[a] < lid[b]; });
        plan.strategy = Strategy::LidAsc;
    } else {
        std::stable_sort(plan.ids.begin(), plan.ids.end(), [&](VectorId a, VectorId b) { return lid[a] > lid[b]; });
        plan.strategy = Strategy::LidDesc;
    }
    return plan;
}

std::vector<std::string> distinct_categories(const CategoryLabels& categories) {
    std::set<std::string> names(categories.begin(), categories.end());
    return {names.begin(), names.end()};
}

OrderPlan order_by_category(const CategoryLabels& categories, std::span<const std::string> sequence,
                            std::uint64_t seed) {
    if (categories.empty()) {
        throw UsageError("order_by_category: no labels");
    }
    std::map<std::string, std::vector<VectorId>> blocks;
    for (std::size_t i = 0; i < categories.size(); ++i) {
        blocks[categories[i]].push_back(static_cast<VectorId>(i));
    }
    std::set<std::string> listed;
    for (const auto& name : sequence) {
        if (!blocks.contains(name)) {
            throw UsageError("order_by_category: sequence names unknown category '" + name + "'");
        }
        if (!listed.insert(name).second) {
            throw UsageError("order_by_category: sequence repeats category '" + name + "'");
        }
    }
    if (listed.size() != blocks.size()) {
        std::ostringstream msg;
        msg << "order_by_category: sequence is missing categories:";
        for (const auto& [name, ids] : blocks) {
            if (!listed.contains(name)) {
                msg << " '" << name << "'";
            }
        }
        throw UsageError(msg.str());
    }

    OrderPlan plan;
    plan.strategy = Strategy::Category;
    plan.seed = seed;
    plan.category_sequence.assign(sequence.begin(), sequence.end());
    plan.ids.reserve(categories.size());
    for (const auto& name : sequence) {
        auto block = blocks[name];
        std::mt19937_64 rng(derive_seed(seed, name));
        std::shuffle(block.begin(), block.end(), rng);
        plan.ids.insert(plan.ids.end(), block.begin(), block.end());
    }
    return plan;
}

}  // namespace hnswlab::orders
