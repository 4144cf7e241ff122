#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hnswlab/dataset.hpp"
#include "hnswlab/dimest.hpp"

namespace hnswlab::orders {

enum class Strategy { Identity, Random, LidAsc, LidDesc, Category };

std::string_view to_string(Strategy s) noexcept;
Strategy parse_strategy(std::string_view name);

enum class Direction { Asc, Desc };

/// An insertion order over dataset ids plus how it was produced.
struct OrderPlan {
    std::vector<VectorId> ids;
    Strategy strategy = Strategy::Identity;
    std::uint64_t seed = 0;
    std::vector<std::string> category_sequence;  // Category plans only
    std::string tie_break = "ascending-id";

    std::size_t size() const noexcept { return ids.size(); }
    /// SHA-256 over strategy, seed and the id sequence.
    std::string content_hash() const;

    friend bool operator==(const OrderPlan&, const OrderPlan&) = default;
};

/// Throws DataError unless `ids` is a permutation of 0..n-1.
void require_permutation(std::span<const VectorId> ids, std::size_t n);

OrderPlan order_identity(std::size_t n);

/// Uniform shuffle of `ids`, deterministic per seed.
OrderPlan order_random(std::span<const VectorId> ids, std::uint64_t seed);

/// Stable sort by LID; equal values (including the +inf sentinel) keep
/// ascending id order. Desc puts sentinels first.
OrderPlan order_by_lid(const dimest::LidProfile& profile, Direction direction);

/// One block per category in `sequence` order; each block is shuffled with
/// a substream keyed by (seed, category name).
OrderPlan order_by_category(const CategoryLabels& categories, std::span<const std::string> sequence,
                            std::uint64_t seed);

/// Distinct category names in sorted order.
std::vector<std::string> distinct_categories(const CategoryLabels& categories);

}  // namespace hnswlab::orders
