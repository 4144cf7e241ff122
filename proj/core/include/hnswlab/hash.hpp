#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace hnswlab {

/// Incremental SHA-256 used for content addressing of datasets and artifacts.
class Sha256 {
public:
    Sha256();
    ~Sha256();
    Sha256(Sha256&&) noexcept;
    Sha256& operator=(Sha256&&) noexcept;
    Sha256(const Sha256&) = delete;
    Sha256& operator=(const Sha256&) = delete;

    Sha256& update(std::span<const std::byte> bytes);
    Sha256& update(std::string_view text);
    Sha256& update_u64(std::uint64_t value);

    template <typename T>
    Sha256& update_values(std::span<const T> values) {
        return update(std::as_bytes(values));
    }

    /// Lower-case hex digest; the object is consumed.
    std::string hex_digest();

private:
    struct State;
    std::unique_ptr<State> state_;
};

std::string sha256_hex(std::span<const std::byte> bytes);

/// splitmix64 finaliser; used to derive independent RNG substreams.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed for a named substream of `seed`, e.g. derive_seed(s, "levels").
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) noexcept;

/// Seed for the index-th substream of `seed` (per-row generators etc).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

}  // namespace hnswlab
