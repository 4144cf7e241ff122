#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hnswlab/vecmath.hpp"

namespace hnswlab {

using VectorId = std::uint32_t;

/// Non-empty set of finite vectors. Ids are row positions 0..size()-1.
class Dataset {
public:
    Dataset() = default;
    explicit Dataset(Matrix vectors);

    std::size_t size() const noexcept { return vectors_.rows(); }
    std::size_t dim() const noexcept { return vectors_.cols(); }
    bool empty() const noexcept { return vectors_.rows() == 0; }

    std::span<const double> operator[](VectorId id) const noexcept { return vectors_.row(id); }
    const Matrix& matrix() const noexcept { return vectors_; }

    std::vector<VectorId> ids() const;

    /// SHA-256 over shape and the float64 payload.
    std::string content_hash() const;

    /// Rows selected by id, in the given order.
    Dataset subset(std::span<const VectorId> ids) const;

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    Matrix vectors_;
};

/// Category label per dataset id.
using CategoryLabels = std::vector<std::string>;

/// Stacks datasets of equal dimension in order.
Dataset concatenate(std::span<const Dataset> parts);

}  // namespace hnswlab
