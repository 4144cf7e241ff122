#include "hnswlab/dataset.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "hnswlab/hash.hpp"

namespace hnswlab {

Dataset::Dataset(Matrix vectors) : vectors_(std::move(vectors)) {
    if (vectors_.rows() == 0 || vectors_.cols() == 0) {
        throw DataError("dataset must contain at least one vector of dimension >= 1");
    }
    if (!vectors_.all_finite()) {
        throw DataError("dataset contains non-finite values");
    }
}

std::vector<VectorId> Dataset::ids() const {
    std::vector<VectorId> out(size());
    std::iota(out.begin(), out.end(), VectorId{0});
    return out;
}

std::string Dataset::content_hash() const {
    Sha256 h;
    h.update("hnswlab-dataset-v1");
    h.update_u64(vectors_.rows());
    h.update_u64(vectors_.cols());
    h.update_values(std::span<const double>(vectors_.data()));
    return h.hex_digest();
}

Dataset Dataset::subset(std::span<const VectorId> ids) const {
    Matrix out(ids.size(), dim());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] >= size()) {
            std::ostringstream msg;
            msg << "subset: id " << ids[i] << " out of range for dataset of size " << size();
            throw DataError(msg.str());
        }
        const auto src = vectors_.row(ids[i]);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return Dataset(std::move(out));
}

Dataset concatenate(std::span<const Dataset> parts) {
    if (parts.empty()) {
        throw DataError("concatenate: no parts");
    }
    const std::size_t dim = parts.front().dim();
    std::size_t rows = 0;
    for (const auto& p : parts) {
        if (p.dim() != dim) {
            throw DataError("concatenate: dimension mismatch between parts");
        }
        rows += p.size();
    }
    std::vector<double> data;
    data.reserve(rows * dim);
    for (const auto& p : parts) {
        data.insert(data.end(), p.matrix().data().begin(), p.matrix().data().end());
    }
    return Dataset(Matrix(rows, dim, std::move(data)));
}

}  // namespace hnswlab
