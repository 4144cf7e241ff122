#pragma once

#include <cstddef>
#include <cstdint>

#include "hnswlab/dataset.hpp"
#include "hnswlab/vecmath.hpp"

namespace hnswlab::synth {

/// Shape of a synthetic dataset: n vectors in R^d spanned by k orthonormal
/// basis vectors.
struct SynthSpec {
    std::size_t d = 0;
    std::size_t k = 0;
    std::size_t n = 0;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Redraws allowed for a single degenerate basis row before giving up.
inline constexpr int kMaxBasisRedraws = 16;

/// k x d matrix with orthonormal rows, from k standard-normal draws passed
/// through gram_schmidt. Deterministic per (d, k, seed).
Matrix generate_basis(std::size_t d, std::size_t k, std::uint64_t seed);

/// X = C * U where C is n x k with i.i.d. N(0, 1) entries. Row i draws its
/// coefficients from its own substream of `seed`, so the output does not
/// depend on `threads`.
Dataset generate_dataset(const Matrix& basis, std::size_t n, std::uint64_t seed, unsigned threads = 0);

/// Same construction as generate_dataset; callers pass a seed from a separate
/// substream so queries never coincide with indexed vectors.
Dataset generate_query_set(const Matrix& basis, std::size_t n_queries, std::uint64_t seed,
                           unsigned threads = 0);

/// Basis from derive_seed(spec.seed, "basis"), data from derive_seed(spec.seed, "data").
Dataset generate(const SynthSpec& spec, unsigned threads = 0);

}  // namespace hnswlab::synth
