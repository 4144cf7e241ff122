#include "hnswlab/synth.hpp"

#include <random>
#include <sstream>

#include "hnswlab/hash.hpp"
#include "hnswlab/parallel.hpp"

namespace hnswlab::synth {

// Gaussian draws: std::normal_distribution<double> over std::mt19937_64,
// one engine per row keyed by derive_seed(seed, row).

void SynthSpec::validate() const {
    if (d == 0 || k == 0 || k > d) {
        std::ostringstream msg;
        msg << "synth: need 1 <= k <= d (got k=" << k << ", d=" << d << ")";
        throw UsageError(msg.str());
    }
    if (n == 0) {
        throw UsageError("synth: n must be >= 1");
    }
}

namespace {

void draw_normal_row(std::span<double> row, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (double& x : row) {
        x = normal(rng);
    }
}

}  // namespace

Matrix generate_basis(std::size_t d, std::size_t k, std::uint64_t seed) {
    SynthSpec{d, k, 1, seed}.validate();
    Matrix v(k, d);
    std::vector<int> attempts(k, 0);
    for (std::size_t i = 0; i < k; ++i) {
        draw_normal_row(v.row(i), derive_seed(seed, i));
    }
    for (;;) {
        try {
            return gram_schmidt(v);
        } catch (const RankDeficiencyError& e) {
            const std::size_t row = e.row();
            if (++attempts[row] > kMaxBasisRedraws) {
                std::ostringstream msg;
                msg << "generate_basis: row " << row << " stayed degenerate after " << kMaxBasisRedraws
                    << " redraws";
                throw DataError(msg.str());
            }
            draw_normal_row(v.row(row), derive_seed(derive_seed(seed, row), static_cast<std::uint64_t>(attempts[row])));
        }
    }
}

Dataset generate_dataset(const Matrix& basis, std::size_t n, std::uint64_t seed, unsigned threads) {
    if (n == 0) {
        throw UsageError("generate_dataset: n must be >= 1");
    }
    if (basis.rows() == 0 || basis.cols() == 0) {
        throw UsageError("generate_dataset: empty basis");
    }
    const std::size_t k = basis.rows();
    const std::size_t d = basis.cols();
    Matrix x(n, d);
    parallel_for(n, threads, [&](std::size_t i) {
        std::vector<double> c(k);
        draw_normal_row(c, derive_seed(seed, i));
        auto row = x.row(i);
        for (std::size_t j = 0; j < k; ++j) {
            const auto u = basis.row(j);
            for (std::size_t t = 0; t < d; ++t) {
                row[t] += c[j] * u[t];
            }
        }
    });
    return Dataset(std::move(x));
}

Dataset generate_query_set(const Matrix& basis, std::size_t n_queries, std::uint64_t seed, unsigned threads) {
    return generate_dataset(basis, n_queries, seed, threads);
}

Dataset generate(const SynthSpec& spec, unsigned threads) {
    spec.validate();
    const Matrix basis = generate_basis(spec.d, spec.k, derive_seed(spec.seed, "basis"));
    return generate_dataset(basis, spec.n, derive_seed(spec.seed, "data"), threads);
}

}  // namespace hnswlab::synth
