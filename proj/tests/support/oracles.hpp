#pragma once

// Reference implementations used only to check the library. They follow the
// textbook definitions directly and share no code with it.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "hnswlab/dataset.hpp"

namespace hnswlab::oracle {

/// Eigenvalues of a symmetric matrix (row-major, n x n) by cyclic Jacobi
/// rotations, sorted descending.
inline std::vector<double> jacobi_eigenvalues(std::vector<double> a, std::size_t n) {
    auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0, diag = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            diag += at(i, i) * at(i, i);
            for (std::size_t j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
        }
        if (off <= 1e-30 * diag) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (apq == 0.0) continue;
                const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = at(k, p), akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = at(p, k), aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = std::max(0.0, at(i, i));
    std::sort(ev.rbegin(), ev.rend());
    return ev;
}

/// Smallest k whose leading covariance eigenvalues hold at least theta of the
/// total variance.
inline std::size_t pca_k(const Dataset& data, double theta) {
    const std::size_t n = data.size(), d = data.dim();
    std::vector<double> mean(d, 0.0);
    for (VectorId i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) mean[j] += data[i][j];
    }
    for (double& m : mean) m /= static_cast<double>(n);
    std::vector<double> cov(d * d, 0.0);
    for (VectorId r = 0; r < n; ++r) {
        for (std::size_t i = 0; i < d; ++i) {
            const double xi = data[r][i] - mean[i];
            for (std::size_t j = i; j < d; ++j) cov[i * d + j] += xi * (data[r][j] - mean[j]);
        }
    }
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < i; ++j) cov[i * d + j] = cov[j * d + i];
    }
    const auto ev = jacobi_eigenvalues(std::move(cov), d);
    const double total = std::accumulate(ev.begin(), ev.end(), 0.0);
    double running = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        running += ev[k];
        if (running / total >= theta) return k + 1;
    }
    return d;
}

/// Levina-Bickel MLE written straight from its definition, in long double:
/// (k - 1) / sum_{j=1}^{k-1} ln(T_k / T_j).
inline double lid_mle(std::span<const double> t) {
    const std::size_t k = t.size();
    long double sum = 0.0L;
    for (std::size_t j = 0; j + 1 < k; ++j) {
        sum += std::log(static_cast<long double>(t[k - 1]) / static_cast<long double>(t[j]));
    }
    return static_cast<double>(static_cast<long double>(k - 1) / sum);
}

}  // namespace hnswlab::oracle
