#include "hnswlab/vecmath.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hnswlab {

namespace {

void require_same_dim(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        std::ostringstream msg;
        msg << "dimension mismatch: " << a.size() << " vs " << b.size();
        throw UsageError(msg.str());
    }
}

// Four independent accumulators let the compiler vectorise the reduction
// without reassociation flags; the summation order is fixed per length.
double dot_kernel(const double* a, const double* b, std::size_t n) noexcept {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    for (; i < n; ++i) {
        s0 += a[i] * b[i];
    }
    return (s0 + s1) + (s2 + s3);
}

double squared_l2_kernel(const double* a, const double* b, std::size_t n) noexcept {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const double d0 = a[i] - b[i];
        const double d1 = a[i + 1] - b[i + 1];
        const double d2 = a[i + 2] - b[i + 2];
        const double d3 = a[i + 3] - b[i + 3];
        s0 += d0 * d0;
        s1 += d1 * d1;
        s2 += d2 * d2;
        s3 += d3 * d3;
    }
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        s0 += d * d;
    }
    return (s0 + s1) + (s2 + s3);
}

}  // namespace

std::string_view to_string(Metric metric) noexcept {
    switch (metric) {
        case Metric::L2:
            return "l2";
        case Metric::Cosine:
            return "cosine";
        case Metric::InnerProduct:
            return "ip";
    }
    return "unknown";
}

Metric parse_metric(std::string_view name) {
    if (name == "l2" || name == "L2") return Metric::L2;
    if (name == "cosine" || name == "COSINE") return Metric::Cosine;
    if (name == "ip" || name == "inner_product" || name == "INNER_PRODUCT") return Metric::InnerProduct;
    throw UsageError("unknown metric '" + std::string(name) + "' (expected l2, cosine or ip)");
}

double dot(std::span<const double> a, std::span<const double> b) {
    require_same_dim(a, b);
    return dot_kernel(a.data(), b.data(), a.size());
}

double norm(std::span<const double> a) { return std::sqrt(dot_kernel(a.data(), a.data(), a.size())); }

double distance(std::span<const double> a, std::span<const double> b, Metric metric) {
    require_same_dim(a, b);
    switch (metric) {
        case Metric::L2:
            return std::sqrt(squared_l2_kernel(a.data(), b.data(), a.size()));
        case Metric::Cosine: {
            const double na = norm(a);
            const double nb = norm(b);
            if (na == 0.0 || nb == 0.0) {
                throw DataError("cosine distance is undefined for a zero vector");
            }
            const double d = 1.0 - dot_kernel(a.data(), b.data(), a.size()) / (na * nb);
            return std::clamp(d, 0.0, 2.0);
        }
        case Metric::InnerProduct:
            return -dot_kernel(a.data(), b.data(), a.size());
    }
    throw UsageError("unknown metric");
}

Matrix::Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows * cols) {
        std::ostringstream msg;
        msg << "matrix payload has " << data_.size() << " values, expected " << rows << "x" << cols;
        throw UsageError(msg.str());
    }
}

bool Matrix::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

RankDeficiencyError::RankDeficiencyError(std::size_t row, double residual_norm)
    : DataError([&] {
          std::ostringstream msg;
          msg << "gram_schmidt: row " << row << " is linearly dependent on earlier rows (residual norm "
              << residual_norm << ")";
          return msg.str();
      }()),
      row_(row) {}

Matrix gram_schmidt(const Matrix& v) {
    const std::size_t k = v.rows();
    const std::size_t d = v.cols();
    if (k > d) {
        std::ostringstream msg;
        msg << "gram_schmidt: " << k << " vectors cannot be orthonormal in R^" << d;
        throw UsageError(msg.str());
    }
    if (!v.all_finite()) {
        throw DataError("gram_schmidt: input contains non-finite values");
    }

    Matrix u(k, d);
    std::vector<double> w(d);
    for (std::size_t i = 0; i < k; ++i) {
        std::copy(v.row(i).begin(), v.row(i).end(), w.begin());
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t j = 0; j < i; ++j) {
                const auto uj = u.row(j);
                // u_j is unit length, so <u_j, u_j> drops out of the projection.
                const double c = dot_kernel(w.data(), uj.data(), d);
                for (std::size_t t = 0; t < d; ++t) {
                    w[t] -= c * uj[t];
                }
            }
        }
        const double wn = std::sqrt(dot_kernel(w.data(), w.data(), d));
        if (!(wn >= kRankTolerance)) {
            throw RankDeficiencyError(i, wn);
        }
        auto ui = u.row(i);
        for (std::size_t t = 0; t < d; ++t) {
            ui[t] = w[t] / wn;
        }
    }
    return u;
}

}  // namespace hnswlab
