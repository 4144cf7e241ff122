#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hnswlab/error.hpp"

namespace hnswlab {

/// Distance kinds. Every kind is arranged so that smaller means more similar.
enum class Metric {
    L2,            // Euclidean distance
    Cosine,        // 1 - cos(a, b); undefined for zero vectors
    InnerProduct,  // -<a, b>
};

std::string_view to_string(Metric metric) noexcept;
Metric parse_metric(std::string_view name);

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
double distance(std::span<const double> a, std::span<const double> b, Metric metric);

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    std::span<const double> row(std::size_t i) const noexcept {
        return {data_.data() + i * cols_, cols_};
    }
    std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }

    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }

    const std::vector<double>& data() const noexcept { return data_; }
    std::vector<double>& data() noexcept { return data_; }

    bool all_finite() const noexcept;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Thrown by gram_schmidt when a row is (numerically) in the span of the
/// rows before it.
class RankDeficiencyError : public DataError {
public:
    RankDeficiencyError(std::size_t row, double residual_norm);
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

/// Residual norm below which a Gram-Schmidt row counts as dependent.
inline constexpr double kRankTolerance = 1e-10;

/// Orthonormalises the rows of `v` (k x d, k <= d). Row i of the result is
/// w_i / |w_i| with w_i = v_i minus its projections on u_1..u_{i-1}; the
/// projections are applied in modified form with one re-orthogonalisation
/// pass.
Matrix gram_schmidt(const Matrix& v);

}  // namespace hnswlab
