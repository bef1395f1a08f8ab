/**
 * Small dense linear algebra over `Rational` and `double`.
 *
 * Exact mode uses fraction-preserving row reduction throughout. Float mode
 * uses Eigen: LU for square solves and singular-value thresholding for rank
 * and null-space computations (relative cutoff against the largest singular
 * value).
 */
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "occlab/numeric.hpp"

namespace occlab {

template <Scalar T>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<T> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const T> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    void swap_rows(std::size_t a, std::size_t b);

    /// Returns a copy with the listed columns only, in the given order.
    Matrix select_columns(std::span<const std::size_t> columns) const;

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

/// Reduced row echelon form plus the pivot column of each nonzero row.
template <Scalar T>
struct Echelon {
    Matrix<T> reduced;
    std::vector<std::size_t> pivots;
};

/**
 * Gauss-Jordan elimination. Entries with |x| <= pivot_tol are treated as
 * zero (pass 0 in exact mode). Pivoting picks the largest magnitude entry
 * in float mode and the first nonzero entry in exact mode.
 */
template <Scalar T>
Echelon<T> row_reduce(Matrix<T> m, const T& pivot_tol);

/// Rank: exact row reduction, or singular values above rank_cutoff * max.
template <Scalar T>
std::size_t rank(const Matrix<T>& m, double rank_cutoff);

/**
 * Basis of {x : m x = 0}. In exact mode the basis is the canonical RREF
 * basis (one free variable set to 1, others 0); in float mode it is the
 * orthonormal set of right singular vectors beyond the numerical rank.
 */
template <Scalar T>
std::vector<std::vector<T>> null_space(const Matrix<T>& m, double rank_cutoff);

/// Unique solution of a square system, or nullopt when singular.
template <Scalar T>
std::optional<std::vector<T>> solve_square(const Matrix<T>& a, std::span<const T> b);

/// Any solution of a x = b (free variables at 0), or nullopt if inconsistent.
template <Scalar T>
std::optional<std::vector<T>> particular_solution(const Matrix<T>& a, std::span<const T> b,
                                                  const T& tol);

template <Scalar T>
T dot(std::span<const T> a, std::span<const T> b);

template <Scalar T>
T max_abs(std::span<const T> values);

}  // namespace occlab
