#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "hsa/field.hpp"

namespace hsa {

/// Dense row-major matrix over a prime field. All elimination-based
/// operations (rank, inverse, null space, solve) are exact.
///
/// Zero-row and zero-column shapes are legal everywhere; they show up
/// naturally as empty constraint stacks and empty key blocks.
class Matrix {
public:
    Matrix(FieldCtx f, std::size_t rows, std::size_t cols)
        : f_(f), rows_(rows), cols_(cols), e_(rows * cols, 0) {}

    static Matrix identity(FieldCtx f, std::size_t n);
    /// Entries reduced from signed integers (negatives wrap mod q).
    static Matrix from_ints(FieldCtx f, std::initializer_list<std::initializer_list<long long>> rows);
    static Matrix uniform_random(FieldCtx f, std::size_t rows, std::size_t cols, Rng& rng);
    /// Resamples until rank == min(rows, cols); throws AttemptsExhausted.
    static Matrix random_full_rank(FieldCtx f, std::size_t rows, std::size_t cols, Rng& rng,
                                   int max_attempts = 32);

    const FieldCtx& field() const noexcept { return f_; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    std::uint64_t operator()(std::size_t r, std::size_t c) const { return e_[r * cols_ + c]; }
    std::uint64_t& operator()(std::size_t r, std::size_t c) { return e_[r * cols_ + c]; }
    std::uint64_t at(std::size_t r, std::size_t c) const;

    Matrix mul(const Matrix& rhs) const;
    Matrix add(const Matrix& rhs) const;
    Matrix sub(const Matrix& rhs) const;
    Matrix scaled(std::uint64_t s) const;
    Matrix transpose() const;

    /// Rows [r0, r1) as a new matrix.
    Matrix row_slice(std::size_t r0, std::size_t r1) const;
    Matrix col_slice(std::size_t c0, std::size_t c1) const;
    Matrix submatrix(const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) const;
    Matrix select_rows(const std::vector<std::size_t>& rows) const;
    Matrix select_cols(const std::vector<std::size_t>& cols) const;
    Matrix column(std::size_t c) const { return col_slice(c, c + 1); }

    std::size_t rank() const;
    /// Throws Singular when not square or not invertible.
    Matrix inverse() const;
    /// Basis of the right null space as columns; width cols() - rank().
    /// Deterministic: free columns in ascending order, pivot entries from RREF.
    Matrix null_space_basis() const;
    /// One exact solution of this * x = b (b may have several columns);
    /// free variables pinned to zero, so the result is canonical.
    /// Throws Inconsistent when no solution exists.
    Matrix solve_particular(const Matrix& b) const;

    bool is_zero() const noexcept;
    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.f_ == b.f_ && a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.e_ == b.e_;
    }

private:
    void require_same_field(const Matrix& rhs) const;

    FieldCtx f_;
    std::size_t rows_, cols_;
    std::vector<std::uint64_t> e_;
};

Matrix vstack(const std::vector<Matrix>& parts);
Matrix hstack(const std::vector<Matrix>& parts);

} // namespace hsa
