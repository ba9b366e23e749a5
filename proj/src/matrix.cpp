#include "hsa/matrix.hpp"

#include <string>

namespace hsa {

namespace {

std::string shape_str(const Matrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

// Row echelon form in place. Returns pivot column per eliminated row.
// When rref is set, pivots are normalized to 1 and cleared upward too.
std::vector<std::size_t> eliminate(const FieldCtx& f, std::vector<std::uint64_t>& e,
                                   std::size_t rows, std::size_t cols, std::size_t width,
                                   bool rref) {
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = r;
        while (piv < rows && e[piv * width + c] == 0) ++piv;
        if (piv == rows) continue;
        if (piv != r) {
            for (std::size_t j = 0; j < width; ++j)
                std::swap(e[r * width + j], e[piv * width + j]);
        }
        if (rref) {
            std::uint64_t iv = f.inv(e[r * width + c]);
            for (std::size_t j = 0; j < width; ++j) e[r * width + j] = f.mul(e[r * width + j], iv);
        }
        std::size_t lo = rref ? 0 : r + 1;
        for (std::size_t i = lo; i < rows; ++i) {
            if (i == r) continue;
            std::uint64_t v = e[i * width + c];
            if (v == 0) continue;
            std::uint64_t factor = rref ? v : f.div(v, e[r * width + c]);
            for (std::size_t j = c; j < width; ++j)
                e[i * width + j] = f.sub(e[i * width + j], f.mul(factor, e[r * width + j]));
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

} // namespace

Matrix Matrix::identity(FieldCtx f, std::size_t n) {
    Matrix m(f, n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

Matrix Matrix::from_ints(FieldCtx f, std::initializer_list<std::initializer_list<long long>> rows) {
    std::size_t nr = rows.size();
    std::size_t nc = nr == 0 ? 0 : rows.begin()->size();
    Matrix m(f, nr, nc);
    std::size_t r = 0;
    for (const auto& row : rows) {
        if (row.size() != nc) raise(Errc::DimensionMismatch, "ragged initializer rows");
        std::size_t c = 0;
        for (long long v : row) m(r, c++) = f.from_int(v);
        ++r;
    }
    return m;
}

Matrix Matrix::uniform_random(FieldCtx f, std::size_t rows, std::size_t cols, Rng& rng) {
    Matrix m(f, rows, cols);
    for (std::size_t i = 0; i < rows * cols; ++i) m.e_[i] = rng.field_element(f);
    return m;
}

Matrix Matrix::random_full_rank(FieldCtx f, std::size_t rows, std::size_t cols, Rng& rng,
                                int max_attempts) {
    std::size_t want = rows < cols ? rows : cols;
    for (int a = 0; a < max_attempts; ++a) {
        Matrix m = uniform_random(f, rows, cols, rng);
        if (m.rank() == want) return m;
    }
    raise(Errc::AttemptsExhausted, "no full-rank " + std::to_string(rows) + "x" +
                                       std::to_string(cols) + " sample in " +
                                       std::to_string(max_attempts) + " attempts");
}

std::uint64_t Matrix::at(std::size_t r, std::size_t c) const {
    if (r >= rows_ || c >= cols_)
        raise(Errc::IndexOutOfRange, "entry (" + std::to_string(r) + "," + std::to_string(c) +
                                         ") of a " + shape_str(*this) + " matrix");
    return e_[r * cols_ + c];
}

void Matrix::require_same_field(const Matrix& rhs) const {
    if (!(f_ == rhs.f_)) raise(Errc::FieldMismatch, "operands live in different fields");
}

Matrix Matrix::mul(const Matrix& rhs) const {
    require_same_field(rhs);
    if (cols_ != rhs.rows_)
        raise(Errc::DimensionMismatch, shape_str(*this) + " * " + shape_str(rhs));
    Matrix out(f_, rows_, rhs.cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t k = 0; k < cols_; ++k) {
            std::uint64_t v = e_[i * cols_ + k];
            if (v == 0) continue;
            for (std::size_t j = 0; j < rhs.cols_; ++j)
                out(i, j) = f_.add(out(i, j), f_.mul(v, rhs(k, j)));
        }
    }
    return out;
}

Matrix Matrix::add(const Matrix& rhs) const {
    require_same_field(rhs);
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
        raise(Errc::DimensionMismatch, shape_str(*this) + " + " + shape_str(rhs));
    Matrix out(f_, rows_, cols_);
    for (std::size_t i = 0; i < e_.size(); ++i) out.e_[i] = f_.add(e_[i], rhs.e_[i]);
    return out;
}

Matrix Matrix::sub(const Matrix& rhs) const {
    require_same_field(rhs);
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
        raise(Errc::DimensionMismatch, shape_str(*this) + " - " + shape_str(rhs));
    Matrix out(f_, rows_, cols_);
    for (std::size_t i = 0; i < e_.size(); ++i) out.e_[i] = f_.sub(e_[i], rhs.e_[i]);
    return out;
}

Matrix Matrix::scaled(std::uint64_t s) const {
    Matrix out(f_, rows_, cols_);
    for (std::size_t i = 0; i < e_.size(); ++i) out.e_[i] = f_.mul(e_[i], s);
    return out;
}

Matrix Matrix::transpose() const {
    Matrix out(f_, cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) out(j, i) = e_[i * cols_ + j];
    return out;
}

Matrix Matrix::row_slice(std::size_t r0, std::size_t r1) const {
    if (r0 > r1 || r1 > rows_) raise(Errc::IndexOutOfRange, "row slice of " + shape_str(*this));
    Matrix out(f_, r1 - r0, cols_);
    for (std::size_t i = r0; i < r1; ++i)
        for (std::size_t j = 0; j < cols_; ++j) out(i - r0, j) = e_[i * cols_ + j];
    return out;
}

Matrix Matrix::col_slice(std::size_t c0, std::size_t c1) const {
    if (c0 > c1 || c1 > cols_) raise(Errc::IndexOutOfRange, "column slice of " + shape_str(*this));
    Matrix out(f_, rows_, c1 - c0);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = c0; j < c1; ++j) out(i, j - c0) = e_[i * cols_ + j];
    return out;
}

Matrix Matrix::submatrix(const std::vector<std::size_t>& rows,
                         const std::vector<std::size_t>& cols) const {
    Matrix out(f_, rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] >= rows_) raise(Errc::IndexOutOfRange, "row " + std::to_string(rows[i]));
        for (std::size_t j = 0; j < cols.size(); ++j) {
            if (cols[j] >= cols_) raise(Errc::IndexOutOfRange, "column " + std::to_string(cols[j]));
            out(i, j) = e_[rows[i] * cols_ + cols[j]];
        }
    }
    return out;
}

Matrix Matrix::select_rows(const std::vector<std::size_t>& rows) const {
    std::vector<std::size_t> all_cols(cols_);
    for (std::size_t j = 0; j < cols_; ++j) all_cols[j] = j;
    return submatrix(rows, all_cols);
}

Matrix Matrix::select_cols(const std::vector<std::size_t>& cols) const {
    std::vector<std::size_t> all_rows(rows_);
    for (std::size_t i = 0; i < rows_; ++i) all_rows[i] = i;
    return submatrix(all_rows, cols);
}

std::size_t Matrix::rank() const {
    std::vector<std::uint64_t> work = e_;
    return eliminate(f_, work, rows_, cols_, cols_, false).size();
}

Matrix Matrix::inverse() const {
    if (rows_ != cols_) raise(Errc::Singular, "inverse of non-square " + shape_str(*this));
    std::size_t n = rows_;
    std::vector<std::uint64_t> aug(n * 2 * n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) aug[i * 2 * n + j] = e_[i * n + j];
        aug[i * 2 * n + n + i] = 1;
    }
    auto pivots = eliminate(f_, aug, n, n, 2 * n, true);
    if (pivots.size() != n) raise(Errc::Singular, shape_str(*this) + " matrix is singular");
    Matrix out(f_, n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out(i, j) = aug[i * 2 * n + n + j];
    return out;
}

Matrix Matrix::null_space_basis() const {
    std::vector<std::uint64_t> work = e_;
    auto pivots = eliminate(f_, work, rows_, cols_, cols_, true);
    std::vector<bool> is_pivot(cols_, false);
    for (std::size_t c : pivots) is_pivot[c] = true;
    std::vector<std::size_t> free_cols;
    for (std::size_t c = 0; c < cols_; ++c)
        if (!is_pivot[c]) free_cols.push_back(c);
    Matrix basis(f_, cols_, free_cols.size());
    for (std::size_t k = 0; k < free_cols.size(); ++k) {
        std::size_t fc = free_cols[k];
        basis(fc, k) = 1;
        for (std::size_t r = 0; r < pivots.size(); ++r)
            basis(pivots[r], k) = f_.neg(work[r * cols_ + fc]);
    }
    return basis;
}

Matrix Matrix::solve_particular(const Matrix& b) const {
    require_same_field(b);
    if (b.rows_ != rows_)
        raise(Errc::DimensionMismatch, "solve " + shape_str(*this) + " with rhs " + shape_str(b));
    std::size_t width = cols_ + b.cols_;
    std::vector<std::uint64_t> aug(rows_ * width, 0);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) aug[i * width + j] = e_[i * cols_ + j];
        for (std::size_t j = 0; j < b.cols_; ++j) aug[i * width + cols_ + j] = b(i, j);
    }
    auto pivots = eliminate(f_, aug, rows_, cols_, width, true);
    for (std::size_t i = pivots.size(); i < rows_; ++i)
        for (std::size_t j = 0; j < b.cols_; ++j)
            if (aug[i * width + cols_ + j] != 0)
                raise(Errc::Inconsistent, "no solution: rhs outside column space");
    Matrix x(f_, cols_, b.cols_);
    for (std::size_t r = 0; r < pivots.size(); ++r)
        for (std::size_t j = 0; j < b.cols_; ++j) x(pivots[r], j) = aug[r * width + cols_ + j];
    return x;
}

bool Matrix::is_zero() const noexcept {
    for (std::uint64_t v : e_)
        if (v != 0) return false;
    return true;
}

Matrix vstack(const std::vector<Matrix>& parts) {
    if (parts.empty()) raise(Errc::DimensionMismatch, "vstack of nothing");
    std::size_t rows = 0;
    for (const Matrix& p : parts) {
        if (!(p.field() == parts.front().field()))
            raise(Errc::FieldMismatch, "vstack across fields");
        if (p.cols() != parts.front().cols())
            raise(Errc::DimensionMismatch, "vstack with mismatched widths");
        rows += p.rows();
    }
    Matrix out(parts.front().field(), rows, parts.front().cols());
    std::size_t r = 0;
    for (const Matrix& p : parts) {
        for (std::size_t i = 0; i < p.rows(); ++i, ++r)
            for (std::size_t j = 0; j < p.cols(); ++j) out(r, j) = p(i, j);
    }
    return out;
}

Matrix hstack(const std::vector<Matrix>& parts) {
    if (parts.empty()) raise(Errc::DimensionMismatch, "hstack of nothing");
    std::size_t cols = 0;
    for (const Matrix& p : parts) {
        if (!(p.field() == parts.front().field()))
            raise(Errc::FieldMismatch, "hstack across fields");
        if (p.rows() != parts.front().rows())
            raise(Errc::DimensionMismatch, "hstack with mismatched heights");
        cols += p.cols();
    }
    Matrix out(parts.front().field(), parts.front().rows(), cols);
    std::size_t c = 0;
    for (const Matrix& p : parts) {
        for (std::size_t j = 0; j < p.cols(); ++j, ++c)
            for (std::size_t i = 0; i < p.rows(); ++i) out(i, c) = p(i, j);
    }
    return out;
}

} // namespace hsa
