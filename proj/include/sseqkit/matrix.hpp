#pragma once

// Dense matrices over an exact scalar ring and row reduction over fields.
//
// Scalars carry their ring (field descriptor or p-adic precision), so a
// matrix remembers a zero element to create new entries from.

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sseqkit/arith.hpp"
#include "sseqkit/galois_field.hpp"
#include "sseqkit/padic.hpp"

namespace sseqkit {

template <class S>
using Vec = std::vector<S>;

template <class S>
class Matrix {
public:
    Matrix(std::size_t rows, std::size_t cols, const S& zero)
        : rows_(rows), cols_(cols), data_(rows * cols, zero.zero_like()), zero_(zero.zero_like())
    {
    }

    static Matrix identity(std::size_t n, const S& like)
    {
        Matrix m(n, n, like);
        for (std::size_t i = 0; i < n; ++i)
            m(i, i) = like.one_like();
        return m;
    }

    static Matrix from_rows(const std::vector<Vec<S>>& rows, std::size_t cols, const S& like)
    {
        Matrix m(rows.size(), cols, like);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != cols)
                throw Error("Matrix::from_rows: ragged rows");
            for (std::size_t j = 0; j < cols; ++j)
                m(i, j) = rows[i][j];
        }
        return m;
    }

    /// Matrix whose columns are the given vectors (each of length `rows`).
    static Matrix from_columns(const std::vector<Vec<S>>& columns, std::size_t rows, const S& like)
    {
        Matrix m(rows, columns.size(), like);
        for (std::size_t j = 0; j < columns.size(); ++j) {
            if (columns[j].size() != rows)
                throw Error("Matrix::from_columns: ragged columns");
            for (std::size_t i = 0; i < rows; ++i)
                m(i, j) = columns[j][i];
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const S& zero() const { return zero_; }

    S& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const S& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<S>& entries() const { return data_; }

    Vec<S> row(std::size_t i) const { return Vec<S>(data_.begin() + i * cols_, data_.begin() + (i + 1) * cols_); }
    Vec<S> column(std::size_t j) const
    {
        Vec<S> c;
        c.reserve(rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            c.push_back((*this)(i, j));
        return c;
    }

    Matrix operator*(const Matrix& o) const
    {
        if (cols_ != o.rows_)
            throw Error("Matrix product: dimension mismatch");
        Matrix out(rows_, o.cols_, zero_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                const S& a = (*this)(i, k);
                if (a.is_zero())
                    continue;
                for (std::size_t j = 0; j < o.cols_; ++j)
                    out(i, j) += a * o(k, j);
            }
        return out;
    }

    Vec<S> operator*(const Vec<S>& v) const
    {
        if (v.size() != cols_)
            throw Error("Matrix-vector product: dimension mismatch");
        Vec<S> out(rows_, zero_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                out[i] += (*this)(i, j) * v[j];
        return out;
    }

    Matrix operator+(const Matrix& o) const { return combine(o, false); }
    Matrix operator-(const Matrix& o) const { return combine(o, true); }

    Matrix transpose() const
    {
        Matrix t(cols_, rows_, zero_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                t(j, i) = (*this)(i, j);
        return t;
    }

    bool is_zero() const
    {
        for (const auto& x : data_)
            if (!x.is_zero())
                return false;
        return true;
    }

    bool operator==(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_; }

    /// True iff every entry lives in the same ring as zero().
    bool uniform_ring() const
    {
        for (const auto& x : data_)
            if (!same_ring(x, zero_))
                return false;
        return true;
    }

private:
    Matrix combine(const Matrix& o, bool subtract) const
    {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw Error("Matrix sum: dimension mismatch");
        Matrix out = *this;
        for (std::size_t i = 0; i < data_.size(); ++i)
            out.data_[i] = subtract ? data_[i] - o.data_[i] : data_[i] + o.data_[i];
        return out;
    }

    std::size_t rows_, cols_;
    std::vector<S> data_;
    S zero_;
};

template <class S>
bool is_zero_vector(const Vec<S>& v)
{
    for (const auto& x : v)
        if (!x.is_zero())
            return false;
    return true;
}

template <class S>
struct RowReduction {
    std::size_t rank = 0;
    std::vector<Vec<S>> kernel_basis;  // vectors v with M v = 0
    std::vector<Vec<S>> image_basis;   // pivot columns of M
    std::vector<std::size_t> pivot_columns;
};

/// Gauss-Jordan elimination over a field.
template <class S>
RowReduction<S> row_reduce(const Matrix<S>& m)
{
    if (!m.uniform_ring())
        throw Error("row_reduce: mixed scalar rings");
    Matrix<S> a = m;
    const std::size_t rows = a.rows(), cols = a.cols();
    RowReduction<S> out;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = r;
        while (piv < rows && a(piv, c).is_zero())
            ++piv;
        if (piv == rows)
            continue;
        if (piv != r)
            for (std::size_t j = 0; j < cols; ++j)
                std::swap(a(piv, j), a(r, j));
        S inv = a(r, c).inverse();
        for (std::size_t j = 0; j < cols; ++j)
            a(r, j) *= inv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || a(i, c).is_zero())
                continue;
            S f = a(i, c);
            for (std::size_t j = 0; j < cols; ++j)
                a(i, j) -= f * a(r, j);
        }
        out.pivot_columns.push_back(c);
        ++r;
    }
    out.rank = r;
    std::vector<bool> is_pivot(cols, false);
    for (auto c : out.pivot_columns)
        is_pivot[c] = true;
    for (std::size_t free_col = 0; free_col < cols; ++free_col) {
        if (is_pivot[free_col])
            continue;
        Vec<S> v(cols, m.zero());
        v[free_col] = m.zero().one_like();
        for (std::size_t i = 0; i < out.pivot_columns.size(); ++i)
            v[out.pivot_columns[i]] = -a(i, free_col);
        out.kernel_basis.push_back(std::move(v));
    }
    for (auto c : out.pivot_columns)
        out.image_basis.push_back(m.column(c));
    return out;
}

template <class S>
std::size_t rank(const Matrix<S>& m)
{
    return row_reduce(m).rank;
}

/*
 * Incrementally built echelon basis of a subspace of S^dim. Each stored row
 * carries a tag vector recording which combination of inserted vectors it
 * is; reducing a vector against the basis yields the matching combination
 * of tags. Inserting boundaries with zero tags and representatives with unit
 * tags gives coordinates in a quotient space.
 */
template <class S>
class Echelon {
public:
    Echelon(std::size_t dim, std::size_t tag_dim, const S& like) : dim_(dim), tag_dim_(tag_dim), zero_(like.zero_like())
    {
    }

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return rows_.size(); }

    struct Reduction {
        Vec<S> residual;
        Vec<S> tag;  // v - residual == sum tag_i * (inserted vector i)
    };

    Reduction reduce(Vec<S> v) const
    {
        if (v.size() != dim_)
            throw Error("Echelon::reduce: dimension mismatch");
        Vec<S> tag(tag_dim_, zero_);
        for (const auto& row : rows_) {
            const S& c = v[row.pivot];
            if (c.is_zero())
                continue;
            S f = c;
            for (std::size_t j = 0; j < dim_; ++j)
                if (!row.vec[j].is_zero())
                    v[j] -= f * row.vec[j];
            for (std::size_t j = 0; j < tag_dim_; ++j)
                if (!row.tag[j].is_zero())
                    tag[j] += f * row.tag[j];
        }
        return {std::move(v), std::move(tag)};
    }

    bool contains(const Vec<S>& v) const { return is_zero_vector(reduce(v).residual); }

    /// Insert v with the given tag; returns false (and stores nothing) if v is dependent.
    bool insert(const Vec<S>& v, Vec<S> tag)
    {
        if (tag.size() != tag_dim_)
            throw Error("Echelon::insert: tag dimension mismatch");
        auto red = reduce(v);
        std::size_t pivot = dim_;
        for (std::size_t j = 0; j < dim_; ++j)
            if (!red.residual[j].is_zero()) {
                pivot = j;
                break;
            }
        if (pivot == dim_)
            return false;
        for (std::size_t j = 0; j < tag_dim_; ++j)
            tag[j] -= red.tag[j];
        S inv = red.residual[pivot].inverse();
        for (auto& x : red.residual)
            x *= inv;
        for (auto& x : tag)
            x *= inv;
        // keep the basis fully reduced on pivots
        for (auto& row : rows_) {
            const S c = row.vec[pivot];
            if (c.is_zero())
                continue;
            for (std::size_t j = 0; j < dim_; ++j)
                row.vec[j] -= c * red.residual[j];
            for (std::size_t j = 0; j < tag_dim_; ++j)
                row.tag[j] -= c * tag[j];
        }
        rows_.push_back({pivot, std::move(red.residual), std::move(tag)});
        return true;
    }

    bool insert(const Vec<S>& v) { return insert(v, Vec<S>(tag_dim_, zero_)); }

private:
    struct Row {
        std::size_t pivot;
        Vec<S> vec;
        Vec<S> tag;
    };
    std::size_t dim_, tag_dim_;
    S zero_;
    std::vector<Row> rows_;
};

}  // namespace sseqkit
