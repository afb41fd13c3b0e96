#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

#include "rational.hpp"

namespace polyuniq {

/**
 * Dense row-major matrix over a field T (Rational or double).
 *
 * Small by design: the exact routines work at desk scale, and the float
 * solvers never exceed a few thousand entries.
 */
template <class T>
class Matrix
{
public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols, T fill = T(0))
        : rows_(rows), cols_(cols), data_(rows * cols, fill)
    {
    }

    Matrix(std::initializer_list<std::initializer_list<T>> rows)
    {
        rows_ = rows.size();
        cols_ = rows_ ? rows.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_) throw std::invalid_argument("ragged matrix literal");
            data_.insert(data_.end(), r.begin(), r.end());
        }
    }

    static Matrix from_rows(const std::vector<Vec<T>>& rows)
    {
        if (rows.empty()) return Matrix();
        Matrix m(rows.size(), rows.front().size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != m.cols_) throw std::invalid_argument("ragged matrix rows");
            for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
        }
        return m;
    }

    static Matrix from_columns(const std::vector<Vec<T>>& cols, std::size_t rows)
    {
        Matrix m(rows, cols.size());
        for (std::size_t j = 0; j < cols.size(); ++j) {
            if (cols[j].size() != rows) throw std::invalid_argument("column length mismatch");
            for (std::size_t i = 0; i < rows; ++i) m(i, j) = cols[j][i];
        }
        return m;
    }

    static Matrix identity(std::size_t n)
    {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    T& operator()(std::size_t i, std::size_t j)
    {
        assert(i < rows_ && j < cols_);
        return data_[i * cols_ + j];
    }
    const T& operator()(std::size_t i, std::size_t j) const
    {
        assert(i < rows_ && j < cols_);
        return data_[i * cols_ + j];
    }

    Vec<T> row(std::size_t i) const
    {
        return Vec<T>(data_.begin() + i * cols_, data_.begin() + (i + 1) * cols_);
    }

    Vec<T> col(std::size_t j) const
    {
        Vec<T> out(rows_);
        for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
        return out;
    }

    Matrix transpose() const
    {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    Matrix select_columns(const std::vector<std::size_t>& idx) const
    {
        Matrix out(rows_, idx.size());
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < idx.size(); ++k) out(i, k) = (*this)(i, idx[k]);
        return out;
    }

    friend bool operator==(const Matrix& a, const Matrix& b)
    {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using RationalMatrix = Matrix<Rational>;

template <class T>
Vec<T> operator*(const Matrix<T>& a, const Vec<T>& x)
{
    if (a.cols() != x.size()) throw std::invalid_argument("matrix-vector dimension mismatch");
    Vec<T> out(a.rows(), T(0));
    for (std::size_t i = 0; i < a.rows(); ++i) {
        T acc(0);
        for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * x[j];
        out[i] = acc;
    }
    return out;
}

template <class T>
Matrix<T> operator*(const Matrix<T>& a, const Matrix<T>& b)
{
    if (a.cols() != b.rows()) throw std::invalid_argument("matrix-matrix dimension mismatch");
    Matrix<T> out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            if (a(i, k) == T(0)) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += a(i, k) * b(k, j);
        }
    return out;
}

/** x' A, i.e. A' x without forming the transpose. */
template <class T>
Vec<T> transpose_times(const Matrix<T>& a, const Vec<T>& x)
{
    if (a.rows() != x.size()) throw std::invalid_argument("transpose-vector dimension mismatch");
    Vec<T> out(a.cols(), T(0));
    for (std::size_t i = 0; i < a.rows(); ++i) {
        if (x[i] == T(0)) continue;
        for (std::size_t j = 0; j < a.cols(); ++j) out[j] += a(i, j) * x[i];
    }
    return out;
}

template <class T>
T dot(const Vec<T>& a, const Vec<T>& b)
{
    if (a.size() != b.size()) throw std::invalid_argument("dot dimension mismatch");
    T acc(0);
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

template <class T>
Vec<T> operator+(Vec<T> a, const Vec<T>& b)
{
    if (a.size() != b.size()) throw std::invalid_argument("vector dimension mismatch");
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
}

template <class T>
Vec<T> operator-(Vec<T> a, const Vec<T>& b)
{
    if (a.size() != b.size()) throw std::invalid_argument("vector dimension mismatch");
    for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
    return a;
}

template <class T>
Vec<T> scaled(Vec<T> a, const T& c)
{
    for (auto& x : a) x *= c;
    return a;
}

template <class T>
bool is_zero(const Vec<T>& a)
{
    for (const auto& x : a)
        if (x != T(0)) return false;
    return true;
}

inline Matrix<double> to_double(const RationalMatrix& m)
{
    Matrix<double> out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = to_double(m(i, j));
    return out;
}

template <class T>
T abs_value(const T& x)
{
    return x < T(0) ? T(-x) : x;
}

template <class T>
T max_abs(const Vec<T>& v)
{
    T m(0);
    for (const auto& x : v) {
        T a = abs_value(x);
        if (a > m) m = a;
    }
    return m;
}

/**
 * Solve a square system by Gaussian elimination with largest-magnitude
 * pivoting. Works over Rational (exact) and double. Returns false when the
 * matrix is singular (exactly, or below `singular_tol` for doubles).
 */
template <class T>
bool solve_square(Matrix<T> a, Vec<T> b, Vec<T>& x, double singular_tol = 0.0)
{
    const std::size_t n = a.rows();
    if (a.cols() != n || b.size() != n) throw std::invalid_argument("solve_square dimension mismatch");
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        T best = abs_value(a(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            T v = abs_value(a(i, k));
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        if (best == T(0)) return false;
        if constexpr (std::is_floating_point_v<T>) {
            if (best <= singular_tol) return false;
        }
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            std::swap(b[k], b[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            if (a(i, k) == T(0)) continue;
            T f = a(i, k) / a(k, k);
            for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
            b[i] -= f * b[k];
        }
    }
    x.assign(n, T(0));
    for (std::size_t k = n; k-- > 0;) {
        T acc = b[k];
        for (std::size_t j = k + 1; j < n; ++j) acc -= a(k, j) * x[j];
        x[k] = acc / a(k, k);
    }
    return true;
}

} // namespace polyuniq
