#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "matrix.hpp"
#include "rational.hpp"

namespace polyuniq {

/** Reduced row echelon form together with its pivot columns. */
struct Echelon
{
    RationalMatrix rref;
    std::vector<std::size_t> pivots;

    std::size_t rank() const { return pivots.size(); }
};

namespace detail {

inline Integer lcm_of_denominators(const Vec<Rational>& row)
{
    Integer l = 1;
    for (const auto& q : row) {
        Integer d = boost::multiprecision::denominator(q);
        l = boost::multiprecision::lcm(l, d);
    }
    return l;
}

/**
 * Bareiss fraction-free forward elimination on an integer matrix.
 *
 * Every intermediate entry is a minor of the input, so the divisions by the
 * previous pivot are exact and numerators stay polynomially bounded.
 * Returns the pivot columns; `a` is left in (unnormalized) row echelon form.
 */
inline std::vector<std::size_t> bareiss_forward(std::vector<std::vector<Integer>>& a, std::size_t cols)
{
    const std::size_t rows = a.size();
    std::vector<std::size_t> pivots;
    Integer prev = 1;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = r;
        while (piv < rows && a[piv][c] == 0) ++piv;
        if (piv == rows) continue;
        if (piv != r) std::swap(a[piv], a[r]);
        for (std::size_t i = r + 1; i < rows; ++i) {
            for (std::size_t j = c + 1; j < cols; ++j) {
                a[i][j] = (a[r][c] * a[i][j] - a[i][c] * a[r][j]) / prev;
            }
            a[i][c] = 0;
        }
        // Rows above r are untouched; entries left of c in rows below are zero.
        prev = a[r][c];
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

} // namespace detail

/**
 * Exact reduced row echelon form. Rows are scaled to integers, reduced with
 * Bareiss elimination, then normalized and back-substituted over the
 * rationals.
 */
inline Echelon echelon(const RationalMatrix& m)
{
    const std::size_t rows = m.rows();
    const std::size_t cols = m.cols();
    std::vector<std::vector<Integer>> a(rows, std::vector<Integer>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        Vec<Rational> row = m.row(i);
        Integer l = detail::lcm_of_denominators(row);
        for (std::size_t j = 0; j < cols; ++j) {
            Rational scaled = row[j] * Rational(l);
            a[i][j] = boost::multiprecision::numerator(scaled);
        }
    }
    Echelon e;
    e.pivots = detail::bareiss_forward(a, cols);
    const std::size_t rank = e.pivots.size();

    e.rref = RationalMatrix(rank, cols);
    for (std::size_t r = 0; r < rank; ++r) {
        Rational lead(a[r][e.pivots[r]]);
        for (std::size_t j = 0; j < cols; ++j) e.rref(r, j) = Rational(a[r][j]) / lead;
    }
    for (std::size_t r = rank; r-- > 0;) {
        const std::size_t pc = e.pivots[r];
        for (std::size_t i = 0; i < r; ++i) {
            Rational f = e.rref(i, pc);
            if (f == 0) continue;
            for (std::size_t j = pc; j < cols; ++j) e.rref(i, j) -= f * e.rref(r, j);
        }
    }
    return e;
}

inline std::size_t rank(const RationalMatrix& m)
{
    return echelon(m).rank();
}

/**
 * Basis of the null space, one vector per free column, with a 1 in that
 * free coordinate. Empty iff the matrix has full column rank.
 */
inline std::vector<Vec<Rational>> kernel_basis(const RationalMatrix& m)
{
    Echelon e = echelon(m);
    const std::size_t cols = m.cols();
    std::vector<bool> is_pivot(cols, false);
    for (auto c : e.pivots) is_pivot[c] = true;

    std::vector<Vec<Rational>> basis;
    for (std::size_t free = 0; free < cols; ++free) {
        if (is_pivot[free]) continue;
        Vec<Rational> v(cols, Rational(0));
        v[free] = 1;
        for (std::size_t r = 0; r < e.rank(); ++r) v[e.pivots[r]] = -e.rref(r, free);
        basis.push_back(std::move(v));
    }
    return basis;
}

/**
 * One solution of A x = b, or nullopt when b is not in col(A).
 * Free variables are set to zero.
 */
inline std::optional<Vec<Rational>> solve_exact(const RationalMatrix& a, const Vec<Rational>& b)
{
    if (b.size() != a.rows()) throw std::invalid_argument("solve_exact: right-hand side length mismatch");
    RationalMatrix aug(a.rows(), a.cols() + 1);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) aug(i, j) = a(i, j);
        aug(i, a.cols()) = b[i];
    }
    Echelon e = echelon(aug);
    if (!e.pivots.empty() && e.pivots.back() == a.cols()) return std::nullopt;
    Vec<Rational> x(a.cols(), Rational(0));
    for (std::size_t r = 0; r < e.rank(); ++r) x[e.pivots[r]] = e.rref(r, a.cols());
    return x;
}

/** z with M' z = v when v lies in row(M). */
inline std::optional<Vec<Rational>> rowspace_membership(const RationalMatrix& m, const Vec<Rational>& v)
{
    if (v.size() != m.cols()) throw std::invalid_argument("rowspace_membership: vector length mismatch");
    return solve_exact(m.transpose(), v);
}

} // namespace polyuniq
