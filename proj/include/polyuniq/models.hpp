#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "matrix.hpp"
#include "rational.hpp"

namespace polyuniq {

/** Entries in {-1, 0, 1}; the sign pattern of a LASSO or basis pursuit solution. */
using SignVector = std::vector<int>;

/**
 * Integer vector recording signs and the ordered cluster structure of |x|:
 * zero stays zero, equal magnitudes share a level, larger magnitudes get
 * strictly larger levels, and the levels 1..max are all used.
 */
using SlopeModel = std::vector<int>;

inline int sup_level(const std::vector<int>& m)
{
    int level = 0;
    for (int v : m) level = std::max(level, std::abs(v));
    return level;
}

inline std::size_t support_size(const std::vector<int>& m)
{
    return static_cast<std::size_t>(std::count_if(m.begin(), m.end(), [](int v) { return v != 0; }));
}

inline bool is_sign_vector(const std::vector<int>& s)
{
    return std::all_of(s.begin(), s.end(), [](int v) { return v >= -1 && v <= 1; });
}

inline bool is_slope_model(const SlopeModel& m)
{
    const int top = sup_level(m);
    std::vector<bool> used(static_cast<std::size_t>(top) + 1, false);
    for (int v : m) used[static_cast<std::size_t>(std::abs(v))] = true;
    for (int l = 1; l <= top; ++l)
        if (!used[static_cast<std::size_t>(l)]) return false;
    return true;
}

/**
 * SLOPE model of x. With `tol` > 0 (floating point input) magnitudes within
 * `tol` of each other share a level and magnitudes at most `tol` count as
 * zero; with tol = 0 the comparison is exact.
 */
template <class T>
SlopeModel mdl(const Vec<T>& x, const T& tol = T(0))
{
    const std::size_t p = x.size();
    std::vector<std::size_t> order(p);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return abs_value(x[a]) < abs_value(x[b]); });
    SlopeModel m(p, 0);
    int level = 0;
    T anchor(0);
    for (std::size_t k = 0; k < p; ++k) {
        const std::size_t j = order[k];
        T a = abs_value(x[j]);
        if (a <= tol) continue;
        if (level == 0 || a - anchor > tol) {
            ++level;
            anchor = a;
        }
        m[j] = x[j] < T(0) ? -level : level;
    }
    return m;
}

template <class T>
SignVector sign_vector(const Vec<T>& x, const T& tol = T(0))
{
    SignVector s(x.size(), 0);
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (abs_value(x[j]) <= tol) continue;
        s[j] = x[j] < T(0) ? -1 : 1;
    }
    return s;
}

inline Vec<Rational> to_rational(const std::vector<int>& m)
{
    Vec<Rational> out;
    out.reserve(m.size());
    for (int v : m) out.push_back(Rational(v));
    return out;
}

inline Vec<double> to_double_vec(const std::vector<int>& m)
{
    return Vec<double>(m.begin(), m.end());
}

inline std::string format_pattern(const std::vector<int>& m)
{
    std::string s = "(";
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(m[i]);
    }
    return s + ")";
}

/**
 * Number of SLOPE models in dimension p: sum over support size k of
 * C(p,k) * 2^k * (ordered set partitions of k).
 */
inline std::size_t count_models(std::size_t p)
{
    std::vector<std::vector<std::size_t>> binom(p + 1, std::vector<std::size_t>(p + 1, 0));
    for (std::size_t n = 0; n <= p; ++n) {
        binom[n][0] = 1;
        for (std::size_t k = 1; k <= n; ++k) binom[n][k] = binom[n - 1][k - 1] + (k <= n - 1 ? binom[n - 1][k] : 0);
    }
    std::vector<std::size_t> fubini(p + 1, 0);
    fubini[0] = 1;
    for (std::size_t n = 1; n <= p; ++n)
        for (std::size_t k = 1; k <= n; ++k) fubini[n] += binom[n][k] * fubini[n - k];
    std::size_t total = 0;
    for (std::size_t k = 0; k <= p; ++k) total += binom[p][k] * (std::size_t{1} << k) * fubini[k];
    return total;
}

/**
 * All SLOPE models in dimension p, generated as surjections with signs:
 * choose the support, map it onto levels 1..L, then choose signs. Each model
 * arises exactly once. Output is sorted by (max level, lexicographic).
 */
inline std::vector<SlopeModel> enumerate_models(std::size_t p, std::size_t cap = 6)
{
    if (p > cap)
        throw CapExceeded("enumerate_models: dimension " + std::to_string(p) + " exceeds cap " + std::to_string(cap));
    std::vector<SlopeModel> out;
    out.reserve(count_models(p));

    for (unsigned mask = 0; mask < (1u << p); ++mask) {
        std::vector<std::size_t> support;
        for (std::size_t j = 0; j < p; ++j)
            if (mask & (1u << j)) support.push_back(j);
        const std::size_t k = support.size();
        if (k == 0) {
            out.emplace_back(p, 0);
            continue;
        }
        for (std::size_t levels = 1; levels <= k; ++levels) {
            // Every assignment support -> {1..levels} hitting each level.
            std::vector<int> assign(k, 1);
            std::function<void(std::size_t)> rec = [&](std::size_t pos) {
                if (pos == k) {
                    std::vector<bool> hit(levels + 1, false);
                    for (int a : assign) hit[static_cast<std::size_t>(a)] = true;
                    for (std::size_t l = 1; l <= levels; ++l)
                        if (!hit[l]) return;
                    for (unsigned signs = 0; signs < (1u << k); ++signs) {
                        SlopeModel m(p, 0);
                        for (std::size_t t = 0; t < k; ++t)
                            m[support[t]] = (signs & (1u << t)) ? -assign[t] : assign[t];
                        out.push_back(std::move(m));
                    }
                    return;
                }
                for (std::size_t l = 1; l <= levels; ++l) {
                    assign[pos] = static_cast<int>(l);
                    rec(pos + 1);
                }
            };
            rec(0);
        }
    }
    std::sort(out.begin(), out.end(), [](const SlopeModel& a, const SlopeModel& b) {
        int la = sup_level(a), lb = sup_level(b);
        if (la != lb) return la < lb;
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), [](int u, int v) {
            // Positive before negative at each coordinate, then by magnitude.
            int ku = u == 0 ? 0 : (u > 0 ? 2 * u - 1 : -2 * u);
            int kv = v == 0 ? 0 : (v > 0 ? 2 * v - 1 : -2 * v);
            return ku < kv;
        });
    });
    return out;
}

/**
 * All sign vectors in {-1,0,1}^p ordered by support size, then support
 * (lexicographic on indices), then sign pattern with + before -.
 */
inline std::vector<SignVector> enumerate_sign_vectors(std::size_t p, std::size_t cap = 10)
{
    if (p > cap)
        throw CapExceeded("enumerate_sign_vectors: dimension " + std::to_string(p) + " exceeds cap " +
                          std::to_string(cap));
    std::vector<SignVector> out;
    for (std::size_t k = 0; k <= p; ++k) {
        std::vector<bool> choose(p, false);
        std::fill(choose.begin(), choose.begin() + static_cast<std::ptrdiff_t>(k), true);
        do {
            std::vector<std::size_t> support;
            for (std::size_t j = 0; j < p; ++j)
                if (choose[j]) support.push_back(j);
            for (unsigned signs = 0; signs < (1u << k); ++signs) {
                SignVector s(p, 0);
                // Highest-order bit on the first support index so + comes first lexicographically.
                for (std::size_t t = 0; t < k; ++t) s[support[t]] = (signs & (1u << (k - 1 - t))) ? -1 : 1;
                out.push_back(std::move(s));
            }
        } while (std::prev_permutation(choose.begin(), choose.end()));
    }
    return out;
}

} // namespace polyuniq
