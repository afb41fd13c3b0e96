#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "matrix.hpp"

namespace polyuniq {

/**
 * Element of the signed permutation group acting on R^p by
 *   x  |->  (signs[0] * x[perm[0]], ..., signs[p-1] * x[perm[p-1]]).
 *
 * These maps are orthogonal and leave the SLOPE norm, the set of SLOPE
 * models, and the sign permutahedron invariant.
 */
class SignedPermutation
{
public:
    explicit SignedPermutation(std::size_t p) : signs_(p, 1), perm_(p)
    {
        std::iota(perm_.begin(), perm_.end(), std::size_t{0});
    }

    SignedPermutation(std::vector<int> signs, std::vector<std::size_t> perm)
        : signs_(std::move(signs)), perm_(std::move(perm))
    {
        if (signs_.size() != perm_.size()) throw std::invalid_argument("signed permutation: size mismatch");
        std::vector<bool> seen(perm_.size(), false);
        for (auto j : perm_) {
            if (j >= perm_.size() || seen[j]) throw std::invalid_argument("signed permutation: not a bijection");
            seen[j] = true;
        }
        for (int s : signs_)
            if (s != 1 && s != -1) throw std::invalid_argument("signed permutation: signs must be +-1");
    }

    std::size_t size() const { return perm_.size(); }
    const std::vector<int>& signs() const { return signs_; }
    const std::vector<std::size_t>& perm() const { return perm_; }

    template <class T>
    Vec<T> apply(const Vec<T>& x) const
    {
        if (x.size() != size()) throw std::invalid_argument("signed permutation: dimension mismatch");
        Vec<T> out(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = signs_[i] < 0 ? T(-x[perm_[i]]) : x[perm_[i]];
        return out;
    }

    /** this o other: apply `other` first. */
    SignedPermutation compose(const SignedPermutation& other) const
    {
        if (other.size() != size()) throw std::invalid_argument("signed permutation: dimension mismatch");
        std::vector<int> s(size());
        std::vector<std::size_t> p(size());
        for (std::size_t i = 0; i < size(); ++i) {
            s[i] = signs_[i] * other.signs_[perm_[i]];
            p[i] = other.perm_[perm_[i]];
        }
        return SignedPermutation(std::move(s), std::move(p));
    }

    SignedPermutation inverse() const
    {
        std::vector<int> s(size());
        std::vector<std::size_t> p(size());
        for (std::size_t i = 0; i < size(); ++i) {
            p[perm_[i]] = i;
            s[perm_[i]] = signs_[i];
        }
        return SignedPermutation(std::move(s), std::move(p));
    }

    friend bool operator==(const SignedPermutation& a, const SignedPermutation& b)
    {
        return a.signs_ == b.signs_ && a.perm_ == b.perm_;
    }

private:
    std::vector<int> signs_;
    std::vector<std::size_t> perm_;
};

/**
 * The signed permutation that maps x to its sorted absolute values
 * (nonincreasing, nonnegative). Ties keep their original order.
 */
template <class T>
SignedPermutation sorting_permutation(const Vec<T>& x)
{
    std::vector<std::size_t> perm(x.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::stable_sort(perm.begin(), perm.end(),
                     [&](std::size_t a, std::size_t b) { return abs_value(x[a]) > abs_value(x[b]); });
    std::vector<int> signs(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) signs[i] = x[perm[i]] < T(0) ? -1 : 1;
    return SignedPermutation(std::move(signs), std::move(perm));
}

} // namespace polyuniq
