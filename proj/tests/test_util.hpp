#pragma once

#include <random>
#include <string>
#include <vector>

#include "polyuniq/polyuniq.hpp"

namespace testutil {

using polyuniq::Rational;
using polyuniq::RationalMatrix;
using polyuniq::Vec;

inline Rational R(const std::string& s) { return polyuniq::parse_rational(s); }

inline Vec<Rational> V(const std::string& s) { return polyuniq::parse_rational_list(s); }

inline RationalMatrix M(const std::string& csv) { return polyuniq::parse_matrix_csv(csv); }

/** Small rational in [-range, range] with denominator in {1..den}. */
inline Rational random_rational(std::mt19937_64& rng, int range = 5, int den = 4)
{
    std::uniform_int_distribution<int> num(-range * den, range * den);
    std::uniform_int_distribution<int> d(1, den);
    return Rational(num(rng)) / Rational(d(rng));
}

inline Vec<Rational> random_vector(std::mt19937_64& rng, std::size_t n, int range = 5, int den = 4)
{
    Vec<Rational> v(n);
    for (auto& e : v) e = random_rational(rng, range, den);
    return v;
}

inline RationalMatrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c, int range = 5, int den = 4)
{
    RationalMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = random_rational(rng, range, den);
    return m;
}

/** Strictly decreasing positive weights. */
inline Vec<Rational> random_strict_weights(std::mt19937_64& rng, std::size_t p)
{
    std::uniform_int_distribution<int> step(1, 6);
    Vec<Rational> w(p);
    Rational acc = Rational(step(rng)) / 2;
    for (std::size_t j = p; j-- > 0;) {
        w[j] = acc;
        acc += Rational(step(rng)) / 2;
    }
    return w;
}

/** Random signed permutation. */
inline polyuniq::SignedPermutation random_signed_permutation(std::mt19937_64& rng, std::size_t p)
{
    std::vector<std::size_t> perm(p);
    for (std::size_t j = 0; j < p; ++j) perm[j] = j;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> signs(p);
    std::bernoulli_distribution coin(0.5);
    for (auto& s : signs) s = coin(rng) ? 1 : -1;
    return polyuniq::SignedPermutation(signs, perm);
}

/** All signed permutations of w: the vertex generators of the sign permutahedron. */
inline std::vector<Vec<Rational>> signed_permutations_of(Vec<Rational> w)
{
    std::vector<Vec<Rational>> out;
    std::sort(w.begin(), w.end());
    const std::size_t p = w.size();
    do {
        for (std::size_t mask = 0; mask < (std::size_t{1} << p); ++mask) {
            Vec<Rational> v = w;
            for (std::size_t j = 0; j < p; ++j)
                if ((mask >> j) & 1u) v[j] = -v[j];
            out.push_back(v);
        }
    } while (std::next_permutation(w.begin(), w.end()));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace testutil
