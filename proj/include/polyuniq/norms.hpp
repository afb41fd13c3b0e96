#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

#include "face.hpp"
#include "matrix.hpp"
#include "models.hpp"
#include "rational.hpp"

namespace polyuniq {

/**
 * A norm whose unit ball is a polytope: lambda * l1, lambda * sup, or the
 * sorted-l1 (SLOPE) norm sum_j w_j |b|_(j). Any tuning parameter is part of
 * the norm object.
 */
struct PolytopeNorm
{
    enum class Kind { l1, sup, slope };

    Kind kind = Kind::l1;
    std::size_t p = 0;
    Rational scale{1};      // lambda for l1 and sup
    Vec<Rational> weights;  // slope only

    static PolytopeNorm l1(std::size_t p, const Rational& lambda = Rational(1))
    {
        if (lambda <= 0) throw std::invalid_argument("lambda must be positive");
        return PolytopeNorm{Kind::l1, p, lambda, {}};
    }

    static PolytopeNorm sup(std::size_t p, const Rational& lambda = Rational(1))
    {
        if (lambda <= 0) throw std::invalid_argument("lambda must be positive");
        return PolytopeNorm{Kind::sup, p, lambda, {}};
    }

    /** Accepts w_1 > 0 and w nonincreasing, nonnegative. Model-level code checks strictness separately. */
    static PolytopeNorm slope(const Vec<Rational>& w)
    {
        if (w.empty()) throw std::invalid_argument("SLOPE weights must be non-empty");
        if (w[0] <= 0) throw InvalidWeights("SLOPE weights need w_1 > 0");
        for (std::size_t j = 1; j < w.size(); ++j) {
            if (w[j] > w[j - 1]) throw InvalidWeights("SLOPE weights must be nonincreasing");
        }
        if (w.back() < 0) throw InvalidWeights("SLOPE weights must be nonnegative");
        return PolytopeNorm{Kind::slope, w.size(), Rational(1), w};
    }

    bool strict_weights() const
    {
        if (kind != Kind::slope) return false;
        for (std::size_t j = 0; j < weights.size(); ++j)
            if (weights[j] <= 0 || (j > 0 && !(weights[j - 1] > weights[j]))) return false;
        return true;
    }

    std::string name() const
    {
        switch (kind) {
        case Kind::l1: return "l1";
        case Kind::sup: return "sup";
        case Kind::slope: return "slope";
        }
        return "?";
    }
};

namespace detail {

template <class T>
Vec<T> sorted_magnitudes(const Vec<T>& x)
{
    Vec<T> a;
    a.reserve(x.size());
    for (const auto& v : x) a.push_back(abs_value(v));
    std::sort(a.begin(), a.end(), std::greater<>());
    return a;
}

template <class T>
T convert(const Rational& q)
{
    if constexpr (std::is_same_v<T, double>)
        return to_double(q);
    else
        return q;
}

inline void check_dim(const PolytopeNorm& n, std::size_t d)
{
    if (d != n.p) throw std::invalid_argument("vector dimension " + std::to_string(d) + " does not match norm dimension " + std::to_string(n.p));
}

} // namespace detail

template <class T>
T norm_value(const PolytopeNorm& n, const Vec<T>& b)
{
    detail::check_dim(n, b.size());
    T out(0);
    switch (n.kind) {
    case PolytopeNorm::Kind::l1:
        for (const auto& v : b) out += abs_value(v);
        return out * detail::convert<T>(n.scale);
    case PolytopeNorm::Kind::sup:
        for (const auto& v : b) out = std::max(out, T(abs_value(v)));
        return out * detail::convert<T>(n.scale);
    case PolytopeNorm::Kind::slope: {
        Vec<T> a = detail::sorted_magnitudes(b);
        for (std::size_t j = 0; j < a.size(); ++j) out += detail::convert<T>(n.weights[j]) * a[j];
        return out;
    }
    }
    return out;
}

/** Dual norm sup{s'x : ||s|| <= 1}. For SLOPE: max_k (sum of k largest |x_j|) / (w_1 + ... + w_k). */
template <class T>
T dual_norm_value(const PolytopeNorm& n, const Vec<T>& x)
{
    detail::check_dim(n, x.size());
    T out(0);
    switch (n.kind) {
    case PolytopeNorm::Kind::l1:
        for (const auto& v : x) out = std::max(out, T(abs_value(v)));
        return out / detail::convert<T>(n.scale);
    case PolytopeNorm::Kind::sup:
        for (const auto& v : x) out += abs_value(v);
        return out / detail::convert<T>(n.scale);
    case PolytopeNorm::Kind::slope: {
        Vec<T> a = detail::sorted_magnitudes(x);
        T partial(0), wsum(0);
        for (std::size_t k = 0; k < a.size(); ++k) {
            partial += a[k];
            wsum += detail::convert<T>(n.weights[k]);
            if (wsum > T(0)) {
                out = std::max(out, T(partial / wsum));
            } else if (partial > T(0)) {
                throw std::domain_error("dual norm is infinite: weights vanish on a nonzero tail");
            }
        }
        return out;
    }
    }
    return out;
}

inline bool dual_ball_membership(const PolytopeNorm& n, const Vec<Rational>& s)
{
    if (n.kind == PolytopeNorm::Kind::slope) {
        // Partial-sum comparison avoids the division and copes with zero weights.
        detail::check_dim(n, s.size());
        Vec<Rational> a = detail::sorted_magnitudes(s);
        Rational partial = 0, wsum = 0;
        for (std::size_t k = 0; k < a.size(); ++k) {
            partial += a[k];
            wsum += n.weights[k];
            if (partial > wsum) return false;
        }
        return true;
    }
    return dual_norm_value(n, s) <= 1;
}

/**
 * The face of the dual ball equal to the subdifferential of the norm at x.
 * x = 0 gives the whole dual ball.
 */
template <class T>
Face subdifferential_face(const PolytopeNorm& n, const Vec<T>& x)
{
    detail::check_dim(n, x.size());
    switch (n.kind) {
    case PolytopeNorm::Kind::l1:
        return Face::box(sign_vector(x), n.scale);
    case PolytopeNorm::Kind::sup: {
        T top(0);
        for (const auto& v : x) top = std::max(top, T(abs_value(v)));
        SignVector s(x.size(), 0);
        if (top > T(0))
            for (std::size_t j = 0; j < x.size(); ++j)
                if (abs_value(x[j]) == top) s[j] = x[j] < T(0) ? -1 : 1;
        return Face::cross(s, n.scale);
    }
    case PolytopeNorm::Kind::slope:
        return detail::permutahedral_face(x, n.weights);
    }
    throw std::logic_error("unknown norm kind");
}

/** The whole dual ball as a face. */
inline Face dual_ball(const PolytopeNorm& n)
{
    return subdifferential_face(n, Vec<Rational>(n.p, Rational(0)));
}

/** Exact vertices of the primal unit ball {b : ||b|| <= 1}. */
inline std::vector<Vec<Rational>> primal_ball_vertices(const PolytopeNorm& n, std::size_t cap = 200000)
{
    std::vector<Vec<Rational>> out;
    const std::size_t p = n.p;
    switch (n.kind) {
    case PolytopeNorm::Kind::l1:
        for (std::size_t j = 0; j < p; ++j)
            for (int sg : {1, -1}) {
                Vec<Rational> v(p, Rational(0));
                v[j] = Rational(sg) / n.scale;
                out.push_back(std::move(v));
            }
        break;
    case PolytopeNorm::Kind::sup:
        if (p > 20 || (std::size_t{1} << p) > cap) throw CapExceeded("primal ball has too many vertices");
        for (std::size_t mask = 0; mask < (std::size_t{1} << p); ++mask) {
            Vec<Rational> v(p);
            for (std::size_t j = 0; j < p; ++j) v[j] = Rational((mask >> j) & 1u ? -1 : 1) / n.scale;
            out.push_back(std::move(v));
        }
        break;
    case PolytopeNorm::Kind::slope: {
        // Extreme points are the signed indicator vectors scaled to unit norm: 1_S / (w_1 + ... + w_|S|).
        if (p > 12) throw CapExceeded("primal ball has too many vertices");
        Vec<Rational> wsum(p + 1, Rational(0));
        for (std::size_t k = 1; k <= p; ++k) wsum[k] = wsum[k - 1] + n.weights[k - 1];
        std::size_t pow3 = 1;
        for (std::size_t j = 0; j < p; ++j) pow3 *= 3;
        if (pow3 > cap) throw CapExceeded("primal ball has too many vertices");
        for (std::size_t code = 0; code < pow3; ++code) {
            SignVector s(p);
            std::size_t c = code;
            for (std::size_t j = 0; j < p; ++j) {
                s[j] = static_cast<int>(c % 3) - 1;
                c /= 3;
            }
            const std::size_t k = support_size(s);
            if (k == 0 || wsum[k] == 0) continue;
            Vec<Rational> v(p);
            for (std::size_t j = 0; j < p; ++j) v[j] = Rational(s[j]) / wsum[k];
            out.push_back(std::move(v));
        }
        break;
    }
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace polyuniq
