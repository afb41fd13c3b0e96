#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "exact_linalg.hpp"
#include "face.hpp"
#include "lp.hpp"
#include "matrix.hpp"
#include "rational.hpp"

namespace polyuniq {

struct IntersectionWitness
{
    Vec<Rational> z;  // X'z = s
    Vec<Rational> s;  // point of the face on row(X)
};

/**
 * Decide whether row(X) meets the face F, exactly.
 *
 * A point of F is V*lambda with lambda in the simplex; it lies in row(X) iff
 * it is orthogonal to ker(X). So the test is feasibility of
 *   lambda >= 0, 1'lambda = 1, (N'V) lambda = 0
 * with N a kernel basis of X, followed by solving X'z = V lambda.
 * `kernel` must be kernel_basis(x); sweeps pass it in to avoid recomputation.
 */
inline std::optional<IntersectionWitness> face_intersects_rowspace(const Face& f, const RationalMatrix& x,
                                                                   const std::vector<Vec<Rational>>& kernel,
                                                                   std::size_t vertex_cap = 200000)
{
    if (x.cols() != f.ambient_dim()) throw std::invalid_argument("face and matrix dimensions differ");
    const std::size_t p = x.cols();
    if (f.is_full_ball()) return IntersectionWitness{Vec<Rational>(x.rows(), Rational(0)), Vec<Rational>(p, Rational(0))};

    const std::vector<Vec<Rational>> verts = f.vertices(vertex_cap);

    Vec<Rational> s;
    if (kernel.empty()) {
        s = verts.front();
    } else if (verts.size() == 1) {
        for (const auto& nv : kernel)
            if (dot(nv, verts[0]) != 0) return std::nullopt;
        s = verts[0];
    } else {
        const std::size_t k = verts.size();
        LinearProgram lp(k);
        for (std::size_t l = 0; l < k; ++l) lp.set_nonnegative(l);
        lp.add_eq(Vec<Rational>(k, Rational(1)), Rational(1));
        for (const auto& nv : kernel) {
            Vec<Rational> row(k);
            for (std::size_t l = 0; l < k; ++l) row[l] = dot(nv, verts[l]);
            lp.add_eq(std::move(row), Rational(0));
        }
        auto lam = lp_feasible(lp);
        if (!lam) return std::nullopt;
        s.assign(p, Rational(0));
        for (std::size_t l = 0; l < k; ++l)
            if ((*lam)[l] != 0)
                for (std::size_t j = 0; j < p; ++j) s[j] += (*lam)[l] * verts[l][j];
    }
    auto z = rowspace_membership(x, s);
    if (!z) throw std::logic_error("face point orthogonal to ker(X) but outside row(X)");
    return IntersectionWitness{std::move(*z), std::move(s)};
}

inline std::optional<IntersectionWitness> face_intersects_rowspace(const Face& f, const RationalMatrix& x,
                                                                   std::size_t vertex_cap = 200000)
{
    return face_intersects_rowspace(f, x, kernel_basis(x), vertex_cap);
}

/** Exact dimension of the affine hull of a finite point set. */
inline std::size_t affine_dimension(const std::vector<Vec<Rational>>& pts)
{
    if (pts.size() <= 1) return 0;
    RationalMatrix d(pts.size() - 1, pts[0].size());
    for (std::size_t i = 1; i < pts.size(); ++i)
        for (std::size_t j = 0; j < pts[0].size(); ++j) d(i - 1, j) = pts[i][j] - pts[0][j];
    return rank(d);
}

} // namespace polyuniq
