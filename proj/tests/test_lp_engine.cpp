#include <numeric>

#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace polyuniq;
using testutil::M;
using testutil::R;
using testutil::V;

TEST(LpSolve, Examples)
{
    LinearProgram a(1);
    a.set_objective(V("1"));
    a.add_ge(V("1"), Rational(3));
    LpResult ra = lp_solve(a);
    ASSERT_TRUE(ra.optimal());
    EXPECT_EQ(ra.value, Rational(3));
    EXPECT_EQ(ra.point, V("3"));

    LinearProgram b(1);
    b.add_eq(V("1"), Rational(1));
    b.add_eq(V("1"), Rational(2));
    EXPECT_EQ(lp_solve(b).status, LpStatus::infeasible);

    // min |b1| + |b2| s.t. b1 + b2 = 2 with b = b+ - b-.
    LinearProgram c(4);
    c.set_objective(V("1,1,1,1"));
    for (std::size_t j = 0; j < 4; ++j) c.set_nonnegative(j);
    c.add_eq(V("1,1,-1,-1"), Rational(2));
    LpResult rc = lp_solve(c);
    ASSERT_TRUE(rc.optimal());
    EXPECT_EQ(rc.value, Rational(2));
}

TEST(LpSolve, UnboundedAndBounds)
{
    LinearProgram a(1);
    a.set_objective(V("1"));
    EXPECT_EQ(lp_solve(a).status, LpStatus::unbounded);

    LinearProgram b(2);
    b.set_objective(V("-1,1"));
    b.set_lower(0, R("1"));
    b.set_upper(0, R("5/2"));
    b.set_upper(1, R("-3"));
    b.add_le(V("1,1"), R("10"));
    EXPECT_EQ(lp_solve(b).status, LpStatus::unbounded);
    b.set_lower(1, R("-10"));
    LpResult rb = lp_solve(b);
    ASSERT_TRUE(rb.optimal());
    EXPECT_EQ(rb.point, V("5/2,-10"));
    EXPECT_EQ(rb.value, R("-25/2"));

    LinearProgram c(1);
    c.set_lower(0, R("2"));
    c.set_upper(0, R("1"));
    EXPECT_EQ(lp_solve(c).status, LpStatus::infeasible);
}

TEST(LpFeasible, Examples)
{
    LinearProgram a(1);
    a.set_nonnegative(0);
    a.add_le(V("1"), Rational(-1));
    EXPECT_FALSE(lp_feasible(a));

    LinearProgram b(1);
    b.add_eq(V("1"), Rational(0));
    auto pb = lp_feasible(b);
    ASSERT_TRUE(pb);
    EXPECT_EQ(*pb, V("0"));

    // Face-intersection system for the cross-polytope vertex (1,0) and X = (1 0): ker X = span(e2).
    LinearProgram c(1);
    c.set_nonnegative(0);
    c.add_eq(V("1"), Rational(1));
    c.add_eq(V("0"), Rational(0));
    EXPECT_TRUE(lp_feasible(c));
}

TEST(LpSolve, RedundantEqualitiesAndDegeneracy)
{
    LinearProgram a(3);
    a.set_objective(V("1,2,3"));
    for (std::size_t j = 0; j < 3; ++j) a.set_nonnegative(j);
    a.add_eq(V("1,1,1"), Rational(1));
    a.add_eq(V("2,2,2"), Rational(2));
    a.add_le(V("1,0,0"), Rational(0));
    a.add_le(V("1,-1,0"), Rational(0));
    LpResult r = lp_solve(a);
    ASSERT_TRUE(r.optimal());
    EXPECT_EQ(r.value, Rational(2));
    EXPECT_TRUE(a.satisfied_by(r.point));
}

TEST(LpSolve, DumpIsReadable)
{
    LinearProgram a(2);
    a.set_objective(V("1,-1/2"));
    a.add_eq(V("1,1"), Rational(1));
    a.set_nonnegative(1);
    std::string d = a.dump();
    EXPECT_NE(d.find("minimize 1 -1/2"), std::string::npos);
    EXPECT_NE(d.find("x1 in [0, inf]"), std::string::npos);
}

TEST(LpProperties, StrongDualityAndExactFeasibility)
{
    // Primal: min c'x, Ax >= b, x >= 0.  Dual: max b'y, A'y <= c, y >= 0.
    std::mt19937_64 rng(41);
    int optimal = 0;
    for (int trial = 0; trial < 150; ++trial) {
        const std::size_t m = 2 + trial % 3, n = 2 + (trial / 3) % 4;
        RationalMatrix a = testutil::random_matrix(rng, m, n, 4, 3);
        Vec<Rational> b = testutil::random_vector(rng, m, 4, 2);
        Vec<Rational> c = testutil::random_vector(rng, n, 4, 2);
        if (trial % 2 == 0)
            for (auto& v : c) v = abs(v);

        LinearProgram primal(n);
        primal.set_objective(c);
        for (std::size_t j = 0; j < n; ++j) primal.set_nonnegative(j);
        for (std::size_t i = 0; i < m; ++i) primal.add_ge(a.row(i), b[i]);

        LinearProgram dual(m);
        Vec<Rational> negb = b;
        for (auto& v : negb) v = -v;
        dual.set_objective(negb);
        for (std::size_t i = 0; i < m; ++i) dual.set_nonnegative(i);
        for (std::size_t j = 0; j < n; ++j) dual.add_le(a.col(j), c[j]);

        LpResult rp = lp_solve(primal), rd = lp_solve(dual);
        if (rp.optimal()) {
            ++optimal;
            ASSERT_TRUE(rd.optimal());
            EXPECT_EQ(rp.value, -rd.value);
            EXPECT_TRUE(primal.satisfied_by(rp.point));
            EXPECT_TRUE(dual.satisfied_by(rd.point));
        } else if (rp.status == LpStatus::unbounded) {
            EXPECT_EQ(rd.status, LpStatus::infeasible);
        } else {
            EXPECT_NE(rd.status, LpStatus::optimal);
        }
        LpResult again = lp_solve(primal);
        EXPECT_EQ(again.status, rp.status);
        EXPECT_EQ(again.point, rp.point);
    }
    EXPECT_GT(optimal, 30);
}

namespace {

// Brute force over the 2^p * p! sign/order regions, on each of which the SLOPE norm is linear.
Rational slope_norm_min_oracle(const RationalMatrix& x, const Vec<Rational>& target, const Vec<Rational>& w)
{
    const std::size_t p = w.size();
    const Vec<Rational> xt = x * target;
    std::optional<Rational> best;
    std::vector<std::size_t> perm(p);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    do {
        for (std::size_t mask = 0; mask < (std::size_t{1} << p); ++mask) {
            std::vector<int> s(p);
            for (std::size_t j = 0; j < p; ++j) s[j] = (mask >> j) & 1u ? -1 : 1;
            LinearProgram lp(p);
            Vec<Rational> obj(p, Rational(0));
            for (std::size_t k = 0; k < p; ++k) obj[perm[k]] = w[k] * s[perm[k]];
            lp.set_objective(obj);
            for (std::size_t i = 0; i < x.rows(); ++i) lp.add_eq(x.row(i), xt[i]);
            for (std::size_t j = 0; j < p; ++j) {
                Vec<Rational> row(p, Rational(0));
                row[j] = s[j];
                lp.add_ge(row, Rational(0));
            }
            for (std::size_t k = 0; k + 1 < p; ++k) {
                Vec<Rational> row(p, Rational(0));
                row[perm[k]] = s[perm[k]];
                row[perm[k + 1]] = -s[perm[k + 1]];
                lp.add_ge(row, Rational(0));
            }
            LpResult r = lp_solve(lp);
            if (r.optimal() && (!best || r.value < *best)) best = r.value;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return *best;
}

} // namespace

TEST(LpProperties, CvarSlopeFormulationMatchesRegionOracle)
{
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t p = 2 + static_cast<std::size_t>(trial % 3);
        const std::size_t n = 1 + static_cast<std::size_t>(trial % 2);
        Vec<Rational> w = testutil::random_strict_weights(rng, p);
        if (trial % 4 == 3) w.back() = 0;  // relaxed weights are fine for the norm
        RationalMatrix x = testutil::random_matrix(rng, n, p, 3, 2);
        Vec<Rational> target = testutil::random_vector(rng, p, 3, 1);
        NormMin nm = norm_min_subject_to(x, target, PolytopeNorm::slope(w));
        EXPECT_EQ(nm.value, slope_norm_min_oracle(x, target, w)) << "trial " << trial;
        EXPECT_EQ(x * nm.argmin, x * target);
        EXPECT_LE(nm.value, norm_value(PolytopeNorm::slope(w), target));
    }
}
