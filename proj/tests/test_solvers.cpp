#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "test_util.hpp"

using namespace polyuniq;
using testutil::M;
using testutil::R;
using testutil::V;

namespace {

// v - b must be a subgradient of ||.||_w at b: dual-ball membership plus the exact pairing identity.
bool prox_optimal(const Vec<Rational>& v, const Vec<Rational>& w, const Vec<Rational>& b)
{
    const PolytopeNorm n = PolytopeNorm::slope(w);
    Vec<Rational> g = v - b;
    return dual_ball_membership(n, g) && dot(b, g) == norm_value(n, b);
}

using oracles::prox_grid_oracle;

Matrix<double> gaussian_matrix(std::mt19937_64& rng, std::size_t n, std::size_t p)
{
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix<double> x(n, p);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) x(i, j) = g(rng);
    return x;
}

Vec<double> gaussian_vector(std::mt19937_64& rng, std::size_t n, double scale)
{
    std::normal_distribution<double> g(0.0, scale);
    Vec<double> v(n);
    for (auto& e : v) e = g(rng);
    return v;
}

std::vector<PolytopeNorm> float_norms(std::size_t p, double level)
{
    Vec<Rational> w(p);
    for (std::size_t j = 0; j < p; ++j) w[j] = from_double(level) * Rational(static_cast<int>(2 * p - j)) / Rational(static_cast<int>(2 * p));
    return {PolytopeNorm::l1(p, from_double(level)), PolytopeNorm::sup(p, from_double(level * 3)), PolytopeNorm::slope(w)};
}

} // namespace

TEST(ProxL1, Examples)
{
    EXPECT_EQ(prox_l1(V("2,-0.5"), R("1")), V("1,0"));
    EXPECT_EQ(prox_l1(V("0,0,0"), R("1")), V("0,0,0"));
    EXPECT_EQ(prox_l1(V("3,-2,1"), R("3")), V("0,0,0"));
    EXPECT_EQ(prox_l1(Vec<double>{2.0, -3.0}, 0.5), (Vec<double>{1.5, -2.5}));
}

TEST(ProxSlope, Examples)
{
    EXPECT_EQ(prox_slope(V("3,3"), V("2,1")), V("1.5,1.5"));
    EXPECT_TRUE(prox_optimal(V("3,3"), V("2,1"), V("1.5,1.5")));
    EXPECT_EQ(prox_slope(V("0,0"), V("2,1")), V("0,0"));
    EXPECT_EQ(prox_slope(V("10,0.1"), V("2,1")), V("8,0"));
    EXPECT_TRUE(prox_optimal(V("10,0.1"), V("2,1"), V("8,0")));
    auto g = prox_grid_oracle({10.0, 0.1}, {2.0, 1.0});
    EXPECT_NEAR(g[0], 8.0, 1e-6);
    EXPECT_NEAR(g[1], 0.0, 1e-6);
    // Order and signs are restored.
    EXPECT_EQ(prox_slope(V("-1,-5,3"), V("3,2,1")), V("0,-2,1"));
    EXPECT_TRUE(prox_optimal(V("-1,-5,3"), V("3,2,1"), V("0,-2,1")));
}

TEST(ProxProperties, SubdifferentialOptimalityOnRandomInputs)
{
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t p = 1 + static_cast<std::size_t>(trial % 6);
        Vec<Rational> w = testutil::random_strict_weights(rng, p);
        if (trial % 7 == 0 && p > 2) w[2] = w[1];
        if (trial % 11 == 0 && p > 1) w.back() = 0;
        Vec<Rational> v = testutil::random_vector(rng, p, 8, 3);
        if (trial % 5 == 0 && p > 1) v[1] = -v[0];
        Vec<Rational> b = prox_slope(v, w);
        ASSERT_TRUE(prox_optimal(v, w, b)) << "trial " << trial;
    }
}

TEST(ProxProperties, AgreesWithGridOracleIn2D)
{
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> uv(-6.0, 6.0), uw(0.0, 3.0);
    for (int trial = 0; trial < 60; ++trial) {
        double w1 = uw(rng), w2 = uw(rng);
        if (w1 < w2) std::swap(w1, w2);
        w1 += 0.1;
        std::array<double, 2> v{uv(rng), uv(rng)}, w{w1, w2};
        Vec<double> b = prox_slope(Vec<double>{v[0], v[1]}, Vec<double>{w[0], w[1]});
        auto g = prox_grid_oracle(v, w);
        EXPECT_NEAR(b[0], g[0], 1e-6);
        EXPECT_NEAR(b[1], g[1], 1e-6);
    }
}

TEST(ProxProperties, MonotoneInMagnitudesAndWeights)
{
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> uv(-6.0, 6.0), uw(0.0, 3.0), shift(0.0, 2.0);
    for (int trial = 0; trial < 60; ++trial) {
        double w1 = uw(rng), w2 = uw(rng);
        if (w1 < w2) std::swap(w1, w2);
        w1 += 0.1;
        const double c = shift(rng);
        std::array<double, 2> v{uv(rng), uv(rng)};
        Vec<double> b = prox_slope(Vec<double>{v[0], v[1]}, Vec<double>{w1, w2});
        Vec<double> bs = prox_slope(Vec<double>{v[0], v[1]}, Vec<double>{w1 + c, w2 + c});
        auto gs = prox_grid_oracle(v, {w1 + c, w2 + c});
        for (int j = 0; j < 2; ++j) {
            EXPECT_LE(std::abs(bs[j]), std::abs(b[j]) + 1e-12);
            EXPECT_NEAR(bs[j], gs[j], 1e-6);
        }
        if (std::abs(v[0]) >= std::abs(v[1])) EXPECT_GE(std::abs(b[0]), std::abs(b[1]));
        else EXPECT_LE(std::abs(b[0]), std::abs(b[1]));
    }
}

TEST(KktCertify, Examples)
{
    RationalMatrix x = M("1,1");
    auto n = PolytopeNorm::l1(2);
    EXPECT_TRUE(kkt_certify(x, V("1"), V("0,0"), n, Rational(0)).passed);
    auto fail = kkt_certify(x, V("3/2"), V("0,0"), n, Rational(0));
    EXPECT_FALSE(fail.passed);
    EXPECT_EQ(fail.dual_norm, R("3/2"));
    // sigma = (1,1), z = 1 puts X'z on the cube face of sigma; y = lambda z + X sigma.
    for (Rational lambda : {R("1/2"), R("2")}) {
        Vec<Rational> y = scaled(V("1"), lambda) + x * V("1,1");
        auto c = kkt_certify(x, y, V("1,1"), PolytopeNorm::l1(2, lambda), Rational(0));
        EXPECT_TRUE(c.passed);
        EXPECT_EQ(c.pairing_gap, Rational(0));
    }
}

TEST(SolvePenalized, ZeroInsideNullSet)
{
    RationalMatrix x = M("8,5,8\n10,1.25,-6");
    auto n = PolytopeNorm::slope(V("5.5,3.5,1.5"));
    Vec<Rational> y = V("0.1,0.05");
    ASSERT_TRUE(dual_ball_membership(n, transpose_times(x, y)));
    auto s = solve_penalized_exact(x, y, n);
    ASSERT_TRUE(s.certified);
    EXPECT_EQ(s.point, V("0,0,0"));
    auto f = solve_penalized(to_double(x), to_double(y), n);
    EXPECT_TRUE(f.certified);
    EXPECT_EQ(f.point, (Vec<double>{0, 0, 0}));
}

TEST(SolvePenalized, OrthogonalDesignReducesToProx)
{
    // Orthonormal columns: the objective separates as 1/2 ||X'y - b||^2 + ||b||_w + const.
    RationalMatrix x = M("3/5,-4/5,0\n4/5,3/5,0\n0,0,1\n0,0,0");
    ASSERT_EQ(x.transpose() * x, RationalMatrix::identity(3));
    std::mt19937_64 rng(34);
    for (int trial = 0; trial < 20; ++trial) {
        Vec<Rational> w = testutil::random_strict_weights(rng, 3);
        Vec<Rational> y = testutil::random_vector(rng, 4, 12, 2);
        auto n = PolytopeNorm::slope(w);
        auto s = solve_penalized_exact(x, y, n);
        ASSERT_TRUE(s.certified);
        EXPECT_EQ(s.point, prox_slope(transpose_times(x, y), w));
    }
}

TEST(SolvePenalized, SupNormNonSingletonCase)
{
    RationalMatrix x = M("1,0");
    auto n = PolytopeNorm::sup(2);
    auto s = solve_penalized_exact(x, V("2"), n);
    ASSERT_TRUE(s.certified);
    EXPECT_EQ(s.point[0], Rational(1));
    EXPECT_LE(abs(s.point[1]), Rational(1));
    // Every point (1, t), |t| <= 1, is a minimizer.
    for (auto t : {R("-1"), R("0"), R("1/3"), R("1")})
        EXPECT_TRUE(kkt_certify(x, V("2"), Vec<Rational>{Rational(1), t}, n, Rational(0)).passed);
}

TEST(SolveBp, Examples)
{
    auto a = solve_bp(M("1,2"), V("1"));
    EXPECT_EQ(a.point, V("0,1/2"));
    EXPECT_EQ(a.value, R("1/2"));
    EXPECT_TRUE(a.certified);

    auto b = solve_bp(M("1,1"), V("2"));
    EXPECT_EQ(b.value, Rational(2));
    EXPECT_TRUE(b.point == V("2,0") || b.point == V("0,2"));

    auto c = solve_bp(M("1,2\n3,4"), V("0,0"));
    EXPECT_EQ(c.value, Rational(0));
    EXPECT_EQ(c.point, V("0,0"));

    EXPECT_THROW(solve_bp(M("1,1\n1,1"), V("1,2")), NotInColumnSpace);
}

TEST(NormMinSubjectTo, Examples)
{
    auto id = RationalMatrix::identity(3);
    Vec<Rational> t = V("1,-2,1/2");
    EXPECT_EQ(norm_min_subject_to(id, t, PolytopeNorm::l1(3)).value, R("7/2"));
    EXPECT_EQ(norm_min_subject_to(id, t, PolytopeNorm::slope(V("3,2,1"))).value, R("17/2"));
    EXPECT_EQ(norm_min_subject_to(M("1,1"), V("1,1"), PolytopeNorm::l1(2)).value, Rational(2));
    EXPECT_EQ(norm_min_subject_to(M("1,1"), V("1,-1"), PolytopeNorm::l1(2)).value, Rational(0));
}

TEST(SolverProperties, FistaCertifiesRandomInstances)
{
    std::mt19937_64 rng(35);
    const std::vector<std::pair<std::size_t, std::size_t>> shapes{{3, 5}, {5, 8}, {10, 20}, {20, 10}, {20, 50}};
    for (auto [n, p] : shapes) {
        for (int rep = 0; rep < 2; ++rep) {
            Matrix<double> x = gaussian_matrix(rng, n, p);
            Vec<double> y = gaussian_vector(rng, n, 3.0);
            for (const auto& norm : float_norms(p, 0.5 + rep)) {
                auto s = solve_penalized(x, y, norm);
                ASSERT_TRUE(s.certified) << norm.name() << " n=" << n << " p=" << p;
                EXPECT_TRUE(kkt_certify(x, y, s.point, norm, 1e-9).passed);
                EXPECT_NEAR(s.objective, objective_value(x, y, norm, s.point), 1e-12);
            }
        }
    }
}

TEST(SolverProperties, FittedValuesAgreeAcrossDuplicateSolves)
{
    std::mt19937_64 rng(36);
    for (int trial = 0; trial < 12; ++trial) {
        const std::size_t n = 4 + static_cast<std::size_t>(trial % 3), p = 8;
        Matrix<double> x = gaussian_matrix(rng, n, p);
        Vec<double> y = gaussian_vector(rng, n, 3.0);
        for (const auto& norm : float_norms(p, 0.7)) {
            SolverOptions a, b;
            b.restart = false;
            b.initial = gaussian_vector(rng, p, 1.0);
            auto s1 = solve_penalized(x, y, norm, a), s2 = solve_penalized(x, y, norm, b);
            ASSERT_TRUE(s1.certified && s2.certified);
            Vec<double> d = x * s1.point - x * s2.point;
            EXPECT_LE(max_abs(d), 1e-9) << norm.name();
        }
    }
}

TEST(SolverProperties, ObjectiveHistoryNonincreasing)
{
    std::mt19937_64 rng(37);
    Matrix<double> x = gaussian_matrix(rng, 10, 30);
    Vec<double> y = gaussian_vector(rng, 10, 3.0);
    SolverOptions opts;
    opts.check_every = 1000000;  // run the plain iteration without early exits
    opts.max_iter = 500;
    for (const auto& norm : float_norms(30, 0.4)) {
        auto s = solve_penalized(x, y, norm, opts);
        ASSERT_GT(s.objective_history.size(), 10u);
        for (std::size_t k = 1; k < s.objective_history.size(); ++k)
            EXPECT_LE(s.objective_history[k], s.objective_history[k - 1]);
    }
}

TEST(SolverProperties, BpValueInvariantUnderSignedColumnPermutation)
{
    std::mt19937_64 rng(38);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 2, p = 4;
        RationalMatrix x = testutil::random_matrix(rng, n, p, 4, 2);
        if (rank(x) < n) continue;
        Vec<Rational> y = x * testutil::random_vector(rng, p, 3, 1);
        auto phi = testutil::random_signed_permutation(rng, p);
        // Columns of X' are X Q^{-1} for the signed permutation Q, so X'Qb = Xb.
        RationalMatrix q(p, p);
        for (std::size_t j = 0; j < p; ++j) {
            Vec<Rational> e(p, Rational(0));
            e[j] = 1;
            Vec<Rational> c = phi.apply(e);
            for (std::size_t i = 0; i < p; ++i) q(i, j) = c[i];
        }
        RationalMatrix xq = x * q.transpose();
        ASSERT_EQ(xq * phi.apply(V("1,2,3,4")), x * V("1,2,3,4"));
        auto a = solve_bp(x, y), b = solve_bp(xq, y);
        EXPECT_EQ(a.value, b.value);
        Vec<Rational> moved = phi.apply(a.point);
        EXPECT_EQ(xq * moved, y);
        EXPECT_EQ(norm_value(PolytopeNorm::l1(p), moved), b.value);
    }
}
