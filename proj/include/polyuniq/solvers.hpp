#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "exact_linalg.hpp"
#include "lp.hpp"
#include "matrix.hpp"
#include "models.hpp"
#include "norms.hpp"
#include "rational.hpp"

namespace polyuniq {

template <class T>
Vec<T> prox_l1(const Vec<T>& v, const T& lambda)
{
    if (!(lambda > T(0))) throw std::invalid_argument("prox_l1: lambda must be positive");
    Vec<T> out(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) {
        T a = abs_value(v[j]) - lambda;
        if (a <= T(0))
            out[j] = T(0);
        else
            out[j] = v[j] < T(0) ? T(-a) : a;
    }
    return out;
}

/**
 * Proximal operator of the sorted-l1 norm: argmin_b 1/2 ||v - b||^2 + sum_j w_j |b|_(j).
 * Sort |v| descending, subtract w, project onto the nonincreasing cone by
 * pooling adjacent violators on a stack, clip at zero, undo sort and signs.
 */
template <class T>
Vec<T> prox_slope(const Vec<T>& v, const Vec<T>& w)
{
    const std::size_t p = v.size();
    if (w.size() != p) throw std::invalid_argument("prox_slope: weights length mismatch");
    if (p == 0) return {};
    if (!(w[0] > T(0))) throw std::invalid_argument("prox_slope: w_1 must be positive");
    for (std::size_t j = 1; j < p; ++j)
        if (w[j] > w[j - 1] || w[j] < T(0)) throw std::invalid_argument("prox_slope: weights must be nonincreasing and nonnegative");

    std::vector<std::size_t> order(p);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return abs_value(v[a]) > abs_value(v[b]); });

    struct Block { std::size_t start, end; T sum; };
    std::vector<Block> stack;
    stack.reserve(p);
    for (std::size_t k = 0; k < p; ++k) {
        stack.push_back({k, k + 1, T(abs_value(v[order[k]]) - w[k])});
        while (stack.size() > 1) {
            const Block& top = stack.back();
            const Block& below = stack[stack.size() - 2];
            // below.avg <= top.avg, cross-multiplied to stay exact.
            const T lhs = below.sum * T(static_cast<long>(top.end - top.start));
            const T rhs = top.sum * T(static_cast<long>(below.end - below.start));
            if (lhs > rhs) break;
            Block merged{below.start, top.end, T(below.sum + top.sum)};
            stack.pop_back();
            stack.back() = merged;
        }
    }
    Vec<T> out(p, T(0));
    for (const auto& b : stack) {
        T avg = b.sum / T(static_cast<long>(b.end - b.start));
        if (avg <= T(0)) continue;
        for (std::size_t k = b.start; k < b.end; ++k) {
            const std::size_t j = order[k];
            out[j] = v[j] < T(0) ? T(-avg) : avg;
        }
    }
    return out;
}

/** Prox of t * ||.|| for any supported polytope norm. */
template <class T>
Vec<T> prox_norm(const PolytopeNorm& n, const Vec<T>& v, const T& t)
{
    switch (n.kind) {
    case PolytopeNorm::Kind::l1:
        return prox_l1(v, T(t * detail::convert<T>(n.scale)));
    case PolytopeNorm::Kind::sup: {
        Vec<T> w(v.size(), T(0));
        w[0] = t * detail::convert<T>(n.scale);
        return prox_slope(v, w);
    }
    case PolytopeNorm::Kind::slope: {
        Vec<T> w(v.size());
        for (std::size_t j = 0; j < v.size(); ++j) w[j] = t * detail::convert<T>(n.weights[j]);
        return prox_slope(v, w);
    }
    }
    throw std::logic_error("unknown norm kind");
}

/** Optimality evidence: g = X'(y - Xb), its dual norm, and |b'g - ||b|||. */
template <class T>
struct Certificate
{
    Vec<T> dual_vector;
    T dual_norm{0};
    T pairing_gap{0};
    bool passed = false;
};

template <class T>
T objective_value(const Matrix<T>& x, const Vec<T>& y, const PolytopeNorm& n, const Vec<T>& b)
{
    Vec<T> r = y - x * b;
    return dot(r, r) / T(2) + norm_value(n, b);
}

/** Pass iff ||X'(y - Xb)||* <= 1 + tol and |b'X'(y - Xb) - ||b||| <= tol. tol = 0 is exact for rationals. */
template <class T>
Certificate<T> kkt_certify(const Matrix<T>& x, const Vec<T>& y, const Vec<T>& b, const PolytopeNorm& n, const T& tol)
{
    if (x.rows() != y.size() || x.cols() != b.size()) throw std::invalid_argument("kkt_certify: dimension mismatch");
    Certificate<T> c;
    c.dual_vector = transpose_times(x, Vec<T>(y - x * b));
    c.dual_norm = dual_norm_value(n, c.dual_vector);
    c.pairing_gap = abs_value(T(dot(b, c.dual_vector) - norm_value(n, b)));
    c.passed = c.dual_norm <= T(1) + tol && c.pairing_gap <= tol;
    return c;
}

/**
 * Basis pursuit certificate for b: Xb = y, ||X'z||_inf <= 1 and
 * X_j'z = sign(b_j) on supp(b).
 */
inline bool bp_certify(const RationalMatrix& x, const Vec<Rational>& y, const Vec<Rational>& b, const Vec<Rational>& z)
{
    if (x * b != y) return false;
    Vec<Rational> g = transpose_times(x, z);
    for (std::size_t j = 0; j < g.size(); ++j) {
        if (abs(g[j]) > 1) return false;
        if (b[j] != 0 && g[j] != Rational(sign(b[j]))) return false;
    }
    return true;
}

/** A dual vector z certifying b for basis pursuit, found by exact LP, if one exists. */
inline std::optional<Vec<Rational>> bp_dual_certificate(const RationalMatrix& x, const Vec<Rational>& b)
{
    const std::size_t n = x.rows();
    LinearProgram lp(n);
    for (std::size_t j = 0; j < x.cols(); ++j) {
        Vec<Rational> col = x.col(j);
        if (b[j] != 0) {
            lp.add_eq(col, Rational(sign(b[j])));
        } else {
            lp.add_le(col, Rational(1));
            lp.add_ge(col, Rational(1) * -1);
        }
    }
    return lp_feasible(lp);
}

enum class SolveRoute { fista, lp, closed_form };

inline std::string route_name(SolveRoute r)
{
    switch (r) {
    case SolveRoute::fista: return "fista";
    case SolveRoute::lp: return "lp";
    case SolveRoute::closed_form: return "closed_form";
    }
    return "?";
}

template <class T>
struct Solution
{
    Vec<T> point;
    T objective{0};
    SolveRoute route = SolveRoute::fista;
    std::optional<Certificate<T>> certificate;
    bool certified = false;
    std::size_t iterations = 0;
    std::vector<double> objective_history;
    bool polished = false;
};

struct SolverOptions
{
    std::size_t max_iter = 20000;
    double tol = 1e-9;
    bool restart = true;
    std::size_t check_every = 10;
    std::size_t power_iterations = 200;
    Vec<double> initial;
};

/** Largest eigenvalue of X'X by power iteration, padded slightly so 1/L is a safe step. */
inline double lipschitz_constant(const Matrix<double>& x, std::size_t iterations = 200)
{
    const std::size_t p = x.cols();
    if (p == 0) return 1.0;
    Vec<double> v(p);
    for (std::size_t j = 0; j < p; ++j) v[j] = 1.0 + 0.01 * static_cast<double>(j % 7);
    double est = 0;
    for (std::size_t it = 0; it < iterations; ++it) {
        Vec<double> u = transpose_times(x, Vec<double>(x * v));
        double nrm = std::sqrt(dot(u, u));
        if (nrm == 0) return 1.0;
        est = nrm / std::sqrt(dot(v, v));
        for (auto& e : u) e /= nrm;
        v = std::move(u);
    }
    double fro = 0;
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < p; ++j) fro += x(i, j) * x(i, j);
    return std::min(est * 1.01 + 1e-12, fro > 0 ? fro : 1.0);
}

/**
 * Given a pattern (signs plus ordered clusters from a SLOPE model), solve the
 * stationarity conditions restricted to that pattern:
 *   b = sum_l beta_l * d_l,  d_l = signed indicator of cluster l,
 *   (D'X'XD) beta = D'X'y - W,  W_l = sum of the weights at cluster l's ranks.
 */
template <class T>
std::optional<Vec<T>> solve_on_pattern(const Matrix<T>& x, const Vec<T>& y, const PolytopeNorm& n, const SlopeModel& m)
{
    const std::size_t p = x.cols();
    const int levels = sup_level(m);
    if (levels == 0) return Vec<T>(p, T(0));

    // Ranks: the highest level takes the largest weights.
    Vec<T> rank_weights(p);
    for (std::size_t k = 0; k < p; ++k) {
        switch (n.kind) {
        case PolytopeNorm::Kind::l1: rank_weights[k] = detail::convert<T>(n.scale); break;
        case PolytopeNorm::Kind::sup: rank_weights[k] = k == 0 ? detail::convert<T>(n.scale) : T(0); break;
        case PolytopeNorm::Kind::slope: rank_weights[k] = detail::convert<T>(n.weights[k]); break;
        }
    }
    std::vector<std::vector<std::size_t>> clusters(static_cast<std::size_t>(levels));
    for (std::size_t j = 0; j < p; ++j)
        if (m[j] != 0) clusters[static_cast<std::size_t>(levels - std::abs(m[j]))].push_back(j);

    const std::size_t L = clusters.size();
    Matrix<T> xd(x.rows(), L, T(0));
    Vec<T> wsum(L, T(0));
    std::size_t next_rank = 0;
    for (std::size_t l = 0; l < L; ++l) {
        for (auto j : clusters[l]) {
            const T s = m[j] > 0 ? T(1) : T(-1);
            for (std::size_t i = 0; i < x.rows(); ++i) xd(i, l) += s * x(i, j);
            wsum[l] += rank_weights[next_rank++];
        }
    }
    Matrix<T> gram = xd.transpose() * xd;
    Vec<T> rhs = transpose_times(xd, y) - wsum;
    Vec<T> beta;
    if constexpr (std::is_same_v<T, Rational>) {
        auto sol = solve_exact(gram, rhs);
        if (!sol) return std::nullopt;
        beta = std::move(*sol);
    } else {
        if (!solve_square(gram, rhs, beta, 1e-13)) return std::nullopt;
    }
    Vec<T> b(p, T(0));
    for (std::size_t l = 0; l < L; ++l)
        for (auto j : clusters[l]) b[j] = m[j] > 0 ? beta[l] : T(-beta[l]);
    return b;
}

/**
 * The restriction pattern suggested by an approximate solution. SLOPE ties
 * are real structure; for l1 every nonzero coordinate gets its own level, and
 * for sup only the top cluster is tied.
 */
inline SlopeModel pattern_model(const PolytopeNorm& n, const Vec<double>& b, double tol)
{
    SlopeModel m = mdl(b, tol);
    if (n.kind == PolytopeNorm::Kind::slope) return m;
    const int top = sup_level(m);
    std::vector<std::size_t> order(b.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) { return std::abs(b[a]) < std::abs(b[c]); });
    SlopeModel out(b.size(), 0);
    int level = 0;
    for (auto j : order) {
        if (m[j] == 0) continue;
        if (n.kind == PolytopeNorm::Kind::sup && std::abs(m[j]) == top) continue;
        ++level;
        out[j] = m[j] > 0 ? level : -level;
    }
    if (n.kind == PolytopeNorm::Kind::sup && top > 0) {
        ++level;
        for (std::size_t j = 0; j < b.size(); ++j)
            if (std::abs(m[j]) == top) out[j] = m[j] > 0 ? level : -level;
    }
    return out;
}

namespace detail {

inline Vec<double> pattern_tolerances(double scale)
{
    Vec<double> out;
    for (double t : {1e-12, 1e-10, 1e-8, 1e-6, 1e-4}) out.push_back(t * (1.0 + scale));
    return out;
}

} // namespace detail

/**
 * Exact certified solution from a floating-point iterate: try the patterns
 * the iterate suggests at several clustering tolerances and certify each
 * candidate with tol = 0.
 */
inline std::optional<Vec<Rational>> polish_exact(const RationalMatrix& x, const Vec<Rational>& y, const PolytopeNorm& n,
                                                 const Vec<double>& approx)
{
    std::vector<SlopeModel> tried;
    for (double tol : detail::pattern_tolerances(max_abs(approx))) {
        SlopeModel m = pattern_model(n, approx, tol);
        if (std::find(tried.begin(), tried.end(), m) != tried.end()) continue;
        tried.push_back(m);
        auto b = solve_on_pattern(x, y, n, m);
        if (!b) continue;
        if (kkt_certify(x, y, *b, n, Rational(0)).passed) return b;
    }
    return std::nullopt;
}

/**
 * Penalized least squares 1/2 ||y - Xb||^2 + ||b|| by FISTA with
 * function-value restart, step 1/L. Every `check_every` iterations the
 * iterate and its pattern-polished version are certified at opts.tol.
 */
inline Solution<double> solve_penalized(const Matrix<double>& x, const Vec<double>& y, const PolytopeNorm& n,
                                        const SolverOptions& opts = {})
{
    const std::size_t p = x.cols();
    if (x.rows() != y.size()) throw std::invalid_argument("solve_penalized: response length mismatch");
    if (n.p != p) throw std::invalid_argument("solve_penalized: norm dimension mismatch");

    const double lip = lipschitz_constant(x, opts.power_iterations);
    const double step = 1.0 / lip;
    Vec<double> b = opts.initial.empty() ? Vec<double>(p, 0.0) : opts.initial;
    if (b.size() != p) throw std::invalid_argument("solve_penalized: initial point length mismatch");
    Vec<double> v = b;
    double t = 1.0;
    double f_cur = objective_value(x, y, n, b);

    Solution<double> best;
    best.point = b;
    best.objective = f_cur;
    best.objective_history.push_back(f_cur);

    auto try_accept = [&](const Vec<double>& cand, bool polished) {
        auto cert = kkt_certify(x, y, cand, n, opts.tol);
        if (!cert.passed) return false;
        best.point = cand;
        best.objective = objective_value(x, y, n, cand);
        best.certificate = cert;
        best.certified = true;
        best.polished = polished;
        return true;
    };

    if (try_accept(b, false)) return best;

    std::size_t it = 0;
    for (; it < opts.max_iter; ++it) {
        Vec<double> grad = transpose_times(x, Vec<double>(x * v - y));
        Vec<double> trial(p);
        for (std::size_t j = 0; j < p; ++j) trial[j] = v[j] - step * grad[j];
        Vec<double> next = prox_norm(n, trial, step);
        const double f_next = objective_value(x, y, n, next);

        if (opts.restart && f_next > f_cur) {
            // Momentum overshot: restart from the last accepted iterate.
            t = 1.0;
            v = b;
            continue;
        }
        const double t_next = (1.0 + std::sqrt(1.0 + 4.0 * t * t)) / 2.0;
        const double mom = (t - 1.0) / t_next;
        for (std::size_t j = 0; j < p; ++j) v[j] = next[j] + mom * (next[j] - b[j]);
        b = std::move(next);
        t = t_next;
        f_cur = f_next;
        best.objective_history.push_back(f_cur);

        if ((it + 1) % opts.check_every == 0) {
            best.iterations = it + 1;
            if (try_accept(b, false)) return best;
            for (double tol : detail::pattern_tolerances(max_abs(b))) {
                auto cand = solve_on_pattern(x, y, n, pattern_model(n, b, tol));
                if (cand && try_accept(*cand, true)) return best;
            }
        }
    }
    best.iterations = it;
    best.point = b;
    best.objective = f_cur;
    best.certificate = kkt_certify(x, y, b, n, opts.tol);
    best.certified = false;
    return best;
}

/** Exact-input convenience: float solve, then exact polish and certification with tol = 0. */
inline Solution<Rational> solve_penalized_exact(const RationalMatrix& x, const Vec<Rational>& y, const PolytopeNorm& n,
                                                const SolverOptions& opts = {})
{
    Solution<double> approx = solve_penalized(to_double(x), to_double(y), n, opts);
    Solution<Rational> out;
    out.route = SolveRoute::fista;
    out.iterations = approx.iterations;
    out.objective_history = approx.objective_history;
    auto exact = polish_exact(x, y, n, approx.point);
    if (!exact) {
        for (const auto& v : approx.point) out.point.push_back(from_double(v));
        out.objective = objective_value(x, y, n, out.point);
        out.certificate = kkt_certify(x, y, out.point, n, Rational(0));
        out.certified = false;
        return out;
    }
    out.point = std::move(*exact);
    out.objective = objective_value(x, y, n, out.point);
    out.certificate = kkt_certify(x, y, out.point, n, Rational(0));
    out.certified = out.certificate->passed;
    out.polished = true;
    return out;
}

class NotInColumnSpace : public std::invalid_argument
{
public:
    NotInColumnSpace() : std::invalid_argument("y not in column space") {}
};

struct BpSolution
{
    Vec<Rational> point;
    Rational value;
    std::optional<Vec<Rational>> dual;  // z certifying the point
    bool certified = false;
};

/** min ||b||_1 subject to Xb = y, exactly, via split variables b = b+ - b-. */
inline BpSolution solve_bp(const RationalMatrix& x, const Vec<Rational>& y)
{
    if (y.size() != x.rows()) throw std::invalid_argument("solve_bp: response length mismatch");
    if (!solve_exact(x, y)) throw NotInColumnSpace();
    const std::size_t p = x.cols();
    LinearProgram lp(2 * p);
    lp.set_objective(Vec<Rational>(2 * p, Rational(1)));
    for (std::size_t j = 0; j < 2 * p; ++j) lp.set_nonnegative(j);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        Vec<Rational> row(2 * p);
        for (std::size_t j = 0; j < p; ++j) {
            row[j] = x(i, j);
            row[p + j] = -x(i, j);
        }
        lp.add_eq(std::move(row), y[i]);
    }
    LpResult r = lp_solve(lp);
    if (!r.optimal()) throw std::logic_error("basis pursuit LP not optimal");
    BpSolution out;
    out.point.resize(p);
    for (std::size_t j = 0; j < p; ++j) out.point[j] = r.point[j] - r.point[p + j];
    out.value = r.value;
    out.dual = bp_dual_certificate(x, out.point);
    out.certified = out.dual && bp_certify(x, y, out.point, *out.dual);
    return out;
}

struct NormMin
{
    Rational value;
    Vec<Rational> argmin;
};

/** min{ ||b|| : Xb = X target }, exactly. */
inline NormMin norm_min_subject_to(const RationalMatrix& x, const Vec<Rational>& target, const PolytopeNorm& n)
{
    const std::size_t p = x.cols();
    if (target.size() != p || n.p != p) throw std::invalid_argument("norm_min_subject_to: dimension mismatch");
    const Vec<Rational> xt = x * target;

    // Layout: b (p) | u (p) | extra.
    std::size_t nvars = 2 * p;
    std::vector<std::size_t> active_k;
    if (n.kind == PolytopeNorm::Kind::sup) nvars += 1;
    if (n.kind == PolytopeNorm::Kind::slope) {
        for (std::size_t k = 0; k < p; ++k) {
            Rational next = k + 1 < p ? n.weights[k + 1] : Rational(0);
            if (n.weights[k] - next > 0) active_k.push_back(k);
        }
        nvars += active_k.size() * (1 + p);  // theta_k and r_{ik}
    }
    LinearProgram lp(nvars);
    auto unit = [&](std::initializer_list<std::pair<std::size_t, Rational>> entries) {
        Vec<Rational> row(nvars, Rational(0));
        for (const auto& [j, v] : entries) row[j] = v;
        return row;
    };
    for (std::size_t i = 0; i < x.rows(); ++i) {
        Vec<Rational> row(nvars, Rational(0));
        for (std::size_t j = 0; j < p; ++j) row[j] = x(i, j);
        lp.add_eq(std::move(row), xt[i]);
    }
    for (std::size_t j = 0; j < p; ++j) {
        lp.add_ge(unit({{p + j, Rational(1)}, {j, Rational(-1)}}), Rational(0));
        lp.add_ge(unit({{p + j, Rational(1)}, {j, Rational(1)}}), Rational(0));
    }
    Vec<Rational> c(nvars, Rational(0));
    switch (n.kind) {
    case PolytopeNorm::Kind::l1:
        for (std::size_t j = 0; j < p; ++j) c[p + j] = n.scale;
        break;
    case PolytopeNorm::Kind::sup: {
        const std::size_t tv = 2 * p;
        c[tv] = n.scale;
        for (std::size_t j = 0; j < p; ++j) lp.add_ge(unit({{tv, Rational(1)}, {p + j, Rational(-1)}}), Rational(0));
        break;
    }
    case PolytopeNorm::Kind::slope: {
        // ||u||_w = sum_k (w_k - w_{k+1}) S_k(u), S_k(u) = min_theta k*theta + sum_i (u_i - theta)_+.
        std::size_t pos = 2 * p;
        for (auto k : active_k) {
            const Rational coef = n.weights[k] - (k + 1 < p ? n.weights[k + 1] : Rational(0));
            const std::size_t theta = pos++;
            c[theta] = coef * Rational(static_cast<long>(k + 1));
            for (std::size_t i = 0; i < p; ++i) {
                const std::size_t r = pos++;
                c[r] = coef;
                lp.set_nonnegative(r);
                lp.add_ge(unit({{r, Rational(1)}, {p + i, Rational(-1)}, {theta, Rational(1)}}), Rational(0));
            }
        }
        break;
    }
    }
    lp.set_objective(std::move(c));
    LpResult r = lp_solve(lp);
    if (!r.optimal()) throw std::logic_error("norm minimization LP not optimal");
    NormMin out;
    out.argmin.assign(r.point.begin(), r.point.begin() + static_cast<std::ptrdiff_t>(p));
    out.value = norm_value(n, out.argmin);
    if (out.value != r.value) throw std::logic_error("norm minimization LP value disagrees with the norm at its argmin");
    return out;
}

} // namespace polyuniq
