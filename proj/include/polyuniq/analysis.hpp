#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "exact_linalg.hpp"
#include "face.hpp"
#include "geometry.hpp"
#include "models.hpp"
#include "norms.hpp"
#include "solvers.hpp"

namespace polyuniq {

/** Enumeration limits for exact sweeps. */
struct Caps
{
    std::size_t slope_dim = 6;
    std::size_t cube_dim = 10;
    std::size_t vertices = 200000;

    /** Defaults, overridden by POLYUNIQ_SLOPE_CAP / POLYUNIQ_CUBE_CAP / POLYUNIQ_VERTEX_CAP. */
    static Caps from_env()
    {
        Caps c;
        auto read = [](const char* name, std::size_t& target) {
            if (const char* v = std::getenv(name)) {
                char* end = nullptr;
                unsigned long long parsed = std::strtoull(v, &end, 10);
                if (end == v || *end != '\0' || parsed == 0)
                    throw std::invalid_argument(std::string(name) + " must be a positive integer");
                target = static_cast<std::size_t>(parsed);
            }
        };
        read("POLYUNIQ_SLOPE_CAP", c.slope_dim);
        read("POLYUNIQ_CUBE_CAP", c.cube_dim);
        read("POLYUNIQ_VERTEX_CAP", c.vertices);
        return c;
    }
};

/** Two distinct minimizers sharing response y and objective value. */
struct NonUniquenessWitness
{
    Vec<Rational> y;
    Vec<Rational> beta_hat;
    Vec<Rational> beta_tilde;
    Vec<Rational> z;  // X'z lies on the offending face
    Rational objective;
};

struct UniquenessReport
{
    bool unique_for_all_y = true;
    std::size_t rank = 0;
    std::optional<Face> offending_face;
    std::optional<NonUniquenessWitness> witness;
    std::size_t faces_checked = 0;
};

class UnverifiedWitness : public std::logic_error
{
public:
    explicit UnverifiedWitness(const std::string& what) : std::logic_error(what) {}
};

namespace detail {

/** First nonzero entry positive; row(X) is symmetric so F and -F intersect it together. */
inline bool canonical_sign(const std::vector<int>& pattern)
{
    for (int v : pattern)
        if (v != 0) return v > 0;
    return true;
}

/** Faces of the dual ball with codim > r, ascending codim, deterministic order within a level. */
inline std::vector<Face> faces_above_codim(const PolytopeNorm& n, std::size_t r, const Caps& caps)
{
    const std::size_t p = n.p;
    std::vector<Face> out;
    switch (n.kind) {
    case PolytopeNorm::Kind::l1:
        for (const auto& s : enumerate_sign_vectors(p, caps.cube_dim))
            if (support_size(s) > r && canonical_sign(s)) out.push_back(Face::box(s, n.scale));
        break;
    case PolytopeNorm::Kind::sup:
        for (const auto& s : enumerate_sign_vectors(p, caps.cube_dim)) {
            if (support_size(s) == 0 || !canonical_sign(s)) continue;
            Face f = Face::cross(s, n.scale);
            if (f.codim() > r) out.push_back(std::move(f));
        }
        break;
    case PolytopeNorm::Kind::slope: {
        const bool strict = n.strict_weights();
        std::vector<std::vector<Vec<Rational>>> seen;
        for (const auto& m : enumerate_models(p, caps.slope_dim)) {
            if (!canonical_sign(m)) continue;
            if (strict) {
                if (static_cast<std::size_t>(sup_level(m)) > r) out.push_back(model_to_face(m, n.weights));
                continue;
            }
            // Ties or zero weights: several models share a face; keep one representative.
            Face f = permutahedral_face(to_rational(m), n.weights);
            if (f.codim() <= r) continue;
            auto verts = f.vertices(caps.vertices);
            if (std::find(seen.begin(), seen.end(), verts) != seen.end()) continue;
            seen.push_back(std::move(verts));
            out.push_back(std::move(f));
        }
        break;
    }
    }
    std::stable_sort(out.begin(), out.end(), [](const Face& a, const Face& b) { return a.codim() < b.codim(); });
    return out;
}

} // namespace detail

/**
 * Build (y, beta_hat, beta_tilde) for a face F of the dual ball that meets
 * row(X) and has codim > rk(X). With V_I the primal-ball vertices exposed by
 * F: beta_hat = sum V_I, y = X beta_hat + z, beta_tilde = beta_hat + h with
 * h = V_I c in ker(X), max |c_l| < 1. Both points are certified exactly.
 */
inline NonUniquenessWitness build_uniqueness_witness(const RationalMatrix& x, const PolytopeNorm& n, const Face& f,
                                                     const IntersectionWitness& hit, const Caps& caps = {})
{
    const std::size_t p = x.cols();
    const auto face_verts = f.vertices(caps.vertices);
    std::vector<Vec<Rational>> exposed;
    for (const auto& v : primal_ball_vertices(n, caps.vertices)) {
        bool all_one = true;
        for (const auto& s : face_verts)
            if (dot(v, s) != 1) {
                all_one = false;
                break;
            }
        if (all_one) exposed.push_back(v);
    }
    if (exposed.empty()) throw UnverifiedWitness("face exposes no vertex of the primal ball");

    NonUniquenessWitness w;
    w.beta_hat.assign(p, Rational(0));
    for (const auto& v : exposed) w.beta_hat = w.beta_hat + v;
    w.z = hit.z;
    w.y = x * w.beta_hat + hit.z;

    RationalMatrix vi = RationalMatrix::from_columns(exposed, p);
    std::optional<Vec<Rational>> h;
    for (auto c : kernel_basis(x * vi)) {
        Vec<Rational> cand = vi * c;
        if (is_zero(cand)) continue;
        const Rational scale = Rational(1) / (Rational(2) * max_abs(c));
        h = scaled(cand, scale);
        break;
    }
    if (!h) throw UnverifiedWitness("col(V_I) meets ker(X) only at 0");
    w.beta_tilde = w.beta_hat + *h;

    const auto c1 = kkt_certify(x, w.y, w.beta_hat, n, Rational(0));
    const auto c2 = kkt_certify(x, w.y, w.beta_tilde, n, Rational(0));
    w.objective = objective_value(x, w.y, n, w.beta_hat);
    if (!c1.passed || !c2.passed || w.objective != objective_value(x, w.y, n, w.beta_tilde) ||
        w.beta_hat == w.beta_tilde)
        throw UnverifiedWitness("constructed non-uniqueness witness failed exact certification");
    return w;
}

/**
 * Is the penalized minimizer unique for every response? Sweeps the faces of
 * the dual ball with codim > rk(X) and stops at the first one meeting row(X).
 */
inline UniquenessReport check_uniqueness(const RationalMatrix& x, const PolytopeNorm& n, const Caps& caps = {})
{
    if (n.p != x.cols()) throw std::invalid_argument("norm dimension does not match matrix columns");
    UniquenessReport rep;
    rep.rank = rank(x);
    const auto kernel = kernel_basis(x);
    for (const Face& f : detail::faces_above_codim(n, rep.rank, caps)) {
        ++rep.faces_checked;
        auto hit = face_intersects_rowspace(f, x, kernel, caps.vertices);
        if (!hit) continue;
        rep.unique_for_all_y = false;
        rep.offending_face = f;
        rep.witness = build_uniqueness_witness(x, n, f, *hit, caps);
        return rep;
    }
    return rep;
}

/** Basis pursuit analogue: two distinct l1-minimizers with Xb = y, certified by the same z. */
struct BpWitness
{
    Vec<Rational> y;
    Vec<Rational> beta_hat;
    Vec<Rational> beta_tilde;
    Vec<Rational> z;
    Rational value;
};

struct BpUniquenessReport
{
    bool unique_for_all_y = true;
    std::size_t rank = 0;
    std::optional<Face> offending_face;
    std::optional<BpWitness> witness;
    std::size_t faces_checked = 0;
};

/**
 * Basis pursuit: non-unique for some y in col(X) iff row(X) meets a face of
 * [-1,1]^p with codim > rk(X). Witness: beta_hat = sigma, y = X sigma,
 * beta_tilde = sigma + h with h in ker(X), supp(h) in supp(sigma), |h|_inf < 1.
 */
inline BpUniquenessReport check_uniqueness_bp(const RationalMatrix& x, const Caps& caps = {})
{
    const std::size_t p = x.cols();
    BpUniquenessReport rep;
    rep.rank = rank(x);
    const auto kernel = kernel_basis(x);
    for (const auto& sigma : enumerate_sign_vectors(p, caps.cube_dim)) {
        if (support_size(sigma) <= rep.rank || !detail::canonical_sign(sigma)) continue;
        ++rep.faces_checked;
        Face f = Face::box(sigma, Rational(1));
        auto hit = face_intersects_rowspace(f, x, kernel, caps.vertices);
        if (!hit) continue;

        std::vector<std::size_t> support;
        for (std::size_t j = 0; j < p; ++j)
            if (sigma[j] != 0) support.push_back(j);
        auto ker_j = kernel_basis(x.select_columns(support));
        if (ker_j.empty()) throw UnverifiedWitness("X_J has trivial kernel although |J| > rk(X)");
        const Vec<Rational>& hj = ker_j.front();
        const Rational scale = Rational(1) / (Rational(2) * max_abs(hj));

        BpWitness w;
        w.beta_hat = to_rational(sigma);
        w.beta_tilde = w.beta_hat;
        for (std::size_t t = 0; t < support.size(); ++t) w.beta_tilde[support[t]] += hj[t] * scale;
        w.y = x * w.beta_hat;
        w.z = hit->z;
        w.value = norm_value(PolytopeNorm::l1(p), w.beta_hat);
        if (!bp_certify(x, w.y, w.beta_hat, w.z) || !bp_certify(x, w.y, w.beta_tilde, w.z) ||
            norm_value(PolytopeNorm::l1(p), w.beta_tilde) != w.value)
            throw UnverifiedWitness("basis pursuit witness failed exact certification");

        rep.unique_for_all_y = false;
        rep.offending_face = std::move(f);
        rep.witness = std::move(w);
        return rep;
    }
    return rep;
}

enum class Route { geometric, analytic, both };

struct AccessibilityReport
{
    std::vector<int> pattern;
    bool accessible = false;
    std::optional<bool> geometric;
    std::optional<Vec<Rational>> geometric_witness;  // z with X'z on the pattern's face
    std::optional<bool> analytic;
    std::optional<Rational> analytic_value;  // min ||b|| subject to Xb = X pattern
    Rational pattern_norm;
    std::optional<Vec<Rational>> response_witness;     // penalized problem
    std::optional<Vec<Rational>> response_witness_bp;  // basis pursuit (sign vectors only)
    bool witness_certified = false;
};

class RouteDisagreement : public std::logic_error
{
public:
    explicit RouteDisagreement(const std::string& what) : std::logic_error(what) {}
};

namespace detail {

inline AccessibilityReport assess_pattern(const RationalMatrix& x, const std::vector<int>& pattern, const Face& unit_face, const PolytopeNorm& n, Route route,
                                          const std::vector<Vec<Rational>>& kernel, const Caps& caps, bool is_sign)
{
    AccessibilityReport r;
    r.pattern = pattern;
    const Vec<Rational> s = to_rational(pattern);
    r.pattern_norm = norm_value(n, s);
    std::optional<IntersectionWitness> hit;
    if (route != Route::analytic) {
        hit = face_intersects_rowspace(unit_face, x, kernel, caps.vertices);
        r.geometric = hit.has_value();
        if (hit) r.geometric_witness = hit->z;
    }
    if (route != Route::geometric) {
        NormMin nm = norm_min_subject_to(x, s, n);
        r.analytic_value = nm.value;
        r.analytic = nm.value >= r.pattern_norm;
    }
    if (r.geometric && r.analytic && *r.geometric != *r.analytic)
        throw RouteDisagreement("geometric and analytic accessibility disagree at " + format_pattern(pattern));
    r.accessible = r.geometric ? *r.geometric : *r.analytic;
    if (!r.accessible) return r;

    if (!hit) hit = face_intersects_rowspace(unit_face, x, kernel, caps.vertices);
    if (!hit) throw RouteDisagreement("analytic route accepts " + format_pattern(pattern) + " but no face point found");
    // The unit face scaled by the norm's parameter is the subdifferential at the pattern.
    const Rational lambda = n.kind == PolytopeNorm::Kind::slope ? Rational(1) : n.scale;
    Vec<Rational> y = scaled(hit->z, lambda) + x * s;
    r.response_witness = y;
    const bool pen_ok = kkt_certify(x, y, s, n, Rational(0)).passed &&
                        (is_sign ? sign_vector(s) == pattern : mdl(s) == pattern);
    bool bp_ok = true;
    if (is_sign) {
        r.response_witness_bp = x * s;
        bp_ok = bp_certify(x, *r.response_witness_bp, s, hit->z);
    }
    r.witness_certified = pen_ok && bp_ok;
    if (!r.witness_certified) throw UnverifiedWitness("accessibility witness for " + format_pattern(pattern) + " failed certification");
    return r;
}

} // namespace detail

/**
 * Sweep all sign vectors: sigma is accessible (LASSO and basis pursuit) iff
 * row(X) meets the cube face of sigma iff Xb = X sigma forces ||b||_1 >= ||sigma||_1.
 */
inline std::vector<AccessibilityReport> accessible_sign_vectors(const RationalMatrix& x, Route route = Route::both,
                                                                const Rational& lambda = Rational(1),
                                                                const Caps& caps = {})
{
    const std::size_t p = x.cols();
    const auto kernel = kernel_basis(x);
    const PolytopeNorm n = PolytopeNorm::l1(p, lambda);
    std::vector<AccessibilityReport> out;
    for (const auto& sigma : enumerate_sign_vectors(p, caps.cube_dim)) {
        Face unit = Face::box(sigma, Rational(1));
        out.push_back(detail::assess_pattern(x, sigma, unit, n, route, kernel, caps, true));
    }
    return out;
}

/** Sweep all SLOPE models: m is accessible iff row(X) meets F_w(m) iff Xb = Xm forces ||b||_w >= ||m||_w. */
inline std::vector<AccessibilityReport> accessible_slope_models(const RationalMatrix& x, const Vec<Rational>& w,
                                                                Route route = Route::both, const Caps& caps = {})
{
    const std::size_t p = x.cols();
    if (w.size() != p) throw std::invalid_argument("weights length does not match matrix columns");
    validate_strict_weights(w);
    const auto kernel = kernel_basis(x);
    const PolytopeNorm n = PolytopeNorm::slope(w);
    std::vector<AccessibilityReport> out;
    for (const auto& m : enumerate_models(p, caps.slope_dim)) {
        Face f = model_to_face(m, w);
        out.push_back(detail::assess_pattern(x, m, f, n, route, kernel, caps, false));
    }
    return out;
}

class UncertifiedSolve : public std::runtime_error
{
public:
    UncertifiedSolve(const std::string& what, Vec<double> best) : std::runtime_error(what), best_iterate(std::move(best)) {}
    Vec<double> best_iterate;
};

struct ResponseClassification
{
    SlopeModel model;
    Vec<Rational> beta;
    Vec<Rational> residual;  // u = y - X beta, with X'u on F_w(model)
    Face face;
    bool ambiguous = false;
    Solution<Rational> solution;
};

/**
 * Solve SLOPE at y, certify exactly, and report the model of the solution
 * together with the residual. `ambiguous` is set when minimizers need not be
 * unique for this X, in which case other minimizers may carry other models.
 */
inline ResponseClassification classify_response(const RationalMatrix& x, const Vec<Rational>& w, const Vec<Rational>& y,
                                                const SolverOptions& opts = {}, const Caps& caps = {})
{
    validate_strict_weights(w);
    const PolytopeNorm n = PolytopeNorm::slope(w);
    Solution<Rational> sol = solve_penalized_exact(x, y, n, opts);
    if (!sol.certified) throw UncertifiedSolve("solver did not reach a certified solution", to_double(sol.point));
    SlopeModel m = mdl(sol.point);
    Face f = model_to_face(m, w);
    Vec<Rational> u = y - x * sol.point;
    if (!f.contains(transpose_times(x, u))) throw UnverifiedWitness("residual does not map into F_w(m)");
    const bool unique = check_uniqueness(x, n, caps).unique_for_all_y;
    return ResponseClassification{m, sol.point, u, f, !unique, sol};
}

struct NullProjection
{
    Vec<Rational> residual;  // exact when `exact`
    Vec<Rational> beta;
    bool exact = false;
};

/** u = y - X beta for a certified minimizer; the projection of y onto {u : ||X'u||* <= 1}. */
inline NullProjection null_set_projection(const RationalMatrix& x, const PolytopeNorm& n, const Vec<Rational>& y,
                                          const SolverOptions& opts = {})
{
    if (dual_ball_membership(n, transpose_times(x, y)))
        return NullProjection{y, Vec<Rational>(x.cols(), Rational(0)), true};
    Solution<Rational> sol = solve_penalized_exact(x, y, n, opts);
    if (sol.certified) return NullProjection{y - x * sol.point, sol.point, true};
    Solution<double> fl = solve_penalized(to_double(x), to_double(y), n, opts);
    if (!fl.certified) throw UncertifiedSolve("solver did not reach a certified solution", fl.point);
    NullProjection out;
    for (double v : fl.point) out.beta.push_back(from_double(v));
    out.residual = y - x * out.beta;
    out.exact = false;
    return out;
}

struct GenericityTrial
{
    std::size_t index = 0;
    bool unique = false;
    std::size_t rank = 0;
    std::size_t faces_checked = 0;
};

struct GenericityResult
{
    double fraction = 0;
    std::size_t unique_count = 0;
    std::vector<GenericityTrial> trials;
};

/** Standard normal entry rounded to 12 significant digits, as an exact rational. */
inline Rational discretized_gaussian(std::mt19937_64& rng)
{
    std::normal_distribution<double> dist(0.0, 1.0);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.11e", dist(rng));
    return parse_rational(buf);
}

/** Gaussian design for trial `trial`; each trial has its own seeded stream. */
inline RationalMatrix gaussian_design(std::size_t n, std::size_t p, std::uint64_t seed, std::size_t trial)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial & 0xffffffffu), static_cast<std::uint32_t>(trial >> 32)};
    std::mt19937_64 rng(seq);
    RationalMatrix x(n, p);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) x(i, j) = discretized_gaussian(rng);
    return x;
}

/**
 * Fraction of Gaussian designs for which the minimizer is unique for all y.
 * An empty `norm` means basis pursuit.
 */
inline GenericityResult genericity_experiment(std::size_t n, std::size_t p, const std::optional<PolytopeNorm>& norm,
                                              std::size_t trials, std::uint64_t seed, const Caps& caps = {})
{
    if (trials == 0) throw std::invalid_argument("trials must be at least 1");
    if (norm && norm->p != p) throw std::invalid_argument("norm dimension does not match p");
    GenericityResult res;
    for (std::size_t t = 0; t < trials; ++t) {
        RationalMatrix x = gaussian_design(n, p, seed, t);
        GenericityTrial tr;
        tr.index = t;
        if (norm) {
            auto rep = check_uniqueness(x, *norm, caps);
            tr.unique = rep.unique_for_all_y;
            tr.rank = rep.rank;
            tr.faces_checked = rep.faces_checked;
        } else {
            auto rep = check_uniqueness_bp(x, caps);
            tr.unique = rep.unique_for_all_y;
            tr.rank = rep.rank;
            tr.faces_checked = rep.faces_checked;
        }
        res.unique_count += tr.unique ? 1 : 0;
        res.trials.push_back(tr);
    }
    res.fraction = static_cast<double>(res.unique_count) / static_cast<double>(trials);
    return res;
}

} // namespace polyuniq
