#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "matrix.hpp"
#include "models.hpp"
#include "rational.hpp"
#include "signed_permutation.hpp"

namespace polyuniq {

/** Thrown when weights do not satisfy w_1 > ... > w_p > 0 for model-level operations. */
class InvalidWeights : public std::invalid_argument
{
public:
    explicit InvalidWeights(const std::string& what) : std::invalid_argument(what) {}
};

enum class FaceKind
{
    box,           // face of the cube [-s, s]^p
    cross,         // face of the cross-polytope s * conv{+-e_j}
    permutahedral  // face of a sign permutahedron, product of (sign) permutahedra
};

/**
 * One factor of a permutahedral face. The coordinates `coords`, after
 * multiplication by the face's coordinate signs, range over the
 * permutahedron of `weights` (or the sign permutahedron when `signed_block`).
 */
struct PermBlock
{
    std::vector<std::size_t> coords;
    Vec<Rational> weights;
    bool signed_block = false;
};

/**
 * Face of a dual-norm unit ball, kept in structural form.
 *
 * Vertices are only materialized on request; every query is a pure function
 * of the immutable structure, so a Face can be shared between threads.
 */
class Face
{
public:
    static Face box(const SignVector& fixed, const Rational& scale)
    {
        if (!is_sign_vector(fixed)) throw std::invalid_argument("box face: entries must be in {-1,0,1}");
        if (scale <= 0) throw std::invalid_argument("box face: scale must be positive");
        Face f(FaceKind::box, fixed.size());
        f.scale_ = scale;
        f.pattern_ = fixed;
        f.codim_ = support_size(fixed);
        return f;
    }

    /** Face conv{scale * signs_j * e_j : j in supp}; the zero pattern is the whole ball. */
    static Face cross(const SignVector& signs, const Rational& scale)
    {
        if (!is_sign_vector(signs)) throw std::invalid_argument("cross face: entries must be in {-1,0,1}");
        if (scale <= 0) throw std::invalid_argument("cross face: scale must be positive");
        Face f(FaceKind::cross, signs.size());
        f.scale_ = scale;
        f.pattern_ = signs;
        const std::size_t k = support_size(signs);
        f.codim_ = k == 0 ? 0 : signs.size() - k + 1;
        return f;
    }

    static Face permutahedral(std::size_t p, std::vector<PermBlock> blocks, std::vector<int> coord_signs,
                              SlopeModel label)
    {
        Face f(FaceKind::permutahedral, p);
        f.blocks_ = std::move(blocks);
        f.coord_signs_ = std::move(coord_signs);
        f.pattern_ = std::move(label);
        std::size_t dim = 0;
        for (const auto& b : f.blocks_) {
            const bool all_equal =
                std::all_of(b.weights.begin(), b.weights.end(), [&](const Rational& v) { return v == b.weights[0]; });
            const bool any_nonzero =
                std::any_of(b.weights.begin(), b.weights.end(), [](const Rational& v) { return v != 0; });
            if (b.signed_block)
                dim += any_nonzero ? b.coords.size() : 0;
            else
                dim += all_equal ? 0 : b.coords.size() - 1;
        }
        f.codim_ = p - dim;
        return f;
    }

    FaceKind kind() const { return kind_; }
    std::size_t ambient_dim() const { return p_; }
    std::size_t codim() const { return codim_; }
    const Rational& scale() const { return scale_; }
    const std::vector<PermBlock>& blocks() const { return blocks_; }
    const std::vector<int>& coord_signs() const { return coord_signs_; }

    /** Defining pattern: sign vector (box, cross) or SLOPE model (permutahedral). */
    const std::vector<int>& label() const { return pattern_; }

    /** True when the face is the whole dual ball (and so contains 0). */
    bool is_full_ball() const
    {
        if (kind_ == FaceKind::permutahedral)
            return blocks_.size() == 1 && blocks_[0].signed_block;
        return support_size(pattern_) == 0;
    }

    /** Upper bound on the number of vertex generators, without materializing. */
    double vertex_count_bound() const
    {
        double count = 1;
        switch (kind_) {
        case FaceKind::box:
            for (int v : pattern_) count *= v == 0 ? 2.0 : 1.0;
            return count;
        case FaceKind::cross:
            return is_full_ball() ? 2.0 * static_cast<double>(p_) : static_cast<double>(support_size(pattern_));
        case FaceKind::permutahedral:
            for (const auto& b : blocks_) {
                for (std::size_t k = 2; k <= b.coords.size(); ++k) count *= static_cast<double>(k);
                if (b.signed_block) count *= std::pow(2.0, static_cast<double>(b.coords.size()));
            }
            return count;
        }
        return count;
    }

    /** Exact membership test, independent of the vertex list (uses majorization for permutahedra). */
    bool contains(const Vec<Rational>& s) const
    {
        if (s.size() != p_) throw std::invalid_argument("face membership: dimension mismatch");
        switch (kind_) {
        case FaceKind::box:
            for (std::size_t j = 0; j < p_; ++j) {
                if (pattern_[j] != 0) {
                    if (s[j] != scale_ * pattern_[j]) return false;
                } else if (abs(s[j]) > scale_) {
                    return false;
                }
            }
            return true;
        case FaceKind::cross: {
            Rational l1 = 0;
            for (const auto& v : s) l1 += abs(v);
            if (is_full_ball()) return l1 <= scale_;
            for (std::size_t j = 0; j < p_; ++j) {
                if (pattern_[j] == 0 && s[j] != 0) return false;
                if (pattern_[j] * sign(s[j]) < 0) return false;
            }
            return l1 == scale_;
        }
        case FaceKind::permutahedral:
            for (const auto& b : blocks_) {
                Vec<Rational> t;
                for (auto c : b.coords) t.push_back(coord_signs_[c] < 0 ? Rational(-s[c]) : s[c]);
                if (b.signed_block)
                    for (auto& v : t) v = abs(v);
                std::sort(t.begin(), t.end(), std::greater<>());
                Vec<Rational> w = b.weights;
                std::sort(w.begin(), w.end(), std::greater<>());
                Rational st = 0, sw = 0;
                for (std::size_t k = 0; k < t.size(); ++k) {
                    st += t[k];
                    sw += w[k];
                    if (st > sw) return false;
                }
                if (!b.signed_block && st != sw) return false;
            }
            return true;
        }
        return false;
    }

    /**
     * Exact vertex generators, sorted and deduplicated. Throws CapExceeded
     * when the structural bound exceeds `cap`.
     */
    std::vector<Vec<Rational>> vertices(std::size_t cap = 200000) const
    {
        if (vertex_count_bound() > static_cast<double>(cap))
            throw CapExceeded("face has more than " + std::to_string(cap) + " vertex generators");
        std::vector<Vec<Rational>> out;
        switch (kind_) {
        case FaceKind::box: {
            std::vector<std::size_t> free;
            Vec<Rational> base(p_, Rational(0));
            for (std::size_t j = 0; j < p_; ++j) {
                if (pattern_[j] != 0)
                    base[j] = scale_ * pattern_[j];
                else
                    free.push_back(j);
            }
            for (std::size_t mask = 0; mask < (std::size_t{1} << free.size()); ++mask) {
                Vec<Rational> v = base;
                for (std::size_t t = 0; t < free.size(); ++t)
                    v[free[t]] = (mask >> t) & 1u ? Rational(-scale_) : scale_;
                out.push_back(std::move(v));
            }
            break;
        }
        case FaceKind::cross:
            for (std::size_t j = 0; j < p_; ++j) {
                for (int sgn : {1, -1}) {
                    if (!is_full_ball() && pattern_[j] != sgn) continue;
                    Vec<Rational> v(p_, Rational(0));
                    v[j] = scale_ * sgn;
                    out.push_back(std::move(v));
                }
            }
            break;
        case FaceKind::permutahedral: {
            std::vector<std::vector<Vec<Rational>>> per_block;
            for (const auto& b : blocks_) per_block.push_back(block_points(b));
            Vec<Rational> current(p_, Rational(0));
            std::function<void(std::size_t)> rec = [&](std::size_t bi) {
                if (bi == blocks_.size()) {
                    out.push_back(current);
                    return;
                }
                const auto& b = blocks_[bi];
                for (const auto& pt : per_block[bi]) {
                    for (std::size_t t = 0; t < b.coords.size(); ++t) {
                        const std::size_t c = b.coords[t];
                        current[c] = coord_signs_[c] < 0 ? Rational(-pt[t]) : pt[t];
                    }
                    rec(bi + 1);
                }
            };
            rec(0);
            break;
        }
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

private:
    Face(FaceKind kind, std::size_t p) : kind_(kind), p_(p), scale_(1) {}

    static std::vector<Vec<Rational>> block_points(const PermBlock& b)
    {
        std::vector<Vec<Rational>> pts;
        Vec<Rational> w = b.weights;
        std::sort(w.begin(), w.end());
        do {
            if (!b.signed_block) {
                pts.push_back(w);
                continue;
            }
            for (std::size_t mask = 0; mask < (std::size_t{1} << w.size()); ++mask) {
                Vec<Rational> v = w;
                for (std::size_t t = 0; t < w.size(); ++t)
                    if ((mask >> t) & 1u) v[t] = -v[t];
                pts.push_back(std::move(v));
            }
        } while (std::next_permutation(w.begin(), w.end()));
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        return pts;
    }

    FaceKind kind_;
    std::size_t p_;
    std::size_t codim_ = 0;
    Rational scale_;
    std::vector<int> pattern_;
    std::vector<PermBlock> blocks_;
    std::vector<int> coord_signs_;
};

/** Face {s : s_j = scale * sigma_j on supp(sigma), |s_j| <= scale elsewhere} of the cube. */
inline Face sign_to_cube_face(const SignVector& sigma, const Rational& scale = Rational(1))
{
    return Face::box(sigma, scale);
}

namespace detail {

/**
 * Permutahedral face F_w(x) for any x and nonincreasing nonnegative w.
 * x is brought to sorted nonnegative form by a signed permutation, the
 * product structure is read off the runs of equal magnitudes, and the result
 * is expressed back in the original coordinates.
 */
template <class T>
Face permutahedral_face(const Vec<T>& x, const Vec<Rational>& w)
{
    const std::size_t p = x.size();
    if (w.size() != p) throw std::invalid_argument("weights length does not match dimension");
    SignedPermutation phi = sorting_permutation(x);
    Vec<T> sorted = phi.apply(x);

    std::vector<int> coord_signs(p, 1);
    for (std::size_t j = 0; j < p; ++j) coord_signs[phi.perm()[j]] = phi.signs()[j];

    std::vector<PermBlock> blocks;
    std::size_t start = 0;
    while (start < p) {
        std::size_t end = start + 1;
        if (sorted[start] == T(0)) {
            end = p;
        } else {
            while (end < p && sorted[end] == sorted[start]) ++end;
        }
        PermBlock b;
        b.signed_block = sorted[start] == T(0);
        for (std::size_t j = start; j < end; ++j) {
            b.coords.push_back(phi.perm()[j]);
            b.weights.push_back(w[j]);
        }
        std::sort(b.coords.begin(), b.coords.end());
        blocks.push_back(std::move(b));
        start = end;
    }
    return Face::permutahedral(p, std::move(blocks), std::move(coord_signs), mdl(x));
}

} // namespace detail

inline void validate_strict_weights(const Vec<Rational>& w)
{
    if (w.empty()) throw InvalidWeights("weights must be non-empty");
    for (std::size_t j = 0; j < w.size(); ++j) {
        if (w[j] <= 0) throw InvalidWeights("weights must be positive (w_" + std::to_string(j + 1) + " <= 0)");
        if (j > 0 && !(w[j - 1] > w[j]))
            throw InvalidWeights("weights must be strictly decreasing (w_" + std::to_string(j) +
                                 " <= w_" + std::to_string(j + 1) + "); with ties the sign permutahedron "
                                 "faces no longer correspond one-to-one to SLOPE models");
    }
}

/**
 * The face F_w(m) of the sign permutahedron P_w^+- associated with a SLOPE
 * model. Its codimension equals the largest level |m|_inf.
 */
inline Face model_to_face(const SlopeModel& m, const Vec<Rational>& w)
{
    if (m.size() != w.size()) throw std::invalid_argument("model and weights differ in length");
    if (!is_slope_model(m)) throw std::invalid_argument("not a SLOPE model: " + format_pattern(m));
    validate_strict_weights(w);
    return detail::permutahedral_face(to_rational(m), w);
}

inline nlohmann::ordered_json face_to_json(const Face& f, bool with_vertices = false, std::size_t cap = 5000)
{
    nlohmann::ordered_json j;
    switch (f.kind()) {
    case FaceKind::box: j["kind"] = "box"; break;
    case FaceKind::cross: j["kind"] = "cross"; break;
    case FaceKind::permutahedral: j["kind"] = "permutahedral"; break;
    }
    j["ambient_dim"] = f.ambient_dim();
    j["codim"] = f.codim();
    j["label"] = f.label();
    if (f.kind() == FaceKind::permutahedral) {
        nlohmann::ordered_json blocks = nlohmann::ordered_json::array();
        for (const auto& b : f.blocks()) {
            nlohmann::ordered_json jb;
            jb["type"] = b.signed_block ? "sign_permutahedron" : "permutahedron";
            jb["coords"] = b.coords;
            jb["weights"] = to_strings(b.weights);
            blocks.push_back(jb);
        }
        j["blocks"] = blocks;
        j["coord_signs"] = f.coord_signs();
    } else {
        j["scale"] = to_string(f.scale());
    }
    if (with_vertices && f.vertex_count_bound() <= static_cast<double>(cap)) {
        nlohmann::ordered_json vs = nlohmann::ordered_json::array();
        for (const auto& v : f.vertices(cap)) vs.push_back(to_strings(v));
        j["vertices"] = vs;
    }
    return j;
}

} // namespace polyuniq
