#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "analysis.hpp"
#include "face.hpp"
#include "io.hpp"

namespace polyuniq {

using ordered_json = nlohmann::ordered_json;

inline ordered_json json_vec(const Vec<Rational>& v)
{
    return ordered_json(to_strings(v));
}

inline ordered_json json_matrix(const RationalMatrix& m)
{
    ordered_json out = ordered_json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) out.push_back(to_strings(m.row(i)));
    return out;
}

inline ordered_json norm_to_json(const PolytopeNorm& n)
{
    ordered_json j;
    j["kind"] = n.name();
    j["p"] = n.p;
    if (n.kind == PolytopeNorm::Kind::slope)
        j["weights"] = json_vec(n.weights);
    else
        j["lambda"] = to_string(n.scale);
    return j;
}

inline ordered_json report_to_json(const UniquenessReport& r)
{
    ordered_json j;
    j["unique_for_all_y"] = r.unique_for_all_y;
    j["rank"] = r.rank;
    j["faces_checked"] = r.faces_checked;
    j["offending_face"] = r.offending_face ? face_to_json(*r.offending_face, true) : ordered_json(nullptr);
    if (r.witness) {
        ordered_json w;
        w["y"] = json_vec(r.witness->y);
        w["beta_hat"] = json_vec(r.witness->beta_hat);
        w["beta_tilde"] = json_vec(r.witness->beta_tilde);
        w["z"] = json_vec(r.witness->z);
        w["objective"] = to_string(r.witness->objective);
        j["witness"] = w;
    } else {
        j["witness"] = nullptr;
    }
    return j;
}

inline ordered_json report_to_json(const BpUniquenessReport& r)
{
    ordered_json j;
    j["unique_for_all_y"] = r.unique_for_all_y;
    j["rank"] = r.rank;
    j["faces_checked"] = r.faces_checked;
    j["offending_face"] = r.offending_face ? face_to_json(*r.offending_face, true) : ordered_json(nullptr);
    if (r.witness) {
        ordered_json w;
        w["y"] = json_vec(r.witness->y);
        w["beta_hat"] = json_vec(r.witness->beta_hat);
        w["beta_tilde"] = json_vec(r.witness->beta_tilde);
        w["z"] = json_vec(r.witness->z);
        w["l1_value"] = to_string(r.witness->value);
        j["witness"] = w;
    } else {
        j["witness"] = nullptr;
    }
    return j;
}

inline ordered_json report_to_json(const AccessibilityReport& r)
{
    ordered_json j;
    j["pattern"] = r.pattern;
    j["accessible"] = r.accessible;
    j["geometric"] = r.geometric ? ordered_json(*r.geometric) : ordered_json(nullptr);
    j["geometric_witness"] = r.geometric_witness ? json_vec(*r.geometric_witness) : ordered_json(nullptr);
    j["analytic"] = r.analytic ? ordered_json(*r.analytic) : ordered_json(nullptr);
    j["analytic_value"] = r.analytic_value ? ordered_json(to_string(*r.analytic_value)) : ordered_json(nullptr);
    j["pattern_norm"] = to_string(r.pattern_norm);
    j["response_witness"] = r.response_witness ? json_vec(*r.response_witness) : ordered_json(nullptr);
    if (r.response_witness_bp) j["response_witness_bp"] = json_vec(*r.response_witness_bp);
    j["witness_certified"] = r.witness_certified;
    return j;
}

template <class T>
ordered_json certificate_to_json(const Certificate<T>& c)
{
    ordered_json j;
    if constexpr (std::is_same_v<T, Rational>) {
        j["dual_vector"] = json_vec(c.dual_vector);
        j["dual_norm"] = to_string(c.dual_norm);
        j["pairing_gap"] = to_string(c.pairing_gap);
    } else {
        j["dual_vector"] = c.dual_vector;
        j["dual_norm"] = c.dual_norm;
        j["pairing_gap"] = c.pairing_gap;
    }
    j["passed"] = c.passed;
    return j;
}

} // namespace polyuniq
