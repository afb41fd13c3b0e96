#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "matrix.hpp"
#include "rational.hpp"

namespace polyuniq {

/**
 * Parse a matrix from CSV text: one row per line, comma separated decimal or
 * "p/q" literals. Blank lines and lines starting with '#' are skipped.
 */
inline RationalMatrix parse_matrix_csv(const std::string& text)
{
    std::vector<Vec<Rational>> rows;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        try {
            rows.push_back(parse_rational_list(line));
        } catch (const ParseError& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
        }
        if (rows.size() > 1 && rows.back().size() != rows.front().size())
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(rows.front().size()) + " entries");
    }
    if (rows.empty() || rows.front().empty()) throw ParseError("matrix has no entries");
    return RationalMatrix::from_rows(rows);
}

/** Parse a matrix from a JSON array of arrays; entries are strings or numbers. */
inline RationalMatrix parse_matrix_json(const nlohmann::json& j)
{
    if (!j.is_array() || j.empty()) throw ParseError("matrix JSON must be a non-empty array of arrays");
    std::vector<Vec<Rational>> rows;
    for (const auto& r : j) {
        if (!r.is_array() || r.empty()) throw ParseError("matrix row must be a non-empty array");
        Vec<Rational> row;
        for (const auto& e : r) {
            if (e.is_string()) {
                row.push_back(parse_rational(e.get<std::string>()));
            } else if (e.is_number_integer()) {
                row.push_back(Rational(e.get<long long>()));
            } else if (e.is_number()) {
                // Use the literal as written in the document, not the binary double.
                row.push_back(parse_rational(e.dump()));
            } else {
                throw ParseError("matrix entries must be strings or numbers");
            }
        }
        if (!rows.empty() && row.size() != rows.front().size()) throw ParseError("ragged matrix rows");
        rows.push_back(std::move(row));
    }
    return RationalMatrix::from_rows(rows);
}

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/** Load a matrix file; `.json` files are parsed as JSON, anything else as CSV. */
inline RationalMatrix load_matrix(const std::string& path)
{
    std::string text = read_file(path);
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(std::string("invalid JSON: ") + e.what());
        }
        return parse_matrix_json(j);
    }
    return parse_matrix_csv(text);
}

inline nlohmann::json to_json(const RationalMatrix& m)
{
    nlohmann::json out = nlohmann::json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) out.push_back(to_strings(m.row(i)));
    return out;
}

inline nlohmann::json to_json(const Vec<Rational>& v)
{
    return to_strings(v);
}

} // namespace polyuniq
