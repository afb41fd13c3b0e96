#pragma once

#include <cctype>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/gmp.hpp>

namespace polyuniq {

// Expression templates off: values are used with `auto` and in generic code.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational, boost::multiprecision::et_off>;
using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int, boost::multiprecision::et_off>;

template <class T>
using Vec = std::vector<T>;

/** Thrown for malformed textual input (numbers, matrices, weight lists). */
class ParseError : public std::runtime_error
{
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/** Thrown when an exhaustive enumeration would exceed its configured bound. */
class CapExceeded : public std::runtime_error
{
public:
    explicit CapExceeded(const std::string& what) : std::runtime_error(what) {}
};

/**
 * Parse a rational literal exactly.
 *
 * Accepted forms: integers ("-3"), decimals ("1.25", ".5"), decimals with an
 * exponent ("2.5e-3"), and fractions ("p/q"). Decimals never pass through a
 * binary float, so "1.25" is exactly 5/4.
 */
inline Rational parse_rational(std::string_view text)
{
    auto trim = [](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        return s;
    };
    std::string_view s = trim(text);
    if (s.empty()) throw ParseError("empty number");

    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        Rational num = parse_rational(s.substr(0, slash));
        Rational den = parse_rational(s.substr(slash + 1));
        if (den == 0) throw ParseError("zero denominator in '" + std::string(s) + "'");
        return num / den;
    }

    bool negative = false;
    std::size_t i = 0;
    if (s[i] == '+' || s[i] == '-') {
        negative = s[i] == '-';
        ++i;
    }
    std::string digits;
    long long frac_digits = 0;
    bool seen_point = false;
    bool any_digit = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits.push_back(c);
            any_digit = true;
            if (seen_point) ++frac_digits;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (!any_digit) throw ParseError("not a number: '" + std::string(s) + "'");

    long long exponent = 0;
    if (i < s.size()) {
        if (s[i] != 'e' && s[i] != 'E') throw ParseError("not a number: '" + std::string(s) + "'");
        ++i;
        bool exp_negative = false;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
            exp_negative = s[i] == '-';
            ++i;
        }
        if (i >= s.size()) throw ParseError("bad exponent in '" + std::string(s) + "'");
        for (; i < s.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(s[i])))
                throw ParseError("bad exponent in '" + std::string(s) + "'");
            exponent = exponent * 10 + (s[i] - '0');
            if (exponent > 100000) throw ParseError("exponent out of range in '" + std::string(s) + "'");
        }
        if (exp_negative) exponent = -exponent;
    }

    // A leading zero would make the integer parser read octal.
    const auto nz = digits.find_first_not_of('0');
    Integer mantissa(nz == std::string::npos ? std::string("0") : digits.substr(nz));
    long long shift = exponent - frac_digits;
    Integer ten_pow = boost::multiprecision::pow(Integer(10), static_cast<unsigned>(shift < 0 ? -shift : shift));
    Rational value = shift >= 0 ? Rational(mantissa * ten_pow) : Rational(mantissa, ten_pow);
    return negative ? Rational(-value) : value;
}

/** Canonical text form: "p" for integers, "p/q" otherwise. */
inline std::string to_string(const Rational& q)
{
    return q.str();
}

inline double to_double(const Rational& q)
{
    return q.convert_to<double>();
}

inline int sign(const Rational& q)
{
    return q.sign();
}

inline int sign(double x)
{
    return (x > 0) - (x < 0);
}

inline Rational abs(const Rational& q)
{
    return q.sign() < 0 ? Rational(-q) : q;
}

/** Exact rational value of a finite double. */
inline Rational from_double(double x)
{
    if (!std::isfinite(x)) throw ParseError("non-finite value");
    return Rational(x);
}

inline Vec<Rational> parse_rational_list(std::string_view text)
{
    Vec<Rational> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        if (comma == std::string_view::npos) comma = text.size();
        out.push_back(parse_rational(text.substr(start, comma - start)));
        start = comma + 1;
    }
    return out;
}

inline Vec<double> to_double(const Vec<Rational>& v)
{
    Vec<double> out;
    out.reserve(v.size());
    for (const auto& q : v) out.push_back(to_double(q));
    return out;
}

inline Vec<std::string> to_strings(const Vec<Rational>& v)
{
    Vec<std::string> out;
    out.reserve(v.size());
    for (const auto& q : v) out.push_back(to_string(q));
    return out;
}

} // namespace polyuniq
