#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

namespace catkit {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

/// Parse "p", "-p" or "p/q" into a rational.
inline Rational parse_rational(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(BigInt(s));
        BigInt num(s.substr(0, slash));
        BigInt den(s.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator");
        return Rational(num, den);
    } catch (const std::exception&) {
        throw std::invalid_argument("malformed rational literal: " + s);
    }
}

inline std::string to_string(const Rational& q) {
    std::ostringstream os;
    os << q;
    return os.str();
}

inline std::optional<BigInt> exact_isqrt(const BigInt& v) {
    if (v < 0) return std::nullopt;
    BigInt r = boost::multiprecision::sqrt(v);
    if (r * r == v) return r;
    return std::nullopt;
}

/// Square root of a nonnegative rational, exact only when both numerator and
/// denominator are perfect squares.
inline std::optional<Rational> exact_sqrt(const Rational& q) {
    if (q < 0) return std::nullopt;
    auto n = exact_isqrt(boost::multiprecision::numerator(q));
    auto d = exact_isqrt(boost::multiprecision::denominator(q));
    if (n && d) return Rational(*n, *d);
    return std::nullopt;
}

// traits shared by the exact and floating coefficient paths
template <typename C>
struct coeff_traits;

template <>
struct coeff_traits<Rational> {
    static constexpr bool exact = true;
    static bool is_zero(const Rational& v) { return v.is_zero(); }
    static Rational from_int(long v) { return Rational(v); }
    static std::string str(const Rational& v) { return to_string(v); }
};

template <>
struct coeff_traits<double> {
    static constexpr bool exact = false;
    static bool is_zero(double v) { return v == 0.0; }
    static double from_int(long v) { return static_cast<double>(v); }
    static std::string str(double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return buf;
    }
};

}  // namespace catkit
