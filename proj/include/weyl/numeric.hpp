#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cstdio>
#include <stdexcept>
#include <string>

namespace weyl {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using Float50 = boost::multiprecision::cpp_bin_float_50;

inline BigInt num(const Rational& q) { return boost::multiprecision::numerator(q); }
inline BigInt den(const Rational& q) { return boost::multiprecision::denominator(q); }

inline double to_double(const Rational& q) { return q.convert_to<double>(); }
inline Float50 to_f50(const Rational& q) {
    return Float50(num(q)) / Float50(den(q));
}
inline Float50 to_f50(const BigInt& n) { return Float50(n); }

// floor(a/b) for integers, b > 0
inline BigInt floor_div(const BigInt& a, const BigInt& b) {
    BigInt q = a / b;
    if ((a % b) != 0 && ((a < 0) != (b < 0))) --q;
    return q;
}

inline BigInt floor_rational(const Rational& q) { return floor_div(num(q), den(q)); }

inline BigInt ceil_rational(const Rational& q) { return -floor_rational(-q); }

// integer sqrt, x >= 0
inline BigInt isqrt(const BigInt& x) {
    if (x < 0) throw std::domain_error("isqrt of negative value");
    return boost::multiprecision::sqrt(x);
}

// floor(sqrt(q)) for q >= 0; floor(sqrt(n/d)) == isqrt(floor(n/d))
inline BigInt floor_sqrt(const Rational& q) {
    if (q < 0) throw std::domain_error("floor_sqrt of negative value");
    return isqrt(floor_rational(q));
}

// "p/q", "-3/4", "12", "2.25", "1e3" -> exact rational
inline Rational parse_rational(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty rational literal");
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        if (text.find('/', slash + 1) != std::string::npos)
            throw std::invalid_argument("bad rational literal: " + text);
        BigInt p(text.substr(0, slash));
        BigInt q(text.substr(slash + 1));
        if (q == 0) throw std::invalid_argument("zero denominator: " + text);
        return Rational(p, q);
    }
    std::string mant = text;
    long exp10 = 0;
    auto epos = text.find_first_of("eE");
    if (epos != std::string::npos) {
        mant = text.substr(0, epos);
        exp10 = std::stol(text.substr(epos + 1));
    }
    auto dot = mant.find('.');
    std::string digits = mant;
    if (dot != std::string::npos) {
        digits = mant.substr(0, dot) + mant.substr(dot + 1);
        exp10 -= static_cast<long>(mant.size() - dot - 1);
    }
    if (digits.empty() || digits == "-" || digits == "+")
        throw std::invalid_argument("bad rational literal: " + text);
    BigInt m(digits);
    Rational r(m);
    BigInt scale = 1;
    for (long i = 0; i < (exp10 < 0 ? -exp10 : exp10); ++i) scale *= 10;
    if (exp10 >= 0) r *= Rational(scale);
    else r /= Rational(scale);
    return r;
}

inline std::string rational_to_string(const Rational& q) {
    std::string s = num(q).str();
    if (den(q) != 1) s += "/" + den(q).str();
    return s;
}

// round-trip safe float formatting, stable across runs
inline std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace weyl
