#pragma once

#include "weyl/numeric.hpp"

#include <cctype>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace weyl {

// dense polynomial with exact rational coefficients, c[i] is the x^i coefficient
struct Poly {
    std::vector<Rational> c;

    Poly() = default;
    explicit Poly(std::vector<Rational> coeffs) : c(std::move(coeffs)) { normalize(); }
    Poly(std::initializer_list<Rational> coeffs) : c(coeffs) { normalize(); }

    void normalize() {
        while (!c.empty() && c.back() == 0) c.pop_back();
    }
    bool is_zero() const { return c.empty(); }
    // -1 for the zero polynomial
    int degree() const { return static_cast<int>(c.size()) - 1; }
    Rational coeff(std::size_t i) const { return i < c.size() ? c[i] : Rational(0); }
    Rational leading() const { return c.empty() ? Rational(0) : c.back(); }

    static Poly constant(const Rational& v) { return Poly({v}); }
    static Poly var() { return Poly({Rational(0), Rational(1)}); }
};

inline Rational poly_eval(const Poly& p, const Rational& x) {
    Rational acc(0);
    for (auto it = p.c.rbegin(); it != p.c.rend(); ++it) {
        acc *= x;
        acc += *it;
    }
    return acc;
}

inline Poly poly_add(const Poly& p, const Poly& q) {
    std::vector<Rational> c(std::max(p.c.size(), q.c.size()), Rational(0));
    for (std::size_t i = 0; i < p.c.size(); ++i) c[i] += p.c[i];
    for (std::size_t i = 0; i < q.c.size(); ++i) c[i] += q.c[i];
    return Poly(std::move(c));
}

inline Poly poly_scale(const Poly& p, const Rational& s) {
    std::vector<Rational> c = p.c;
    for (auto& v : c) v *= s;
    return Poly(std::move(c));
}

inline Poly poly_sub(const Poly& p, const Poly& q) {
    return poly_add(p, poly_scale(q, Rational(-1)));
}

inline Poly poly_mul(const Poly& p, const Poly& q) {
    if (p.is_zero() || q.is_zero()) return Poly();
    std::vector<Rational> c(p.c.size() + q.c.size() - 1, Rational(0));
    for (std::size_t i = 0; i < p.c.size(); ++i)
        for (std::size_t j = 0; j < q.c.size(); ++j)
            c[i + j] += p.c[i] * q.c[j];
    return Poly(std::move(c));
}

inline Poly poly_pow(const Poly& p, unsigned e) {
    Poly r = Poly::constant(1);
    for (unsigned i = 0; i < e; ++i) r = poly_mul(r, p);
    return r;
}

// q with q(t) = p(t - s), exact Taylor shift via repeated synthetic division:
// writing p(t) = sum b_i (t + s)^i yields q(u) = sum b_i u^i at u = t - s... the
// division point is -s since p(t) = q(t + s).
inline Poly poly_shift(const Poly& p, const Rational& s) {
    std::vector<Rational> a = p.c;
    const std::size_t n = a.size();
    // expand p around the point -s: p(t) = sum b_i (t + s)^i, so q(t) = p(t - s) = sum b_i t^i
    for (std::size_t pass = 0; pass + 1 < n; ++pass) {
        for (std::size_t i = n - 1; i >= pass + 1; --i) {
            a[i - 1] += a[i] * (-s);
        }
    }
    return Poly(std::move(a));
}

inline BigInt binomial(unsigned n, unsigned k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    BigInt r = 1;
    for (unsigned i = 1; i <= k; ++i) {
        r *= (n - k + i);
        r /= i;
    }
    return r;
}

// P with P(n) = sum_{i=1}^{n} i^{k-1}; degree k, leading coeff 1/k,
// built from the telescoping identity sum_i [(i+1)^k - i^k] = (n+1)^k - 1
inline Poly power_sum_poly(int k) {
    if (k < 1) throw std::invalid_argument("power_sum_poly requires k >= 1");
    std::vector<Poly> psi(static_cast<std::size_t>(k) + 1);
    psi[1] = Poly::var();
    for (int j = 2; j <= k; ++j) {
        // (n+1)^j - 1
        std::vector<Rational> c(static_cast<std::size_t>(j) + 1, Rational(0));
        for (int i = 1; i <= j; ++i) c[static_cast<std::size_t>(i)] = Rational(binomial(j, i));
        Poly rhs(std::move(c));
        for (int i = 0; i <= j - 2; ++i)
            rhs = poly_sub(rhs, poly_scale(psi[static_cast<std::size_t>(i) + 1],
                                           Rational(binomial(j, i))));
        psi[static_cast<std::size_t>(j)] = poly_scale(rhs, Rational(1, j));
    }
    return psi[static_cast<std::size_t>(k)];
}

// integer-coefficient view: p(x) = (1/den) * sum a_i x^i
struct ScaledPoly {
    std::vector<BigInt> a;
    BigInt den = 1;

    ScaledPoly() = default;
    explicit ScaledPoly(const Poly& p) {
        den = 1;
        for (const auto& q : p.c) den = boost::multiprecision::lcm(den, weyl::den(q));
        a.reserve(p.c.size());
        for (const auto& q : p.c) a.push_back(num(q) * (den / weyl::den(q)));
    }

    // den * p(x)
    BigInt eval_num(const BigInt& x) const {
        BigInt acc = 0;
        for (auto it = a.rbegin(); it != a.rend(); ++it) {
            acc *= x;
            acc += *it;
        }
        return acc;
    }

    Rational eval(const BigInt& x) const { return Rational(eval_num(x), den); }

    // p(x) when that value is an integer
    BigInt eval_int(const BigInt& x) const {
        BigInt n = eval_num(x);
        BigInt q = n / den;
        if (q * den != n) throw std::domain_error("eval_int: value is not an integer");
        return q;
    }
};

// streams den*p(0), den*p(1), ... with one O(degree) pass of integer additions per step
struct ForwardDiff {
    std::vector<BigInt> diff;
    BigInt den = 1;

    explicit ForwardDiff(const Poly& p) {
        ScaledPoly sp(p);
        den = sp.den;
        const int g = std::max(0, p.degree());
        std::vector<BigInt> vals(static_cast<std::size_t>(g) + 1);
        for (int i = 0; i <= g; ++i) vals[static_cast<std::size_t>(i)] = sp.eval_num(i);
        // in-place difference triangle: diff[i] = Delta^i p(0) * den
        for (int level = 1; level <= g; ++level)
            for (int i = g; i >= level; --i)
                vals[static_cast<std::size_t>(i)] -= vals[static_cast<std::size_t>(i) - 1];
        diff = std::move(vals);
    }

    // den * p(current k)
    const BigInt& value_num() const { return diff.front(); }

    void advance() {
        for (std::size_t i = 0; i + 1 < diff.size(); ++i) diff[i] += diff[i + 1];
    }
};

inline std::string poly_to_string(const Poly& p, const std::string& var = "t") {
    if (p.is_zero()) return "0";
    std::string out;
    for (int i = p.degree(); i >= 0; --i) {
        Rational c = p.coeff(static_cast<std::size_t>(i));
        if (c == 0) continue;
        const bool first = out.empty();
        const bool neg = c < 0;
        if (!first) out += neg ? " - " : " + ";
        else if (neg) out += "-";
        Rational mag = neg ? Rational(-c) : c;
        const bool unit = (mag == 1) && i > 0;
        if (!unit) out += rational_to_string(mag);
        if (i > 0) {
            if (!unit) out += "*";
            out += var;
            if (i > 1) out += "^" + std::to_string(i);
        }
    }
    return out;
}

namespace detail {

struct PolyParser {
    const std::string& text;
    const std::string& var;
    std::size_t pos = 0;

    PolyParser(const std::string& t, const std::string& v) : text(t), var(v) {}

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }
    bool starts_atom() {
        char ch = peek();
        return ch == '(' || std::isdigit(static_cast<unsigned char>(ch)) ||
               std::isalpha(static_cast<unsigned char>(ch)) || ch == '.';
    }

    Poly parse_expr() {
        Poly lhs = parse_term();
        while (true) {
            char ch = peek();
            if (ch == '+') { ++pos; lhs = poly_add(lhs, parse_term()); }
            else if (ch == '-') { ++pos; lhs = poly_sub(lhs, parse_term()); }
            else break;
        }
        return lhs;
    }

    Poly parse_term() {
        Poly lhs = parse_power();
        while (true) {
            char ch = peek();
            if (ch == '*') { ++pos; lhs = poly_mul(lhs, parse_power()); }
            else if (ch == '/') {
                ++pos;
                Poly rhs = parse_power();
                if (rhs.degree() != 0 || rhs.coeff(0) == 0)
                    throw std::invalid_argument("division only by a nonzero constant");
                lhs = poly_scale(lhs, Rational(1) / rhs.coeff(0));
            } else if (starts_atom()) {
                // juxtaposition, e.g. "2k" or "2(k+1)"
                lhs = poly_mul(lhs, parse_power());
            } else break;
        }
        return lhs;
    }

    Poly parse_power() {
        Poly base = parse_unary();
        if (peek() == '^') {
            ++pos;
            skip_ws();
            std::size_t start = pos;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
            if (start == pos) throw std::invalid_argument("exponent must be a nonnegative integer");
            unsigned e = static_cast<unsigned>(std::stoul(text.substr(start, pos - start)));
            if (e > 64) throw std::invalid_argument("exponent too large");
            return poly_pow(base, e);
        }
        return base;
    }

    Poly parse_unary() {
        char ch = peek();
        if (ch == '-') { ++pos; return poly_scale(parse_unary(), Rational(-1)); }
        if (ch == '+') { ++pos; return parse_unary(); }
        return parse_atom();
    }

    Poly parse_atom() {
        char ch = peek();
        if (ch == '(') {
            ++pos;
            Poly inner = parse_expr();
            if (peek() != ')') throw std::invalid_argument("missing ')' in polynomial");
            ++pos;
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
            std::size_t start = pos;
            while (pos < text.size() &&
                   (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.'))
                ++pos;
            return Poly::constant(parse_rational(text.substr(start, pos - start)));
        }
        if (std::isalpha(static_cast<unsigned char>(ch))) {
            std::size_t start = pos;
            while (pos < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
                ++pos;
            std::string name = text.substr(start, pos - start);
            if (name != var)
                throw std::invalid_argument("unknown variable '" + name + "', expected '" + var + "'");
            return Poly::var();
        }
        throw std::invalid_argument("unexpected character in polynomial: " + text.substr(pos));
    }
};

}  // namespace detail

// "(2k+1)^2", "k^3/6 + k/2", ... with exact rational constants
inline Poly parse_poly(const std::string& text, const std::string& var = "k") {
    detail::PolyParser p(text, var);
    Poly out = p.parse_expr();
    p.skip_ws();
    if (p.pos != text.size())
        throw std::invalid_argument("trailing characters in polynomial: " + text.substr(p.pos));
    return out;
}

}  // namespace weyl
