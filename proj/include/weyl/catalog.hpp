#pragma once

#include "weyl/poly.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace weyl {

enum class Family { OddSphere, S3, EvenSphere, OddRP, RP3, EvenRP, CP, HP, OP2 };

inline const char* family_name(Family f) {
    switch (f) {
        case Family::OddSphere: return "OddSphere";
        case Family::S3: return "S3";
        case Family::EvenSphere: return "EvenSphere";
        case Family::OddRP: return "OddRP";
        case Family::RP3: return "RP3";
        case Family::EvenRP: return "EvenRP";
        case Family::CP: return "CP";
        case Family::HP: return "HP";
        case Family::OP2: return "OP2";
    }
    return "?";
}

// eigenvalues alpha(k) = A k^2 + B k + C with multiplicity R(k), k = 0, 1, 2, ...
struct SpectralModel {
    std::string name;
    int d = 0;  // real dimension
    Rational A, B, C;
    Poly R;
    Poly cumulative;  // F with F(K) = sum_{k=0}^{K} R(k)
    ScaledPoly R_scaled, cumulative_scaled;

    Rational shift() const { return B / (2 * A); }
    Rational alpha(const BigInt& k) const { return (A * k + B) * k + C; }
};

inline SpectralModel make_model(std::string name, int d, Rational A, Rational B, Rational C,
                                Poly R) {
    if (d < 2) throw std::invalid_argument("model dimension must be at least 2");
    if (A <= 0) throw std::invalid_argument("eigenvalue coefficient A must be positive");
    if (A + B <= 0)
        throw std::invalid_argument("alpha(k) must be strictly increasing for integer k >= 0");
    if (R.degree() != d - 1)
        throw std::invalid_argument("multiplicity polynomial must have degree d-1");
    SpectralModel m;
    m.name = std::move(name);
    m.d = d;
    m.A = std::move(A);
    m.B = std::move(B);
    m.C = std::move(C);
    m.R = std::move(R);
    // F = R(0) + sum_j r_j * psi_{j+1}, so F(K) = sum_{k=0}^{K} R(k) for integer K >= 0
    Poly F = Poly::constant(m.R.coeff(0));
    for (int j = 0; j <= m.R.degree(); ++j) {
        if (m.R.coeff(static_cast<std::size_t>(j)) == 0) continue;
        F = poly_add(F, poly_scale(power_sum_poly(j + 1), m.R.coeff(static_cast<std::size_t>(j))));
    }
    m.cumulative = std::move(F);
    m.R_scaled = ScaledPoly(m.R);
    m.cumulative_scaled = ScaledPoly(m.cumulative);
    return m;
}

namespace detail {

// (x + j)/j
inline Poly linear_over(long j) { return Poly({Rational(1), Rational(1, j)}); }
// (2x + j)/j
inline Poly linear2_over(long j) { return Poly({Rational(1), Rational(2, j)}); }

}  // namespace detail

// param is the family's d as used in its defining formulas; ignored for S3, RP3, OP2
inline SpectralModel model(Family family, int param = 0) {
    using detail::linear_over;
    using detail::linear2_over;
    switch (family) {
        case Family::S3:
            return make_model("S3", 3, Rational(1, 4), Rational(1, 2), Rational(0),
                              parse_poly("(k+1)^2"));
        case Family::RP3:
            return make_model("RP3", 3, Rational(1), Rational(1), Rational(0),
                              parse_poly("(2k+1)^2"));
        case Family::OP2: {
            Poly R = linear2_over(11);
            for (long j = 1; j <= 3; ++j) R = poly_mul(R, linear_over(j));
            for (long l = 4; l <= 7; ++l) R = poly_mul(R, poly_pow(linear_over(l), 2));
            for (long m = 8; m <= 10; ++m) R = poly_mul(R, linear_over(m));
            return make_model("OP2", 16, Rational(1, 18), Rational(11, 18), Rational(0), R);
        }
        case Family::OddSphere: {
            const int d = param;
            if (d == 2)
                throw std::invalid_argument("S3 is catalogued separately; request family S3");
            if (d < 3) throw std::invalid_argument("OddSphere requires d >= 3");
            Poly R = linear_over(d - 1);  // (k + d-1)/(d-1)
            for (long j = 1; j <= 2 * d - 3; ++j) R = poly_mul(R, linear_over(j));
            return make_model("S" + std::to_string(2 * d - 1), 2 * d - 1,
                              Rational(1, 4 * (d - 1)), Rational(1, 2), Rational(0), R);
        }
        case Family::EvenSphere: {
            const int d = param;
            if (d < 1) throw std::invalid_argument("EvenSphere requires d >= 1");
            Poly R = linear2_over(2 * d - 1);
            for (long j = 1; j <= 2 * d - 2; ++j) R = poly_mul(R, linear_over(j));
            return make_model("S" + std::to_string(2 * d), 2 * d, Rational(1, 4 * d - 2),
                              Rational(1, 2), Rational(0), R);
        }
        case Family::OddRP: {
            const int d = param;
            if (d == 2)
                throw std::invalid_argument("RP3 is catalogued separately; request family RP3");
            if (d < 3) throw std::invalid_argument("OddRP requires d >= 3");
            Poly R = linear2_over(d - 1);
            for (long j = 1; j <= 2 * d - 3; ++j) R = poly_mul(R, linear2_over(j));
            return make_model("RP" + std::to_string(2 * d - 1), 2 * d - 1, Rational(1, d - 1),
                              Rational(1), Rational(0), R);
        }
        case Family::EvenRP: {
            const int d = param;
            if (d < 1) throw std::invalid_argument("EvenRP requires d >= 1");
            Poly R = Poly({Rational(1), Rational(4, 2 * d - 1)});  // (4k + 2d-1)/(2d-1)
            for (long j = 1; j <= 2 * d - 2; ++j) R = poly_mul(R, linear2_over(j));
            return make_model("RP" + std::to_string(2 * d), 2 * d, Rational(2, 2 * d - 1),
                              Rational(1), Rational(0), R);
        }
        case Family::CP: {
            const int d = param;
            if (d < 2) throw std::invalid_argument("CP requires d >= 2 (CP^1 is the sphere S2)");
            Poly R = linear2_over(d);
            for (long j = 1; j <= d - 1; ++j) R = poly_mul(R, poly_pow(linear_over(j), 2));
            return make_model("CP" + std::to_string(d), 2 * d, Rational(1, d + 1),
                              Rational(d, d + 1), Rational(0), R);
        }
        case Family::HP: {
            const int d = param;
            if (d < 2) throw std::invalid_argument("HP requires d >= 2");
            Poly R = linear2_over(2 * d - 1);
            for (long j = 2; j <= 2 * d - 2; ++j) R = poly_mul(R, linear_over(j));
            for (long l = 1; l <= 2 * d - 3; ++l) R = poly_mul(R, linear_over(l));
            return make_model("HP" + std::to_string(d - 1), 4 * d - 4, Rational(1, 2 * (d + 1)),
                              Rational(2 * d - 1, 2 * (d + 1)), Rational(0), R);
        }
    }
    throw std::invalid_argument("unknown family");
}

struct WReport {
    Poly Q;
    Rational shift;
    Rational checked_coefficient;
    int checked_power = 0;  // -1 marks the d=2 constant-term check
    bool pass = false;
};

inline WReport w_verify(const SpectralModel& m) {
    WReport r;
    r.shift = m.shift();
    r.Q = poly_shift(m.R, r.shift);
    if (m.d == 2) {
        r.checked_power = -1;
        r.checked_coefficient = r.Q.coeff(0);
    } else {
        r.checked_power = m.d - 2;
        r.checked_coefficient = r.Q.coeff(static_cast<std::size_t>(m.d - 2));
    }
    r.pass = (r.checked_coefficient == 0);
    return r;
}

inline Rational kappa(const SpectralModel& m) { return m.B * m.B / (4 * m.A) - m.C; }

struct SweepRange {
    Family family;
    int lo, hi;  // inclusive param range; lo == hi == 0 for fixed models
};

inline const std::vector<SweepRange>& sweep_ranges() {
    static const std::vector<SweepRange> ranges = {
        {Family::OddSphere, 3, 12}, {Family::S3, 0, 0},  {Family::EvenSphere, 1, 12},
        {Family::OddRP, 3, 12},     {Family::RP3, 0, 0}, {Family::EvenRP, 1, 12},
        {Family::CP, 2, 12},        {Family::HP, 2, 8},  {Family::OP2, 0, 0},
    };
    return ranges;
}

inline std::vector<SpectralModel> sweep_models() {
    std::vector<SpectralModel> out;
    for (const auto& r : sweep_ranges())
        for (int p = r.lo; p <= r.hi; ++p) out.push_back(model(r.family, p));
    return out;
}

// "S3", "RP7", "CP2", "HP1" (quaternionic dimension), "OP2"
inline SpectralModel parse_space(const std::string& name) {
    auto bad = [&]() -> std::invalid_argument {
        return std::invalid_argument("unknown space '" + name + "'");
    };
    auto tail_int = [&](std::size_t prefix) -> int {
        if (name.size() <= prefix) throw bad();
        for (std::size_t i = prefix; i < name.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(name[i]))) throw bad();
        long v = std::stol(name.substr(prefix));
        if (v <= 0 || v > 1000) throw bad();
        return static_cast<int>(v);
    };
    if (name == "OP2") return model(Family::OP2);
    if (name.rfind("RP", 0) == 0) {
        int n = tail_int(2);
        if (n == 1) throw std::invalid_argument("RP1 has dimension 1; spaces need dimension >= 2");
        if (n == 3) return model(Family::RP3);
        return n % 2 ? model(Family::OddRP, (n + 1) / 2) : model(Family::EvenRP, n / 2);
    }
    if (name.rfind("CP", 0) == 0) {
        int n = tail_int(2);
        if (n == 1) throw std::invalid_argument("CP1 is the sphere S2; request S2");
        return model(Family::CP, n);
    }
    if (name.rfind("HP", 0) == 0) {
        int n = tail_int(2);
        return model(Family::HP, n + 1);
    }
    if (name.rfind("S", 0) == 0) {
        int n = tail_int(1);
        if (n == 1) throw std::invalid_argument("S1 has dimension 1; spaces need dimension >= 2");
        if (n == 3) return model(Family::S3);
        return n % 2 ? model(Family::OddSphere, (n + 1) / 2) : model(Family::EvenSphere, n / 2);
    }
    throw bad();
}

// "CP2xS3xHP1" -> factor models
inline std::vector<SpectralModel> parse_spaces(const std::string& name) {
    std::vector<SpectralModel> out;
    std::size_t start = 0;
    while (start <= name.size()) {
        std::size_t sep = name.find('x', start);
        std::string tok =
            sep == std::string::npos ? name.substr(start) : name.substr(start, sep - start);
        if (tok.empty()) throw std::invalid_argument("empty factor in product name '" + name + "'");
        out.push_back(parse_space(tok));
        if (sep == std::string::npos) break;
        start = sep + 1;
    }
    return out;
}

inline std::optional<Family> family_from_name(const std::string& s) {
    for (const auto& r : sweep_ranges())
        if (s == family_name(r.family)) return r.family;
    return std::nullopt;
}

}  // namespace weyl
