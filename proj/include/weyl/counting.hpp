#pragma once

#include "weyl/catalog.hpp"

#include <optional>
#include <type_traits>
#include <utility>

namespace weyl {

// holds lambda^2 exactly; counting compares alpha(k) <= Lambda
struct Threshold {
    Rational lambda2;
    template <class T, class = std::enable_if_t<!std::is_same_v<std::decay_t<T>, Threshold> &&
                                                std::is_convertible_v<T, Rational>>>
    Threshold(T&& v) : lambda2(std::forward<T>(v)) {}
};

// largest integer k >= 0 with alpha(k) <= Lambda, or none when alpha(0) > Lambda
inline std::optional<BigInt> k_max(const SpectralModel& m, const Threshold& t) {
    const Rational& L = t.lambda2;
    if (L < m.C) return std::nullopt;
    // A(k + B/2A)^2 <= L + kappa, so k <= -B/(2A) + sqrt((L + kappa)/A)
    Rational X = (L + kappa(m)) / m.A;
    BigInt s = floor_sqrt(X);
    BigInt k = floor_rational(Rational(s) - m.shift());
    if (k < 0) k = 0;
    while (m.alpha(k + 1) <= L) ++k;
    while (k > 0 && m.alpha(k) > L) --k;
    return k;
}

// sum_{k=0}^{k_max} R(k) by exact iterated addition
inline BigInt count_single(const SpectralModel& m, const Threshold& t) {
    auto km = k_max(m, t);
    if (!km) return 0;
    ForwardDiff fd(m.R);
    BigInt acc = 0;
    for (BigInt k = 0; k <= *km; ++k) {
        acc += fd.value_num();
        fd.advance();
    }
    BigInt q = acc / fd.den;
    if (q * fd.den != acc) throw std::domain_error("count_single: non-integer total");
    return q;
}

// same value through the closed-form cumulative polynomial at k_max
inline BigInt count_single_fast(const SpectralModel& m, const Threshold& t) {
    auto km = k_max(m, t);
    if (!km) return 0;
    return m.cumulative_scaled.eval_int(*km);
}

}  // namespace weyl
