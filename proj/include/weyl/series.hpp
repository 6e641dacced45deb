#pragma once

#include "weyl/numeric.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace weyl {

inline Rational pow_rational(const Rational& q, unsigned e) {
    using boost::multiprecision::pow;
    return Rational(pow(num(q), e), pow(den(q), e));
}

// lambda^e from the exact lambda^2, rounded once at the end
inline Float50 pow_lambda_f50(const Rational& lambda2, int e) {
    if (e < 0) throw std::invalid_argument("negative power");
    if (lambda2 < 0) throw std::domain_error("negative lambda^2");
    if (e % 2 == 0) return to_f50(pow_rational(lambda2, static_cast<unsigned>(e / 2)));
    return sqrt(to_f50(pow_rational(lambda2, static_cast<unsigned>(e))));
}

inline double lambda_double(const Rational& lambda2) {
    return sqrt(to_f50(lambda2)).convert_to<double>();
}

// counts at increasing lambda with the exact lambda^2 retained; remainders are
// a cache of counts_j - c1 * lambda_j^d evaluated in extended precision
struct CountSeries {
    std::string space;
    int d = 0;
    double c1 = 0;
    std::vector<Rational> lambda2;
    std::vector<double> lambdas;
    std::vector<BigInt> counts;
    std::vector<double> remainders;

    std::size_t size() const { return lambda2.size(); }
};

inline double remainder_value(const BigInt& count, double c1, const Rational& lambda2, int d) {
    Float50 r = to_f50(count) - Float50(c1) * pow_lambda_f50(lambda2, d);
    return r.convert_to<double>();
}

inline void recompute_remainders(CountSeries& s) {
    s.remainders.resize(s.size());
    for (std::size_t i = 0; i < s.size(); ++i)
        s.remainders[i] = remainder_value(s.counts[i], s.c1, s.lambda2[i], s.d);
}

inline void validate_series_grid(const std::vector<Rational>& lambda2_grid) {
    for (std::size_t i = 0; i < lambda2_grid.size(); ++i) {
        if (lambda2_grid[i] < 0) throw std::invalid_argument("grid values must be nonnegative");
        if (i > 0 && !(lambda2_grid[i - 1] < lambda2_grid[i]))
            throw std::invalid_argument("grid must be strictly increasing");
    }
}

}  // namespace weyl
