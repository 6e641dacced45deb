#pragma once

#include "weyl/lattice.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace weyl {

// two-term expansion c1 lambda^d + c2 lambda^{d-1} of the counting function,
// for the recentered budget alpha(k) <= a lambda^2 + b
struct TwoTermCoeffs {
    double c1 = 0;
    double c2 = 0;
    Rational a, b;
};

inline TwoTermCoeffs two_term_coeffs(const SpectralModel& m) {
    WReport w = w_verify(m);
    if (!w.pass)
        throw std::invalid_argument("two-term coefficients need a passing certificate for " +
                                    m.name);
    const Rational C = w.Q.leading();
    TwoTermCoeffs tc;
    Float50 c1 = to_f50(C) / (m.d * pow_lambda_f50(m.A, m.d));
    Float50 c2 = to_f50(C) / (2 * pow_lambda_f50(m.A, m.d - 1));
    tc.c1 = c1.convert_to<double>();
    tc.c2 = c2.convert_to<double>();
    tc.a = Rational(1);
    tc.b = kappa(m);
    return tc;
}

// counting series sampled at the jump points lambda_k = sqrt(alpha(k)),
// counts taken inclusively at the jump
inline CountSeries jump_series(const SpectralModel& m, std::size_t k_lo, std::size_t k_hi) {
    if (k_lo > k_hi) throw std::invalid_argument("jump_series requires k_lo <= k_hi");
    CountSeries out;
    out.space = m.name;
    out.d = m.d;
    out.c1 = two_term_coeffs(m).c1;
    out.lambda2.reserve(k_hi - k_lo + 1);
    out.counts.reserve(k_hi - k_lo + 1);
    ForwardDiff fd(m.R);
    BigInt acc = 0;
    for (std::size_t k = 0; k <= k_hi; ++k) {
        acc += fd.value_num();
        fd.advance();
        if (k >= k_lo) {
            BigInt q = acc / fd.den;
            if (q * fd.den != acc) throw std::domain_error("non-integer running count");
            out.lambda2.push_back(m.alpha(BigInt(k)));
            out.counts.push_back(std::move(q));
        }
    }
    out.lambdas.reserve(out.lambda2.size());
    for (const auto& L : out.lambda2) out.lambdas.push_back(lambda_double(L));
    recompute_remainders(out);
    return out;
}

// r_k = (N(lambda_k) - c1 lambda_k^d) / lambda_k^{d-1} along the jump subsequence
inline std::vector<double> second_order_convergence(const SpectralModel& m,
                                                    const std::vector<long long>& k_range) {
    TwoTermCoeffs tc = two_term_coeffs(m);
    std::vector<double> out;
    out.reserve(k_range.size());
    for (long long k : k_range) {
        if (k < 0) throw std::invalid_argument("jump index must be nonnegative");
        Rational L = m.alpha(BigInt(k));
        if (L <= 0) throw std::invalid_argument("jump index has lambda = 0");
        BigInt N = count_single_fast(m, Threshold(L));
        Float50 r = (to_f50(N) - Float50(tc.c1) * pow_lambda_f50(L, m.d)) /
                    pow_lambda_f50(L, m.d - 1);
        out.push_back(r.convert_to<double>());
    }
    return out;
}

struct FitWindow {
    double lambda_lo = 0;
    double lambda_hi = 0;
    double lambda_mid = 0;
    double envelope = 0;
    std::size_t n_points = 0;
};

struct FitReport {
    double exponent = 0;
    double intercept = 0;
    double r_squared = 0;
    double window_ratio = 0;
    std::vector<FitWindow> windows;
};

namespace detail {

// geometric binning of the series sample points into windows
// [anchor * ratio^i, anchor * ratio^{i+1}); visit(j, window_index) is called
// per point; points below the anchor are clamped into window 0 or dropped
template <class Visit>
std::size_t bin_windows(const CountSeries& s, double ratio, double anchor, bool drop_below,
                        std::vector<FitWindow>& win, Visit visit) {
    if (!(ratio > 1)) throw std::invalid_argument("window ratio must exceed 1");
    const double logr = std::log(ratio);
    for (std::size_t j = 0; j < s.size(); ++j) {
        const double l = s.lambdas[j];
        if (l <= 0) continue;
        auto idx = static_cast<long>(std::floor(std::log(l / anchor) / logr + 1e-12));
        if (idx < 0) {
            if (drop_below) continue;
            idx = 0;
        }
        if (static_cast<std::size_t>(idx) >= win.size()) {
            std::size_t old = win.size();
            win.resize(static_cast<std::size_t>(idx) + 1);
            for (std::size_t w = old; w < win.size(); ++w) {
                win[w].lambda_lo = anchor * std::pow(ratio, static_cast<double>(w));
                win[w].lambda_hi = win[w].lambda_lo * ratio;
                win[w].lambda_mid = win[w].lambda_lo * std::sqrt(ratio);
            }
        }
        ++win[static_cast<std::size_t>(idx)].n_points;
        visit(j, static_cast<std::size_t>(idx));
    }
    return win.size();
}

inline double first_positive_lambda(const CountSeries& s) {
    for (double l : s.lambdas)
        if (l > 0) return l;
    throw std::invalid_argument("series has no positive lambda");
}

struct LeastSquares {
    double slope = 0, intercept = 0, r_squared = 0;
};

inline LeastSquares least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LeastSquares ls;
    ls.slope = sxy / sxx;
    ls.intercept = my - ls.slope * mx;
    ls.r_squared = syy == 0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return ls;
}

}  // namespace detail

// growth exponent of |remainder|: per-window envelope maxima fitted in log-log
inline FitReport fit_exponent(const CountSeries& series, double window_ratio) {
    std::vector<FitWindow> win;
    detail::bin_windows(series, window_ratio, detail::first_positive_lambda(series), false, win,
                        [&](std::size_t j, std::size_t w) {
                            win[w].envelope =
                                std::max(win[w].envelope, std::fabs(series.remainders[j]));
                        });
    std::vector<FitWindow> windows;
    for (const auto& w : win)
        if (w.n_points > 0) windows.push_back(w);
    if (windows.size() < 5)
        throw std::invalid_argument("fit_exponent needs at least 5 nonempty windows");
    std::vector<double> lx, ly;
    for (const auto& w : windows)
        if (w.envelope > 0) {
            lx.push_back(std::log(w.lambda_mid));
            ly.push_back(std::log(w.envelope));
        }
    if (lx.size() < 5)
        throw std::domain_error("degenerate series: too many zero-envelope windows");
    auto ls = detail::least_squares(lx, ly);
    FitReport rep;
    rep.exponent = ls.slope;
    rep.intercept = ls.intercept;
    rep.r_squared = ls.r_squared;
    rep.window_ratio = window_ratio;
    rep.windows = std::move(windows);
    return rep;
}

struct SharpnessWindow {
    double lambda_lo = 0;
    double lambda_hi = 0;
    double lambda_mid = 0;
    double max_normalized = 0;
    std::size_t n_points = 0;
};

// per-window maxima of |remainder| / lambda^{d-1}; at each sample the value
// just before the jump (previous count against this lambda) is checked too.
// Windows are [ratio^i, ratio^{i+1}) anchored at lambda = 1; samples below 1
// lie outside the asymptotic range and are not binned.
inline std::vector<SharpnessWindow> sharpness_stat(const CountSeries& series,
                                                   double window_ratio = 2.0) {
    std::vector<FitWindow> win;
    std::vector<double> maxima;
    detail::bin_windows(series, window_ratio, 1.0, true, win, [&](std::size_t j, std::size_t w) {
        if (maxima.size() < win.size()) maxima.resize(win.size(), 0.0);
        Float50 denom = pow_lambda_f50(series.lambda2[j], series.d - 1);
        Float50 main = Float50(series.c1) * pow_lambda_f50(series.lambda2[j], series.d);
        double v = std::fabs(((to_f50(series.counts[j]) - main) / denom).convert_to<double>());
        if (j > 0)
            v = std::max(v, std::fabs(((to_f50(series.counts[j - 1]) - main) / denom)
                                          .convert_to<double>()));
        maxima[w] = std::max(maxima[w], v);
    });
    std::vector<SharpnessWindow> out;
    for (std::size_t w = 0; w < win.size(); ++w) {
        if (win[w].n_points == 0) continue;
        SharpnessWindow sw;
        sw.lambda_lo = win[w].lambda_lo;
        sw.lambda_hi = win[w].lambda_hi;
        sw.lambda_mid = win[w].lambda_mid;
        sw.max_normalized = w < maxima.size() ? maxima[w] : 0.0;
        sw.n_points = win[w].n_points;
        out.push_back(sw);
    }
    return out;
}

// slope of counts against lambda^d over [lambda_lo, lambda_hi]
inline double regression_c1(const CountSeries& series, double lambda_lo, double lambda_hi) {
    std::vector<double> x, y;
    for (std::size_t j = 0; j < series.size(); ++j) {
        const double l = series.lambdas[j];
        if (l < lambda_lo || l > lambda_hi) continue;
        x.push_back(pow_lambda_f50(series.lambda2[j], series.d).convert_to<double>());
        y.push_back(to_f50(series.counts[j]).convert_to<double>());
    }
    if (x.size() < 2) throw std::invalid_argument("regression needs at least 2 points in range");
    return detail::least_squares(x, y).slope;
}

inline Float50 gamma_half_f50(long two_x) {
    GammaHalf g = gamma_half(two_x);
    Float50 v = to_f50(g.rat);
    if (g.spi) v *= sqrt(pi_f50());
    return v;
}

// factor-wise closed form for the product main-term coefficient:
// prod_i [c1_i Gamma(d_i/2 + 1)] / Gamma(d/2 + 1)
inline double product_c1_factorwise(const ProductModel& pm) {
    Float50 val(1);
    for (const auto& f : pm.factors) {
        const Rational C = f.R.leading();
        Float50 c1_i = to_f50(C) / (f.d * pow_lambda_f50(f.A, f.d));
        val *= c1_i * gamma_half_f50(f.d + 2);
    }
    val /= gamma_half_f50(pm.d + 2);
    return val.convert_to<double>();
}

// geometrically spaced lambda grid, returned as exact lambda^2 thresholds
inline std::vector<Rational> geometric_grid(double lambda_min, double lambda_max,
                                            std::size_t points) {
    if (!(lambda_min > 0) || !(lambda_max > lambda_min))
        throw std::invalid_argument("need 0 < lambda_min < lambda_max");
    if (points < 2) throw std::invalid_argument("need at least 2 grid points");
    std::vector<Rational> grid;
    grid.reserve(points);
    const double step = std::log(lambda_max / lambda_min) / static_cast<double>(points - 1);
    Rational prev(-1);
    for (std::size_t i = 0; i < points; ++i) {
        double l = lambda_min * std::exp(step * static_cast<double>(i));
        if (i + 1 == points) l = lambda_max;
        Rational lam(l);  // exact binary value of the double
        Rational L = lam * lam;
        if (L > prev) {
            grid.push_back(L);
            prev = L;
        }
    }
    return grid;
}

}  // namespace weyl
