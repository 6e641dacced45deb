#pragma once

#include "weyl/counting.hpp"
#include "weyl/parallel.hpp"
#include "weyl/series.hpp"

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

namespace weyl {

// weighted lattice slice: sum of prod m_i^{pow_i} over m_i - y_i in Z^{>=0}
// subject to P_1 m_1^2 + ... + P_n m_n^2 <= lambda^2
struct LatticeSpec {
    std::vector<Rational> P;
    std::vector<Rational> y;
    std::vector<int> pow;

    int n() const { return static_cast<int>(P.size()); }
    int total_dim() const {
        int d = 0;
        for (int p : pow) d += p + 1;
        return d;
    }
};

inline void validate_spec(const LatticeSpec& spec) {
    if (spec.P.empty() || spec.P.size() != spec.y.size() || spec.P.size() != spec.pow.size())
        throw std::invalid_argument("lattice spec fields must be nonempty and equally sized");
    for (const auto& p : spec.P)
        if (p <= 0) throw std::invalid_argument("lattice weights must be positive");
    for (int p : spec.pow)
        if (p < 1) throw std::invalid_argument("lattice exponents must be >= 1");
}

struct ProductModel {
    std::vector<SpectralModel> factors;
    int d = 0;
    Rational kappa_total;
    std::string name;
};

inline ProductModel make_product(std::vector<SpectralModel> factors) {
    if (factors.empty()) throw std::invalid_argument("product needs at least one factor");
    ProductModel pm;
    pm.factors = std::move(factors);
    for (std::size_t i = 0; i < pm.factors.size(); ++i) {
        pm.d += pm.factors[i].d;
        pm.kappa_total += kappa(pm.factors[i]);
        if (i) pm.name += "x";
        pm.name += pm.factors[i].name;
    }
    return pm;
}

namespace detail {

// factor order for enumeration: largest A outermost, so the innermost
// closed-form factor absorbs the widest index range
inline std::vector<std::size_t> enumeration_order(const std::vector<SpectralModel>& factors) {
    std::vector<std::size_t> idx(factors.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return factors[a].A > factors[b].A; });
    return idx;
}

// R(0..kmax) as exact integers
inline std::vector<BigInt> multiplicity_table(const SpectralModel& m, std::size_t kmax) {
    std::vector<BigInt> vals;
    vals.reserve(kmax + 1);
    ForwardDiff fd(m.R);
    for (std::size_t k = 0; k <= kmax; ++k) {
        BigInt q = fd.value_num() / fd.den;
        if (q * fd.den != fd.value_num())
            throw std::domain_error("multiplicity value is not an integer");
        vals.push_back(std::move(q));
        fd.advance();
    }
    return vals;
}

inline std::size_t to_index(const BigInt& v, const char* what) {
    if (v < 0 || v > BigInt(1) << 26)
        throw std::invalid_argument(std::string(what) + ": index range too large for enumeration");
    return v.convert_to<std::size_t>();
}

}  // namespace detail

// exact product count: depth-first over all factors but the innermost,
// which is resolved by the closed-form single-space counter
inline BigInt count_product(const ProductModel& pm, const Threshold& t, int threads = 1) {
    const auto& fs = pm.factors;
    const std::size_t n = fs.size();
    if (n == 1) return count_single_fast(fs[0], t);
    const Rational& L = t.lambda2;

    auto order = detail::enumeration_order(fs);
    const SpectralModel& inner = fs[order.back()];

    // minimum spectral value of factors at depth >= i (in enumeration order)
    std::vector<Rational> min_tail(n + 1, Rational(0));
    for (std::size_t i = n; i-- > 0;) min_tail[i] = min_tail[i + 1] + fs[order[i]].C;
    if (L < min_tail[0]) return 0;

    // per-depth multiplicity tables for the outer factors
    std::vector<std::vector<BigInt>> rvals(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const SpectralModel& f = fs[order[i]];
        auto km = k_max(f, Threshold(L - (min_tail[0] - f.C)));
        if (!km) return 0;
        rvals[i] = detail::multiplicity_table(f, detail::to_index(*km, "count_product"));
    }

    struct Walker {
        const std::vector<SpectralModel>& fs;
        const std::vector<std::size_t>& order;
        const std::vector<Rational>& min_tail;
        const std::vector<std::vector<BigInt>>& rvals;
        const SpectralModel& inner;

        BigInt run(std::size_t depth, const Rational& rem, const BigInt& w) const {
            if (depth + 1 == order.size()) return w * count_single_fast(inner, Threshold(rem));
            const SpectralModel& f = fs[order[depth]];
            BigInt total = 0;
            Rational a;
            for (std::size_t k = 0;; ++k) {
                a = f.alpha(BigInt(k));
                if (a + min_tail[depth + 1] > rem) break;
                total += run(depth + 1, rem - a, w * rvals[depth][k]);
            }
            return total;
        }
    } walker{fs, order, min_tail, rvals, inner};

    const std::size_t outer_range = rvals[0].size();
    const int workers = std::max(1, threads);
    constexpr std::size_t kChunk = 64;
    const std::size_t n_chunks = (outer_range + kChunk - 1) / kChunk;
    std::vector<BigInt> slot(n_chunks);
    parallel_chunked(outer_range, kChunk, workers, [&](std::size_t b, std::size_t e, int) {
        const SpectralModel& f0 = fs[order[0]];
        BigInt acc = 0;
        for (std::size_t k = b; k < e; ++k) {
            Rational a = f0.alpha(BigInt(k));
            if (a + min_tail[1] > L) break;
            acc += walker.run(1, L - a, rvals[0][k]);
        }
        slot[b / kChunk] += acc;
    });
    BigInt total = 0;
    for (const auto& s : slot) total += s;
    return total;
}

// exact rational value of the weighted shifted-lattice sum
inline Rational weighted_sum(const LatticeSpec& spec, const Rational& lambda) {
    validate_spec(spec);
    if (lambda < 0) throw std::invalid_argument("weighted_sum requires lambda >= 0");
    const Rational budget = lambda * lambda;
    const int n = spec.n();

    int max_pow = 0;
    for (int p : spec.pow) max_pow = std::max(max_pow, p);
    std::vector<ScaledPoly> psi;  // psi[i](n) = sum_{j=1}^{n} j^i, for i = 0..max_pow
    psi.reserve(static_cast<std::size_t>(max_pow) + 1);
    for (int i = 0; i <= max_pow; ++i) psi.emplace_back(power_sum_poly(i + 1));

    // largest j with P (y+j)^2 <= rem, or -1 when the slice is empty
    auto j_hi = [](const Rational& P, const Rational& y, const Rational& rem) -> BigInt {
        BigInt s = floor_sqrt(rem / P);
        BigInt j = floor_rational(Rational(s) - y);
        if (j < -1) j = -1;
        auto fits = [&](const BigInt& jj) {
            Rational m = y + jj;
            return P * m * m <= rem;
        };
        while (fits(j + 1)) ++j;
        while (j >= 0 && !fits(j)) --j;
        return j;
    };
    auto j_lo = [&](const Rational& P, const Rational& y, const Rational& rem,
                    const BigInt& hi) -> BigInt {
        BigInt s = floor_sqrt(rem / P);
        BigInt j = ceil_rational(Rational(-s) - y) - 1;
        if (j < 0) j = 0;
        auto fits = [&](const BigInt& jj) {
            Rational m = y + jj;
            return P * m * m <= rem;
        };
        while (j <= hi && !fits(j)) ++j;
        return j;
    };

    struct Walker {
        const LatticeSpec& spec;
        const std::vector<ScaledPoly>& psi;
        const decltype(j_hi)& hi_of;
        const decltype(j_lo)& lo_of;

        Rational run(int depth, const Rational& rem) const {
            const Rational& P = spec.P[static_cast<std::size_t>(depth)];
            const Rational& y = spec.y[static_cast<std::size_t>(depth)];
            const int p = spec.pow[static_cast<std::size_t>(depth)];
            if (rem < 0) return Rational(0);
            BigInt hi = hi_of(P, y, rem);
            if (hi < 0) return Rational(0);
            BigInt lo = lo_of(P, y, rem, hi);
            if (lo > hi) return Rational(0);
            if (depth + 1 == spec.n()) {
                // sum_{j=lo}^{hi} (y+j)^p expanded binomially through power sums
                Rational total(0);
                Rational ypow(1);
                for (int i = p; i >= 0; --i) {
                    // term i: C(p,i) y^{p-i} sum j^i
                    Rational js = psi[static_cast<std::size_t>(i)].eval(hi) -
                                  psi[static_cast<std::size_t>(i)].eval(lo - 1);
                    total += Rational(binomial(static_cast<unsigned>(p), static_cast<unsigned>(i))) *
                             ypow * js;
                    ypow *= y;
                }
                return total;
            }
            Rational total(0);
            for (BigInt j = lo; j <= hi; ++j) {
                Rational m = y + j;
                Rational mp(1);
                for (int i = 0; i < p; ++i) mp *= m;
                total += mp * run(depth + 1, rem - P * m * m);
            }
            return total;
        }
    } walker{spec, psi, j_hi, j_lo};

    (void)n;
    return walker.run(0, budget);
}

// Gamma(two_x/2) written exactly as rat * sqrt(pi)^spi
struct GammaHalf {
    Rational rat;
    int spi = 0;
};

inline GammaHalf gamma_half(long two_x) {
    if (two_x < 1) throw std::invalid_argument("gamma_half requires a positive half-integer");
    if (two_x % 2 == 0) {
        BigInt f = 1;
        for (long i = 2; i < two_x / 2; ++i) f *= i;
        return {Rational(f), 0};
    }
    // Gamma(n + 1/2) = (2n)! / (4^n n!) sqrt(pi)
    long nn = (two_x - 1) / 2;
    BigInt numf = 1, denf = 1;
    for (long i = 2; i <= 2 * nn; ++i) numf *= i;
    for (long i = 2; i <= nn; ++i) denf *= i;
    BigInt four_n = BigInt(1) << (2 * nn);
    return {Rational(numf, denf * four_n), 1};
}

inline const Float50& pi_f50() {
    static const Float50 value = 4 * atan(Float50(1));
    return value;
}

// coefficient of lambda^d in the weighted_sum asymptotics:
// prod Gamma(d_i/2) / (2^n Gamma(d/2+1) prod P_i^{d_i/2}) with d_i = pow_i + 1
inline Float50 main_term_coeff_f50(const LatticeSpec& spec) {
    validate_spec(spec);
    Rational rat(1);
    int spi = 0;
    for (int p : spec.pow) {
        GammaHalf g = gamma_half(p + 1);
        rat *= g.rat;
        spi += g.spi;
    }
    GammaHalf gd = gamma_half(spec.total_dim() + 2);
    rat /= gd.rat;
    spi -= gd.spi;
    Float50 val = to_f50(rat);
    for (int i = 0; i < spec.n(); ++i) val /= 2;
    static const Float50 sqrt_pi = sqrt(pi_f50());
    val *= pow(sqrt_pi, spi);
    for (int i = 0; i < spec.n(); ++i) {
        const int di = spec.pow[static_cast<std::size_t>(i)] + 1;
        val /= to_f50(pow_rational(spec.P[static_cast<std::size_t>(i)],
                                   static_cast<unsigned>(di / 2)));
        if (di % 2) val /= sqrt(to_f50(spec.P[static_cast<std::size_t>(i)]));
    }
    return val;
}

inline double main_term_coeff(const LatticeSpec& spec) {
    return main_term_coeff_f50(spec).convert_to<double>();
}

// leading lattice spec of a product after recentering each factor
inline LatticeSpec product_lattice_spec(const ProductModel& pm) {
    LatticeSpec spec;
    for (const auto& f : pm.factors) {
        spec.P.push_back(f.A);
        spec.y.push_back(f.shift());
        spec.pow.push_back(f.d - 1);
    }
    return spec;
}

// main-term coefficient of the product counting function: the product of the
// recentered multiplicity leading coefficients times the ellipsoid integral
inline Float50 product_c1_f50(const ProductModel& pm) {
    Rational lead(1);
    for (const auto& f : pm.factors) lead *= f.R.leading();
    return to_f50(lead) * main_term_coeff_f50(product_lattice_spec(pm));
}

inline double product_c1(const ProductModel& pm) {
    return product_c1_f50(pm).convert_to<double>();
}

namespace detail {

template <class I>
I cast_scaled(const BigInt& v) {
    return v.template convert_to<I>();
}
template <>
inline BigInt cast_scaled<BigInt>(const BigInt& v) {
    return v;
}

// batched grid enumeration: every branch walks the sorted grid once, adding
// count deltas into per-grid buckets; prefix sums yield all counts
template <class I>
struct SeriesKernel {
    std::size_t n = 0, grid_size = 0;
    std::vector<I> budget_floor;               // floor(D * Lambda_j)
    std::vector<std::vector<I>> alpha_tab;     // D * alpha_i(k), enumeration order
    std::vector<std::vector<BigInt>> rvals;    // outer multiplicities
    std::vector<BigInt> inner_prefix;          // inner_prefix[t] = sum_{k<t} R_inner(k)
    std::vector<I> min_tail;                   // sum of D*C over depths >= i

    void leaf(const I& s, const BigInt& w, std::vector<BigInt>& bucket) const {
        const auto& atab = alpha_tab.back();
        const I need = s + atab[0];
        std::size_t j = static_cast<std::size_t>(
            std::lower_bound(budget_floor.begin(), budget_floor.end(), need) -
            budget_floor.begin());
        std::size_t kk = 0;  // current inner count index: K + 1
        std::size_t last = 0;
        const std::size_t kcap = atab.size() - 1;
        for (; j < grid_size; ++j) {
            const I budget = budget_floor[j] - s;
            while (kk < kcap && atab[kk] <= budget) ++kk;
            if (kk != last) {
                bucket[j] += w * (inner_prefix[kk] - inner_prefix[last]);
                last = kk;
            }
        }
    }

    void dfs(std::size_t depth, const I& s, const BigInt& w, std::vector<BigInt>& bucket) const {
        if (depth + 1 == n) {
            leaf(s, w, bucket);
            return;
        }
        const auto& atab = alpha_tab[depth];
        const I limit = budget_floor.back() - min_tail[depth + 1];
        for (std::size_t k = 0; k < rvals[depth].size(); ++k) {
            I v = s + atab[k];
            if (v > limit) break;
            dfs(depth + 1, v, w * rvals[depth][k], bucket);
        }
    }
};

}  // namespace detail

// counts at every grid threshold (entries are exact lambda^2 values), sharing
// one enumeration across the whole grid; identical to pointwise count_product
inline CountSeries count_product_series(const ProductModel& pm,
                                        const std::vector<Rational>& lambda2_grid,
                                        int threads = 1) {
    validate_series_grid(lambda2_grid);
    CountSeries out;
    out.space = pm.name;
    out.d = pm.d;
    out.c1 = product_c1(pm);
    out.lambda2 = lambda2_grid;
    const std::size_t G = lambda2_grid.size();
    if (G == 0) return out;
    out.lambdas.reserve(G);
    for (const auto& L : lambda2_grid) out.lambdas.push_back(lambda_double(L));

    const auto& fs = pm.factors;
    const std::size_t n = fs.size();
    auto order = detail::enumeration_order(fs);
    const Rational& Lmax = lambda2_grid.back();

    BigInt D = 1;
    for (const auto& f : fs)
        for (const Rational* q : {&f.A, &f.B, &f.C})
            D = boost::multiprecision::lcm(D, den(*q));

    std::vector<Rational> min_tail(n + 1, Rational(0));
    for (std::size_t i = n; i-- > 0;) min_tail[i] = min_tail[i + 1] + fs[order[i]].C;

    // per-factor index caps against the largest budget
    std::vector<std::size_t> kcap(n);
    bool empty = false;
    for (std::size_t i = 0; i < n && !empty; ++i) {
        const SpectralModel& f = fs[order[i]];
        auto km = k_max(f, Threshold(Lmax - (min_tail[0] - f.C)));
        if (!km) empty = true;
        else kcap[i] = detail::to_index(*km, "count_product_series");
    }
    if (empty) {
        out.counts.assign(G, BigInt(0));
        recompute_remainders(out);
        return out;
    }

    auto scaled_alpha = [&](const SpectralModel& f, std::size_t kmax_incl) {
        std::vector<BigInt> tab;
        tab.reserve(kmax_incl + 2);
        for (std::size_t k = 0; k <= kmax_incl + 1; ++k) {
            Rational v = f.alpha(BigInt(k)) * D;
            if (den(v) != 1) throw std::domain_error("scaled spectral value is not an integer");
            tab.push_back(num(v));
        }
        return tab;
    };

    std::vector<std::vector<BigInt>> alpha_big(n);
    for (std::size_t i = 0; i < n; ++i) alpha_big[i] = scaled_alpha(fs[order[i]], kcap[i]);
    std::vector<BigInt> budget_big;
    budget_big.reserve(G);
    for (const auto& L : lambda2_grid) budget_big.push_back(floor_rational(L * D));

    BigInt magnitude = budget_big.back();
    for (const auto& tab : alpha_big) magnitude = std::max(magnitude, tab.back());
    magnitude = 2 * magnitude + 2;
    const bool narrow = magnitude < (BigInt(1) << 62);

    auto run = [&](auto kernel_tag) {
        using I = decltype(kernel_tag);
        detail::SeriesKernel<I> kern;
        kern.n = n;
        kern.grid_size = G;
        kern.budget_floor.reserve(G);
        for (const auto& b : budget_big) kern.budget_floor.push_back(detail::cast_scaled<I>(b));
        kern.alpha_tab.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            kern.alpha_tab[i].reserve(alpha_big[i].size());
            for (const auto& a : alpha_big[i])
                kern.alpha_tab[i].push_back(detail::cast_scaled<I>(a));
        }
        kern.min_tail.resize(n + 1);
        kern.min_tail[n] = I(0);
        for (std::size_t i = n; i-- > 0;)
            kern.min_tail[i] = kern.min_tail[i + 1] + kern.alpha_tab[i][0];
        kern.rvals.resize(n > 1 ? n - 1 : 0);
        for (std::size_t i = 0; i + 1 < n; ++i)
            kern.rvals[i] = detail::multiplicity_table(fs[order[i]], kcap[i]);
        {
            const SpectralModel& f = fs[order.back()];
            kern.inner_prefix.resize(kcap[n - 1] + 2);
            kern.inner_prefix[0] = 0;
            ForwardDiff fd(f.R);
            for (std::size_t k = 0; k <= kcap[n - 1]; ++k) {
                BigInt q = fd.value_num() / fd.den;
                if (q * fd.den != fd.value_num())
                    throw std::domain_error("multiplicity value is not an integer");
                kern.inner_prefix[k + 1] = kern.inner_prefix[k] + q;
                fd.advance();
            }
        }

        const int workers = std::max(1, threads);
        std::vector<BigInt> total(G);
        if (n == 1) {
            kern.leaf(I(0), BigInt(1), total);
        } else {
            const std::size_t outer_range = kern.rvals[0].size();
            const std::size_t max_workers =
                std::min<std::size_t>(static_cast<std::size_t>(workers), outer_range);
            std::vector<std::vector<BigInt>> bucket(max_workers,
                                                    std::vector<BigInt>(G, BigInt(0)));
            constexpr std::size_t kChunk = 16;
            parallel_chunked(outer_range, kChunk, static_cast<int>(max_workers),
                             [&](std::size_t b, std::size_t e, int w) {
                                 auto& mine = bucket[static_cast<std::size_t>(w)];
                                 for (std::size_t k = b; k < e; ++k) {
                                     I v = kern.alpha_tab[0][k];
                                     if (v > kern.budget_floor.back() - kern.min_tail[1]) break;
                                     kern.dfs(1, v, kern.rvals[0][k], mine);
                                 }
                             });
            for (const auto& part : bucket)
                for (std::size_t j = 0; j < G; ++j) total[j] += part[j];
        }
        for (std::size_t j = 1; j < G; ++j) total[j] += total[j - 1];
        out.counts = std::move(total);
    };

    if (narrow) run(static_cast<long long>(0));
    else run(BigInt(0));

    recompute_remainders(out);
    return out;
}

}  // namespace weyl
