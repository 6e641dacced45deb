#include <catch2/catch_amalgamated.hpp>

#include "weyl/asym.hpp"
#include "weyl/lattice.hpp"

#include <random>

using namespace weyl;

namespace {

BigInt rvalue(const SpectralModel& m, long k) {
    Rational r = poly_eval(m.R, Rational(k));
    REQUIRE(den(r) == 1);
    return num(r);
}

// literal nested loops, up to three factors
BigInt nested_oracle(const std::vector<SpectralModel>& fs, const Rational& L) {
    BigInt total = 0;
    if (fs.size() == 1) {
        for (long k = 0; fs[0].alpha(BigInt(k)) <= L; ++k) total += rvalue(fs[0], k);
        return total;
    }
    if (fs.size() == 2) {
        for (long k1 = 0; fs[0].alpha(BigInt(k1)) <= L; ++k1)
            for (long k2 = 0; fs[0].alpha(BigInt(k1)) + fs[1].alpha(BigInt(k2)) <= L; ++k2)
                total += rvalue(fs[0], k1) * rvalue(fs[1], k2);
        return total;
    }
    REQUIRE(fs.size() == 3);
    for (long k1 = 0; fs[0].alpha(BigInt(k1)) <= L; ++k1)
        for (long k2 = 0; fs[0].alpha(BigInt(k1)) + fs[1].alpha(BigInt(k2)) <= L; ++k2)
            for (long k3 = 0; fs[0].alpha(BigInt(k1)) + fs[1].alpha(BigInt(k2)) +
                                  fs[2].alpha(BigInt(k3)) <=
                              L;
                 ++k3)
                total += rvalue(fs[0], k1) * rvalue(fs[1], k2) * rvalue(fs[2], k3);
    return total;
}

// brute-force weighted lattice sum, up to two factors
Rational ws_brute(const LatticeSpec& spec, const Rational& lambda) {
    Rational budget = lambda * lambda;
    auto weight = [&](const Rational& m, int p) {
        Rational w(1);
        for (int i = 0; i < p; ++i) w *= m;
        return w;
    };
    Rational total(0);
    if (spec.n() == 1) {
        for (long j = 0;; ++j) {
            Rational m = spec.y[0] + j;
            if (m > 0 && spec.P[0] * m * m > budget) break;
            if (spec.P[0] * m * m <= budget) total += weight(m, spec.pow[0]);
        }
        return total;
    }
    REQUIRE(spec.n() == 2);
    for (long j1 = 0;; ++j1) {
        Rational m1 = spec.y[0] + j1;
        if (m1 > 0 && spec.P[0] * m1 * m1 > budget) break;
        if (spec.P[0] * m1 * m1 > budget) continue;
        Rational rem = budget - spec.P[0] * m1 * m1;
        for (long j2 = 0;; ++j2) {
            Rational m2 = spec.y[1] + j2;
            if (m2 > 0 && spec.P[1] * m2 * m2 > rem) break;
            if (spec.P[1] * m2 * m2 <= rem)
                total += weight(m1, spec.pow[0]) * weight(m2, spec.pow[1]);
        }
    }
    return total;
}

// recentered counting: sum over Q-monomial tuples of weighted shifted-lattice sums
Rational pipeline_count(const ProductModel& pm, const Rational& lambda_ws) {
    std::vector<Poly> Q;
    for (const auto& f : pm.factors) Q.push_back(w_verify(f).Q);
    std::vector<std::size_t> j(pm.factors.size(), 0);
    Rational total(0);
    while (true) {
        Rational coeff(1);
        bool live = true;
        for (std::size_t i = 0; i < j.size() && live; ++i) {
            coeff *= Q[i].coeff(j[i]);
            if (coeff == 0) live = false;
        }
        if (live) {
            LatticeSpec spec;
            for (std::size_t i = 0; i < j.size(); ++i) {
                spec.P.push_back(pm.factors[i].A);
                spec.y.push_back(pm.factors[i].shift());
                spec.pow.push_back(static_cast<int>(j[i]));
            }
            bool ok = true;
            for (int p : spec.pow)
                if (p < 1) ok = false;  // weighted_sum requires pow >= 1; catalog Q has no
                                        // constant or static terms below t, so this never trips
            REQUIRE(ok);
            total += coeff * weighted_sum(spec, lambda_ws);
        }
        // advance multi-index over coefficient positions
        std::size_t i = 0;
        for (; i < j.size(); ++i) {
            if (j[i] + 1 <= static_cast<std::size_t>(Q[i].degree())) {
                ++j[i];
                break;
            }
            j[i] = 0;
        }
        if (i == j.size()) break;
    }
    return total;
}

}  // namespace

TEST_CASE("make_product") {
    ProductModel pm = make_product({model(Family::S3), model(Family::S3)});
    CHECK(pm.name == "S3xS3");
    CHECK(pm.d == 6);
    CHECK(pm.kappa_total == Rational(1, 2));
    CHECK_THROWS_AS(make_product({}), std::invalid_argument);
}

TEST_CASE("count_product frozen values") {
    ProductModel s3s3 = make_product({model(Family::S3), model(Family::S3)});
    CHECK(count_product(s3s3, Rational(3, 4)) == 9);
    CHECK(count_product(s3s3, Rational(-1)) == 0);
    ProductModel s2s2 = make_product({model(Family::EvenSphere, 1), model(Family::EvenSphere, 1)});
    CHECK(count_product(s2s2, Rational(1)) == 7);
    // single factor falls through to the closed-form counter
    ProductModel s3 = make_product({model(Family::S3)});
    CHECK(count_product(s3, Rational(2)) == 14);
}

TEST_CASE("count_product equals the nested-loop oracle") {
    std::vector<SpectralModel> basis = {model(Family::EvenSphere, 1), model(Family::S3),
                                        model(Family::RP3), model(Family::CP, 2)};
    std::mt19937_64 rng(1123);
    std::uniform_int_distribution<int> pick(0, 3);
    std::uniform_int_distribution<long> dden(1, 12);
    for (int iter = 0; iter < 12; ++iter) {
        std::vector<SpectralModel> fs;
        int nf = 2 + (iter % 2);
        for (int i = 0; i < nf; ++i) fs.push_back(basis[static_cast<std::size_t>(pick(rng))]);
        long dd = dden(rng);
        std::uniform_int_distribution<long> dnum(0, 200 * dd);
        Rational L(dnum(rng), dd);
        ProductModel pm = make_product(fs);
        INFO(pm.name << " at " << rational_to_string(L));
        CHECK(count_product(pm, L) == nested_oracle(fs, L));
    }
    // boundary-inclusive threshold hitting an eigenvalue exactly
    ProductModel s2s2 = make_product({basis[0], basis[0]});
    Rational at_jump = basis[0].alpha(BigInt(1)) + basis[0].alpha(BigInt(2));
    CHECK(count_product(s2s2, at_jump) == nested_oracle({basis[0], basis[0]}, at_jump));
}

TEST_CASE("weighted_sum frozen values") {
    LatticeSpec flat{{Rational(1), Rational(1)}, {Rational(0), Rational(0)}, {1, 1}};
    CHECK(weighted_sum(flat, Rational(2)) == 1);
    LatticeSpec offset{{Rational(1), Rational(1)}, {Rational(1, 2), Rational(1, 3)}, {1, 1}};
    CHECK(weighted_sum(offset, Rational(0)) == 0);
    LatticeSpec cubes{{Rational(1)}, {Rational(0)}, {3}};
    CHECK(weighted_sum(cubes, Rational(10)) == 3025);
    CHECK_THROWS_AS(weighted_sum(flat, Rational(-1)), std::invalid_argument);
    LatticeSpec badpow{{Rational(1)}, {Rational(0)}, {0}};
    CHECK_THROWS_AS(weighted_sum(badpow, Rational(1)), std::invalid_argument);
}

TEST_CASE("weighted_sum equals brute force on random specs") {
    std::mt19937_64 rng(9412);
    std::uniform_int_distribution<long> pnum(1, 4), pden(1, 3);
    std::uniform_int_distribution<long> ynum(-3, 4), yden(1, 3);
    std::uniform_int_distribution<int> pw(1, 4);
    std::uniform_int_distribution<long> lam(0, 6);
    for (int iter = 0; iter < 60; ++iter) {
        LatticeSpec spec;
        int n = 1 + (iter % 2);
        for (int i = 0; i < n; ++i) {
            spec.P.push_back(Rational(pnum(rng), pden(rng)));
            spec.y.push_back(Rational(ynum(rng), yden(rng)));
            spec.pow.push_back(pw(rng));
        }
        Rational lambda(lam(rng), 1 + (iter % 3));
        INFO("iter " << iter);
        CHECK(weighted_sum(spec, lambda) == ws_brute(spec, lambda));
    }
}

TEST_CASE("recentering pipeline reproduces product counts") {
    // lambda chosen so the shifted budget lambda_ws^2 = Lambda + kappa is a perfect square
    auto check_pipeline = [&](std::vector<SpectralModel> fs, const Rational& lambda_ws) {
        ProductModel pm = make_product(std::move(fs));
        Rational L = lambda_ws * lambda_ws - pm.kappa_total;
        Rational viaws = pipeline_count(pm, lambda_ws);
        REQUIRE(den(viaws) == 1);
        CHECK(num(viaws) == count_product(pm, L));
    };
    check_pipeline({model(Family::S3), model(Family::S3)}, Rational(3));
    check_pipeline({model(Family::S3), model(Family::RP3)}, Rational(2));
    check_pipeline({model(Family::S3), model(Family::OddRP, 3)}, Rational(5, 2));
    check_pipeline({model(Family::CP, 2), model(Family::RP3)}, Rational(7, 2));
    check_pipeline({model(Family::EvenSphere, 1), model(Family::EvenSphere, 2)}, Rational(4));
}

TEST_CASE("main_term_coeff closed forms") {
    LatticeSpec flat{{Rational(1), Rational(1)}, {Rational(0), Rational(0)}, {1, 1}};
    CHECK_THAT(main_term_coeff(flat), Catch::Matchers::WithinRel(0.125, 1e-14));
    for (int d = 2; d <= 7; ++d) {
        LatticeSpec single{{Rational(1)}, {Rational(0)}, {d - 1}};
        CHECK_THAT(main_term_coeff(single), Catch::Matchers::WithinRel(1.0 / d, 1e-14));
    }
    LatticeSpec scaled{{Rational(4), Rational(1)}, {Rational(0), Rational(0)}, {1, 1}};
    CHECK_THAT(main_term_coeff(scaled), Catch::Matchers::WithinRel(1.0 / 32, 1e-14));
}

TEST_CASE("main_term_coeff against midpoint quadrature") {
    // integral of x^2 y^3 over the quarter ellipse x^2 + 3 y^2 <= 1
    LatticeSpec spec{{Rational(1), Rational(3)}, {Rational(0), Rational(0)}, {2, 3}};
    const int N = 1500;
    double sum = 0;
    const double ymax = 1.0 / std::sqrt(3.0);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            double x = (i + 0.5) / N;
            double y = (j + 0.5) / N * ymax;
            if (x * x + 3 * y * y <= 1) sum += x * x * y * y * y;
        }
    sum *= (1.0 / N) * (ymax / N);
    CHECK_THAT(main_term_coeff(spec), Catch::Matchers::WithinRel(sum, 2e-3));
}

TEST_CASE("weighted_sum approaches its main term") {
    LatticeSpec flat{{Rational(1), Rational(1)}, {Rational(0), Rational(0)}, {1, 1}};
    Rational v = weighted_sum(flat, Rational(2000));
    double ratio = to_double(v) / std::pow(2000.0, 4);
    CHECK_THAT(ratio, Catch::Matchers::WithinRel(0.125, 0.02));
}

TEST_CASE("product main-term coefficient") {
    ProductModel s2s2 = make_product({model(Family::EvenSphere, 1), model(Family::EvenSphere, 1)});
    CHECK_THAT(product_c1(s2s2), Catch::Matchers::WithinRel(2.0, 1e-13));
    ProductModel s3s3 = make_product({model(Family::S3), model(Family::S3)});
    CHECK_THAT(product_c1(s3s3),
               Catch::Matchers::WithinRel(2 * 3.14159265358979323846 / 3, 1e-13));
}

TEST_CASE("count_product_series consistency") {
    ProductModel s3s3 = make_product({model(Family::S3), model(Family::S3)});
    // singleton grid
    auto single = count_product_series(s3s3, {Rational(3, 4)});
    REQUIRE(single.size() == 1);
    CHECK(single.counts[0] == 9);
    // ten points below 5 match pointwise calls
    std::vector<Rational> grid;
    for (int i = 1; i <= 10; ++i) grid.push_back(Rational(i, 2));
    auto s = count_product_series(s3s3, grid);
    REQUIRE(s.size() == 10);
    for (std::size_t i = 0; i < 10; ++i) CHECK(s.counts[i] == count_product(s3s3, grid[i]));
    // empty grid
    auto e = count_product_series(s3s3, {});
    CHECK(e.size() == 0);
    CHECK(e.space == "S3xS3");
    // invalid grids
    CHECK_THROWS_AS(count_product_series(s3s3, {Rational(2), Rational(1)}), std::invalid_argument);
    CHECK_THROWS_AS(count_product_series(s3s3, {Rational(-1), Rational(1)}), std::invalid_argument);
}

TEST_CASE("count_product_series on mixed products") {
    std::mt19937_64 rng(555);
    std::vector<SpectralModel> fs = {model(Family::EvenSphere, 1), model(Family::S3),
                                     model(Family::RP3)};
    ProductModel pm = make_product(fs);
    std::vector<Rational> grid;
    Rational prev(0);
    for (int i = 0; i < 12; ++i) {
        prev += Rational(1 + static_cast<long>(rng() % 40), 7);
        grid.push_back(prev);
    }
    auto s = count_product_series(pm, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        INFO("grid point " << i);
        CHECK(s.counts[i] == count_product(pm, grid[i]));
        CHECK(s.counts[i] == nested_oracle(fs, grid[i]));
    }
    // grid entirely below the bottom of the spectrum of a shifted model
    SpectralModel lifted = make_model("lifted", 2, Rational(1), Rational(1), Rational(5),
                                      parse_poly("k+1"));
    ProductModel lifted2 = make_product({lifted, lifted});
    auto z = count_product_series(lifted2, {Rational(1), Rational(9)});
    CHECK(z.counts[0] == 0);
    CHECK(z.counts[1] == 0);
    CHECK(count_product(lifted2, Rational(10)) == 1);
}

TEST_CASE("count_product_series wide-denominator path") {
    // huge spectral denominators push the scaled budgets past 2^62, forcing
    // the big-integer kernel
    const BigInt big = BigInt(1) << 52;
    SpectralModel wide = make_model("wide", 2, Rational(1), Rational(big + 1, big), Rational(0),
                                    parse_poly("k+1"));
    ProductModel pm = make_product({wide, wide});
    std::vector<Rational> grid = {Rational(5), Rational(50), Rational(2000)};
    auto s = count_product_series(pm, grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(s.counts[i] == count_product(pm, grid[i]));
}

TEST_CASE("parallel product counting is schedule independent") {
    ProductModel s3s3 = make_product({model(Family::S3), model(Family::S3)});
    BigInt base = count_product(s3s3, Rational(10000), 1);
    CHECK(count_product(s3s3, Rational(10000), 4) == base);
    CHECK(count_product(s3s3, Rational(10000), 16) == base);

    ProductModel s2s2 = make_product({model(Family::EvenSphere, 1), model(Family::EvenSphere, 1)});
    std::vector<Rational> grid;
    for (int i = 1; i <= 40; ++i) grid.push_back(Rational(i * i, 3));
    auto ref = count_product_series(s2s2, grid, 1);
    for (int th : {4, 16}) {
        auto s = count_product_series(s2s2, grid, th);
        REQUIRE(s.size() == ref.size());
        for (std::size_t i = 0; i < ref.size(); ++i) CHECK(s.counts[i] == ref.counts[i]);
    }
}
