#include <catch2/catch_amalgamated.hpp>

#include "weyl/counting.hpp"

#include <random>

using namespace weyl;

namespace {

// literal oracle: evaluate R(k) by rational Horner for each k and add up
BigInt brute_count(const SpectralModel& m, const Rational& L) {
    BigInt total = 0;
    for (BigInt k = 0;; ++k) {
        if (m.alpha(k) > L) break;
        Rational rk = poly_eval(m.R, Rational(k));
        REQUIRE(den(rk) == 1);
        total += num(rk);
    }
    return total;
}

Rational random_lambda2(std::mt19937_64& rng, long max_int) {
    std::uniform_int_distribution<long> d_den(1, 1000);
    long dd = d_den(rng);
    std::uniform_int_distribution<long long> d_num(0, static_cast<long long>(max_int) * dd);
    return Rational(d_num(rng), dd);
}

}  // namespace

TEST_CASE("k_max frozen values") {
    SpectralModel s3 = model(Family::S3);
    auto k1 = k_max(s3, Rational(3, 4));
    REQUIRE(k1.has_value());
    CHECK(*k1 == 1);
    CHECK_FALSE(k_max(s3, Rational(-1)).has_value());
    CHECK(*k_max(s3, Rational(0)) == 0);
    CHECK(*k_max(s3, Rational(2)) == 2);  // alpha(2) = 2 exactly

    SpectralModel s2 = model(Family::EvenSphere, 1);
    CHECK(*k_max(s2, Rational(1)) == 1);  // alpha(1) = 1, alpha(2) = 3
    CHECK(*k_max(s2, Rational(29, 10)) == 1);
    CHECK(*k_max(s2, Rational(3)) == 2);
}

TEST_CASE("k_max equals the brute threshold scan") {
    std::mt19937_64 rng(9001);
    for (const auto& m : sweep_models()) {
        for (int iter = 0; iter < 10; ++iter) {
            Rational L = random_lambda2(rng, 500);
            auto km = k_max(m, L);
            BigInt expect = -1;
            for (BigInt k = 0; m.alpha(k) <= L; ++k) expect = k;
            if (expect < 0) CHECK_FALSE(km.has_value());
            else {
                REQUIRE(km.has_value());
                CHECK(*km == expect);
            }
        }
        // exact jump points: alpha(k) and alpha(k) minus a sliver
        for (long k : {0L, 1L, 7L, 40L}) {
            Rational at = m.alpha(BigInt(k));
            CHECK(*k_max(m, at) == k);
            if (k > 0) CHECK(*k_max(m, at - Rational(1, 1000000)) == k - 1);
        }
    }
}

TEST_CASE("count_single frozen values") {
    SpectralModel s3 = model(Family::S3);
    CHECK(count_single(s3, Rational(0)) == 1);
    CHECK(count_single(s3, Rational(2)) == 14);
    CHECK(count_single(s3, Rational(-1)) == 0);
    SpectralModel s2 = model(Family::EvenSphere, 1);
    CHECK(count_single(s2, Rational(1)) == 4);
    CHECK(count_single_fast(s3, Rational(2)) == 14);
    CHECK(count_single_fast(s3, Rational(-5)) == 0);
    CHECK(count_single_fast(s2, Rational(1)) == 4);
}

TEST_CASE("count_single matches the literal Horner loop") {
    std::mt19937_64 rng(5150);
    for (const auto& m : sweep_models()) {
        for (int iter = 0; iter < 3; ++iter) {
            Rational L = random_lambda2(rng, 200);
            BigInt expect = brute_count(m, L);
            CHECK(count_single(m, L) == expect);
            CHECK(count_single_fast(m, L) == expect);
        }
    }
}

TEST_CASE("count_single equals count_single_fast on larger random thresholds") {
    std::mt19937_64 rng(31337);
    for (const auto& m : sweep_models()) {
        INFO(m.name);
        for (int iter = 0; iter < 25; ++iter) {
            Rational L = random_lambda2(rng, 10000);
            CHECK(count_single(m, L) == count_single_fast(m, L));
        }
    }
}

TEST_CASE("RP3 at a million") {
    SpectralModel rp3 = model(Family::RP3);
    BigInt slow = count_single(rp3, Rational(1000000));
    BigInt fast = count_single_fast(rp3, Rational(1000000));
    CHECK(slow == fast);
    CHECK(slow > 0);
}

TEST_CASE("monotonicity") {
    std::mt19937_64 rng(2024);
    SpectralModel cp3 = model(Family::CP, 3);
    for (int iter = 0; iter < 40; ++iter) {
        Rational a = random_lambda2(rng, 3000);
        Rational b = random_lambda2(rng, 3000);
        if (b < a) std::swap(a, b);
        CHECK(count_single_fast(cp3, a) <= count_single_fast(cp3, b));
    }
}

TEST_CASE("jump structure") {
    const Rational eps(1, 1000000);
    for (Family f : {Family::S3, Family::RP3, Family::OP2}) {
        SpectralModel m = model(f);
        for (long k = 0; k <= 100; ++k) {
            Rational at = m.alpha(BigInt(k));
            BigInt jump = count_single_fast(m, at) - count_single_fast(m, at - eps);
            Rational rk = poly_eval(m.R, Rational(k));
            CHECK(Rational(jump) == rk);
        }
    }
}
