#include "bpwb/arith.hpp"

#include <doctest.h>

#include <random>
#include <vector>

using namespace bpwb;
using namespace bpwb::arith;

namespace {

// Pascal's triangle in plain integers; independent of GMP's binomial.
std::vector<std::vector<unsigned long long>> pascal(int rows)
{
    std::vector<std::vector<unsigned long long>> t(rows + 1);
    for (int n = 0; n <= rows; ++n) {
        t[n].assign(n + 1, 1);
        for (int k = 1; k < n; ++k) {
            t[n][k] = t[n - 1][k - 1] + t[n - 1][k];
        }
    }
    return t;
}

long naive_val(long long x, long p)
{
    long v = 0;
    if (x < 0) {
        x = -x;
    }
    while (x % p == 0) {
        x /= p;
        ++v;
    }
    return v;
}

Fraction random_fraction(std::mt19937_64& rng)
{
    std::uniform_int_distribution<long> num(-5000, 5000);
    std::uniform_int_distribution<long> den(1, 3000);
    Fraction f(num(rng), den(rng));
    f.canonicalize();
    return f;
}

}  // namespace

TEST_CASE("valuation examples")
{
    CHECK(padic_valuation(Fraction(49, 3), 7) == 2L);
    CHECK(padic_valuation(Fraction(1), 5) == 0L);
    CHECK(padic_valuation(Fraction(2, 49), 7) == -2L);
    CHECK_FALSE(padic_valuation(Fraction(0), 7).has_value());
    CHECK_THROWS_AS(padic_valuation(Fraction(3), 9), DomainError);
    // (p-1)!/(1!(p-1)!) at p = 7
    CHECK(padic_valuation(Fraction(multinomial_coefficient(1, 5)), 7) == 0L);
}

TEST_CASE("binomials agree with Pascal's triangle")
{
    auto t = pascal(60);
    for (int n = 0; n <= 60; ++n) {
        for (int k = 0; k <= n; ++k) {
            REQUIRE(binomial(n, k) == BigInt(std::to_string(t[n][k])));
        }
    }
    CHECK(multinomial_coefficient(1, 6) == 7);
    CHECK(multinomial_coefficient(0, 11) == 1);
}

TEST_CASE("binom(p^2, p) has valuation exactly 1")
{
    for (long p : {3L, 5L, 7L, 11L}) {
        BigInt b = multinomial_coefficient(p, p * p - p);
        CHECK(b == binomial(p * p, p));
        CHECK(valuation(b, p) == 1);
    }
}

TEST_CASE("parse and print round trip")
{
    CHECK(to_string(parse_fraction("6/4")) == "3/2");
    CHECK(to_string(parse_fraction("-10/5")) == "-2");
    CHECK(to_string(parse_bigint("123456789012345678901234567890")) == "123456789012345678901234567890");
    CHECK_THROWS_AS(parse_fraction("1/0"), ParseError);
    CHECK_THROWS_AS(parse_fraction("1/-2"), ParseError);
    CHECK_THROWS_AS(parse_fraction("x"), ParseError);
    CHECK_THROWS_AS(parse_fraction(""), ParseError);
}

TEST_CASE("BigInt matches machine arithmetic below 2^32")
{
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<long long> d(-(1LL << 31), 1LL << 31);
    for (int i = 0; i < 2000; ++i) {
        long long a = d(rng);
        long long b = d(rng);
        BigInt A = parse_bigint(std::to_string(a));
        BigInt B = parse_bigint(std::to_string(b));
        REQUIRE(to_string(BigInt(A + B)) == std::to_string(a + b));
        REQUIRE(to_string(BigInt(A * B)) == std::to_string(a * b));
        REQUIRE(to_string(BigInt(A - B)) == std::to_string(a - b));
    }
}

TEST_CASE("valuation is a valuation (random)")
{
    std::mt19937_64 rng(7);
    for (long p : {2L, 3L, 5L, 7L}) {
        for (int i = 0; i < 500; ++i) {
            Fraction x = random_fraction(rng);
            Fraction y = random_fraction(rng);
            if (x == 0 || y == 0) {
                continue;
            }
            Fraction xy = x * y;
            REQUIRE(*padic_valuation(xy, p) == *padic_valuation(x, p) + *padic_valuation(y, p));
            Fraction s = x + y;
            if (s != 0) {
                REQUIRE(*padic_valuation(s, p) >= std::min(*padic_valuation(x, p), *padic_valuation(y, p)));
            }
            // reduced form survives every operation
            for (const Fraction& f : {xy, s, Fraction(x - y), Fraction(x / y)}) {
                REQUIRE(f.get_den() > 0);
                REQUIRE(gcd(f.get_num(), f.get_den()) == 1);
            }
            long long n = x.get_num().get_si();
            long long dd = x.get_den().get_si();
            REQUIRE(*padic_valuation(x, p) == naive_val(n, p) - naive_val(dd, p));
        }
    }
}

TEST_CASE("p-local numbers")
{
    const long p = 7;
    PLocalNumber a(Fraction(3, 2), p);
    PLocalNumber b(14, p);
    CHECK((a + b).value() == Fraction(31, 2));
    CHECK((a * b).value() == 21);
    CHECK((b / a).value() == Fraction(28, 3));
    CHECK_THROWS_AS(a / b, DomainError);
    CHECK_THROWS_AS(PLocalNumber(Fraction(1, 7), p), DomainError);
    CHECK_THROWS_AS(PLocalNumber(1, 6), DomainError);
    CHECK(b.valuation() == 1L);
    CHECK(PLocalNumber::parse("5/3", p).is_unit());

    std::mt19937_64 rng(3);
    for (int i = 0; i < 300; ++i) {
        Fraction x = random_fraction(rng);
        Fraction y = random_fraction(rng);
        if (x.get_den() % p == 0 || y.get_den() % p == 0) {
            continue;
        }
        PLocalNumber X(x, p);
        PLocalNumber Y(y, p);
        REQUIRE_NOTHROW(X + Y);
        REQUIRE_NOTHROW(X * Y);
        if (Y.is_unit()) {
            REQUIRE_NOTHROW(X / Y);
        } else if (y != 0) {
            REQUIRE_THROWS_AS(X / Y, DomainError);
        }
    }
}

TEST_CASE("balanced residues")
{
    CHECK(balanced_residue(Fraction(6), BigInt(7)) == -1);
    CHECK(balanced_residue(Fraction(1, 2), BigInt(7)) == -3);
    CHECK(balanced_residue(Fraction(-2 * 7 + 49 * 5), BigInt(49)) == -14);
    CHECK_THROWS_AS(balanced_residue(Fraction(1, 7), BigInt(49)), DomainError);
}
