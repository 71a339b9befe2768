#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bpwb {

/// Raised when a value or argument falls outside an operation's domain.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Raised on malformed textual input.
class ParseError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a computation would need a generator index beyond the configured truncation.
class TruncationError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

namespace arith {

using BigInt = mpz_class;
/// GMP rationals are kept canonical (reduced, positive denominator) by every operator.
using Fraction = mpq_class;

bool is_prime(long n);
void require_prime(long p);

BigInt parse_bigint(std::string_view text);
/// Accepts `a` or `a/b`; the result is reduced.
Fraction parse_fraction(std::string_view text);
std::string to_string(const BigInt& x);
std::string to_string(const Fraction& x);

/// ord_p of a nonzero integer.
long valuation(const BigInt& x, long p);

/// ord_p(num) - ord_p(den). `std::nullopt` encodes +infinity (x == 0).
std::optional<long> padic_valuation(const Fraction& x, long p);

/// True when the valuation is at least `k` (zero counts as infinitely divisible).
bool valuation_at_least(const Fraction& x, long p, long k);

/// (i+j)! / (i! j!)
BigInt multinomial_coefficient(unsigned long i, unsigned long j);
BigInt binomial(unsigned long n, unsigned long k);
BigInt power(long base, unsigned long exponent);

/// Balanced residue of a p-local fraction modulo `modulus` (a power of p), in (-m/2, m/2].
BigInt balanced_residue(const Fraction& x, const BigInt& modulus);

/// An element of Z_(p): a rational whose denominator is prime to p.
class PLocalNumber {
public:
    PLocalNumber(Fraction value, long prime);
    PLocalNumber(long value, long prime) : PLocalNumber(Fraction(value), prime) {}

    static PLocalNumber parse(std::string_view text, long prime);

    [[nodiscard]] const Fraction& value() const noexcept { return value_; }
    [[nodiscard]] long prime() const noexcept { return prime_; }
    [[nodiscard]] std::optional<long> valuation() const { return padic_valuation(value_, prime_); }
    [[nodiscard]] bool is_unit() const { return valuation() == 0L; }
    [[nodiscard]] std::string str() const { return to_string(value_); }

    PLocalNumber& operator+=(const PLocalNumber& rhs);
    PLocalNumber& operator-=(const PLocalNumber& rhs);
    PLocalNumber& operator*=(const PLocalNumber& rhs);
    /// Only division by units stays inside Z_(p); anything else throws DomainError.
    PLocalNumber& operator/=(const PLocalNumber& rhs);

    friend PLocalNumber operator+(PLocalNumber a, const PLocalNumber& b) { return a += b; }
    friend PLocalNumber operator-(PLocalNumber a, const PLocalNumber& b) { return a -= b; }
    friend PLocalNumber operator*(PLocalNumber a, const PLocalNumber& b) { return a *= b; }
    friend PLocalNumber operator/(PLocalNumber a, const PLocalNumber& b) { return a /= b; }
    PLocalNumber operator-() const { return PLocalNumber(-value_, prime_); }

    friend bool operator==(const PLocalNumber& a, const PLocalNumber& b)
    {
        return a.prime_ == b.prime_ && a.value_ == b.value_;
    }

private:
    void check_same_prime(const PLocalNumber& rhs) const;

    Fraction value_;
    long prime_;
};

}  // namespace arith
}  // namespace bpwb
