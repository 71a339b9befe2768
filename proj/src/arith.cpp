#include "bpwb/arith.hpp"

#include <cctype>

namespace bpwb::arith {

bool is_prime(long n)
{
    if (n < 2) {
        return false;
    }
    for (long d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            return false;
        }
    }
    return true;
}

void require_prime(long p)
{
    if (!is_prime(p)) {
        throw DomainError("not a prime: " + std::to_string(p));
    }
}

BigInt parse_bigint(std::string_view text)
{
    std::string s(text);
    std::size_t start = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
    if (start == s.size()) {
        throw ParseError("empty integer literal");
    }
    for (std::size_t i = start; i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) {
            throw ParseError("bad integer literal: '" + s + "'");
        }
    }
    if (s[0] == '+') {
        s.erase(0, 1);
    }
    return BigInt(s, 10);
}

Fraction parse_fraction(std::string_view text)
{
    auto slash = text.find('/');
    if (slash == std::string_view::npos) {
        return Fraction(parse_bigint(text));
    }
    BigInt num = parse_bigint(text.substr(0, slash));
    std::string_view den_text = text.substr(slash + 1);
    if (!den_text.empty() && (den_text[0] == '-' || den_text[0] == '+')) {
        throw ParseError("sign not allowed in denominator: '" + std::string(text) + "'");
    }
    BigInt den = parse_bigint(den_text);
    if (den == 0) {
        throw ParseError("zero denominator: '" + std::string(text) + "'");
    }
    Fraction f(num, den);
    f.canonicalize();
    return f;
}

std::string to_string(const BigInt& x) { return x.get_str(10); }

std::string to_string(const Fraction& x) { return x.get_str(10); }

long valuation(const BigInt& x, long p)
{
    if (x == 0) {
        throw DomainError("valuation of zero");
    }
    BigInt y = abs(x);
    const BigInt prime(p);
    long v = 0;
    while (mpz_divisible_p(y.get_mpz_t(), prime.get_mpz_t()) != 0) {
        y /= prime;
        ++v;
    }
    return v;
}

std::optional<long> padic_valuation(const Fraction& x, long p)
{
    require_prime(p);
    if (x == 0) {
        return std::nullopt;
    }
    return valuation(x.get_num(), p) - valuation(x.get_den(), p);
}

bool valuation_at_least(const Fraction& x, long p, long k)
{
    if (x == 0) {
        return true;
    }
    return valuation(x.get_num(), p) - valuation(x.get_den(), p) >= k;
}

BigInt binomial(unsigned long n, unsigned long k)
{
    BigInt r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

BigInt multinomial_coefficient(unsigned long i, unsigned long j) { return binomial(i + j, i); }

BigInt power(long base, unsigned long exponent)
{
    BigInt r;
    BigInt b(base);
    mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), exponent);
    return r;
}

BigInt balanced_residue(const Fraction& x, const BigInt& modulus)
{
    BigInt den_inv;
    if (mpz_invert(den_inv.get_mpz_t(), x.get_den_mpz_t(), modulus.get_mpz_t()) == 0) {
        throw DomainError("denominator not invertible modulo " + to_string(modulus));
    }
    BigInt r = (x.get_num() * den_inv) % modulus;
    if (r < 0) {
        r += modulus;
    }
    if (2 * r > modulus) {
        r -= modulus;
    }
    return r;
}

PLocalNumber::PLocalNumber(Fraction value, long prime) : value_(std::move(value)), prime_(prime)
{
    require_prime(prime_);
    value_.canonicalize();
    if (mpz_divisible_ui_p(value_.get_den_mpz_t(), static_cast<unsigned long>(prime_)) != 0) {
        throw DomainError(to_string(value_) + " is not " + std::to_string(prime_) + "-local");
    }
}

PLocalNumber PLocalNumber::parse(std::string_view text, long prime) { return {parse_fraction(text), prime}; }

void PLocalNumber::check_same_prime(const PLocalNumber& rhs) const
{
    if (rhs.prime_ != prime_) {
        throw DomainError("mixed primes in p-local arithmetic");
    }
}

PLocalNumber& PLocalNumber::operator+=(const PLocalNumber& rhs)
{
    check_same_prime(rhs);
    value_ += rhs.value_;
    return *this;
}

PLocalNumber& PLocalNumber::operator-=(const PLocalNumber& rhs)
{
    check_same_prime(rhs);
    value_ -= rhs.value_;
    return *this;
}

PLocalNumber& PLocalNumber::operator*=(const PLocalNumber& rhs)
{
    check_same_prime(rhs);
    value_ *= rhs.value_;
    return *this;
}

PLocalNumber& PLocalNumber::operator/=(const PLocalNumber& rhs)
{
    check_same_prime(rhs);
    if (!rhs.is_unit()) {
        throw DomainError("division by " + rhs.str() + " leaves Z_(" + std::to_string(prime_) + ")");
    }
    value_ /= rhs.value_;
    return *this;
}

}  // namespace bpwb::arith
