#pragma once

#include "bpwb/arith.hpp"

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace bpwb::grading {

using arith::BigInt;
using arith::Fraction;

/// Hard ceiling on generator indices a monomial can carry.
inline constexpr int kMaxGenerators = 6;
/// Generators over which the Hazewinkel relations are tabulated.
inline constexpr int kHazewinkelDepth = 3;

enum class Letter : char { V = 'v', M = 'm', T = 't' };

/// q = 2(p - 1), the degree of v_1.
constexpr long q_of(long p) { return 2 * (p - 1); }

/// Generators x_1..x_N of degree 2(p^i - 1) over a fixed prime.
struct Alphabet {
    Letter letter = Letter::V;
    long prime = 7;
    int generators = 4;

    [[nodiscard]] long degree(int index) const;
    [[nodiscard]] Alphabet with(Letter l) const { return {l, prime, generators}; }
    friend bool operator==(const Alphabet&, const Alphabet&) = default;
};

/// Exponent vector; index 1 is the first generator.
class Monomial {
public:
    Monomial() = default;
    static Monomial generator(int index, unsigned exponent = 1);
    static Monomial from_exponents(const std::vector<unsigned>& exponents);

    [[nodiscard]] unsigned exponent(int index) const;
    void set_exponent(int index, unsigned exponent);
    [[nodiscard]] bool is_one() const;
    /// Highest index with a nonzero exponent, 0 for the unit monomial.
    [[nodiscard]] int max_index() const;
    [[nodiscard]] long degree(const Alphabet& alphabet) const;
    [[nodiscard]] bool divides(const Monomial& other) const;
    /// Componentwise <=.
    [[nodiscard]] bool bounded_by(const Monomial& bound) const { return divides(bound); }
    [[nodiscard]] Monomial pow(unsigned k) const;
    [[nodiscard]] std::vector<unsigned> exponents() const;
    [[nodiscard]] std::string str(Letter letter) const;

    Monomial& operator*=(const Monomial& rhs);
    friend Monomial operator*(Monomial a, const Monomial& b) { return a *= b; }
    /// Requires `b.divides(a)`.
    friend Monomial operator/(const Monomial& a, const Monomial& b);

    auto operator<=>(const Monomial&) const = default;

private:
    std::array<std::uint16_t, kMaxGenerators> exps_{};
};

/// Sparse polynomial over one alphabet with exact rational coefficients; never stores zeros.
class Poly {
public:
    using Terms = std::map<Monomial, Fraction>;

    explicit Poly(Alphabet alphabet) : alphabet_(alphabet) {}
    static Poly constant(Alphabet alphabet, const Fraction& c);
    static Poly generator(Alphabet alphabet, int index);
    static Poly term(Alphabet alphabet, const Fraction& c, const Monomial& m);

    /// Parses the literal grammar. The letter is taken from the text; a pure constant
    /// lands in `fallback.letter`.
    static Poly parse(std::string_view text, const Alphabet& fallback);

    [[nodiscard]] const Alphabet& alphabet() const noexcept { return alphabet_; }
    [[nodiscard]] const Terms& terms() const noexcept { return terms_; }
    [[nodiscard]] bool is_zero() const noexcept { return terms_.empty(); }
    [[nodiscard]] std::size_t size() const noexcept { return terms_.size(); }
    [[nodiscard]] Fraction coefficient(const Monomial& m) const;
    [[nodiscard]] bool is_homogeneous() const;
    /// Degree of a nonzero homogeneous poly; nullopt for zero; throws if inhomogeneous.
    [[nodiscard]] std::optional<long> degree() const;
    /// Largest generator index that occurs.
    [[nodiscard]] int max_index() const;

    void add_term(const Monomial& m, const Fraction& c);

    Poly& operator+=(const Poly& rhs);
    Poly& operator-=(const Poly& rhs);
    Poly& operator*=(const Poly& rhs);
    Poly& operator*=(const Fraction& c);
    [[nodiscard]] Poly operator-() const;
    [[nodiscard]] Poly pow(unsigned k) const;
    /// Relabels the alphabet letter; used when identifying t-monomials with operation indices.
    [[nodiscard]] Poly relabel(Letter letter) const;

    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(const Poly& a, const Poly& b);
    friend Poly operator*(Poly a, const Fraction& c) { return a *= c; }
    friend Poly operator*(const Fraction& c, Poly a) { return a *= c; }

    friend bool operator==(const Poly& a, const Poly& b)
    {
        return a.alphabet_ == b.alphabet_ && a.terms_ == b.terms_;
    }

    [[nodiscard]] std::string str() const;

private:
    void check_alphabet(const Poly& rhs) const;

    Alphabet alphabet_;
    Terms terms_;
};

inline std::ostream& operator<<(std::ostream& os, const Poly& x) { return os << x.str(); }

/// Substitutes `images[i-1]` for generator i; all images must share `target`.
Poly substitute(const Poly& x, const std::vector<Poly>& images, const Alphabet& target);

/// True iff every coefficient is p-integral.
bool is_integral(const Poly& x);

/// Hazewinkel generators v_i as polynomials in the m_i, and the inverse relations,
/// for i <= kHazewinkelDepth. Results are cached per instance.
class BasisChange {
public:
    explicit BasisChange(long prime, int generators = 4);

    [[nodiscard]] long prime() const noexcept { return prime_; }
    [[nodiscard]] Alphabet v_alphabet() const { return {Letter::V, prime_, generators_}; }
    [[nodiscard]] Alphabet m_alphabet() const { return {Letter::M, prime_, generators_}; }

    [[nodiscard]] const Poly& v_in_m(int index) const;
    [[nodiscard]] const Poly& m_in_v(int index) const;
    [[nodiscard]] Poly to_v_basis(const Poly& x) const;
    [[nodiscard]] Poly to_m_basis(const Poly& x) const;

private:
    long prime_;
    int generators_;
    std::vector<Poly> v_in_m_;
    std::vector<Poly> m_in_v_;
};

Poly hazewinkel_v_in_m(int index, long prime, int generators = 4);
Poly m_in_v(int index, long prime, int generators = 4);

/// Every monomial of exactly this degree, in increasing monomial order.
std::vector<Monomial> monomials_of_degree(long degree, const Alphabet& alphabet);
/// Every monomial of degree <= bound (excluding none; includes the unit monomial).
std::vector<Monomial> monomials_up_to_degree(long bound, const Alphabet& alphabet);

/// p^power * monomial
struct IdealGenerator {
    long p_power = 0;
    Monomial monomial;
    friend bool operator==(const IdealGenerator&, const IdealGenerator&) = default;
};

/// Ideal of Z_(p)[v_1, v_2, ...] generated by p-power-times-monomial terms.
class TermIdeal {
public:
    TermIdeal(long prime, std::vector<IdealGenerator> generators);

    static TermIdeal zero(long prime) { return {prime, {}}; }
    static TermIdeal unit(long prime) { return {prime, {{0, Monomial{}}}}; }
    /// (p, v_1, ..., v_k); k = 0 gives (p).
    static TermIdeal p_and_v(long prime, int k);
    /// Accepts e.g. "(p, v1)", "(p^2, p*v1)", "(1)", "(0)".
    static TermIdeal parse(std::string_view text, long prime);

    [[nodiscard]] long prime() const noexcept { return prime_; }
    [[nodiscard]] const std::vector<IdealGenerator>& generators() const noexcept { return gens_; }
    [[nodiscard]] bool is_zero() const noexcept { return gens_.empty(); }
    /// Smallest p-power among generators whose monomial divides `m`.
    [[nodiscard]] std::optional<long> modulus_exponent(const Monomial& m) const;
    [[nodiscard]] bool contains_term(const Fraction& c, const Monomial& m) const;
    /// k when the ideal is (p, v_1, ..., v_k); -1 for (0); nullopt otherwise.
    [[nodiscard]] std::optional<int> domain_depth() const;
    /// (I : p) for a term ideal: each p^a g becomes p^max(a-1,0) g.
    [[nodiscard]] TermIdeal quotient_by_p() const;
    [[nodiscard]] std::string str() const;

    friend bool operator==(const TermIdeal&, const TermIdeal&) = default;

private:
    long prime_;
    std::vector<IdealGenerator> gens_;
};

/// Normal form modulo a term ideal: terms lying in the ideal are deleted and the
/// remaining coefficients are reduced to balanced residues modulo the p-power that
/// governs their monomial. Requires an integral input.
Poly reduce_mod(const Poly& x, const TermIdeal& ideal);

/// True when x lies in the ideal.
bool in_ideal(const Poly& x, const TermIdeal& ideal);

/// Solves q * (c * m) = x in Z_(p)[v]/I for I = (0) or (p, v_1, ..., v_k).
Poly divide_exact(const Poly& x, const Fraction& c, const Monomial& m, const TermIdeal& ideal);

/// x / p, read in Z_(p)[v] / (I : p). Every term of reduce_mod(x, I) must be divisible by p.
Poly divide_by_p(const Poly& x, const TermIdeal& ideal);

}  // namespace bpwb::grading
