#pragma once

#include "bpwb/arith.hpp"
#include "bpwb/report.hpp"

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace bpwb::abloc {

/// Z^rank plus cyclic factors of prime-power order, sorted by (prime, order).
struct FGAbelianGroup {
    long rank = 0;
    std::vector<long> torsion;

    /// Normalizes arbitrary cyclic orders into prime-power factors; orders must be >= 1.
    static FGAbelianGroup make(long rank, const std::vector<long>& orders);
    /// "Z^2 + Z/12 + Z/5", "Z", "0".
    static FGAbelianGroup parse(std::string_view text);

    [[nodiscard]] long torsion_order() const;
    [[nodiscard]] std::string str() const;
    friend bool operator==(const FGAbelianGroup&, const FGAbelianGroup&) = default;
};

FGAbelianGroup direct_sum(const FGAbelianGroup& a, const FGAbelianGroup& b);

/// The primes made invertible; S is their multiplicative closure. With `complement`, every
/// prime except the listed ones is inverted (localization at those primes).
struct InvertedSet {
    std::set<long> primes;
    bool complement = false;

    static InvertedSet of(std::set<long> primes);
    static InvertedSet all_except(std::set<long> primes);
    static InvertedSet rationals() { return all_except({}); }
    /// "2,3" inverts 2 and 3; "at:2" localizes at 2; "Q" rationalizes.
    static InvertedSet parse(std::string_view text);

    [[nodiscard]] bool inverts(long p) const { return complement != (primes.count(p) != 0); }
    [[nodiscard]] bool trivial() const { return !complement && primes.empty(); }
    [[nodiscard]] InvertedSet unite(const InvertedSet& other) const;
    [[nodiscard]] std::string str() const;
    friend bool operator==(const InvertedSet&, const InvertedSet&) = default;
};

/// S^-1 M: the rank over S^-1 Z and the torsion at primes outside S.
struct LocalizedGroup {
    long rank = 0;
    std::vector<long> torsion;
    InvertedSet inverted;

    /// The same invariants read as an abelian group (rank stays rank).
    [[nodiscard]] FGAbelianGroup invariants() const { return {rank, torsion}; }
    [[nodiscard]] std::string str() const;
    friend bool operator==(const LocalizedGroup&, const LocalizedGroup&) = default;
};

LocalizedGroup localize(const FGAbelianGroup& m, const InvertedSet& s);
/// Localizing a localization again: inverts the union of both sets.
LocalizedGroup localize(const LocalizedGroup& m, const InvertedSet& s);

/// Multiplication by every inverted prime is bijective.
bool is_s_local(const FGAbelianGroup& m, const InvertedSet& s);
bool is_s_local(const LocalizedGroup& m, const InvertedSet& s);

/// Finite group Z/n_1 + ... + Z/n_k with elements encoded in mixed radix.
struct FiniteGroup {
    std::vector<long> orders;

    [[nodiscard]] long order() const;
    [[nodiscard]] std::vector<long> decode(long index) const;
    [[nodiscard]] long encode(const std::vector<long>& coords) const;
    [[nodiscard]] long add(long a, long b) const;
    [[nodiscard]] long scale(long k, long a) const;
    [[nodiscard]] FGAbelianGroup invariants() const { return FGAbelianGroup::make(0, orders); }
};

/// The literal module of fractions: pairs (m, s) with s in a finite segment of S, identified when
/// s''(s' m - s m') = 0, the segment grown until the class count is stable. The group is
/// read off from the orders of the classes. Throws DomainError if |M| exceeds `bound`.
LocalizedGroup fraction_oracle(const FiniteGroup& m, const InvertedSet& s, long bound = 10000);

/// Every isomorphism type of finite abelian group with order <= max_order, as cyclic orders.
std::vector<FiniteGroup> finite_groups_up_to(long max_order);

/// The square M -> M[1/P1], M -> M[1/P2], both -> M (x) Q, for P2 the complement of P1.
/// Checks that it is a pullback and a pushout on torsion elements and on a grid of rationals.
Report arithmetic_square(const FGAbelianGroup& m, const std::set<long>& p1);

/// A homomorphism given by the images of the source generators: column j lists the target
/// coordinates of generator j.
struct GroupMap {
    FiniteGroup source;
    FiniteGroup target;
    std::vector<std::vector<long>> images;

    /// Throws DomainError when a generator image does not respect its order.
    void validate() const;
    [[nodiscard]] long apply(long x) const;
};

/// 0 -> A -> B -> C -> 0 for A = sum Z/a_i, C = sum Z/c_i, with B = Z/a_i + Z/c_i where
/// split[i], else Z/(a_i c_i) with a -> c_i a and b -> b mod c_i. Four maps including the zeros.
std::vector<GroupMap> short_exact_sequence(const std::vector<long>& a, const std::vector<long>& c,
                                           const std::vector<bool>& split);

/// Checks exactness of G_0 -> ... -> G_k at every interior term, then the same after inverting S
/// (terms t^E G_i, with t the product of inverted primes dividing |G_i|). The first record is
/// the input check; when it fails no localized record is produced.
Report exactness_check(const std::vector<GroupMap>& maps, const InvertedSet& s, const std::string& label = "exact");

}  // namespace bpwb::abloc
