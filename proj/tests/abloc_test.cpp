#include "bpwb/abloc.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

using namespace bpwb;
using namespace bpwb::abloc;

namespace {

const std::vector<long> kPrimes{2, 3, 5, 7, 11, 13};

InvertedSet random_set(std::mt19937& rng)
{
    std::set<long> primes;
    for (const long p : kPrimes) {
        if (rng() % 3 == 0) {
            primes.insert(p);
        }
    }
    switch (rng() % 4) {
    case 0:
        return InvertedSet::all_except(primes);
    case 1:
        return rng() % 2 ? InvertedSet::rationals() : InvertedSet{};
    default:
        return InvertedSet::of(primes);
    }
}

std::vector<long> random_orders(std::mt19937& rng, std::size_t max_terms, long max_order)
{
    std::vector<long> out(rng() % (max_terms + 1));
    for (auto& n : out) {
        n = 1 + static_cast<long>(rng() % static_cast<unsigned long>(max_order));
    }
    return out;
}

/// Number of elements killed by k in the group with these cyclic orders.
long killed_by(const std::vector<long>& orders, long k)
{
    long c = 1;
    for (const long n : orders) {
        c *= std::gcd(n, k);
    }
    return c;
}

long smallest_prime(long q)
{
    long p = 2;
    while (q % p != 0) {
        ++p;
    }
    return p;
}

}  // namespace

TEST_CASE("groups parse into canonical primary form")
{
    CHECK(FGAbelianGroup::parse("Z/12").str() == "Z/4 + Z/3");
    CHECK(FGAbelianGroup::parse("Z^2 + Z/6 + 0 + Z").str() == "Z^3 + Z/2 + Z/3");
    CHECK(FGAbelianGroup::parse("0").str() == "0");
    CHECK(FGAbelianGroup::parse("Z/1").str() == "0");
    CHECK(FGAbelianGroup::parse(" Z ").rank == 1);
    CHECK(FGAbelianGroup::parse("Z/8 + Z/2 + Z/9 + Z/3").torsion == std::vector<long>{2, 8, 3, 9});
    CHECK_THROWS_AS(FGAbelianGroup::parse(""), ParseError);
    CHECK_THROWS_AS(FGAbelianGroup::parse("Z/0"), ParseError);
    CHECK_THROWS_AS(FGAbelianGroup::parse("Z/x"), ParseError);
    CHECK_THROWS_AS(FGAbelianGroup::parse("Q"), ParseError);
    CHECK_THROWS_AS(FGAbelianGroup::make(-1, {}), DomainError);
    CHECK_THROWS_AS(FGAbelianGroup::make(0, {0}), DomainError);

    // Canonical form is unique: isomorphic presentations agree, and the invariants are
    // recovered from element counts.
    std::mt19937 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        auto orders = random_orders(rng, 4, 60);
        const FGAbelianGroup g = FGAbelianGroup::make(trial % 3, orders);
        std::shuffle(orders.begin(), orders.end(), rng);
        std::vector<long> split;
        for (const long q : g.torsion) {
            split.push_back(q);
        }
        CHECK(FGAbelianGroup::make(trial % 3, orders) == g);
        CHECK(FGAbelianGroup::make(trial % 3, split) == g);
        CHECK(FGAbelianGroup::parse(g.str()) == g);
        for (long k = 1; k <= 64; ++k) {
            CHECK(killed_by(orders, k) == killed_by(g.torsion, k));
        }
    }
}

TEST_CASE("inverted sets")
{
    CHECK(InvertedSet::parse("2,3") == InvertedSet::of({2, 3}));
    CHECK(InvertedSet::parse("at:2") == InvertedSet::all_except({2}));
    CHECK(InvertedSet::parse("Q") == InvertedSet::rationals());
    CHECK(InvertedSet::parse("none").trivial());
    CHECK_THROWS_AS(InvertedSet::parse("4"), ParseError);
    CHECK_THROWS_AS(InvertedSet::parse("2,,3"), ParseError);
    CHECK_THROWS_AS(InvertedSet::of({6}), DomainError);
    CHECK(InvertedSet::all_except({2}).inverts(3));
    CHECK_FALSE(InvertedSet::all_except({2}).inverts(2));
    CHECK(InvertedSet::of({2}).unite(InvertedSet::all_except({2, 3})) == InvertedSet::all_except({3}));
    CHECK(InvertedSet::all_except({2, 5}).unite(InvertedSet::all_except({2, 3})) == InvertedSet::all_except({2}));

    std::mt19937 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const InvertedSet a = random_set(rng);
        const InvertedSet b = random_set(rng);
        const InvertedSet u = a.unite(b);
        CHECK(u == b.unite(a));
        for (long p = 2; p < 40; ++p) {
            CHECK(u.inverts(p) == (a.inverts(p) || b.inverts(p)));
        }
    }
}

TEST_CASE("localize examples")
{
    const auto z12 = FGAbelianGroup::parse("Z/12");
    CHECK(localize(z12, InvertedSet::all_except({2})).str() == "Z/4");
    CHECK(localize(z12, InvertedSet::of({2})).str() == "Z/3");
    CHECK(localize(z12, InvertedSet::of({3})).str() == "Z/4");
    const auto r = localize(FGAbelianGroup::parse("Z + Z/5"), InvertedSet::rationals());
    CHECK(r.rank == 1);
    CHECK(r.torsion.empty());
    CHECK(r.str() == "Q");
    CHECK(localize(FGAbelianGroup::parse("Z^2 + Z/2"), InvertedSet::of({2})).str() == "Z[1/2]^2");
    CHECK(localize(FGAbelianGroup::parse("Z"), InvertedSet::all_except({2, 3})).str() == "Z_(2,3)");
    CHECK(localize(FGAbelianGroup::parse("Z/7"), InvertedSet{}).str() == "Z/7");
}

TEST_CASE("localize properties")
{
    std::mt19937 rng(2024);
    for (int trial = 0; trial < 500; ++trial) {
        const FGAbelianGroup m = FGAbelianGroup::make(rng() % 3, random_orders(rng, 4, 200));
        const FGAbelianGroup n = FGAbelianGroup::make(rng() % 2, random_orders(rng, 3, 200));
        const InvertedSet s = random_set(rng);
        const InvertedSet t = random_set(rng);
        const LocalizedGroup lm = localize(m, s);

        CHECK(lm.rank == m.rank);
        for (const long q : lm.torsion) {
            CHECK_FALSE(s.inverts(smallest_prime(q)));
        }
        CHECK(is_s_local(lm, s));
        CHECK(localize(lm, s) == lm);
        CHECK(localize(localize(m, s), t) == localize(localize(m, t), s));
        CHECK(localize(localize(m, s), t) == localize(m, s.unite(t)));
        CHECK(localize(direct_sum(m, n), s).invariants() ==
              direct_sum(lm.invariants(), localize(n, s).invariants()));
        // S-local exactly when the canonical map is an isomorphism.
        const bool iso = lm.invariants() == m && (m.rank == 0 || s.trivial());
        CHECK(is_s_local(m, s) == iso);
        // Torsion orders outside S are untouched.
        for (const long q : m.torsion) {
            const long p = smallest_prime(q);
            CHECK(std::count(lm.torsion.begin(), lm.torsion.end(), q) ==
                  (s.inverts(p) ? 0 : std::count(m.torsion.begin(), m.torsion.end(), q)));
        }
    }
}

TEST_CASE("is_s_local examples")
{
    CHECK(is_s_local(FGAbelianGroup::parse("Z/3"), InvertedSet::of({2})));
    CHECK_FALSE(is_s_local(FGAbelianGroup::parse("Z"), InvertedSet::of({2})));
    CHECK_FALSE(is_s_local(FGAbelianGroup::parse("Z/4"), InvertedSet::of({2})));
    CHECK(is_s_local(FGAbelianGroup::parse("Z"), InvertedSet{}));
    CHECK(is_s_local(FGAbelianGroup::parse("Z/4 + Z/8"), InvertedSet::all_except({2})));
    const auto z2 = localize(FGAbelianGroup::parse("Z"), InvertedSet::all_except({2}));
    CHECK(is_s_local(z2, InvertedSet::of({3, 5})));
    CHECK_FALSE(is_s_local(z2, InvertedSet::of({2})));
    CHECK_FALSE(is_s_local(z2, InvertedSet::rationals()));
    CHECK(is_s_local(localize(FGAbelianGroup::parse("Z"), InvertedSet::rationals()), InvertedSet::all_except({7})));
}

TEST_CASE("fraction oracle examples")
{
    CHECK(fraction_oracle(FiniteGroup{{12}}, InvertedSet::of({2})).str() == "Z/3");
    const auto four = fraction_oracle(FiniteGroup{{12}}, InvertedSet::of({3}));
    CHECK(four.invariants().torsion_order() == 4);
    CHECK(four.str() == "Z/4");
    CHECK(fraction_oracle(FiniteGroup{{12}}, InvertedSet::all_except({2})).str() == "Z/4");
    CHECK(fraction_oracle(FiniteGroup{}, InvertedSet::of({2})).str() == "0");
    CHECK(fraction_oracle(FiniteGroup{{1, 1}}, InvertedSet::rationals()).str() == "0");
    CHECK(fraction_oracle(FiniteGroup{{2, 4}}, InvertedSet{}).str() == "Z/2 + Z/4");
    CHECK(fraction_oracle(FiniteGroup{{6, 10}}, InvertedSet::of({2})).str() == "Z/3 + Z/5");
    CHECK_THROWS_AS(fraction_oracle(FiniteGroup{{101, 101}}, InvertedSet::of({2})), DomainError);
    CHECK_NOTHROW(fraction_oracle(FiniteGroup{{101, 101}}, InvertedSet::of({2}), 20000));
}

TEST_CASE("fraction oracle agrees with localize on non-canonical presentations")
{
    std::mt19937 rng(77);
    for (int trial = 0; trial < 300; ++trial) {
        auto orders = random_orders(rng, 3, 30);
        const FiniteGroup g{orders};
        if (g.order() > 10000) {
            continue;
        }
        const InvertedSet s = random_set(rng);
        CHECK(fraction_oracle(g, s) == localize(g.invariants(), s));
    }
}

TEST_CASE("fraction oracle sweep over small orders")
{
    const auto groups = finite_groups_up_to(600);
    CHECK(groups.size() == 1238);
    std::size_t checked = 0;
    for (const auto& g : groups) {
        for (const auto& s : {InvertedSet::of({2}), InvertedSet::all_except({2}), InvertedSet::of({3, 5}),
                              InvertedSet::rationals()}) {
            CHECK(fraction_oracle(g, s) == localize(g.invariants(), s));
            ++checked;
        }
    }
    CHECK(checked == 4 * groups.size());
}

TEST_CASE("group enumeration counts isomorphism types")
{
    const auto groups = finite_groups_up_to(64);
    // Abelian groups of order 16, 32, 36, 64: 5, 7, 4, 11.
    auto count = [&](long n) {
        return std::count_if(groups.begin(), groups.end(), [&](const FiniteGroup& g) { return g.order() == n; });
    };
    CHECK(count(16) == 5);
    CHECK(count(32) == 7);
    CHECK(count(36) == 4);
    CHECK(count(64) == 11);
    std::set<std::vector<long>> seen;
    for (const auto& g : groups) {
        CHECK(seen.insert(g.invariants().torsion).second);
    }
}

TEST_CASE("arithmetic square")
{
    const auto z12 = arithmetic_square(FGAbelianGroup::parse("Z/12"), {2});
    CHECK(z12.passed());
    REQUIRE(z12.tables.size() == 1);
    CHECK(z12.tables[0].rows[0] == std::vector<std::string>{"Z/4 + Z/3", "Z/3", "Z/4", "0", "Z/4 + Z/3"});

    const auto z = arithmetic_square(FGAbelianGroup::parse("Z"), {2});
    CHECK(z.passed());
    CHECK(z.tables[0].rows[0] == std::vector<std::string>{"Z", "Z[1/2]", "Z_(2)", "Q", "Z"});

    const auto zero = arithmetic_square(FGAbelianGroup::parse("0"), {2});
    CHECK(zero.passed());
    CHECK(zero.tables[0].rows[0] == std::vector<std::string>{"0", "0", "0", "0", "0"});

    std::mt19937 rng(8);
    for (int trial = 0; trial < 60; ++trial) {
        const FGAbelianGroup m = FGAbelianGroup::make(rng() % 3, random_orders(rng, 3, 40));
        std::set<long> p1;
        for (const long p : kPrimes) {
            if (rng() % 2) {
                p1.insert(p);
            }
        }
        CHECK(arithmetic_square(m, p1).passed());
    }
}

TEST_CASE("exactness examples")
{
    const auto seq = short_exact_sequence({2}, {2}, {false});
    REQUIRE(seq[1].target.orders == std::vector<long>{4});
    const auto rep = exactness_check(seq, InvertedSet::of({3}));
    CHECK(rep.passed());
    CHECK(rep.records.size() == 3);
    CHECK(exactness_check(seq, InvertedSet::of({2})).passed());

    const auto killed = exactness_check(seq, InvertedSet::of({2}));
    REQUIRE(killed.tables.size() == 1);
    for (const auto& row : killed.tables[0].rows) {
        CHECK(row[2] == "0");
    }

    // 0 -> Z/3 -> Z/12 -> Z/4 -> 0 becomes 0 -> Z/3 -> Z/3 -> 0 -> 0 after inverting 2.
    const FiniteGroup zero;
    const FiniteGroup z3{{3}};
    const FiniteGroup z12{{12}};
    const FiniteGroup z4{{4}};
    const std::vector<GroupMap> twelve{
        {zero, z3, {}}, {z3, z12, {{4}}}, {z12, z4, {{1}}}, {z4, zero, {{}}}};
    const auto inv2 = exactness_check(twelve, InvertedSet::of({2}));
    CHECK(inv2.passed());
    std::vector<std::string> localized;
    for (const auto& row : inv2.tables[0].rows) {
        localized.push_back(row[2]);
    }
    CHECK(localized == std::vector<std::string>{"0", "Z/3", "Z/3", "0", "0"});

    // Z/4 -2-> Z/4 -2-> Z/4 is exact in the middle.
    const GroupMap twice{z4, z4, {{2}}};
    CHECK(exactness_check({twice, twice}, InvertedSet::of({3})).passed());

    // Z/4 -1-> Z/4 -2-> Z/4 is not: the input failure is reported and nothing is localized.
    const GroupMap id{z4, z4, {{1}}};
    const auto bad = exactness_check({id, twice}, InvertedSet::of({2}));
    CHECK_FALSE(bad.passed());
    REQUIRE(bad.records.size() == 1);
    CHECK(bad.records[0].id == "exact.input");
    CHECK_FALSE(bad.records[0].witness.empty());

    CHECK_THROWS_AS(GroupMap({z4, FiniteGroup{{6}}, {{1}}}).validate(), DomainError);
    CHECK_THROWS_AS(exactness_check({id, GroupMap{FiniteGroup{{2}}, z4, {{2}}}}, InvertedSet{}), DomainError);
}

TEST_CASE("localization preserves exactness on random short exact sequences")
{
    std::mt19937 rng(100);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t k = 1 + rng() % 3;
        std::vector<long> a(k);
        std::vector<long> c(k);
        std::vector<bool> split(k);
        for (std::size_t i = 0; i < k; ++i) {
            a[i] = 1 + static_cast<long>(rng() % 12);
            c[i] = 1 + static_cast<long>(rng() % 12);
            split[i] = rng() % 2 == 0;
        }
        const auto seq = short_exact_sequence(a, c, split);
        const InvertedSet s = random_set(rng);
        const auto rep = exactness_check(seq, s);
        CHECK(rep.passed());
        CHECK(rep.records.size() == 3);
    }
}
