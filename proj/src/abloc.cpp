#include "bpwb/abloc.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <sstream>

namespace bpwb::abloc {

using arith::BigInt;
using arith::Fraction;
using arith::is_prime;
using arith::to_string;

namespace {

std::vector<std::pair<long, int>> factor(long n)
{
    std::vector<std::pair<long, int>> out;
    for (long p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            int e = 0;
            while (n % p == 0) {
                n /= p;
                ++e;
            }
            out.emplace_back(p, e);
        }
    }
    if (n > 1) {
        out.emplace_back(n, 1);
    }
    return out;
}

long prime_of(long prime_power) { return factor(prime_power).front().first; }

void canonicalize(std::vector<long>& torsion)
{
    std::sort(torsion.begin(), torsion.end(), [](long a, long b) {
        const long pa = prime_of(a);
        const long pb = prime_of(b);
        return pa != pb ? pa < pb : a < b;
    });
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

long parse_positive(std::string_view s, std::string_view context)
{
    s = trim(s);
    if (s.empty() || s.size() > 15 || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        throw ParseError("expected a positive integer in '" + std::string(context) + "'");
    }
    const long v = std::stol(std::string(s));
    if (v < 1) {
        throw ParseError("expected a positive integer in '" + std::string(context) + "'");
    }
    return v;
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.push_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    return out;
}

std::string torsion_str(const std::vector<long>& torsion)
{
    std::string out;
    for (const long n : torsion) {
        out += (out.empty() ? "" : " + ") + std::string("Z/") + std::to_string(n);
    }
    return out;
}

CheckRecord record(std::string id, std::string anchor, bool pass, std::string expected, std::string computed,
                   std::string witness = {}, std::string note = {})
{
    CheckRecord r;
    r.id = std::move(id);
    r.anchor = std::move(anchor);
    r.pass = pass;
    r.expected = std::move(expected);
    r.computed = std::move(computed);
    r.modulus = "exact";
    r.witness = std::move(witness);
    r.note = std::move(note);
    return r;
}

/// Product of the inverted primes dividing n; 1 when there are none.
long inverted_part(long n, const InvertedSet& s)
{
    long t = 1;
    for (const auto& [p, e] : factor(n)) {
        if (s.inverts(p)) {
            t *= p;
        }
    }
    return t;
}

long smallest_inverted_prime(const InvertedSet& s, long avoid)
{
    for (long p = 2;; ++p) {
        if (is_prime(p) && s.inverts(p) && avoid % p != 0) {
            return p;
        }
    }
}

/// Integer exponent large enough that t^E kills the t-primary part of any group of order n.
int saturating_exponent(long n)
{
    int e = 0;
    while ((1L << e) < n) {
        ++e;
    }
    return e + 1;
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x)
    {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(int a, int b)
    {
        a = find(a);
        b = find(b);
        if (a != b) {
            parent[std::max(a, b)] = std::min(a, b);
        }
    }
};

/// Rational q lies in Z[1/P] for P the primes inverted by s.
bool in_ring(const Fraction& q, const InvertedSet& s)
{
    const BigInt d = q.get_den();
    if (!d.fits_slong_p()) {
        throw DomainError("denominator too large");
    }
    for (const auto& [p, e] : factor(d.get_si())) {
        if (!s.inverts(p)) {
            return false;
        }
    }
    return true;
}

}  // namespace

FGAbelianGroup FGAbelianGroup::make(long rank, const std::vector<long>& orders)
{
    if (rank < 0) {
        throw DomainError("negative rank");
    }
    FGAbelianGroup g;
    g.rank = rank;
    for (const long n : orders) {
        if (n < 1) {
            throw DomainError("cyclic order must be positive");
        }
        for (const auto& [p, e] : factor(n)) {
            long q = 1;
            for (int i = 0; i < e; ++i) {
                q *= p;
            }
            g.torsion.push_back(q);
        }
    }
    canonicalize(g.torsion);
    return g;
}

FGAbelianGroup FGAbelianGroup::parse(std::string_view text)
{
    long rank = 0;
    std::vector<long> orders;
    if (trim(text).empty()) {
        throw ParseError("empty group");
    }
    for (const auto term : split(text, '+')) {
        if (term == "0") {
            continue;
        }
        if (term == "Z") {
            ++rank;
        } else if (term.rfind("Z^", 0) == 0) {
            rank += parse_positive(term.substr(2), term);
        } else if (term.rfind("Z/", 0) == 0) {
            orders.push_back(parse_positive(term.substr(2), term));
        } else {
            throw ParseError("unrecognized summand '" + std::string(term) + "'");
        }
    }
    return make(rank, orders);
}

long FGAbelianGroup::torsion_order() const
{
    long n = 1;
    for (const long q : torsion) {
        n *= q;
    }
    return n;
}

std::string FGAbelianGroup::str() const
{
    std::string out;
    if (rank == 1) {
        out = "Z";
    } else if (rank > 1) {
        out = "Z^" + std::to_string(rank);
    }
    const std::string t = torsion_str(torsion);
    if (!t.empty()) {
        out += (out.empty() ? "" : " + ") + t;
    }
    return out.empty() ? "0" : out;
}

FGAbelianGroup direct_sum(const FGAbelianGroup& a, const FGAbelianGroup& b)
{
    std::vector<long> t = a.torsion;
    t.insert(t.end(), b.torsion.begin(), b.torsion.end());
    return FGAbelianGroup::make(a.rank + b.rank, t);
}

InvertedSet InvertedSet::of(std::set<long> primes)
{
    for (const long p : primes) {
        if (!is_prime(p)) {
            throw DomainError(std::to_string(p) + " is not prime");
        }
    }
    return {std::move(primes), false};
}

InvertedSet InvertedSet::all_except(std::set<long> primes)
{
    InvertedSet s = of(std::move(primes));
    s.complement = true;
    return s;
}

InvertedSet InvertedSet::parse(std::string_view text)
{
    text = trim(text);
    if (text == "Q" || text == "all") {
        return rationals();
    }
    if (text == "none") {
        return {};
    }
    bool at = false;
    if (text.rfind("at:", 0) == 0) {
        at = true;
        text.remove_prefix(3);
    }
    std::set<long> primes;
    for (const auto item : split(text, ',')) {
        const long p = parse_positive(item, text);
        if (!is_prime(p)) {
            throw ParseError(std::to_string(p) + " is not prime");
        }
        primes.insert(p);
    }
    return at ? all_except(primes) : of(primes);
}

InvertedSet InvertedSet::unite(const InvertedSet& other) const
{
    std::set<long> out;
    if (!complement && !other.complement) {
        out = primes;
        out.insert(other.primes.begin(), other.primes.end());
        return {out, false};
    }
    if (complement && other.complement) {
        std::set_intersection(primes.begin(), primes.end(), other.primes.begin(), other.primes.end(),
                              std::inserter(out, out.end()));
        return {out, true};
    }
    const InvertedSet& co = complement ? *this : other;
    const InvertedSet& listed = complement ? other : *this;
    std::set_difference(co.primes.begin(), co.primes.end(), listed.primes.begin(), listed.primes.end(),
                        std::inserter(out, out.end()));
    return {out, true};
}

std::string InvertedSet::str() const
{
    std::string list;
    for (const long p : primes) {
        list += (list.empty() ? "" : ",") + std::to_string(p);
    }
    if (complement) {
        return primes.empty() ? "all primes" : "all primes except " + list;
    }
    return primes.empty() ? "no primes" : "{" + list + "}";
}

std::string LocalizedGroup::str() const
{
    std::string ring;
    if (inverted.complement) {
        if (inverted.primes.empty()) {
            ring = "Q";
        } else {
            ring = "Z_(";
            bool first = true;
            for (const long p : inverted.primes) {
                ring += (first ? "" : ",") + std::to_string(p);
                first = false;
            }
            ring += ")";
        }
    } else if (inverted.primes.empty()) {
        ring = "Z";
    } else {
        ring = "Z[";
        bool first = true;
        for (const long p : inverted.primes) {
            ring += (first ? "1/" : ",1/") + std::to_string(p);
            first = false;
        }
        ring += "]";
    }
    std::string out;
    if (rank == 1) {
        out = ring;
    } else if (rank > 1) {
        out = ring + "^" + std::to_string(rank);
    }
    const std::string t = torsion_str(torsion);
    if (!t.empty()) {
        out += (out.empty() ? "" : " + ") + t;
    }
    return out.empty() ? "0" : out;
}

LocalizedGroup localize(const FGAbelianGroup& m, const InvertedSet& s)
{
    LocalizedGroup out;
    out.rank = m.rank;
    out.inverted = s;
    for (const long q : m.torsion) {
        if (!s.inverts(prime_of(q))) {
            out.torsion.push_back(q);
        }
    }
    return out;
}

LocalizedGroup localize(const LocalizedGroup& m, const InvertedSet& s)
{
    LocalizedGroup out = localize(m.invariants(), m.inverted.unite(s));
    return out;
}

bool is_s_local(const FGAbelianGroup& m, const InvertedSet& s)
{
    if (m.rank > 0 && !s.trivial()) {
        return false;
    }
    return std::none_of(m.torsion.begin(), m.torsion.end(), [&](long q) { return s.inverts(prime_of(q)); });
}

bool is_s_local(const LocalizedGroup& m, const InvertedSet& s)
{
    // Multiplication by p is bijective on the ring part iff p is already inverted there.
    if (m.rank > 0) {
        if (s.complement) {
            if (!m.inverted.complement || !std::includes(s.primes.begin(), s.primes.end(), m.inverted.primes.begin(),
                                                         m.inverted.primes.end())) {
                return false;
            }
        } else if (!std::all_of(s.primes.begin(), s.primes.end(), [&](long p) { return m.inverted.inverts(p); })) {
            return false;
        }
    }
    return std::none_of(m.torsion.begin(), m.torsion.end(), [&](long q) { return s.inverts(prime_of(q)); });
}

long FiniteGroup::order() const
{
    long n = 1;
    for (const long k : orders) {
        n *= k;
    }
    return n;
}

std::vector<long> FiniteGroup::decode(long index) const
{
    std::vector<long> c(orders.size());
    for (std::size_t i = 0; i < orders.size(); ++i) {
        c[i] = index % orders[i];
        index /= orders[i];
    }
    return c;
}

long FiniteGroup::encode(const std::vector<long>& coords) const
{
    long index = 0;
    for (std::size_t i = orders.size(); i-- > 0;) {
        index = index * orders[i] + ((coords.at(i) % orders[i]) + orders[i]) % orders[i];
    }
    return index;
}

long FiniteGroup::add(long a, long b) const
{
    long index = 0;
    long radix = 1;
    for (const long n : orders) {
        index += ((a % n + b % n) % n) * radix;
        a /= n;
        b /= n;
        radix *= n;
    }
    return index;
}

long FiniteGroup::scale(long k, long a) const
{
    long index = 0;
    long radix = 1;
    for (const long n : orders) {
        const long km = ((k % n) + n) % n;
        index += ((km * (a % n)) % n) * radix;
        a /= n;
        radix *= n;
    }
    return index;
}

LocalizedGroup fraction_oracle(const FiniteGroup& m, const InvertedSet& s, long bound)
{
    const long n = m.order();
    if (n > bound) {
        throw DomainError("group of order " + std::to_string(n) + " exceeds the oracle bound " + std::to_string(bound));
    }
    // Denominators are powers of t; an inverted prime prime to |M| stands in when none divides it.
    long t = inverted_part(n, s);
    if (t == 1 && !s.trivial()) {
        t = smallest_inverted_prime(s, n);
    }

    // Generators of the S-torsion subgroup: the t-primary part of each cyclic summand.
    std::vector<long> kernel_gens;
    for (std::size_t i = 0; i < m.orders.size(); ++i) {
        long rest = m.orders[i];
        for (const auto& [p, e] : factor(rest)) {
            if (t % p == 0) {
                for (int j = 0; j < e; ++j) {
                    rest /= p;
                }
            }
        }
        std::vector<long> c(m.orders.size(), 0);
        c[i] = rest;
        if (rest % m.orders[i] != 0) {
            kernel_gens.push_back(m.encode(c));
        }
    }

    std::vector<int> times_t(n);
    std::vector<std::vector<int>> plus_gen(kernel_gens.size(), std::vector<int>(n));
    for (long x = 0; x < n; ++x) {
        times_t[x] = static_cast<int>(m.scale(t, x));
        for (std::size_t g = 0; g < kernel_gens.size(); ++g) {
            plus_gen[g][x] = static_cast<int>(m.add(x, kernel_gens[g]));
        }
    }

    // Pair (x, t^k) has index k*n + x. (x, t^k) ~ (t x, t^(k+1)); (x, t^k) ~ (x + kappa, t^k) for
    // kappa killed by a denominator. These generate the relation s''(s' m - s m') = 0.
    long previous = -1;
    for (int segment = 1; segment <= 64; ++segment) {
        const long pairs = n * (segment + 1);
        UnionFind uf(static_cast<std::size_t>(pairs));
        for (int k = 0; k <= segment; ++k) {
            for (long x = 0; x < n; ++x) {
                const int id = static_cast<int>(k * n + x);
                if (k < segment) {
                    uf.unite(id, static_cast<int>((k + 1) * n + times_t[x]));
                }
                for (const auto& table : plus_gen) {
                    uf.unite(id, static_cast<int>(k * n + table[x]));
                }
            }
        }
        std::vector<int> reps;
        for (long id = 0; id < pairs; ++id) {
            if (uf.find(static_cast<int>(id)) == id) {
                reps.push_back(static_cast<int>(id));
            }
        }
        const long count = static_cast<long>(reps.size());
        if (count != previous) {
            previous = count;
            continue;
        }

        // Read off the group: c(q) = #{classes killed by q} for prime powers q.
        const int zero = uf.find(0);
        std::vector<long> orders;
        for (const auto& [p, e] : factor(count)) {
            std::vector<long> killed{1};
            long q = 1;
            for (int j = 1; j <= e; ++j) {
                q *= p;
                long c = 0;
                for (const int r : reps) {
                    const long k = r / n;
                    const long x = r % n;
                    if (uf.find(static_cast<int>(k * n + m.scale(q, x))) == zero) {
                        ++c;
                    }
                }
                killed.push_back(c);
            }
            // Summands of order >= p^j number log_p(c(p^j) / c(p^(j-1))).
            std::vector<int> at_least(e + 2, 0);
            for (int j = 1; j <= e; ++j) {
                long ratio = killed[j] / killed[j - 1];
                while (ratio > 1) {
                    ratio /= p;
                    ++at_least[j];
                }
            }
            long pj = 1;
            for (int j = 1; j <= e; ++j) {
                pj *= p;
                for (int i = 0; i < at_least[j] - at_least[j + 1]; ++i) {
                    orders.push_back(pj);
                }
            }
        }
        const FGAbelianGroup g = FGAbelianGroup::make(0, orders);
        if (g.torsion_order() != count) {
            throw DomainError("fraction oracle read an inconsistent group");
        }
        return {0, g.torsion, s};
    }
    throw DomainError("fraction oracle did not stabilize");
}

std::vector<FiniteGroup> finite_groups_up_to(long max_order)
{
    // partitions[a] lists the partitions of a.
    std::vector<std::vector<std::vector<int>>> partitions{{{}}};
    std::vector<FiniteGroup> out;
    for (long n = 1; n <= max_order; ++n) {
        std::vector<std::vector<long>> groups{{}};
        for (const auto& [p, e] : factor(n)) {
            while (static_cast<int>(partitions.size()) <= e) {
                const int a = static_cast<int>(partitions.size());
                std::vector<std::vector<int>> parts;
                std::vector<int> cur;
                auto rec = [&](auto&& self, int left, int largest) -> void {
                    if (left == 0) {
                        parts.push_back(cur);
                        return;
                    }
                    for (int k = std::min(left, largest); k >= 1; --k) {
                        cur.push_back(k);
                        self(self, left - k, k);
                        cur.pop_back();
                    }
                };
                rec(rec, a, a);
                partitions.push_back(parts);
            }
            std::vector<std::vector<long>> next;
            for (const auto& g : groups) {
                for (const auto& part : partitions[e]) {
                    auto h = g;
                    for (const int k : part) {
                        long q = 1;
                        for (int i = 0; i < k; ++i) {
                            q *= p;
                        }
                        h.push_back(q);
                    }
                    next.push_back(std::move(h));
                }
            }
            groups = std::move(next);
        }
        for (auto& g : groups) {
            out.push_back(FiniteGroup{std::move(g)});
        }
    }
    return out;
}

Report arithmetic_square(const FGAbelianGroup& m, const std::set<long>& p1)
{
    Report rep;
    rep.title = "arithmetic square for " + m.str();
    const InvertedSet s1 = InvertedSet::of(p1);
    const InvertedSet s2 = InvertedSet::all_except(p1);
    const LocalizedGroup m1 = localize(m, s1);
    const LocalizedGroup m2 = localize(m, s2);
    const LocalizedGroup mq = localize(m, InvertedSet::rationals());
    const std::string corners = m1.str() + " | " + m2.str() + " | " + mq.str();
    const bool local = is_s_local(m1, s1) && is_s_local(m2, s2) && is_s_local(mq, InvertedSet::rationals());
    rep.add(record("square.corners", "arithmetic-square", local, "corners local at their inverted sets", corners));

    // Torsion: M_t -> M1_t x M2_t, realised as x -> (t1^E x, t2^E x), must be a bijection since
    // the rational corner has no torsion.
    const FiniteGroup tors{m.torsion};
    const long n = tors.order();
    const int e = saturating_exponent(n);
    long t1 = 1;
    long t2 = 1;
    for (int i = 0; i < e; ++i) {
        t1 = t1 * inverted_part(n, s1) % n;
        t2 = t2 * inverted_part(n, s2) % n;
    }
    std::set<long> im1;
    std::set<long> im2;
    std::set<std::pair<long, long>> pairs;
    std::string witness;
    for (long x = 0; x < n; ++x) {
        const long a = tors.scale(t1, x);
        const long b = tors.scale(t2, x);
        im1.insert(a);
        im2.insert(b);
        if (!pairs.emplace(a, b).second && witness.empty()) {
            witness = "element " + std::to_string(x) + " collides";
        }
    }
    const long product = static_cast<long>(im1.size() * im2.size());
    const bool bijective = witness.empty() && static_cast<long>(pairs.size()) == product;
    rep.add(record("square.torsion", "arithmetic-square", bijective,
                   "|M_t| = |M1_t| * |M2_t| = " + std::to_string(product),
                   "|M_t| = " + std::to_string(n) + ", image " + std::to_string(pairs.size()), witness,
                   "pullback and pushout over the zero torsion of M (x) Q"));

    // Rank: Z[1/P1] x_Q Z[1/P2] = Z and Z[1/P1] + Z[1/P2] = Q, checked on a grid of rationals.
    std::string rank_witness;
    std::string push_witness;
    for (long den = 1; den <= 60 && (rank_witness.empty() || push_witness.empty()); ++den) {
        for (long num = -20; num <= 20; ++num) {
            Fraction q(num, den);
            q.canonicalize();
            const bool both = in_ring(q, s1) && in_ring(q, s2);
            if (both != (q.get_den() == 1) && rank_witness.empty()) {
                rank_witness = to_string(q);
            }
            // q = a + b with a having only P2 denominators and b only P1 denominators.
            long d1 = 1;
            long d2 = 1;
            for (const auto& [p, k] : factor(q.get_den().get_si())) {
                for (int i = 0; i < k; ++i) {
                    (s1.inverts(p) ? d1 : d2) *= p;
                }
            }
            BigInt g;
            BigInt u;
            BigInt v;
            mpz_gcdext(g.get_mpz_t(), u.get_mpz_t(), v.get_mpz_t(), BigInt(d1).get_mpz_t(), BigInt(d2).get_mpz_t());
            Fraction a(q.get_num() * u, BigInt(d2));
            Fraction b(q.get_num() * v, BigInt(d1));
            a.canonicalize();
            b.canonicalize();
            if ((a + b != q || !in_ring(a, s2) || !in_ring(b, s1)) && push_witness.empty()) {
                push_witness = to_string(q);
            }
        }
    }
    const std::string rank_note = m.rank == 0 ? "rank 0: the rational corner is 0" : "";
    rep.add(record("square.rank.pullback", "arithmetic-square", rank_witness.empty(),
                   "Z[1/P1] meets Z[1/P2] in Z", rank_witness.empty() ? "agrees on grid" : "fails",
                   rank_witness, rank_note));
    rep.add(record("square.rank.pushout", "arithmetic-square", push_witness.empty(),
                   "Z[1/P1] + Z[1/P2] = Q", push_witness.empty() ? "agrees on grid" : "fails", push_witness,
                   rank_note));

    std::vector<long> t = m1.torsion;
    t.insert(t.end(), m2.torsion.begin(), m2.torsion.end());
    const FGAbelianGroup pullback = FGAbelianGroup::make(m.rank, t);
    rep.add(record("square.pullback", "arithmetic-square", pullback == m && bijective && rank_witness.empty(),
                   m.str(), pullback.str()));
    rep.tables.push_back(Table{"corners",
                               {"M", "M[1/P1]", "M[1/P2]", "M (x) Q", "pullback"},
                               {{m.str(), m1.str(), m2.str(), mq.str(), pullback.str()}}});
    return rep;
}

void GroupMap::validate() const
{
    if (images.size() != source.orders.size()) {
        throw DomainError("one image per source generator required");
    }
    for (std::size_t j = 0; j < images.size(); ++j) {
        if (images[j].size() != target.orders.size()) {
            throw DomainError("image has the wrong number of coordinates");
        }
        for (std::size_t i = 0; i < images[j].size(); ++i) {
            if ((source.orders[j] * images[j][i]) % target.orders[i] != 0) {
                throw DomainError("generator " + std::to_string(j) + " image does not respect its order");
            }
        }
    }
}

long GroupMap::apply(long x) const
{
    const auto c = source.decode(x);
    std::vector<long> y(target.orders.size(), 0);
    for (std::size_t j = 0; j < c.size(); ++j) {
        for (std::size_t i = 0; i < y.size(); ++i) {
            y[i] = (y[i] + c[j] * (images[j][i] % target.orders[i])) % target.orders[i];
        }
    }
    return target.encode(y);
}

std::vector<GroupMap> short_exact_sequence(const std::vector<long>& a, const std::vector<long>& c,
                                           const std::vector<bool>& split)
{
    if (a.size() != c.size() || a.size() != split.size()) {
        throw DomainError("short exact sequence data of unequal lengths");
    }
    FiniteGroup ga{a};
    FiniteGroup gc{c};
    FiniteGroup gb;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (split[i]) {
            gb.orders.push_back(a[i]);
            gb.orders.push_back(c[i]);
        } else {
            gb.orders.push_back(a[i] * c[i]);
        }
    }
    GroupMap f{ga, gb, std::vector<std::vector<long>>(a.size(), std::vector<long>(gb.orders.size(), 0))};
    GroupMap g{gb, gc, std::vector<std::vector<long>>(gb.orders.size(), std::vector<long>(c.size(), 0))};
    std::size_t col = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (split[i]) {
            f.images[i][col] = 1;
            g.images[col + 1][i] = 1;
            col += 2;
        } else {
            f.images[i][col] = c[i];
            g.images[col][i] = 1;
            col += 1;
        }
    }
    const FiniteGroup zero;
    GroupMap in{zero, ga, {}};
    GroupMap out{gc, zero, std::vector<std::vector<long>>(c.size())};
    return {in, f, g, out};
}

namespace {

/// First element witnessing im f != ker g inside the subgroup `inside` of the middle term.
std::string exactness_witness(const GroupMap& f, const GroupMap& g, const std::vector<long>& domain,
                              const std::vector<long>& inside)
{
    std::set<long> image;
    for (const long x : domain) {
        image.insert(f.apply(x));
    }
    for (const long y : inside) {
        const bool in_kernel = g.apply(y) == 0;
        if (in_kernel != (image.count(y) != 0)) {
            return "element " + std::to_string(y) + (in_kernel ? " in kernel, not image" : " in image, not kernel");
        }
    }
    return {};
}

std::vector<long> all_elements(const FiniteGroup& g)
{
    std::vector<long> out(static_cast<std::size_t>(g.order()));
    std::iota(out.begin(), out.end(), 0L);
    return out;
}

}  // namespace

Report exactness_check(const std::vector<GroupMap>& maps, const InvertedSet& s, const std::string& label)
{
    Report rep;
    rep.title = "exactness after inverting " + s.str();
    for (std::size_t i = 0; i < maps.size(); ++i) {
        maps[i].validate();
        if (i > 0 && maps[i].source.orders != maps[i - 1].target.orders) {
            throw DomainError("maps are not composable at term " + std::to_string(i));
        }
    }

    std::string witness;
    for (std::size_t i = 0; i + 1 < maps.size() && witness.empty(); ++i) {
        const std::string w = exactness_witness(maps[i], maps[i + 1], all_elements(maps[i].source),
                                                all_elements(maps[i].target));
        if (!w.empty()) {
            witness = "term " + std::to_string(i + 1) + ": " + w;
        }
    }
    rep.add(record(label + ".input", "exactness", witness.empty(), "input exact at every interior term",
                   witness.empty() ? "exact" : "not exact", witness));
    if (!witness.empty()) {
        return rep;
    }

    // S^-1 G is realised as the subgroup t^E G, with t the inverted primes dividing any term.
    std::vector<FiniteGroup> terms;
    for (const auto& f : maps) {
        terms.push_back(f.source);
    }
    if (!maps.empty()) {
        terms.push_back(maps.back().target);
    }
    long lcm = 1;
    for (const auto& g : terms) {
        lcm = std::lcm(lcm, g.order());
    }
    const long t = inverted_part(lcm, s);
    long te = 1;
    for (int i = 0; i < saturating_exponent(lcm); ++i) {
        te = (te * t) % lcm;
    }
    std::vector<std::vector<long>> local_terms;
    std::string size_witness;
    Table table{"terms", {"term", "G", "S^-1 G"}, {}};
    for (std::size_t i = 0; i < terms.size(); ++i) {
        table.rows.push_back({std::to_string(i), terms[i].invariants().str(),
                              localize(terms[i].invariants(), s).str()});
        std::set<long> sub;
        for (long x = 0; x < terms[i].order(); ++x) {
            sub.insert(terms[i].scale(te, x));
        }
        local_terms.emplace_back(sub.begin(), sub.end());
        const long expected = localize(terms[i].invariants(), s).invariants().torsion_order();
        if (static_cast<long>(sub.size()) != expected && size_witness.empty()) {
            size_witness = "term " + std::to_string(i) + ": " + std::to_string(sub.size()) + " vs " +
                           std::to_string(expected);
        }
    }
    rep.tables.push_back(std::move(table));
    rep.add(record(label + ".terms", "exactness", size_witness.empty(), "|t^E G_i| = |S^-1 G_i| from localize",
                   size_witness.empty() ? "agree" : "disagree", size_witness));

    std::string local_witness;
    for (std::size_t i = 0; i + 1 < maps.size() && local_witness.empty(); ++i) {
        const std::string w = exactness_witness(maps[i], maps[i + 1], local_terms[i], local_terms[i + 1]);
        if (!w.empty()) {
            local_witness = "term " + std::to_string(i + 1) + ": " + w;
        }
    }
    rep.add(record(label + ".localized", "exactness", local_witness.empty(), "localized sequence exact",
                   local_witness.empty() ? "exact" : "not exact", local_witness));
    return rep;
}

}  // namespace bpwb::abloc
