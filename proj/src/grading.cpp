#include "bpwb/grading.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <limits>
#include <sstream>

namespace bpwb::grading {

namespace {

void check_index(int index)
{
    if (index < 1 || index > kMaxGenerators) {
        throw TruncationError("generator index " + std::to_string(index) + " outside 1.." +
                              std::to_string(kMaxGenerators));
    }
}

}  // namespace

long Alphabet::degree(int index) const
{
    check_index(index);
    long pi = 1;
    for (int k = 0; k < index; ++k) {
        pi *= prime;
    }
    return 2 * (pi - 1);
}

// ---------------------------------------------------------------- Monomial

Monomial Monomial::generator(int index, unsigned exponent)
{
    Monomial m;
    m.set_exponent(index, exponent);
    return m;
}

Monomial Monomial::from_exponents(const std::vector<unsigned>& exponents)
{
    Monomial m;
    for (std::size_t i = 0; i < exponents.size(); ++i) {
        if (exponents[i] != 0) {
            m.set_exponent(static_cast<int>(i) + 1, exponents[i]);
        }
    }
    return m;
}

unsigned Monomial::exponent(int index) const
{
    if (index < 1 || index > kMaxGenerators) {
        return 0;
    }
    return exps_[static_cast<std::size_t>(index - 1)];
}

void Monomial::set_exponent(int index, unsigned exponent)
{
    check_index(index);
    if (exponent > std::numeric_limits<std::uint16_t>::max()) {
        throw DomainError("exponent overflow");
    }
    exps_[static_cast<std::size_t>(index - 1)] = static_cast<std::uint16_t>(exponent);
}

bool Monomial::is_one() const
{
    return std::all_of(exps_.begin(), exps_.end(), [](auto e) { return e == 0; });
}

int Monomial::max_index() const
{
    for (int i = kMaxGenerators; i >= 1; --i) {
        if (exps_[static_cast<std::size_t>(i - 1)] != 0) {
            return i;
        }
    }
    return 0;
}

long Monomial::degree(const Alphabet& alphabet) const
{
    long d = 0;
    for (int i = 1; i <= kMaxGenerators; ++i) {
        if (auto e = exponent(i)) {
            d += static_cast<long>(e) * alphabet.degree(i);
        }
    }
    return d;
}

bool Monomial::divides(const Monomial& other) const
{
    for (std::size_t i = 0; i < exps_.size(); ++i) {
        if (exps_[i] > other.exps_[i]) {
            return false;
        }
    }
    return true;
}

Monomial Monomial::pow(unsigned k) const
{
    Monomial r;
    for (std::size_t i = 0; i < exps_.size(); ++i) {
        unsigned long e = static_cast<unsigned long>(exps_[i]) * k;
        if (e > std::numeric_limits<std::uint16_t>::max()) {
            throw DomainError("exponent overflow");
        }
        r.exps_[i] = static_cast<std::uint16_t>(e);
    }
    return r;
}

std::vector<unsigned> Monomial::exponents() const
{
    std::vector<unsigned> out(exps_.begin(), exps_.begin() + std::max(max_index(), 0));
    return out;
}

std::string Monomial::str(Letter letter) const
{
    if (is_one()) {
        return "1";
    }
    std::string out;
    for (int i = 1; i <= kMaxGenerators; ++i) {
        unsigned e = exponent(i);
        if (e == 0) {
            continue;
        }
        if (!out.empty()) {
            out += '*';
        }
        out += static_cast<char>(letter);
        out += std::to_string(i);
        if (e > 1) {
            out += '^' + std::to_string(e);
        }
    }
    return out;
}

Monomial& Monomial::operator*=(const Monomial& rhs)
{
    for (std::size_t i = 0; i < exps_.size(); ++i) {
        unsigned e = unsigned{exps_[i]} + rhs.exps_[i];
        if (e > std::numeric_limits<std::uint16_t>::max()) {
            throw DomainError("exponent overflow");
        }
        exps_[i] = static_cast<std::uint16_t>(e);
    }
    return *this;
}

Monomial operator/(const Monomial& a, const Monomial& b)
{
    if (!b.divides(a)) {
        throw DomainError("monomial quotient does not exist");
    }
    Monomial r;
    for (std::size_t i = 0; i < a.exps_.size(); ++i) {
        r.exps_[i] = static_cast<std::uint16_t>(a.exps_[i] - b.exps_[i]);
    }
    return r;
}

// ---------------------------------------------------------------- Poly

Poly Poly::constant(Alphabet alphabet, const Fraction& c)
{
    Poly r(alphabet);
    r.add_term(Monomial{}, c);
    return r;
}

Poly Poly::generator(Alphabet alphabet, int index)
{
    if (index > alphabet.generators) {
        throw TruncationError(std::string(1, static_cast<char>(alphabet.letter)) + std::to_string(index) +
                              " exceeds truncation N=" + std::to_string(alphabet.generators));
    }
    Poly r(alphabet);
    r.add_term(Monomial::generator(index), Fraction(1));
    return r;
}

Poly Poly::term(Alphabet alphabet, const Fraction& c, const Monomial& m)
{
    if (m.max_index() > alphabet.generators) {
        throw TruncationError("monomial exceeds truncation N=" + std::to_string(alphabet.generators));
    }
    Poly r(alphabet);
    r.add_term(m, c);
    return r;
}

Fraction Poly::coefficient(const Monomial& m) const
{
    auto it = terms_.find(m);
    return it == terms_.end() ? Fraction(0) : it->second;
}

bool Poly::is_homogeneous() const
{
    if (terms_.empty()) {
        return true;
    }
    long d = terms_.begin()->first.degree(alphabet_);
    return std::all_of(terms_.begin(), terms_.end(),
                       [&](const auto& kv) { return kv.first.degree(alphabet_) == d; });
}

std::optional<long> Poly::degree() const
{
    if (terms_.empty()) {
        return std::nullopt;
    }
    if (!is_homogeneous()) {
        throw DomainError("inhomogeneous polynomial has no degree: " + str());
    }
    return terms_.begin()->first.degree(alphabet_);
}

int Poly::max_index() const
{
    int m = 0;
    for (const auto& [mono, c] : terms_) {
        m = std::max(m, mono.max_index());
    }
    return m;
}

void Poly::add_term(const Monomial& m, const Fraction& c)
{
    if (c == 0) {
        return;
    }
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) {
            terms_.erase(it);
        }
    }
}

void Poly::check_alphabet(const Poly& rhs) const
{
    if (!(alphabet_ == rhs.alphabet_)) {
        throw DomainError("alphabet mismatch");
    }
}

Poly& Poly::operator+=(const Poly& rhs)
{
    check_alphabet(rhs);
    for (const auto& [m, c] : rhs.terms_) {
        add_term(m, c);
    }
    return *this;
}

Poly& Poly::operator-=(const Poly& rhs)
{
    check_alphabet(rhs);
    for (const auto& [m, c] : rhs.terms_) {
        add_term(m, -c);
    }
    return *this;
}

Poly operator*(const Poly& a, const Poly& b)
{
    a.check_alphabet(b);
    Poly r(a.alphabet_);
    Fraction tmp;
    for (const auto& [ma, ca] : a.terms_) {
        for (const auto& [mb, cb] : b.terms_) {
            tmp = ca * cb;
            r.add_term(ma * mb, tmp);
        }
    }
    if (r.max_index() > r.alphabet_.generators) {
        throw TruncationError("product exceeds truncation");
    }
    return r;
}

Poly& Poly::operator*=(const Poly& rhs) { return *this = *this * rhs; }

Poly& Poly::operator*=(const Fraction& c)
{
    if (c == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& [m, coef] : terms_) {
        coef *= c;
    }
    return *this;
}

Poly Poly::operator-() const
{
    Poly r = *this;
    for (auto& [m, c] : r.terms_) {
        c = -c;
    }
    return r;
}

Poly Poly::pow(unsigned k) const
{
    Poly result = constant(alphabet_, 1);
    Poly base = *this;
    while (k > 0) {
        if ((k & 1U) != 0) {
            result *= base;
        }
        k >>= 1U;
        if (k > 0) {
            base *= base;
        }
    }
    return result;
}

Poly Poly::relabel(Letter letter) const
{
    Poly r = *this;
    r.alphabet_.letter = letter;
    return r;
}

std::string Poly::str() const
{
    if (terms_.empty()) {
        return "0";
    }
    std::string out;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [m, c] = *it;
        bool negative = c < 0;
        if (first) {
            if (negative) {
                out += '-';
            }
        } else {
            out += negative ? " - " : " + ";
        }
        first = false;
        Fraction a = abs(c);
        if (m.is_one()) {
            out += arith::to_string(a);
        } else {
            if (a != 1) {
                out += arith::to_string(a) + "*";
            }
            out += m.str(alphabet_.letter);
        }
    }
    return out;
}

namespace {

class PolyParser {
public:
    PolyParser(std::string_view text, const Alphabet& fallback) : text_(text), alphabet_(fallback) {}

    Poly run()
    {
        std::vector<std::pair<Fraction, Monomial>> terms;
        skip_ws();
        if (eof()) {
            fail("empty polynomial");
        }
        bool negative = false;
        if (peek() == '-' || peek() == '+') {
            negative = take() == '-';
            skip_ws();
        }
        while (true) {
            auto [c, m] = parse_term();
            terms.emplace_back(negative ? Fraction(-c) : c, m);
            skip_ws();
            if (eof()) {
                break;
            }
            char op = take();
            if (op != '+' && op != '-') {
                fail("expected '+' or '-'");
            }
            negative = op == '-';
            skip_ws();
        }
        Alphabet a = alphabet_;
        if (letter_) {
            a.letter = *letter_;
        }
        Poly out(a);
        for (const auto& [c, m] : terms) {
            if (m.max_index() > a.generators) {
                throw TruncationError("literal uses a generator beyond truncation N=" +
                                      std::to_string(a.generators));
            }
            out.add_term(m, c);
        }
        return out;
    }

private:
    [[noreturn]] void fail(const std::string& why) const
    {
        throw ParseError("bad polynomial literal '" + std::string(text_) + "': " + why);
    }
    bool eof() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }
    char take() { return text_[pos_++]; }
    void skip_ws()
    {
        while (!eof() && std::isspace(static_cast<unsigned char>(peek())) != 0) {
            ++pos_;
        }
    }
    std::string digits()
    {
        skip_ws();
        std::size_t start = pos_;
        while (!eof() && std::isdigit(static_cast<unsigned char>(peek())) != 0) {
            ++pos_;
        }
        if (start == pos_) {
            fail("expected digits");
        }
        return std::string(text_.substr(start, pos_ - start));
    }
    bool at_generator() const
    {
        return !eof() && (peek() == 'v' || peek() == 'm' || peek() == 't');
    }

    std::pair<Fraction, Monomial> parse_term()
    {
        Fraction c(1);
        Monomial m;
        bool need_star = false;
        if (!at_generator()) {
            std::string num = digits();
            skip_ws();
            if (!eof() && peek() == '/') {
                take();
                std::string den = digits();
                c = arith::parse_fraction(num + "/" + den);
            } else {
                c = Fraction(arith::parse_bigint(num));
            }
            need_star = true;
        }
        while (true) {
            skip_ws();
            if (need_star) {
                if (eof() || peek() != '*') {
                    break;
                }
                take();
                skip_ws();
            }
            if (!at_generator()) {
                if (need_star) {
                    fail("expected generator after '*'");
                }
                fail("expected coefficient or generator");
            }
            auto letter = static_cast<Letter>(take());
            if (letter_ && *letter_ != letter) {
                fail("mixed alphabets");
            }
            letter_ = letter;
            long index = std::stol(digits());
            if (index < 1) {
                fail("generator index must be positive");
            }
            if (index > kMaxGenerators) {
                throw TruncationError("generator index " + std::to_string(index) + " beyond supported range");
            }
            unsigned e = 1;
            skip_ws();
            if (!eof() && peek() == '^') {
                take();
                std::string ds = digits();
                if (ds.size() > 5) {
                    fail("exponent too large");
                }
                e = static_cast<unsigned>(std::stoul(ds));
            }
            Monomial g = Monomial::generator(static_cast<int>(index), e);
            m *= g;
            need_star = true;
        }
        return {c, m};
    }

    std::string_view text_;
    Alphabet alphabet_;
    std::optional<Letter> letter_;
    std::size_t pos_ = 0;
};

}  // namespace

Poly Poly::parse(std::string_view text, const Alphabet& fallback) { return PolyParser(text, fallback).run(); }

// ---------------------------------------------------------------- substitution

Poly substitute(const Poly& x, const std::vector<Poly>& images, const Alphabet& target)
{
    // Powers of each image are cached; monomials share them heavily.
    std::vector<std::vector<Poly>> powers(images.size());
    auto power_of = [&](int index, unsigned e) -> const Poly& {
        if (index < 1 || static_cast<std::size_t>(index) > images.size()) {
            throw TruncationError("no substitution rule for generator " + std::to_string(index));
        }
        auto& cache = powers[static_cast<std::size_t>(index - 1)];
        if (cache.empty()) {
            cache.push_back(Poly::constant(target, 1));
        }
        while (cache.size() <= e) {
            cache.push_back(cache.back() * images[static_cast<std::size_t>(index - 1)]);
        }
        return cache[e];
    };
    Poly out(target);
    for (const auto& [m, c] : x.terms()) {
        Poly t = Poly::constant(target, c);
        for (int i = 1; i <= kMaxGenerators; ++i) {
            if (unsigned e = m.exponent(i)) {
                t *= power_of(i, e);
            }
        }
        out += t;
    }
    return out;
}

bool is_integral(const Poly& x)
{
    const long p = x.alphabet().prime;
    return std::all_of(x.terms().begin(), x.terms().end(), [p](const auto& kv) {
        return mpz_divisible_ui_p(kv.second.get_den_mpz_t(), static_cast<unsigned long>(p)) == 0;
    });
}

// ---------------------------------------------------------------- Hazewinkel

namespace {

void check_hazewinkel_index(int index)
{
    if (index < 1) {
        throw DomainError("generator index must be positive");
    }
    if (index > kHazewinkelDepth) {
        throw TruncationError("Hazewinkel relations are tabulated only through index " +
                              std::to_string(kHazewinkelDepth));
    }
}

unsigned long ipow(long p, int k)
{
    unsigned long r = 1;
    for (int i = 0; i < k; ++i) {
        r *= static_cast<unsigned long>(p);
    }
    return r;
}

}  // namespace

// p m_n = sum_{i=0}^{n-1} m_i v_{n-i}^{p^i}, m_0 = 1.
BasisChange::BasisChange(long prime, int generators) : prime_(prime), generators_(generators)
{
    arith::require_prime(prime);
    const Alphabet am = m_alphabet();
    const Alphabet av = v_alphabet();
    const int depth = std::min(kHazewinkelDepth, generators);
    for (int n = 1; n <= depth; ++n) {
        Poly v = Poly::generator(am, n) * Fraction(prime);
        for (int i = 1; i < n; ++i) {
            v -= Poly::generator(am, i) * v_in_m_[static_cast<std::size_t>(n - i - 1)].pow(
                                              static_cast<unsigned>(ipow(prime, i)));
        }
        v_in_m_.push_back(std::move(v));

        Poly m = Poly::generator(av, n);
        for (int i = 1; i < n; ++i) {
            m += m_in_v_[static_cast<std::size_t>(i - 1)] *
                 Poly::generator(av, n - i).pow(static_cast<unsigned>(ipow(prime, i)));
        }
        m *= Fraction(1, prime);
        m_in_v_.push_back(std::move(m));
    }
}

const Poly& BasisChange::v_in_m(int index) const
{
    check_hazewinkel_index(index);
    if (index > static_cast<int>(v_in_m_.size())) {
        throw TruncationError("index beyond truncation");
    }
    return v_in_m_[static_cast<std::size_t>(index - 1)];
}

const Poly& BasisChange::m_in_v(int index) const
{
    check_hazewinkel_index(index);
    if (index > static_cast<int>(m_in_v_.size())) {
        throw TruncationError("index beyond truncation");
    }
    return m_in_v_[static_cast<std::size_t>(index - 1)];
}

Poly BasisChange::to_v_basis(const Poly& x) const
{
    if (x.alphabet().letter != Letter::M) {
        throw DomainError("to_v_basis expects an m-polynomial");
    }
    if (x.max_index() > static_cast<int>(m_in_v_.size())) {
        throw TruncationError("m-index beyond the Hazewinkel table");
    }
    return substitute(x, m_in_v_, v_alphabet());
}

Poly BasisChange::to_m_basis(const Poly& x) const
{
    if (x.alphabet().letter != Letter::V) {
        throw DomainError("to_m_basis expects a v-polynomial");
    }
    if (x.max_index() > static_cast<int>(v_in_m_.size())) {
        throw TruncationError("v-index beyond the Hazewinkel table");
    }
    return substitute(x, v_in_m_, m_alphabet());
}

Poly hazewinkel_v_in_m(int index, long prime, int generators)
{
    check_hazewinkel_index(index);
    return BasisChange(prime, std::max(generators, index)).v_in_m(index);
}

Poly m_in_v(int index, long prime, int generators)
{
    check_hazewinkel_index(index);
    return BasisChange(prime, std::max(generators, index)).m_in_v(index);
}

// ---------------------------------------------------------------- enumeration

namespace {

void enumerate(long remaining, int index, const Alphabet& a, Monomial& cur, bool exact,
               std::vector<Monomial>& out)
{
    if (index == 0) {
        if (!exact || remaining == 0) {
            out.push_back(cur);
        }
        return;
    }
    const long d = a.degree(index);
    for (long e = 0; e * d <= remaining; ++e) {
        cur.set_exponent(index, static_cast<unsigned>(e));
        enumerate(remaining - e * d, index - 1, a, cur, exact, out);
    }
    cur.set_exponent(index, 0);
}

}  // namespace

std::vector<Monomial> monomials_of_degree(long degree, const Alphabet& alphabet)
{
    std::vector<Monomial> out;
    if (degree < 0) {
        return out;
    }
    Monomial cur;
    enumerate(degree, alphabet.generators, alphabet, cur, true, out);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Monomial> monomials_up_to_degree(long bound, const Alphabet& alphabet)
{
    std::vector<Monomial> out;
    if (bound < 0) {
        return out;
    }
    Monomial cur;
    enumerate(bound, alphabet.generators, alphabet, cur, false, out);
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------- ideals

TermIdeal::TermIdeal(long prime, std::vector<IdealGenerator> generators) : prime_(prime), gens_(std::move(generators))
{
    arith::require_prime(prime);
    for (const auto& g : gens_) {
        if (g.p_power < 0) {
            throw DomainError("negative p-power in ideal generator");
        }
    }
}

TermIdeal TermIdeal::p_and_v(long prime, int k)
{
    std::vector<IdealGenerator> gens{{1, Monomial{}}};
    for (int i = 1; i <= k; ++i) {
        gens.push_back({0, Monomial::generator(i)});
    }
    return {prime, std::move(gens)};
}

TermIdeal TermIdeal::parse(std::string_view text, long prime)
{
    std::string s;
    for (char ch : text) {
        if (std::isspace(static_cast<unsigned char>(ch)) == 0) {
            s += ch;
        }
    }
    if (s.size() < 2 || s.front() != '(' || s.back() != ')') {
        throw ParseError("ideal must be parenthesised: '" + std::string(text) + "'");
    }
    s = s.substr(1, s.size() - 2);
    if (s == "0") {
        return zero(prime);
    }
    std::vector<IdealGenerator> gens;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) {
            throw ParseError("empty ideal generator in '" + std::string(text) + "'");
        }
        IdealGenerator g;
        std::stringstream fs(item);
        std::string factor;
        while (std::getline(fs, factor, '*')) {
            std::string base = factor;
            long e = 1;
            if (auto caret = factor.find('^'); caret != std::string::npos) {
                base = factor.substr(0, caret);
                try {
                    e = std::stol(factor.substr(caret + 1));
                } catch (const std::exception&) {
                    throw ParseError("bad exponent in ideal generator '" + item + "'");
                }
            }
            if (base == "p") {
                g.p_power += e;
            } else if (base == "1") {
            } else if (base.size() >= 2 && base[0] == 'v' &&
                       std::all_of(base.begin() + 1, base.end(), [](char c) { return std::isdigit(c) != 0; })) {
                int idx = std::stoi(base.substr(1));
                g.monomial *= Monomial::generator(idx, static_cast<unsigned>(e));
            } else {
                throw ParseError("bad ideal generator '" + item + "'");
            }
        }
        gens.push_back(g);
    }
    return {prime, std::move(gens)};
}

std::optional<long> TermIdeal::modulus_exponent(const Monomial& m) const
{
    std::optional<long> best;
    for (const auto& g : gens_) {
        if (g.monomial.divides(m) && (!best || g.p_power < *best)) {
            best = g.p_power;
        }
    }
    return best;
}

bool TermIdeal::contains_term(const Fraction& c, const Monomial& m) const
{
    if (c == 0) {
        return true;
    }
    auto a = modulus_exponent(m);
    return a && arith::valuation_at_least(c, prime_, *a);
}

std::optional<int> TermIdeal::domain_depth() const
{
    if (gens_.empty()) {
        return -1;
    }
    bool has_p = false;
    std::vector<bool> vs(kMaxGenerators + 1, false);
    for (const auto& g : gens_) {
        if (g.p_power == 1 && g.monomial.is_one()) {
            has_p = true;
        } else if (g.p_power == 0 && g.monomial.max_index() > 0 &&
                   g.monomial == Monomial::generator(g.monomial.max_index())) {
            vs[static_cast<std::size_t>(g.monomial.max_index())] = true;
        } else {
            return std::nullopt;
        }
    }
    if (!has_p) {
        return std::nullopt;
    }
    int k = 0;
    while (k + 1 <= kMaxGenerators && vs[static_cast<std::size_t>(k + 1)]) {
        ++k;
    }
    for (int i = k + 1; i <= kMaxGenerators; ++i) {
        if (vs[static_cast<std::size_t>(i)]) {
            return std::nullopt;
        }
    }
    return k;
}

TermIdeal TermIdeal::quotient_by_p() const
{
    std::vector<IdealGenerator> gens;
    for (const auto& g : gens_) {
        gens.push_back({std::max(g.p_power - 1, 0L), g.monomial});
    }
    return {prime_, std::move(gens)};
}

std::string TermIdeal::str() const
{
    if (gens_.empty()) {
        return "(0)";
    }
    std::string out = "(";
    for (std::size_t i = 0; i < gens_.size(); ++i) {
        if (i > 0) {
            out += ", ";
        }
        const auto& g = gens_[i];
        std::string part;
        if (g.p_power == 1) {
            part = "p";
        } else if (g.p_power > 1) {
            part = "p^" + std::to_string(g.p_power);
        }
        if (!g.monomial.is_one()) {
            part += (part.empty() ? "" : "*") + g.monomial.str(Letter::V);
        }
        out += part.empty() ? "1" : part;
    }
    return out + ")";
}

Poly reduce_mod(const Poly& x, const TermIdeal& ideal)
{
    if (!is_integral(x)) {
        throw DomainError("reduce_mod needs an integral polynomial: " + x.str());
    }
    Poly out(x.alphabet());
    for (const auto& [m, c] : x.terms()) {
        auto a = ideal.modulus_exponent(m);
        if (!a) {
            out.add_term(m, c);
            continue;
        }
        if (arith::valuation_at_least(c, ideal.prime(), *a)) {
            continue;
        }
        out.add_term(m, Fraction(arith::balanced_residue(c, arith::power(ideal.prime(), static_cast<unsigned long>(*a)))));
    }
    return out;
}

bool in_ideal(const Poly& x, const TermIdeal& ideal) { return reduce_mod(x, ideal).is_zero(); }

Poly divide_exact(const Poly& x, const Fraction& c, const Monomial& m, const TermIdeal& ideal)
{
    const long p = ideal.prime();
    auto depth = ideal.domain_depth();
    if (!depth) {
        throw DomainError("quotient by " + ideal.str() + " is not a domain; exact division undefined");
    }
    Poly divisor = Poly::term(x.alphabet(), c, m);
    Poly xr = *depth >= 0 ? reduce_mod(x, ideal) : x;
    if (*depth >= 0 && reduce_mod(divisor, ideal).is_zero()) {
        throw DomainError("divisor " + divisor.str() + " vanishes modulo " + ideal.str());
    }
    if (c == 0) {
        throw DomainError("division by zero");
    }
    Poly q(x.alphabet());
    for (const auto& [mx, cx] : xr.terms()) {
        if (!m.divides(mx)) {
            throw DomainError(x.str() + " is not divisible by " + divisor.str() + " modulo " + ideal.str());
        }
        Fraction qc = cx / c;
        if (*depth < 0) {
            if (mpz_divisible_ui_p(qc.get_den_mpz_t(), static_cast<unsigned long>(p)) != 0) {
                throw DomainError(x.str() + " is not divisible by " + divisor.str() + " in Z_(p)[v]");
            }
            q.add_term(mx / m, qc);
        } else {
            q.add_term(mx / m, Fraction(arith::balanced_residue(qc, BigInt(p))));
        }
    }
    if (*depth >= 0) {
        q = reduce_mod(q, ideal);
        if (!(reduce_mod(q * divisor, ideal) == xr)) {
            throw DomainError("division check failed for " + x.str());
        }
    } else if (!(q * divisor == x)) {
        throw DomainError("division check failed for " + x.str());
    }
    return q;
}

Poly divide_by_p(const Poly& x, const TermIdeal& ideal)
{
    const long p = ideal.prime();
    Poly xr = reduce_mod(x, ideal);
    Poly q(x.alphabet());
    for (const auto& [m, c] : xr.terms()) {
        if (!arith::valuation_at_least(c, p, 1)) {
            throw DomainError("term " + Poly::term(x.alphabet(), c, m).str() + " is not divisible by p");
        }
        q.add_term(m, c / p);
    }
    return reduce_mod(q, ideal.quotient_by_p());
}

}  // namespace bpwb::grading
