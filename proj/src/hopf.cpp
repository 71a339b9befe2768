#include "bpwb/hopf.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace bpwb::hopf {

using grading::is_integral;

namespace {

unsigned long ipow(long p, long k)
{
    unsigned long r = 1;
    for (long i = 0; i < k; ++i) {
        r *= static_cast<unsigned long>(p);
    }
    return r;
}

Poly one_poly(const Alphabet& a) { return Poly::constant(a, 1); }

// Calls f on every J with J <= I componentwise.
template <class F>
void for_each_submonomial(const Monomial& bound, F&& f)
{
    const int top = bound.max_index();
    Monomial cur;
    std::function<void(int)> rec = [&](int i) {
        if (i > top) {
            f(cur);
            return;
        }
        for (unsigned e = 0; e <= bound.exponent(i); ++e) {
            cur.set_exponent(i, e);
            rec(i + 1);
        }
        cur.set_exponent(i, 0);
    };
    rec(1);
}

// ---------------------------------------------------------------- mixed-term literals

struct MixedTerm {
    Fraction coefficient{1};
    Monomial v;
    Monomial left;
    Monomial right;
    bool has_tensor = false;
};

class MixedParser {
public:
    MixedParser(std::string_view text, bool tensor) : text_(text), tensor_(tensor)
    {
        for (std::size_t i = 0; i < text.size();) {
            if (text.substr(i, 3) == "(x)") {
                s_ += '|';
                i += 3;
            } else {
                if (std::isspace(static_cast<unsigned char>(text[i])) == 0) {
                    s_ += text[i];
                }
                ++i;
            }
        }
    }

    std::vector<MixedTerm> run()
    {
        std::vector<MixedTerm> out;
        if (s_.empty()) {
            fail("empty literal");
        }
        bool negative = false;
        if (s_[pos_] == '-' || s_[pos_] == '+') {
            negative = s_[pos_++] == '-';
        }
        while (true) {
            MixedTerm t = term();
            if (negative) {
                t.coefficient = -t.coefficient;
            }
            out.push_back(t);
            if (pos_ >= s_.size()) {
                break;
            }
            char op = s_[pos_++];
            if (op != '+' && op != '-') {
                fail("expected '+' or '-'");
            }
            negative = op == '-';
        }
        return out;
    }

private:
    [[noreturn]] void fail(const std::string& why) const
    {
        throw ParseError("bad literal '" + std::string(text_) + "': " + why);
    }
    bool digit() const { return pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])) != 0; }
    std::string digits()
    {
        std::size_t start = pos_;
        while (digit()) {
            ++pos_;
        }
        if (start == pos_) {
            fail("expected digits");
        }
        return s_.substr(start, pos_ - start);
    }

    MixedTerm term()
    {
        MixedTerm t;
        bool right = false;
        bool need_sep = false;
        if (digit()) {
            std::string num = digits();
            if (pos_ < s_.size() && s_[pos_] == '/') {
                ++pos_;
                t.coefficient = arith::parse_fraction(num + "/" + digits());
            } else {
                t.coefficient = Fraction(arith::parse_bigint(num));
            }
            need_sep = true;
        }
        while (pos_ < s_.size()) {
            char c = s_[pos_];
            if (c == '|') {
                if (!tensor_ || right) {
                    fail("unexpected tensor sign");
                }
                right = true;
                t.has_tensor = true;
                ++pos_;
                need_sep = false;
                if (pos_ < s_.size() && s_[pos_] == '1') {
                    ++pos_;
                    need_sep = true;
                }
                continue;
            }
            if (need_sep) {
                if (c != '*') {
                    break;
                }
                ++pos_;
                c = pos_ < s_.size() ? s_[pos_] : '\0';
            }
            if (c != 'v' && c != 't') {
                fail("expected generator");
            }
            ++pos_;
            int index = std::stoi(digits());
            if (index < 1) {
                fail("generator index must be positive");
            }
            unsigned e = 1;
            if (pos_ < s_.size() && s_[pos_] == '^') {
                ++pos_;
                e = static_cast<unsigned>(std::stoul(digits()));
            }
            Monomial g = Monomial::generator(index, e);
            if (c == 'v') {
                if (right) {
                    fail("coefficients belong on the left tensor factor");
                }
                t.v *= g;
            } else {
                (right ? t.right : t.left) *= g;
            }
            need_sep = true;
        }
        if (tensor_ && !t.has_tensor) {
            fail("tensor term without '(x)'");
        }
        return t;
    }

    std::string_view text_;
    bool tensor_;
    std::string s_;
    std::size_t pos_ = 0;
};

std::string mixed_term_str(const Fraction& c, const Monomial& v, const Monomial& t, bool leading)
{
    std::string out;
    if (c < 0) {
        out += leading ? "-" : " - ";
    } else if (!leading) {
        out += " + ";
    }
    std::vector<std::string> parts;
    Fraction a = abs(c);
    if (a != 1 || (v.is_one() && t.is_one())) {
        parts.push_back(arith::to_string(a));
    }
    if (!v.is_one()) {
        parts.push_back(v.str(Letter::V));
    }
    if (!t.is_one()) {
        parts.push_back(t.str(Letter::T));
    }
    for (std::size_t i = 0; i < parts.size(); ++i) {
        out += (i > 0 ? "*" : "") + parts[i];
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------- indices

OpIndex op_index(const std::vector<unsigned>& entries) { return Monomial::from_exponents(entries); }

std::string op_str(const OpIndex& index)
{
    auto e = index.exponents();
    if (e.empty()) {
        return "R[0]";
    }
    std::string out = "R[";
    for (std::size_t i = 0; i < e.size(); ++i) {
        out += (i > 0 ? "," : "") + std::to_string(e[i]);
    }
    return out + "]";
}

OpIndex parse_op_index(std::string_view text, long prime)
{
    std::string s;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c)) == 0) {
            s += c;
        }
    }
    if (s.size() < 3 || s.front() != 'R' || s[1] != '[' || s.back() != ']') {
        throw ParseError("bad operation index '" + std::string(text) + "'");
    }
    std::vector<unsigned> entries;
    std::stringstream ss(s.substr(2, s.size() - 3));
    std::string item;
    while (std::getline(ss, item, ',')) {
        // entry := [int] ['p' ['^' int]]
        std::size_t i = 0;
        unsigned long value = 1;
        bool any = false;
        std::size_t start = i;
        while (i < item.size() && std::isdigit(static_cast<unsigned char>(item[i])) != 0) {
            ++i;
        }
        if (i > start) {
            value = std::stoul(item.substr(start, i - start));
            any = true;
        }
        if (i < item.size() && item[i] == '*' && any) {
            ++i;
        }
        if (i < item.size() && item[i] == 'p') {
            ++i;
            unsigned long e = 1;
            if (i < item.size() && item[i] == '^') {
                ++i;
                std::size_t es = i;
                while (i < item.size() && std::isdigit(static_cast<unsigned char>(item[i])) != 0) {
                    ++i;
                }
                if (es == i) {
                    throw ParseError("bad exponent in '" + std::string(text) + "'");
                }
                e = std::stoul(item.substr(es, i - es));
            }
            value *= ipow(prime, static_cast<long>(e));
            any = true;
        }
        if (!any || i != item.size()) {
            throw ParseError("bad operation index entry '" + item + "'");
        }
        if (value > 60000) {
            throw DomainError("operation index entry too large");
        }
        entries.push_back(static_cast<unsigned>(value));
    }
    if (entries.size() > static_cast<std::size_t>(grading::kMaxGenerators)) {
        throw TruncationError("operation index longer than supported");
    }
    return op_index(entries);
}

// ---------------------------------------------------------------- TPoly

TPoly TPoly::one(Alphabet coefficients)
{
    TPoly r(coefficients);
    r.add(Monomial{}, one_poly(coefficients));
    return r;
}

TPoly TPoly::monomial(const Monomial& t, const Poly& coefficient)
{
    TPoly r(coefficient.alphabet());
    r.add(t, coefficient);
    return r;
}

TPoly TPoly::parse(std::string_view text, const Alphabet& v)
{
    TPoly r(v);
    for (const auto& t : MixedParser(text, false).run()) {
        r.add(t.left, Poly::term(v, t.coefficient, t.v));
    }
    return r;
}

Poly TPoly::coefficient(const Monomial& t) const
{
    auto it = terms_.find(t);
    return it == terms_.end() ? Poly(coeffs_) : it->second;
}

void TPoly::add(const Monomial& t, const Poly& c)
{
    if (c.is_zero()) {
        return;
    }
    if (t.max_index() > coeffs_.generators) {
        throw TruncationError("t-monomial beyond truncation");
    }
    auto [it, inserted] = terms_.try_emplace(t, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) {
            terms_.erase(it);
        }
    }
}

TPoly& TPoly::operator+=(const TPoly& rhs)
{
    for (const auto& [t, c] : rhs.terms_) {
        add(t, c);
    }
    return *this;
}

TPoly& TPoly::operator-=(const TPoly& rhs)
{
    for (const auto& [t, c] : rhs.terms_) {
        add(t, -c);
    }
    return *this;
}

TPoly TPoly::multiply(const TPoly& rhs, std::optional<long> t_bound) const
{
    const Alphabet ta = t_alphabet();
    TPoly r(coeffs_);
    for (const auto& [ta_m, ca] : terms_) {
        for (const auto& [tb_m, cb] : rhs.terms_) {
            Monomial t = ta_m * tb_m;
            if (t_bound && t.degree(ta) > *t_bound) {
                continue;
            }
            r.add(t, ca * cb);
        }
    }
    return r;
}

TPoly TPoly::scaled(const Poly& c) const
{
    TPoly r(coeffs_);
    for (const auto& [t, coef] : terms_) {
        r.add(t, c * coef);
    }
    return r;
}

TPoly TPoly::map_coefficients(const std::function<Poly(const Poly&)>& f, const Alphabet& target) const
{
    TPoly r(target);
    for (const auto& [t, coef] : terms_) {
        r.add(t, f(coef));
    }
    return r;
}

std::string TPoly::str() const
{
    if (terms_.empty()) {
        return "0";
    }
    std::string out;
    bool leading = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        for (auto ct = it->second.terms().rbegin(); ct != it->second.terms().rend(); ++ct) {
            out += mixed_term_str(ct->second, ct->first, it->first, leading);
            leading = false;
        }
    }
    return out;
}

// ---------------------------------------------------------------- TensorPoly

TensorPoly TensorPoly::one(Alphabet coefficients)
{
    TensorPoly r(coefficients);
    r.add(Monomial{}, Monomial{}, one_poly(coefficients));
    return r;
}

TensorPoly TensorPoly::term(const Monomial& left, const Monomial& right, const Poly& coefficient)
{
    TensorPoly r(coefficient.alphabet());
    r.add(left, right, coefficient);
    return r;
}

TensorPoly TensorPoly::parse(std::string_view text, const Alphabet& v)
{
    TensorPoly r(v);
    for (const auto& t : MixedParser(text, true).run()) {
        r.add(t.left, t.right, Poly::term(v, t.coefficient, t.v));
    }
    return r;
}

Poly TensorPoly::coefficient(const Monomial& left, const Monomial& right) const
{
    auto it = terms_.find({left, right});
    return it == terms_.end() ? Poly(coeffs_) : it->second;
}

void TensorPoly::add(const Monomial& left, const Monomial& right, const Poly& c)
{
    if (c.is_zero()) {
        return;
    }
    auto [it, inserted] = terms_.try_emplace({left, right}, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) {
            terms_.erase(it);
        }
    }
}

TensorPoly& TensorPoly::operator+=(const TensorPoly& rhs)
{
    for (const auto& [k, c] : rhs.terms_) {
        add(k.first, k.second, c);
    }
    return *this;
}

TensorPoly& TensorPoly::operator-=(const TensorPoly& rhs)
{
    for (const auto& [k, c] : rhs.terms_) {
        add(k.first, k.second, -c);
    }
    return *this;
}

TensorPoly TensorPoly::multiply(const TensorPoly& rhs) const
{
    TensorPoly r(coeffs_);
    for (const auto& [ka, ca] : terms_) {
        for (const auto& [kb, cb] : rhs.terms_) {
            r.add(ka.first * kb.first, ka.second * kb.second, ca * cb);
        }
    }
    return r;
}

TensorPoly TensorPoly::pow(unsigned k) const
{
    TensorPoly result = one(coeffs_);
    TensorPoly base = *this;
    while (k > 0) {
        if ((k & 1U) != 0) {
            result = result * base;
        }
        k >>= 1U;
        if (k > 0) {
            base = base * base;
        }
    }
    return result;
}

TensorPoly TensorPoly::scaled(const Poly& c) const
{
    TensorPoly r(coeffs_);
    for (const auto& [k, coef] : terms_) {
        r.add(k.first, k.second, c * coef);
    }
    return r;
}

std::string TensorPoly::str() const
{
    if (terms_.empty()) {
        return "0";
    }
    std::string out;
    bool leading = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [left, right] = it->first;
        for (auto ct = it->second.terms().rbegin(); ct != it->second.terms().rend(); ++ct) {
            out += mixed_term_str(ct->second, ct->first, left, leading);
            out += "(x)" + right.str(Letter::T);
            leading = false;
        }
    }
    return out;
}

// ---------------------------------------------------------------- OperationCombo

OperationCombo OperationCombo::basis(const Alphabet& v, const OpIndex& index)
{
    OperationCombo r(v);
    r.add(index, one_poly(v));
    return r;
}

Poly OperationCombo::coefficient(const OpIndex& index) const
{
    auto it = terms_.find(index);
    return it == terms_.end() ? Poly(v_) : it->second;
}

void OperationCombo::add(const OpIndex& index, const Poly& c)
{
    if (c.is_zero()) {
        return;
    }
    auto [it, inserted] = terms_.try_emplace(index, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) {
            terms_.erase(it);
        }
    }
}

OperationCombo& OperationCombo::operator+=(const OperationCombo& rhs)
{
    for (const auto& [i, c] : rhs.terms_) {
        add(i, c);
    }
    return *this;
}

OperationCombo& OperationCombo::operator-=(const OperationCombo& rhs)
{
    for (const auto& [i, c] : rhs.terms_) {
        add(i, -c);
    }
    return *this;
}

std::string OperationCombo::str() const
{
    if (terms_.empty()) {
        return "0";
    }
    std::string out;
    bool first = true;
    for (const auto& [i, c] : terms_) {
        std::string cs = c.str();
        if (!first) {
            out += " + ";
        }
        first = false;
        if (cs == "1") {
            out += op_str(i);
        } else {
            out += "(" + cs + ")*" + op_str(i);
        }
    }
    return out;
}

// ---------------------------------------------------------------- OpExpr

OpExpr OpExpr::word(OpWord w)
{
    // R[0] is the identity; drop it from words.
    w.erase(std::remove_if(w.begin(), w.end(), [](const OpIndex& i) { return i.is_one(); }), w.end());
    OpExpr e;
    e.add(w, 1);
    return e;
}

void OpExpr::add(const OpWord& w, const Fraction& c)
{
    if (c == 0) {
        return;
    }
    auto [it, inserted] = terms_.try_emplace(w, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) {
            terms_.erase(it);
        }
    }
}

long word_degree(const OpWord& w, const Alphabet& t)
{
    long d = 0;
    for (const auto& i : w) {
        d += i.degree(t);
    }
    return d;
}

std::optional<long> OpExpr::degree(const Alphabet& t) const
{
    std::optional<long> d;
    for (const auto& [w, c] : terms_) {
        long dw = word_degree(w, t);
        if (d && *d != dw) {
            throw DomainError("inhomogeneous operation " + str());
        }
        d = dw;
    }
    return d;
}

OpExpr& OpExpr::operator+=(const OpExpr& rhs)
{
    for (const auto& [w, c] : rhs.terms_) {
        add(w, c);
    }
    return *this;
}

OpExpr& OpExpr::operator-=(const OpExpr& rhs)
{
    for (const auto& [w, c] : rhs.terms_) {
        add(w, -c);
    }
    return *this;
}

OpExpr operator*(const OpExpr& a, const OpExpr& b)
{
    OpExpr r;
    for (const auto& [wa, ca] : a.terms_) {
        for (const auto& [wb, cb] : b.terms_) {
            OpWord w = wa;
            w.insert(w.end(), wb.begin(), wb.end());
            r.add(w, ca * cb);
        }
    }
    return r;
}

OpExpr operator*(const Fraction& c, OpExpr a)
{
    OpExpr r;
    for (const auto& [w, coef] : a.terms_) {
        r.add(w, c * coef);
    }
    return r;
}

std::string OpExpr::str() const
{
    if (terms_.empty()) {
        return "0";
    }
    std::string out;
    bool first = true;
    for (const auto& [w, c] : terms_) {
        if (c < 0) {
            out += first ? "-" : " - ";
        } else if (!first) {
            out += " + ";
        }
        first = false;
        Fraction a = abs(c);
        if (a != 1) {
            out += arith::to_string(a) + "*";
        }
        if (w.empty()) {
            out += "R[0]";
        }
        for (const auto& i : w) {
            out += op_str(i);
        }
    }
    return out;
}

OpExpr OpExpr::parse(std::string_view text, long prime)
{
    std::string s;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c)) == 0) {
            s += c;
        }
    }
    auto fail = [&](const std::string& why) {
        throw ParseError("bad operation literal '" + std::string(text) + "': " + why);
    };
    if (s.empty()) {
        fail("empty");
    }
    OpExpr out;
    std::size_t pos = 0;
    bool negative = false;
    if (s[pos] == '-' || s[pos] == '+') {
        negative = s[pos++] == '-';
    }
    while (true) {
        Fraction c(1);
        std::size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])) != 0) {
            ++pos;
        }
        if (pos > start) {
            c = Fraction(arith::parse_bigint(s.substr(start, pos - start)));
            if (pos >= s.size() || s[pos] != '*') {
                fail("expected '*' after coefficient");
            }
            ++pos;
        }
        OpWord w;
        while (pos < s.size() && s[pos] == 'R') {
            auto close = s.find(']', pos);
            if (close == std::string::npos) {
                fail("unclosed '['");
            }
            w.push_back(parse_op_index(s.substr(pos, close - pos + 1), prime));
            pos = close + 1;
        }
        if (w.empty()) {
            fail("expected R[...]");
        }
        OpExpr t = OpExpr::word(w);
        out += (negative ? Fraction(-c) : c) * t;
        if (pos >= s.size()) {
            break;
        }
        if (s[pos] != '+' && s[pos] != '-') {
            fail("expected '+' or '-'");
        }
        negative = s[pos++] == '-';
    }
    return out;
}

// ---------------------------------------------------------------- context

BPContext::BPContext(long prime, int generators) : prime_(prime), generators_(generators), basis_(prime, generators)
{
    if (prime_ == 2) {
        throw DomainError("the workbench works at odd primes");
    }
    if (generators_ < 1 || generators_ > grading::kMaxGenerators) {
        throw DomainError("truncation must lie in 1.." + std::to_string(grading::kMaxGenerators));
    }
}

void BPContext::check_t_index(int k) const
{
    if (k < 1) {
        throw DomainError("t-index must be positive");
    }
    if (k > generators_) {
        throw TruncationError("t" + std::to_string(k) + " exceeds truncation N=" + std::to_string(generators_));
    }
    if (k > grading::kHazewinkelDepth) {
        throw TruncationError("t" + std::to_string(k) + " needs m" + std::to_string(k) +
                              ", beyond the Hazewinkel table");
    }
}

// sum_{i+j=n} m_i (psi t_j)^{p^i} = sum_{h+i+j=n} m_h t_i^{p^h} (x) t_j^{p^{h+i}}
const TensorPoly& BPContext::psi_t_m(int k)
{
    check_t_index(k);
    const Alphabet am = m();
    while (static_cast<int>(psi_m_.size()) < k) {
        const int n = static_cast<int>(psi_m_.size()) + 1;
        auto m_gen = [&](int h) { return h == 0 ? one_poly(am) : Poly::generator(am, h); };
        auto t_pow = [&](int i, unsigned long e) {
            return i == 0 ? Monomial{} : Monomial::generator(i, static_cast<unsigned>(e));
        };
        TensorPoly psi(am);
        for (int h = 0; h <= n; ++h) {
            for (int i = 0; h + i <= n; ++i) {
                const int j = n - h - i;
                psi.add(t_pow(i, ipow(prime_, h)), t_pow(j, ipow(prime_, h + i)), m_gen(h));
            }
        }
        for (int i = 1; i <= n; ++i) {
            const TensorPoly lower = (n - i == 0) ? TensorPoly::one(am) : psi_m_[static_cast<std::size_t>(n - i - 1)];
            psi -= lower.pow(static_cast<unsigned>(ipow(prime_, i))).scaled(m_gen(i));
        }
        psi_m_.push_back(std::move(psi));
    }
    return psi_m_[static_cast<std::size_t>(k - 1)];
}

const TensorPoly& BPContext::psi_t(int k)
{
    check_t_index(k);
    while (static_cast<int>(psi_v_.size()) < k) {
        const int n = static_cast<int>(psi_v_.size()) + 1;
        TensorPoly out(v());
        for (const auto& [key, c] : psi_t_m(n).terms()) {
            Poly cv = basis_.to_v_basis(c);
            if (!is_integral(cv)) {
                throw DomainError("coproduct coefficient is not p-local: " + cv.str());
            }
            out.add(key.first, key.second, cv);
        }
        psi_v_.push_back(std::move(out));
    }
    return psi_v_[static_cast<std::size_t>(k - 1)];
}

const TensorPoly& BPContext::psi_monomial(const Monomial& j)
{
    if (auto it = psi_mono_.find(j); it != psi_mono_.end()) {
        return it->second;
    }
    TensorPoly r = TensorPoly::one(v());
    if (!j.is_one()) {
        int k = 1;
        while (j.exponent(k) == 0) {
            ++k;
        }
        r = psi_monomial(j / Monomial::generator(k)) * psi_t(k);
    }
    return psi_mono_.emplace(j, std::move(r)).first->second;
}

TensorPoly BPContext::psi(const TPoly& x)
{
    TensorPoly out(v());
    for (const auto& [t, c] : x.terms()) {
        out += psi_monomial(t).scaled(c);
    }
    return out;
}

// eta_R(m_k) = sum_{i+j=k} m_i t_j^{p^i}
const TPoly& BPContext::eta_r_m_generator(int k)
{
    check_t_index(k);
    const Alphabet am = m();
    while (static_cast<int>(eta_m_.size()) < k) {
        const int n = static_cast<int>(eta_m_.size()) + 1;
        TPoly e(am);
        for (int i = 0; i <= n; ++i) {
            const int j = n - i;
            Poly coef = i == 0 ? one_poly(am) : Poly::generator(am, i);
            e.add(j == 0 ? Monomial{} : Monomial::generator(j, static_cast<unsigned>(ipow(prime_, i))), coef);
        }
        eta_m_.push_back(std::move(e));
    }
    return eta_m_[static_cast<std::size_t>(k - 1)];
}

namespace {

TPoly substitute_tpoly(const Poly& x, const std::function<const TPoly&(int)>& image, const Alphabet& target,
                       std::optional<long> t_bound)
{
    std::map<std::pair<int, unsigned>, TPoly> powers;
    auto power = [&](int k, unsigned e) -> const TPoly& {
        powers.try_emplace({k, 0U}, TPoly::one(target));
        unsigned have = e;
        while (powers.find({k, have}) == powers.end()) {
            --have;
        }
        for (; have < e; ++have) {
            TPoly next = powers.at({k, have}).multiply(image(k), t_bound);
            powers.emplace(std::make_pair(k, have + 1), std::move(next));
        }
        return powers.at({k, e});
    };
    TPoly out(target);
    for (const auto& [mono, c] : x.terms()) {
        TPoly t = TPoly::from_coefficient(Poly::constant(target, c));
        for (int k = 1; k <= grading::kMaxGenerators; ++k) {
            if (unsigned e = mono.exponent(k)) {
                t = t.multiply(power(k, e), t_bound);
            }
        }
        out += t;
    }
    return out;
}

}  // namespace

const TPoly& BPContext::eta_r_generator(int k)
{
    check_t_index(k);
    while (static_cast<int>(eta_v_.size()) < k) {
        const int n = static_cast<int>(eta_v_.size()) + 1;
        TPoly in_m = substitute_tpoly(
            basis_.v_in_m(n), [this](int i) -> const TPoly& { return eta_r_m_generator(i); }, m(), std::nullopt);
        TPoly out = in_m.map_coefficients([this](const Poly& c) { return basis_.to_v_basis(c); }, v());
        for (const auto& [t, c] : out.terms()) {
            if (!is_integral(c)) {
                throw DomainError("right unit coefficient is not p-local: " + c.str());
            }
        }
        eta_v_.push_back(std::move(out));
    }
    return eta_v_[static_cast<std::size_t>(k - 1)];
}

TPoly BPContext::eta_r(const Poly& x, std::optional<long> t_bound)
{
    if (x.alphabet().letter == Letter::M) {
        return substitute_tpoly(
            x, [this](int i) -> const TPoly& { return eta_r_m_generator(i); }, m(), t_bound);
    }
    if (x.alphabet().letter != Letter::V) {
        throw DomainError("eta_r expects a coefficient polynomial");
    }
    return substitute_tpoly(
        x, [this](int i) -> const TPoly& { return eta_r_generator(i); }, v(), t_bound);
}

TPoly BPContext::eta_r_direct(const Poly& x)
{
    TPoly in_m = eta_r(basis_.to_m_basis(x));
    return in_m.map_coefficients([this](const Poly& c) { return basis_.to_v_basis(c); }, v());
}

// ---------------------------------------------------------------- Cartan action

Poly BPContext::r_action_on_m(const OpIndex& index, int k)
{
    check_t_index(k);
    const Alphabet am = m();
    if (index.is_one()) {
        return Poly::generator(am, k);
    }
    for (int j = 1; j <= k; ++j) {
        if (index == Monomial::generator(j, static_cast<unsigned>(ipow(prime_, k - j)))) {
            return k == j ? one_poly(am) : Poly::generator(am, k - j);
        }
    }
    return Poly(am);
}

// R_I(m_k y) = sum_{J <= I} R_J(m_k) R_{I-J}(y); only J in {0, p^{k-j} e_j} contribute.
Poly BPContext::r_action_m_monomial(const OpIndex& index, const Monomial& mono)
{
    const Alphabet am = m();
    const Alphabet ta = t();
    if (mono.is_one()) {
        return index.is_one() ? one_poly(am) : Poly(am);
    }
    if (index.degree(ta) > mono.degree(am)) {
        return Poly(am);
    }
    auto key = std::make_pair(index, mono);
    if (auto it = action_m_cache_.find(key); it != action_m_cache_.end()) {
        return it->second;
    }
    int k = 1;
    while (mono.exponent(k) == 0) {
        ++k;
    }
    const Monomial rest = mono / Monomial::generator(k);
    Poly out = Poly::generator(am, k) * r_action_m_monomial(index, rest);
    for (int j = 1; j <= k; ++j) {
        const Monomial jj = Monomial::generator(j, static_cast<unsigned>(ipow(prime_, k - j)));
        if (jj.divides(index)) {
            Poly base = r_action_on_m(jj, k);
            out += base * r_action_m_monomial(index / jj, rest);
        }
    }
    return action_m_cache_.emplace(key, std::move(out)).first->second;
}

const Poly& BPContext::r_action_v_generator(const OpIndex& index, int k)
{
    auto key = std::make_pair(index, k);
    if (auto it = action_v_gen_.find(key); it != action_v_gen_.end()) {
        return it->second;
    }
    Poly in_m(m());
    for (const auto& [mono, c] : basis_.v_in_m(k).terms()) {
        in_m += r_action_m_monomial(index, mono) * c;
    }
    Poly out = basis_.to_v_basis(in_m);
    if (!is_integral(out)) {
        throw DomainError(op_str(index) + " v" + std::to_string(k) + " is not p-local");
    }
    return action_v_gen_.emplace(key, std::move(out)).first->second;
}

// R_I(v_k y) = sum_{J <= I} R_J(v_k) R_{I-J}(y)
const Poly& BPContext::r_action_monomial(const OpIndex& index, const Monomial& mono)
{
    auto key = std::make_pair(index, mono);
    if (auto it = action_cache_.find(key); it != action_cache_.end()) {
        return it->second;
    }
    const Alphabet av = v();
    const Alphabet ta = t();
    Poly out(av);
    if (mono.is_one()) {
        if (index.is_one()) {
            out = one_poly(av);
        }
    } else if (index.degree(ta) <= mono.degree(av)) {
        int k = 1;
        while (mono.exponent(k) == 0) {
            ++k;
        }
        if (k > grading::kHazewinkelDepth || k > generators_) {
            throw TruncationError("action on v" + std::to_string(k) + " is beyond the Hazewinkel table");
        }
        const Monomial rest = mono / Monomial::generator(k);
        const long dk = av.degree(k);
        for_each_submonomial(index, [&](const Monomial& j) {
            if (j.degree(ta) > dk) {
                return;
            }
            const Poly& a = r_action_v_generator(j, k);
            if (a.is_zero()) {
                return;
            }
            Poly b = r_action_monomial(index / j, rest);
            if (!b.is_zero()) {
                out += a * b;
            }
        });
    }
    return action_cache_.emplace(key, std::move(out)).first->second;
}

Poly BPContext::r_action(const OpIndex& index, const Poly& x)
{
    if (index.max_index() > generators_) {
        throw TruncationError(op_str(index) + " exceeds truncation");
    }
    if (x.alphabet().letter == Letter::M) {
        Poly out(m());
        for (const auto& [mono, c] : x.terms()) {
            out += r_action_m_monomial(index, mono) * c;
        }
        return out;
    }
    if (x.alphabet().letter != Letter::V) {
        throw DomainError("operations act on coefficient polynomials");
    }
    Poly out(v());
    for (const auto& [mono, c] : x.terms()) {
        out += r_action_monomial(index, mono) * c;
    }
    return out;
}

void BPContext::clear_action_cache()
{
    action_cache_.clear();
    action_m_cache_.clear();
}

std::vector<Monomial> BPContext::window(long bound) const
{
    Alphabet ta = t();
    ta.generators = std::min(generators_, grading::kHazewinkelDepth);
    return grading::monomials_up_to_degree(bound, ta);
}

// ---------------------------------------------------------------- pairings

Poly pair(const OperationCombo& a, const TPoly& x)
{
    Poly out(a.alphabet());
    for (const auto& [i, c] : a.terms()) {
        auto it = x.terms().find(i);
        if (it != x.terms().end()) {
            out += c * it->second;
        }
    }
    return out;
}

// <w R_K, t^J> = sum over psi(t^J) = sum c t^L (x) t^M of c <w, t^L> delta_{MK}
const Poly& BPContext::pair_word(const OpWord& w, const Monomial& j)
{
    auto key = std::make_pair(w, j);
    if (auto it = word_cache_.find(key); it != word_cache_.end()) {
        return it->second;
    }
    const Alphabet av = v();
    Poly out(av);
    if (w.empty()) {
        if (j.is_one()) {
            out = one_poly(av);
        }
    } else if (w.size() == 1) {
        if (w[0] == j) {
            out = one_poly(av);
        }
    } else if (word_degree(w, t()) <= j.degree(t())) {
        const OpIndex& last = w.back();
        OpWord head(w.begin(), w.end() - 1);
        for (const auto& [k, c] : psi_monomial(j).terms()) {
            if (k.second == last) {
                const Poly& inner = pair_word(head, k.first);
                if (!inner.is_zero()) {
                    out += c * inner;
                }
            }
        }
    }
    return word_cache_.emplace(key, std::move(out)).first->second;
}

Poly BPContext::pair(const OpExpr& e, const Monomial& j)
{
    Poly out(v());
    for (const auto& [w, c] : e.terms()) {
        const Poly& pw = pair_word(w, j);
        if (!pw.is_zero()) {
            out += pw * c;
        }
    }
    return out;
}

Poly BPContext::pair(const OpExpr& e, const TPoly& x)
{
    Poly out(v());
    for (const auto& [j, c] : x.terms()) {
        out += c * pair(e, j);
    }
    return out;
}

Poly BPContext::compose_pair(const OperationCombo& a, const OperationCombo& b, const TPoly& x, ComposeRule rule)
{
    Poly out(v());
    const TensorPoly px = psi(x);
    for (const auto& [key, c] : px.terms()) {
        Poly bval = b.coefficient(key.second);
        if (bval.is_zero()) {
            continue;
        }
        if (rule == ComposeRule::LeftCoefficient) {
            out += c * bval * a.coefficient(key.first);
        } else {
            TPoly e = TPoly::monomial(key.first, c).multiply(eta_r(bval));
            out += hopf::pair(a, e);
        }
    }
    return out;
}

OperationCombo BPContext::product_in_basis(const OperationCombo& a, const OperationCombo& b, long bound,
                                           ComposeRule rule)
{
    OperationCombo out(v());
    for (const auto& j : window(bound)) {
        out.add(j, compose_pair(a, b, TPoly::monomial(j, one_poly(v())), rule));
    }
    return out;
}

OperationCombo BPContext::to_combo(const OpExpr& e, long bound)
{
    OperationCombo out(v());
    for (const auto& j : window(bound)) {
        out.add(j, pair(e, j));
    }
    return out;
}

std::vector<std::pair<Monomial, Poly>> residuals(BPContext& ctx, const OpExpr& lhs, const OpExpr& rhs, long bound)
{
    std::vector<std::pair<Monomial, Poly>> out;
    const OpExpr diff = lhs - rhs;
    for (const auto& j : ctx.window(bound)) {
        Poly r = ctx.pair(diff, j);
        if (!r.is_zero()) {
            out.emplace_back(j, std::move(r));
        }
    }
    return out;
}

// ---------------------------------------------------------------- reports

Report verify_lemma_7_1(BPContext& ctx, long bound)
{
    const long p = ctx.prime();
    Report rep;
    rep.title = "lemma7.1";
    const OpExpr r1 = OpExpr::letter(op_index({1}));
    const OpExpr rp = OpExpr::letter(op_index({static_cast<unsigned>(p)}));
    const OpExpr r01 = OpExpr::letter(op_index({0, 1}));
    const auto window = ctx.window(bound);
    const std::string window_note = "window: all t-monomials of degree <= " + std::to_string(bound / ctx.q()) +
                                    "q (" + std::to_string(window.size()) + " monomials)";

    struct Relation {
        std::string id;
        OpExpr lhs;
        OpExpr rhs;
        std::string text;
    };
    std::vector<Relation> relations{
        {"commutator.R1.Rp", r1 * rp - rp * r1, r01, "R1Rp - RpR1 = R01"},
        {"commutator.R1.R01", r1 * r01 - r01 * r1, OpExpr{}, "R1R01 - R01R1 = 0"},
        {"commutator.Rp.R01", rp * r01 - r01 * rp, OpExpr{}, "RpR01 - R01Rp = 0"},
        {"triple.Rp.R1.R1", rp * r1 * r1 - Fraction(2) * (r1 * rp * r1) + r1 * r1 * rp, OpExpr{},
         "RpR1^2 - 2R1RpR1 + R1^2Rp = 0"},
        {"triple.Rp.Rp.R1", rp * rp * r1 - Fraction(2) * (rp * r1 * rp) + r1 * rp * rp, OpExpr{},
         "Rp^2R1 - 2RpR1Rp + R1Rp^2 = 0"},
    };
    for (const auto& rel : relations) {
        auto res = residuals(ctx, rel.lhs, rel.rhs, bound);
        CheckRecord rec;
        rec.id = "lemma7.1." + rel.id;
        rec.anchor = "lemma7.1";
        rec.pass = res.empty();
        rec.expected = rel.text;
        rec.computed = res.empty() ? "residual 0 on every monomial"
                                   : "residual " + res.front().second.str() + " at " +
                                         res.front().first.str(Letter::T);
        rec.modulus = "exact";
        rec.witness = res.empty() ? "" : res.front().first.str(Letter::T);
        rec.note = window_note;
        rep.add(rec);
    }

    Table tab;
    tab.name = "lemma7.1.pairings";
    tab.columns = {"t^J", "R1Rp", "RpR1", "R1R01", "R01R1", "RpR01", "R01Rp"};
    std::vector<OpExpr> products{r1 * rp, rp * r1, r1 * r01, r01 * r1, rp * r01, r01 * rp};
    for (const auto& j : window) {
        std::vector<std::string> row{j.str(Letter::T)};
        bool any = false;
        for (const auto& e : products) {
            Poly val = ctx.pair(e, j);
            any = any || !val.is_zero();
            row.push_back(val.str());
        }
        if (any) {
            tab.rows.push_back(std::move(row));
        }
    }
    rep.tables.push_back(std::move(tab));
    rep.trace.push_back("lemma7.1: pairing table recomputed from the coproduct; the printed table is not "
                        "reproduced under any column labelling, the relations themselves are checked above");
    return rep;
}

Report verify_structure(BPContext& ctx, long bound)
{
    const Alphabet av = ctx.v();
    const Alphabet am = ctx.m();
    const int top = std::min(3, ctx.generators() - 1);
    Report rep;
    rep.title = "structure";
    auto add = [&](std::string id, bool pass, std::string expected, std::string computed, std::string witness,
                   std::string note) {
        CheckRecord rec;
        rec.id = "structure." + std::move(id);
        rec.anchor = "structure";
        rec.pass = pass;
        rec.expected = std::move(expected);
        rec.computed = std::move(computed);
        rec.modulus = "exact";
        rec.witness = std::move(witness);
        rec.note = std::move(note);
        rep.add(std::move(rec));
    };

    std::string witness;
    long count = 0;
    for (const auto& x : grading::monomials_up_to_degree(bound, av)) {
        const Poly xv = Poly::term(av, 1, x);
        const Poly xm = Poly::term(am, 1, x);
        ++count;
        if (ctx.basis().to_v_basis(ctx.basis().to_m_basis(xv)) != xv && witness.empty()) {
            witness = x.str(Letter::V);
        }
        if (ctx.basis().to_m_basis(ctx.basis().to_v_basis(xm)) != xm && witness.empty()) {
            witness = x.str(Letter::M);
        }
    }
    add("hazewinkel.round_trip", witness.empty(), "v -> m -> v and m -> v -> m are the identity",
        witness.empty() ? "identity on " + std::to_string(count) + " monomials of each basis" : "fails", witness,
        "all monomials of degree <= " + std::to_string(bound));

    witness.clear();
    long coefficients = 0;
    for (int k = 1; k <= top; ++k) {
        for (const auto& [key, c] : ctx.psi_t(k).terms()) {
            ++coefficients;
            if (!is_integral(c) && witness.empty()) {
                witness = "psi(t" + std::to_string(k) + ") coefficient " + c.str();
            }
        }
    }
    add("psi.integral", witness.empty(), "psi(t_k) integral in the v-basis for k <= " + std::to_string(top),
        witness.empty() ? std::to_string(coefficients) + " coefficients integral" : "fails", witness, "");

    witness.clear();
    count = 0;
    long pairs = 0;
    for (const auto& x : grading::monomials_up_to_degree(bound, av)) {
        const Poly xp = Poly::term(av, 1, x);
        const TPoly e = ctx.eta_r(xp);
        ++count;
        for (const auto& i : ctx.window(x.degree(av))) {
            ++pairs;
            if (ctx.r_action(i, xp) != e.coefficient(i) && witness.empty()) {
                witness = op_str(i) + " on " + x.str(Letter::V);
            }
        }
    }
    add("cartan.right_unit", witness.empty(), "R_I x = coefficient of t^I in eta_R(x)",
        witness.empty() ? "agree on " + std::to_string(count) + " monomials, " + std::to_string(pairs) + " operations"
                        : "fails",
        witness, "all v-monomials of degree <= " + std::to_string(bound));
    return rep;
}

Report action_tables(BPContext& ctx)
{
    Report rep;
    rep.title = "lemma7.3.tables";
    const Alphabet av = ctx.v();
    Table tab;
    tab.name = "lemma7.3.action";
    tab.columns = {"R_I", "R_I v1", "R_I v2"};
    for (const auto& i : ctx.window(av.degree(2))) {
        if (i.is_one()) {
            continue;
        }
        tab.rows.push_back({op_str(i), ctx.r_action(i, Poly::generator(av, 1)).str(),
                            ctx.r_action(i, Poly::generator(av, 2)).str()});
    }
    rep.tables.push_back(std::move(tab));
    rep.trace.push_back("lemma7.3: R_I v1 = 0 whenever I is neither 0 nor (1), forced by degree; R_I v2 is "
                        "nonzero for I = (0,1) and (i) with i <= p+1, so the vanishing line applies to v1 only");
    return rep;
}

}  // namespace bpwb::hopf
