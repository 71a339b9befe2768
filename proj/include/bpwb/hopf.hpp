#pragma once

#include "bpwb/grading.hpp"
#include "bpwb/report.hpp"

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bpwb::hopf {

using grading::Alphabet;
using grading::BasisChange;
using grading::Fraction;
using grading::Letter;
using grading::Monomial;
using grading::Poly;

/// Exponent vector (i_1, ..., i_n) of the dual monomial t_1^{i_1} ... t_n^{i_n}.
using OpIndex = Monomial;

OpIndex op_index(const std::vector<unsigned>& entries);
/// "R[0,1]"; the identity prints as "R[0]".
std::string op_str(const OpIndex& index);
/// Accepts "R[1]", "R[p]", "R[p^2]", "R[0,1]", "R[2p]" (entries expanded with the prime).
OpIndex parse_op_index(std::string_view text, long prime);

/// Element of BP_*(BP): t-monomial -> left coefficient.
class TPoly {
public:
    using Terms = std::map<Monomial, Poly>;

    explicit TPoly(Alphabet coefficients) : coeffs_(coefficients) {}
    static TPoly one(Alphabet coefficients);
    static TPoly monomial(const Monomial& t, const Poly& coefficient);
    static TPoly from_coefficient(const Poly& c) { return monomial(Monomial{}, c); }
    /// Terms like `-2*v1*t1^2 + t2`.
    static TPoly parse(std::string_view text, const Alphabet& v);

    [[nodiscard]] const Alphabet& coefficient_alphabet() const noexcept { return coeffs_; }
    [[nodiscard]] Alphabet t_alphabet() const { return coeffs_.with(Letter::T); }
    [[nodiscard]] const Terms& terms() const noexcept { return terms_; }
    [[nodiscard]] bool is_zero() const noexcept { return terms_.empty(); }
    [[nodiscard]] Poly coefficient(const Monomial& t) const;

    void add(const Monomial& t, const Poly& c);
    TPoly& operator+=(const TPoly& rhs);
    TPoly& operator-=(const TPoly& rhs);
    /// Product keeping only t-monomials of degree <= bound.
    [[nodiscard]] TPoly multiply(const TPoly& rhs, std::optional<long> t_bound = std::nullopt) const;
    [[nodiscard]] TPoly scaled(const Poly& c) const;
    [[nodiscard]] TPoly map_coefficients(const std::function<Poly(const Poly&)>& f, const Alphabet& target) const;

    friend TPoly operator+(TPoly a, const TPoly& b) { return a += b; }
    friend TPoly operator-(TPoly a, const TPoly& b) { return a -= b; }
    friend TPoly operator*(const TPoly& a, const TPoly& b) { return a.multiply(b); }
    friend bool operator==(const TPoly& a, const TPoly& b) { return a.coeffs_ == b.coeffs_ && a.terms_ == b.terms_; }

    [[nodiscard]] std::string str() const;

private:
    Alphabet coeffs_;
    Terms terms_;
};

/// Element of BP_*(BP) (x) BP_*(BP); coefficients sit on the left factor.
class TensorPoly {
public:
    using Key = std::pair<Monomial, Monomial>;
    using Terms = std::map<Key, Poly>;

    explicit TensorPoly(Alphabet coefficients) : coeffs_(coefficients) {}
    static TensorPoly one(Alphabet coefficients);
    static TensorPoly term(const Monomial& left, const Monomial& right, const Poly& coefficient);
    /// Terms like `-v1*t1^2(x)t1^5 + t2(x)1`.
    static TensorPoly parse(std::string_view text, const Alphabet& v);

    [[nodiscard]] const Alphabet& coefficient_alphabet() const noexcept { return coeffs_; }
    [[nodiscard]] const Terms& terms() const noexcept { return terms_; }
    [[nodiscard]] bool is_zero() const noexcept { return terms_.empty(); }
    [[nodiscard]] Poly coefficient(const Monomial& left, const Monomial& right) const;

    void add(const Monomial& left, const Monomial& right, const Poly& c);
    TensorPoly& operator+=(const TensorPoly& rhs);
    TensorPoly& operator-=(const TensorPoly& rhs);
    [[nodiscard]] TensorPoly multiply(const TensorPoly& rhs) const;
    [[nodiscard]] TensorPoly pow(unsigned k) const;
    [[nodiscard]] TensorPoly scaled(const Poly& c) const;

    friend TensorPoly operator+(TensorPoly a, const TensorPoly& b) { return a += b; }
    friend TensorPoly operator-(TensorPoly a, const TensorPoly& b) { return a -= b; }
    friend TensorPoly operator*(const TensorPoly& a, const TensorPoly& b) { return a.multiply(b); }
    friend bool operator==(const TensorPoly& a, const TensorPoly& b)
    {
        return a.coeffs_ == b.coeffs_ && a.terms_ == b.terms_;
    }

    [[nodiscard]] std::string str() const;

private:
    Alphabet coeffs_;
    Terms terms_;
};

/// Finite left-linear combination sum c_I R_I.
class OperationCombo {
public:
    using Terms = std::map<OpIndex, Poly>;

    explicit OperationCombo(Alphabet v) : v_(v) {}
    static OperationCombo basis(const Alphabet& v, const OpIndex& index);

    [[nodiscard]] const Alphabet& alphabet() const noexcept { return v_; }
    [[nodiscard]] const Terms& terms() const noexcept { return terms_; }
    [[nodiscard]] bool is_zero() const noexcept { return terms_.empty(); }
    [[nodiscard]] Poly coefficient(const OpIndex& index) const;
    void add(const OpIndex& index, const Poly& c);
    OperationCombo& operator+=(const OperationCombo& rhs);
    OperationCombo& operator-=(const OperationCombo& rhs);
    friend OperationCombo operator+(OperationCombo a, const OperationCombo& b) { return a += b; }
    friend OperationCombo operator-(OperationCombo a, const OperationCombo& b) { return a -= b; }
    friend bool operator==(const OperationCombo& a, const OperationCombo& b) { return a.terms_ == b.terms_; }
    [[nodiscard]] std::string str() const;

private:
    Alphabet v_;
    Terms terms_;
};

/// Composite word R_{I_1} R_{I_2} ... R_{I_n}; the last letter acts first.
using OpWord = std::vector<OpIndex>;

/// Integer combination of words, e.g. R[p]R[1] - 2*R[1]R[p].
class OpExpr {
public:
    using Terms = std::map<OpWord, Fraction>;

    OpExpr() = default;
    static OpExpr word(OpWord w);
    static OpExpr letter(const OpIndex& index) { return word({index}); }
    static OpExpr identity() { return word({}); }
    /// `expr := ['-'] term (('+'|'-') term)*`, `term := [int '*'] R[..] (R[..])*`.
    static OpExpr parse(std::string_view text, long prime);

    [[nodiscard]] const Terms& terms() const noexcept { return terms_; }
    [[nodiscard]] bool is_zero() const noexcept { return terms_.empty(); }
    void add(const OpWord& w, const Fraction& c);
    /// Degree when homogeneous; nullopt for zero.
    [[nodiscard]] std::optional<long> degree(const Alphabet& t) const;

    OpExpr& operator+=(const OpExpr& rhs);
    OpExpr& operator-=(const OpExpr& rhs);
    friend OpExpr operator+(OpExpr a, const OpExpr& b) { return a += b; }
    friend OpExpr operator-(OpExpr a, const OpExpr& b) { return a -= b; }
    /// Composition: (a * b) applies b first.
    friend OpExpr operator*(const OpExpr& a, const OpExpr& b);
    friend OpExpr operator*(const Fraction& c, OpExpr a);
    friend bool operator==(const OpExpr& a, const OpExpr& b) { return a.terms_ == b.terms_; }

    [[nodiscard]] std::string str() const;

private:
    Terms terms_;
};

long word_degree(const OpWord& w, const Alphabet& t);

inline std::ostream& operator<<(std::ostream& os, const TPoly& x) { return os << x.str(); }
inline std::ostream& operator<<(std::ostream& os, const TensorPoly& x) { return os << x.str(); }
inline std::ostream& operator<<(std::ostream& os, const OperationCombo& x) { return os << x.str(); }
inline std::ostream& operator<<(std::ostream& os, const OpExpr& x) { return os << x.str(); }

enum class ComposeRule {
    /// <ab, x> = sum <a, e_i * eta_R(<b, x_i>)>: b's values move through the right unit.
    RightUnit,
    /// <ab, x> = sum <b, x_i> <a, e_i>: b's values treated as left scalars.
    LeftCoefficient,
};

/// Per-prime computational context. Caches are mutable; use one instance per thread.
class BPContext {
public:
    explicit BPContext(long prime, int generators = 4);

    [[nodiscard]] long prime() const noexcept { return prime_; }
    [[nodiscard]] long q() const noexcept { return grading::q_of(prime_); }
    [[nodiscard]] int generators() const noexcept { return generators_; }
    [[nodiscard]] const BasisChange& basis() const noexcept { return basis_; }
    [[nodiscard]] Alphabet v() const { return basis_.v_alphabet(); }
    [[nodiscard]] Alphabet m() const { return basis_.m_alphabet(); }
    [[nodiscard]] Alphabet t() const { return v().with(Letter::T); }
    /// The default pairing window (2p + 4) q.
    [[nodiscard]] long default_bound() const { return (2 * prime_ + 4) * q(); }

    /// psi(t_k) in the v-basis, k <= 3.
    const TensorPoly& psi_t(int k);
    /// psi(t_k) in the rational m-basis, as produced by the recursion.
    const TensorPoly& psi_t_m(int k);
    /// psi(t^J) = prod psi(t_k)^{j_k}.
    const TensorPoly& psi_monomial(const Monomial& j);
    TensorPoly psi(const TPoly& x);

    /// Right unit. M-alphabet input yields M coefficients, V input yields V coefficients.
    TPoly eta_r(const Poly& x, std::optional<long> t_bound = std::nullopt);
    /// eta_R on a whole polynomial by substituting into its m-basis expansion at once
    /// (no multiplicativity used). Slow; an oracle.
    TPoly eta_r_direct(const Poly& x);

    /// R_I acting on a coefficient, via the Cartan formula from the base values R_J m_k.
    Poly r_action(const OpIndex& index, const Poly& x);
    /// R_J m_k from the table: m_{k-j} when J = p^{k-j} e_j, else 0.
    Poly r_action_on_m(const OpIndex& index, int k);
    void clear_action_cache();

    /// Every t-monomial of degree <= bound (generators limited by truncation).
    std::vector<Monomial> window(long bound) const;

    /// <w, t^J>, computed left-associatively through the coproduct.
    const Poly& pair_word(const OpWord& w, const Monomial& j);
    Poly pair(const OpExpr& e, const Monomial& j);
    Poly pair(const OpExpr& e, const TPoly& x);

    Poly compose_pair(const OperationCombo& a, const OperationCombo& b, const TPoly& x,
                      ComposeRule rule = ComposeRule::RightUnit);
    OperationCombo product_in_basis(const OperationCombo& a, const OperationCombo& b, long bound,
                                    ComposeRule rule = ComposeRule::RightUnit);
    /// sum_J <e, t^J> R_J over the window.
    OperationCombo to_combo(const OpExpr& e, long bound);

private:
    void check_t_index(int k) const;
    const TPoly& eta_r_generator(int k);
    const TPoly& eta_r_m_generator(int k);
    const Poly& r_action_v_generator(const OpIndex& index, int k);
    Poly r_action_m_monomial(const OpIndex& index, const Monomial& mono);
    const Poly& r_action_monomial(const OpIndex& index, const Monomial& mono);

    long prime_;
    int generators_;
    BasisChange basis_;
    std::deque<TensorPoly> psi_m_;
    std::deque<TensorPoly> psi_v_;
    std::map<Monomial, TensorPoly> psi_mono_;
    std::deque<TPoly> eta_m_;
    std::deque<TPoly> eta_v_;
    std::map<std::pair<OpIndex, Monomial>, Poly> action_cache_;
    std::map<std::pair<OpIndex, Monomial>, Poly> action_m_cache_;
    std::map<std::pair<OpIndex, int>, Poly> action_v_gen_;
    std::map<std::pair<OpWord, Monomial>, Poly> word_cache_;
};

/// <sum c_I R_I, sum b_J t^J> = sum c_I b_I.
Poly pair(const OperationCombo& a, const TPoly& x);

/// Lemma 7.1 relations and the two derived triple relations over every t-monomial of
/// degree <= bound. Emits the pairing tables of the six products that enter them.
Report verify_lemma_7_1(BPContext& ctx, long bound);

/// Residual table of `lhs - rhs` over the window; empty when they agree.
std::vector<std::pair<Monomial, Poly>> residuals(BPContext& ctx, const OpExpr& lhs, const OpExpr& rhs, long bound);

/// Hazewinkel round trip, integrality of psi(t_k) for k <= 3, and the Cartan action against
/// right-unit coefficients on every v-monomial of degree <= bound.
Report verify_structure(BPContext& ctx, long bound);

/// Tables of R_I v_1 and R_I v_2 for all I with deg R_I <= deg v_2.
Report action_tables(BPContext& ctx);

}  // namespace bpwb::hopf
