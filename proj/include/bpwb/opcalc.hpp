#pragma once

#include "bpwb/hopf.hpp"

#include <string>
#include <vector>

namespace bpwb::opcalc {

using grading::Fraction;
using grading::Monomial;
using grading::Poly;
using grading::TermIdeal;
using hopf::BPContext;
using hopf::OpExpr;
using hopf::OpIndex;

/// Raised when a step would violate degree bookkeeping.
class DegreeError : public DomainError {
public:
    using DomainError::DomainError;
};

/// pi_*(BP)/I on one generator of the given cohomological degree.
struct CyclicModule {
    std::string generator;
    long degree = 0;
    TermIdeal ideal;
};

/// coefficient * generator, coefficient in normal form mod I.
/// Cohomological degree = generator degree - coefficient degree.
class ModuleElement {
public:
    /// The coefficient must be homogeneous and integral; it is reduced on construction.
    ModuleElement(CyclicModule home, const Poly& coefficient);
    /// Zero in a prescribed degree.
    static ModuleElement zero(CyclicModule home, const grading::Alphabet& v, long degree);

    [[nodiscard]] const CyclicModule& home() const noexcept { return home_; }
    [[nodiscard]] const Poly& coefficient() const noexcept { return coeff_; }
    [[nodiscard]] long degree() const noexcept { return degree_; }
    [[nodiscard]] bool is_zero() const noexcept { return coeff_.is_zero(); }
    [[nodiscard]] std::string str() const;

    ModuleElement& operator+=(const ModuleElement& rhs);
    [[nodiscard]] ModuleElement operator-() const;
    friend ModuleElement operator+(ModuleElement a, const ModuleElement& b) { return a += b; }
    friend bool operator==(const ModuleElement& a, const ModuleElement& b)
    {
        return a.degree_ == b.degree_ && a.coeff_ == b.coeff_ && a.home_.ideal == b.home_.ideal;
    }

private:
    ModuleElement(CyclicModule home, Poly coefficient, long degree);

    CyclicModule home_;
    Poly coeff_;
    long degree_;
};

using ModuleVector = std::vector<ModuleElement>;

/// Operations act on coefficients only. Before acting, checks that R_K(generator) has no
/// room to be nonzero for any letter K != 0 (it would need a negative-degree coefficient).
ModuleElement act(BPContext& ctx, const OpExpr& op, const ModuleElement& e);
ModuleElement act(BPContext& ctx, const OpIndex& op, const ModuleElement& e);

/// Matrix of operations between wedges of suspended BP; shifts are the suspension degrees.
class OpMatrix {
public:
    OpMatrix(std::string name, std::vector<std::vector<OpExpr>> entries, std::vector<long> source_shifts,
             std::vector<long> target_shifts);

    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] std::size_t rows() const noexcept { return entries_.size(); }
    [[nodiscard]] std::size_t cols() const noexcept { return source_.size(); }
    [[nodiscard]] const OpExpr& entry(std::size_t i, std::size_t j) const { return entries_.at(i).at(j); }
    [[nodiscard]] const std::vector<long>& source_shifts() const noexcept { return source_; }
    [[nodiscard]] const std::vector<long>& target_shifts() const noexcept { return target_; }
    /// Entries whose degree differs from target - source shift, as "(i,j): ..." strings.
    [[nodiscard]] std::vector<std::string> degree_defects(const grading::Alphabet& t) const;
    [[nodiscard]] std::string str() const;

    /// a * b applies b first.
    friend OpMatrix operator*(const OpMatrix& a, const OpMatrix& b);
    friend OpMatrix operator-(const OpMatrix& a);

private:
    std::string name_;
    std::vector<std::vector<OpExpr>> entries_;
    std::vector<long> source_;
    std::vector<long> target_;
};

OpMatrix d0(long p);
/// [[RpR1 - 2R1Rp, R1^2], [Rp^2, -2RpR1 + R1Rp]]
OpMatrix d1(long p);
/// The displayed variant with (1,2) = R1 and (2,2) = R1Rp.
OpMatrix d1_printed(long p);
OpMatrix d2(long p);

/// Entry-wise act and sum. All inputs must share one module and a common degree offset
/// against the source shifts.
ModuleVector apply_matrix(BPContext& ctx, const OpMatrix& m, const ModuleVector& v);
std::string vector_str(const ModuleVector& v);

/// Each consecutive composite must pair to zero with every t-monomial of degree <= bound.
Report check_complex(BPContext& ctx, const std::vector<OpMatrix>& chain, long bound, const std::string& anchor);

/// source -> coefficient * target under a map of complexes.
struct GeneratorRelation {
    std::string name;
    std::string source;
    long source_degree = 0;
    Poly coefficient;
    std::string target;
    long target_degree = 0;

    [[nodiscard]] bool degree_consistent() const;
    [[nodiscard]] std::string str() const;
};

class GeneratorSpec {
public:
    /// Normalisations A*g0 = v1 g0, B*g1 = v2 g1, C*g2 = v3 g2 and the restriction
    /// relations used by the gamma_1 and beta_p pipelines.
    static GeneratorSpec standard(const BPContext& ctx);

    [[nodiscard]] const std::vector<GeneratorRelation>& relations() const noexcept { return rels_; }
    [[nodiscard]] const GeneratorRelation& get(const std::string& name) const;
    /// Throws DegreeError if the relation is degree-inconsistent.
    const GeneratorRelation& require(const std::string& name) const;
    [[nodiscard]] GeneratorSpec with(const std::string& name, const Poly& coefficient) const;

private:
    std::vector<GeneratorRelation> rels_;
};

struct ScanItem {
    long degree = 0;
    /// Operation applied to each monomial of the degree (identity allowed).
    OpIndex op;
};

/// Every monomial in each listed degree, and its image under the item's operation, must
/// lie in the ideal. Exhaustive.
Report indeterminacy_scan(BPContext& ctx, const std::vector<ScanItem>& items, const TermIdeal& ideal,
                          const std::string& anchor = "thm7.2");

/// Lemma 7.3 values and congruences.
Report verify_lemma_7_3(BPContext& ctx);

/// Lemma 7.5 -> lift -> Lemma 7.7 -> indeterminacy -> Theorem 7.2.
Report gamma1_pipeline(BPContext& ctx, const GeneratorSpec& spec);
Report gamma1_pipeline(BPContext& ctx);

/// Theorem 7.10: R_{p^2} h = v1^{p-1} g0 in pi_*/(p).
Report betap_pipeline(BPContext& ctx, const GeneratorSpec& spec);
Report betap_pipeline(BPContext& ctx);

/// Lemma 7.9 for one admissible r (p^2 < r < p^2 + p).
Report ext1_invariant(BPContext& ctx, long r);

/// Ranks of an integer matrix over F_p and over Q.
long rank_mod_p(std::vector<std::vector<Fraction>> rows, long p);
long rank_rational(std::vector<std::vector<Fraction>> rows);

}  // namespace bpwb::opcalc
