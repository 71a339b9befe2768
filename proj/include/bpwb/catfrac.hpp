#pragma once

#include "bpwb/arith.hpp"
#include "bpwb/report.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace bpwb::catfrac {

using ObjId = int;
using MorId = int;

struct MorphismInfo {
    std::string name;
    ObjId source = 0;
    ObjId target = 0;
};

/// A category with finitely many objects and morphisms and a total composition table.
class FiniteCategory {
public:
    FiniteCategory() = default;
    /// `compose[g][f]` is g o f, or -1 when target(f) != source(g). Throws DomainError unless the
    /// data is a category (typed, associative, identities neutral).
    FiniteCategory(std::vector<std::string> objects, std::vector<MorphismInfo> morphisms, std::vector<MorId> identities,
                   std::vector<std::vector<MorId>> compose);

    [[nodiscard]] int object_count() const noexcept { return static_cast<int>(objects_.size()); }
    [[nodiscard]] int morphism_count() const noexcept { return static_cast<int>(morphisms_.size()); }
    [[nodiscard]] const std::string& object_name(ObjId x) const { return objects_.at(x); }
    [[nodiscard]] const MorphismInfo& morphism(MorId f) const { return morphisms_.at(f); }
    [[nodiscard]] const std::string& name(MorId f) const { return morphisms_.at(f).name; }
    [[nodiscard]] ObjId source(MorId f) const { return morphisms_.at(f).source; }
    [[nodiscard]] ObjId target(MorId f) const { return morphisms_.at(f).target; }
    [[nodiscard]] MorId identity(ObjId x) const { return identities_.at(x); }
    [[nodiscard]] bool is_identity(MorId f) const { return identities_.at(source(f)) == f; }

    /// g o f; nullopt when not composable.
    [[nodiscard]] std::optional<MorId> compose(MorId g, MorId f) const;
    /// g o f; throws DomainError when not composable.
    [[nodiscard]] MorId then(MorId f, MorId g) const;
    [[nodiscard]] const std::vector<MorId>& hom(ObjId x, ObjId y) const { return hom_.at(x).at(y); }
    [[nodiscard]] std::optional<MorId> inverse(MorId f) const;
    [[nodiscard]] bool is_iso(MorId f) const { return inverse(f).has_value(); }

    [[nodiscard]] ObjId object_id(std::string_view name) const;
    [[nodiscard]] MorId morphism_id(std::string_view name) const;

private:
    std::vector<std::string> objects_;
    std::vector<MorphismInfo> morphisms_;
    std::vector<MorId> identities_;
    std::vector<std::vector<MorId>> compose_;
    std::vector<std::vector<std::vector<MorId>>> hom_;
};

/// Always contains every identity.
using MorphismClass = std::set<MorId>;

MorphismClass identities_of(const FiniteCategory& c);
MorphismClass all_morphisms(const FiniteCategory& c);
std::string class_str(const FiniteCategory& c, const MorphismClass& s);

/// An endofunctor E with a transformation eta: 1 -> E, given as tables.
struct MonadData {
    std::string name;
    std::vector<ObjId> on_objects;
    std::vector<MorId> on_morphisms;
    /// eta[x] should be a morphism x -> E x.
    std::vector<MorId> eta;
};

MonadData identity_monad(const FiniteCategory& c);

/// One parsed description file.
struct CatFile {
    std::string name;
    FiniteCategory category;
    std::map<std::string, MorphismClass> classes;
    std::vector<MonadData> monads;
};

/// Line format:
///   category NAME
///   objects: a b c
///   mor f : a -> b
///   compose g f = h                      (every composable pair of non-identities)
///   class S = {f, g}                     (identities are added)
///   functor E : a -> b, b -> b ; f -> 1_b
///   nat eta : a -> f, b -> 1_b
///   monad M = E, eta
/// Identities are named 1_X. `#` starts a comment.
CatFile parse_cat(std::string_view text);
CatFile load_cat(const std::filesystem::path& path);
/// Every *.cat file in the directory, sorted by name.
std::vector<CatFile> load_library(const std::filesystem::path& dir);

/// Closure under composition, square completion and equalizer completion, checked
/// exhaustively; each failing axiom reports its first failing configuration.
Report check_fraction_axioms(const FiniteCategory& c, const MorphismClass& s, const std::string& label = "cat");

/// A morphism X -> Y of the localization: apply `forward`, then invert `backward`.
struct ShortWord {
    MorId forward = 0;
    MorId backward = 0;
    friend auto operator<=>(const ShortWord&, const ShortWord&) = default;
};

struct Localization {
    FiniteCategory category;
    /// Q on morphisms.
    std::vector<MorId> q;
    /// All short words of each localized morphism.
    std::vector<std::vector<ShortWord>> words;
};

/// Hom-sets of short words modulo the completion relation. Throws DomainError when S
/// fails the axioms.
Localization localize(const FiniteCategory& c, const MorphismClass& s);
/// Q is bijective on morphisms and preserves composition.
bool q_is_isomorphism(const FiniteCategory& c, const Localization& loc);
/// Morphisms f of C with Qf invertible.
MorphismClass q_invertible(const FiniteCategory& c, const Localization& loc);

/// Classes of zig-zag words X -> Y under the least congruence that composes forward
/// letters and cancels s s^-1 and s^-1 s, each named by its shortest representative.
/// Classes are counted among words of length <= k under the closure on words of length
/// <= 2k; k grows until every hom-set count is stable. Throws DomainError when 2k would
/// exceed `max_length` first.
struct ZigzagResult {
    std::map<std::pair<ObjId, ObjId>, std::vector<std::string>> classes;
    int length = 0;
};
ZigzagResult zigzag_oracle(const FiniteCategory& c, const MorphismClass& s, int max_length = 10);
std::vector<std::string> zigzag_oracle(const FiniteCategory& c, const MorphismClass& s, ObjId x, ObjId y);

/// Functoriality, naturality, and the two idempotence axioms, objectwise.
Report check_monad(const FiniteCategory& c, const MonadData& m);

struct DerivedClasses {
    MorphismClass s;
    std::vector<bool> d;
};

/// S = {f : Ef invertible}; D computed both as {X : X iso to some EY} and {X : eta_X invertible}.
/// Throws DomainError when the monad fails its checks or the two D disagree.
DerivedClasses derive_S_D(const FiniteCategory& c, const MonadData& m);

/// Adjunction bijection, both characterisations of S and D, mutual equivalence of the four
/// conditions on eta, closure axioms of the derived S, and C -> S^-1 C -> D. When check_monad
/// fails, returns its records plus a failing ".refused" record and checks nothing else.
Report verify_universal_props(const FiniteCategory& c, const MonadData& m, const std::string& label = "cat");

}  // namespace bpwb::catfrac
