// One pass/fail line per acceptance criterion; exit 0 iff all pass.

#include "bpwb/abloc.hpp"
#include "bpwb/catfrac.hpp"
#include "bpwb/cli.hpp"
#include "bpwb/hopf.hpp"
#include "bpwb/opcalc.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace bpwb;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok && pass) {
            pass = false;
            detail = "failed: " + what;
        }
    }
};

const CheckRecord* find(const Report& rep, const std::string& id)
{
    for (const auto& r : rep.records) {
        if (r.id == id) {
            return &r;
        }
    }
    return nullptr;
}

bool passes(const Report& rep, const std::string& id)
{
    const auto* r = find(rep, id);
    return r != nullptr && r->pass;
}

std::string computed(const Report& rep, const std::string& id)
{
    const auto* r = find(rep, id);
    return r == nullptr ? "<missing>" : r->computed;
}

/// Records whose id starts with the prefix; all must pass and at least one must exist.
bool all_pass(const Report& rep, const std::string& prefix, std::size_t* count = nullptr)
{
    std::size_t n = 0;
    for (const auto& r : rep.records) {
        if (r.id.rfind(prefix, 0) == 0) {
            ++n;
            if (!r.pass) {
                return false;
            }
        }
    }
    if (count != nullptr) {
        *count += n;
    }
    return n > 0;
}

cli::Config at(long p)
{
    cli::Config c;
    c.prime = p;
    return c;
}

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Outcome criterion_1_2(int which)
{
    Outcome o;
    std::size_t n = 0;
    for (const long p : {5L, 7L}) {
        const auto start = std::chrono::steady_clock::now();
        const Report rep = cli::verify_target("lemma7.1", at(p));
        const double secs = seconds_since(start);
        const std::string tag = " at p=" + std::to_string(p);
        if (which == 1) {
            o.require(all_pass(rep, "lemma7.1.commutator", &n), "commutator relations" + tag);
            o.require(secs < 60.0, "runtime" + tag);
        } else {
            o.require(all_pass(rep, "lemma7.1.triple", &n), "triple relations" + tag);
            o.require(passes(rep, "complex.d1.d0") && passes(rep, "complex.d2.d1"), "corrected complex" + tag);
            o.require(passes(rep, "lemma7.1.printed_d1.rejected"), "displayed d1 rejected" + tag);
            n += 3;
        }
    }
    if (o.pass) {
        o.detail = std::to_string(n) + " exact checks over the (2p+4)q window, p = 5, 7";
    }
    return o;
}

Outcome criterion_3()
{
    Outcome o;
    std::size_t n = 0;
    for (const long p : {5L, 7L}) {
        const Report rep = cli::verify_target("lemma7.3", at(p));
        o.require(all_pass(rep, "lemma7.3", &n), "lemma7.3 at p=" + std::to_string(p));
        const std::string ps = std::to_string(p);
        // Independent spot values through the operation evaluator.
        hopf::BPContext ctx(p);
        const auto v = [&](int i) { return grading::Poly::generator(ctx.v(), i); };
        o.require(ctx.r_action(hopf::op_index({1}), v(1)).str() == ps, "R1 v1 = p");
        o.require(ctx.r_action(hopf::op_index({0, 1}), v(2)).str() == ps, "R01 v2 = p");
        o.require(ctx.r_action(hopf::op_index({1}), v(2)).str() == "-" + std::to_string(p + 1) + "*v1^" + ps,
                  "R1 v2 = -(p+1) v1^p");
    }
    if (o.pass) {
        o.detail = std::to_string(n) + " value and congruence records, p = 5, 7";
    }
    return o;
}

Outcome criterion_4()
{
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    hopf::BPContext ctx(7);
    const Report rep = opcalc::gamma1_pipeline(ctx);
    o.require(rep.passed(), "pipeline records");
    o.require(computed(rep, "lemma7.5.d0h1") == "[-v2^6; 0]*g1", "stage value lemma7.5");
    o.require(computed(rep, "lemma7.7.value") == "[2*v1^7*v2^4; 2*v1*v2^4]*g0", "stage value lemma7.7");
    o.require(computed(rep, "thm7.2.value") == "[-2*v2^4]*l", "final value");
    o.require(passes(rep, "thm7.2.indeterminacy.39q") && passes(rep, "thm7.2.indeterminacy.33q"),
              "indeterminacy scans");
    o.require(seconds_since(start) < 300.0, "runtime");
    if (o.pass) {
        o.detail = "-v2^6 g1 -> 2v1^7v2^4, 2v1v2^4 g0 -> -2v2^4 l mod (p, v1); scans in 39q, 33q contained";
    }
    return o;
}

Outcome criterion_5()
{
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    for (const long p : {5L, 7L}) {
        hopf::BPContext ctx(p);
        const Report rep = opcalc::betap_pipeline(ctx);
        o.require(rep.passed(), "records at p=" + std::to_string(p));
        o.require(computed(rep, "thm7.10.value") == "[v1^" + std::to_string(p - 1) + "]*g0",
                  "value at p=" + std::to_string(p));
    }
    o.require(seconds_since(start) < 120.0, "runtime");
    if (o.pass) {
        o.detail = "R[p^2] h = v1^(p-1) g0 in pi_*/(p), p = 5, 7";
    }
    return o;
}

Outcome criterion_6()
{
    Outcome o;
    std::size_t values = 0;
    for (const long p : {5L, 7L}) {
        const Report rep = cli::verify_target("lemma7.9", at(p));
        for (long r = p * p + 1; r < p * p + p; ++r) {
            const std::string base = "lemma7.9.r" + std::to_string(r);
            o.require(passes(rep, base + ".Rp2.v1r"), base + " vanishing mod p^p");
            o.require(passes(rep, base + ".table"), base + " coboundary table");
            o.require(passes(rep, base + ".integrality"), base + " integrality system");
            ++values;
        }
        o.require(rep.passed(), "all records at p=" + std::to_string(p));
    }
    if (o.pass) {
        o.detail = std::to_string(values) + " admissible r across p = 5, 7";
    }
    return o;
}

Outcome criterion_7()
{
    Outcome o;
    std::string counts;
    for (const long p : {5L, 7L}) {
        hopf::BPContext ctx(p);
        const Report rep = hopf::verify_structure(ctx, 2 * (p * p * p - 1));
        o.require(rep.passed(), "structure at p=" + std::to_string(p));
        counts += (counts.empty() ? "" : "; ") + std::string("p=") + std::to_string(p) + ": " +
                  computed(rep, "structure.cartan.right_unit");
    }
    if (o.pass) {
        o.detail = "round trip, psi integrality, Cartan = eta_R (" + counts + ")";
    }
    return o;
}

Outcome criterion_8(const std::filesystem::path& data)
{
    Outcome o;
    const auto library = catfrac::load_library(data / "categories");
    std::size_t categories = 0;
    std::size_t comparisons = 0;
    std::size_t monads = 0;
    for (const auto& file : library) {
        const auto& c = file.category;
        if (!file.classes.empty()) {
            ++categories;
        }
        for (const auto& [name, s] : file.classes) {
            if (!catfrac::check_fraction_axioms(c, s).passed()) {
                continue;
            }
            const auto loc = catfrac::localize(c, s);
            const auto zig = catfrac::zigzag_oracle(c, s);
            for (catfrac::ObjId x = 0; x < c.object_count(); ++x) {
                for (catfrac::ObjId y = 0; y < c.object_count(); ++y) {
                    const auto it = zig.classes.find({x, y});
                    const std::size_t theirs = it == zig.classes.end() ? 0 : it->second.size();
                    o.require(loc.category.hom(x, y).size() == theirs,
                              file.name + "." + name + " hom " + c.object_name(x) + "->" + c.object_name(y));
                }
            }
            ++comparisons;
        }
        for (const auto& m : file.monads) {
            o.require(catfrac::verify_universal_props(c, m, file.name).passed(), file.name + "." + m.name);
            ++monads;
        }
    }
    o.require(categories >= 6, "library has at least 6 categories with marked classes");
    o.require(monads >= 2, "library has at least 2 monads");
    std::size_t mutants = 0;
    for (const auto& file : catfrac::load_library(data / "mutants")) {
        for (const auto& m : file.monads) {
            o.require(!catfrac::verify_universal_props(file.category, m, file.name).passed(),
                      "mutant " + file.name + " rejected");
            ++mutants;
        }
    }
    o.require(mutants >= 2, "at least 2 mutants");
    if (o.pass) {
        o.detail = std::to_string(categories) + " categories, " + std::to_string(comparisons) +
                   " classes matched against zig-zags, " + std::to_string(monads) + " monads pass, " +
                   std::to_string(mutants) + " mutants rejected";
    }
    return o;
}

Outcome criterion_9()
{
    Outcome o;
    const auto groups = abloc::finite_groups_up_to(10000);
    o.require(groups.size() == 22184, "22184 isomorphism types of order <= 10^4");
    const std::vector<abloc::InvertedSet> sets{abloc::InvertedSet::of({2}), abloc::InvertedSet::all_except({2}),
                                               abloc::InvertedSet::of({3, 5})};
    std::size_t agreed = 0;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const auto& s = sets[i % sets.size()];
        const bool ok = abloc::fraction_oracle(groups[i], s) == abloc::localize(groups[i].invariants(), s);
        o.require(ok, groups[i].invariants().str() + " inverting " + s.str());
        agreed += ok ? 1 : 0;
    }

    const Report square = abloc::arithmetic_square(abloc::FGAbelianGroup::parse("Z/12"), {2});
    o.require(square.passed(), "arithmetic square records");
    o.require(!square.tables.empty() &&
                  square.tables[0].rows.at(0) == std::vector<std::string>{"Z/4 + Z/3", "Z/3", "Z/4", "0", "Z/4 + Z/3"},
              "square corners Z/3 (2 inverted), Z/4 (odd inverted), 0, pullback Z/12");

    std::mt19937 rng(9);
    std::size_t exact = 0;
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
        std::set<long> primes;
        for (const long p : {2L, 3L, 5L, 7L, 11L}) {
            if (rng() % 2) {
                primes.insert(p);
            }
        }
        const auto s = rng() % 3 == 0 ? abloc::InvertedSet::all_except(primes) : abloc::InvertedSet::of(primes);
        const Report rep = abloc::exactness_check(abloc::short_exact_sequence(a, c, split), s);
        o.require(rep.passed() && rep.records.size() == 3, "random sequence " + std::to_string(trial));
        exact += rep.passed() ? 1 : 0;
    }
    if (o.pass) {
        o.detail = std::to_string(agreed) + " groups agree with the fraction construction; square for Z/12 ok; " +
                   std::to_string(exact) + "/100 sequences stay exact";
    }
    return o;
}

}  // namespace

int main(int argc, char** argv)
{
    const std::filesystem::path data = argc > 1 ? std::filesystem::path(argv[1]) : std::filesystem::path(BPWB_DATA_DIR);
    const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
        {1, [] { return criterion_1_2(1); }},
        {2, [] { return criterion_1_2(2); }},
        {3, criterion_3},
        {4, criterion_4},
        {5, criterion_5},
        {6, criterion_6},
        {7, criterion_7},
        {8, [&] { return criterion_8(data); }},
        {9, criterion_9},
    };
    bool all = true;
    for (const auto& [n, run] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        char secs[32];
        std::snprintf(secs, sizeof secs, "%.1fs", seconds_since(start));
        std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << " (" << secs
                  << ")" << std::endl;
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
