#include "bpwb/cli.hpp"

#include "bpwb/abloc.hpp"
#include "bpwb/catfrac.hpp"
#include "bpwb/hopf.hpp"
#include "bpwb/opcalc.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace bpwb::cli {
namespace {

using grading::Alphabet;
using grading::Poly;
using grading::TermIdeal;
using hopf::BPContext;

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

bool starts_with(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

/// Records of `rep` belonging to `target`, with all tables and trace lines that mention it.
Report select(const Report& rep, const std::string& target)
{
    Report out;
    out.title = target;
    for (const auto& r : rep.records) {
        if (r.anchor == target || starts_with(r.id, target + ".") || r.id == target) {
            out.records.push_back(r);
        }
    }
    for (const auto& t : rep.tables) {
        if (starts_with(t.name, target)) {
            out.tables.push_back(t);
        }
    }
    for (const auto& line : rep.trace) {
        if (line.find(target) != std::string::npos) {
            out.trace.push_back(line);
        }
    }
    return out;
}

Report verify_complex(BPContext& ctx, long bound)
{
    const long p = ctx.prime();
    Report rep = opcalc::check_complex(ctx, {opcalc::d0(p), opcalc::d1(p), opcalc::d2(p)}, bound, "lemma7.1");
    const Report printed =
        opcalc::check_complex(ctx, {opcalc::d0(p), opcalc::d1_printed(p), opcalc::d2(p)}, bound, "lemma7.1");
    std::string witness;
    for (const auto& r : printed.records) {
        if (!r.pass) {
            witness = r.id + ": " + r.computed;
            break;
        }
    }
    const auto defects = opcalc::d1_printed(p).degree_defects(ctx.t());
    rep.add(record("lemma7.1.printed_d1.rejected", "lemma7.1", !printed.passed(),
                   "the displayed d1 does not give a complex", printed.passed() ? "complex" : "not a complex",
                   witness, defects.empty() ? "" : "degree defect " + defects.front()));
    return rep;
}

Report run_target(const std::string& target, BPContext& ctx, long bound)
{
    const long p = ctx.prime();
    if (target == "lemma7.1") {
        Report rep = hopf::verify_lemma_7_1(ctx, bound);
        rep.append(verify_complex(ctx, bound));
        return rep;
    }
    if (target == "lemma7.3") {
        Report rep = opcalc::verify_lemma_7_3(ctx);
        rep.append(hopf::action_tables(ctx));
        rep.title = target;
        return rep;
    }
    if (target == "lemma7.5" || target == "lemma7.7" || target == "thm7.2") {
        return select(opcalc::gamma1_pipeline(ctx), target);
    }
    if (target == "lemma7.9") {
        Report rep;
        rep.title = target;
        for (long r = p * p + 1; r < p * p + p; ++r) {
            rep.append(opcalc::ext1_invariant(ctx, r));
        }
        return rep;
    }
    if (target == "thm7.10") {
        Report rep = opcalc::betap_pipeline(ctx);
        rep.title = target;
        return rep;
    }
    if (target == "structure") {
        return hopf::verify_structure(ctx, ctx.v().degree(3));
    }
    throw ParseError("unknown verify target '" + target + "'");
}

std::string pad(const std::string& s, std::size_t width) { return s + std::string(width - std::min(width, s.size()), ' '); }

}  // namespace

void Config::validate() const
{
    if (prime < 3 || !arith::is_prime(prime)) {
        throw ParseError("--prime must be an odd prime, got " + std::to_string(prime));
    }
    if (truncation < 1 || truncation > grading::kMaxGenerators) {
        throw ParseError("--truncation must lie in 1.." + std::to_string(grading::kMaxGenerators));
    }
    if (degree_bound && *degree_bound < 0) {
        throw ParseError("--degree-bound must be non-negative");
    }
    if (format != "json" && format != "text") {
        throw ParseError("--format must be json or text");
    }
}

const std::vector<std::string>& verify_targets()
{
    static const std::vector<std::string> targets{"lemma7.1", "lemma7.3", "lemma7.5", "lemma7.7",
                                                  "thm7.2",   "lemma7.9", "thm7.10",  "structure"};
    return targets;
}

Report verify_target(const std::string& target, const Config& config)
{
    config.validate();
    if (target != "all" && std::find(verify_targets().begin(), verify_targets().end(), target) == verify_targets().end()) {
        throw ParseError("unknown verify target '" + target + "'");
    }
    if (config.truncation < 3) {
        throw ParseError("verification needs --truncation >= 3");
    }
    BPContext ctx(config.prime, config.truncation);
    const long bound = config.bound_in_q() * ctx.q();
    if (target != "all") {
        return run_target(target, ctx, bound);
    }
    Report rep;
    rep.title = "all";
    // One pipeline run serves the three gamma_1 targets.
    const Report gamma = opcalc::gamma1_pipeline(ctx);
    for (const auto& t : verify_targets()) {
        if (t == "lemma7.5" || t == "lemma7.7" || t == "thm7.2") {
            rep.append(select(gamma, t));
        } else {
            rep.append(run_target(t, ctx, bound));
        }
    }
    return rep;
}

Report eval(const std::string& op, const std::string& poly, const std::string& modulo, const Config& config)
{
    config.validate();
    BPContext ctx(config.prime, config.truncation);
    const hopf::OpExpr e = hopf::OpExpr::parse(op, config.prime);
    const Poly x = Poly::parse(poly, ctx.v());
    if (x.alphabet().letter != grading::Letter::V) {
        throw ParseError("eval acts on polynomials in v");
    }
    Poly acc(ctx.v());
    for (const auto& [w, c] : e.terms()) {
        Poly y = x;
        for (auto it = w.rbegin(); it != w.rend() && !y.is_zero(); ++it) {
            y = ctx.r_action(*it, y);
        }
        acc += y * c;
    }
    std::string mod = "exact";
    if (!modulo.empty()) {
        const TermIdeal ideal = TermIdeal::parse(modulo, config.prime);
        acc = grading::reduce_mod(acc, ideal);
        mod = ideal.str();
    }
    Report rep;
    rep.title = "eval";
    CheckRecord r = record("eval", "eval", true, "", acc.str());
    r.modulus = mod;
    r.note = e.str() + " applied to " + x.str();
    rep.add(std::move(r));
    return rep;
}

Report localize_group(const std::string& group, const std::string& invert)
{
    const auto m = abloc::FGAbelianGroup::parse(group);
    const auto s = abloc::InvertedSet::parse(invert);
    const auto local = abloc::localize(m, s);
    Report rep;
    rep.title = "localize-group";
    std::string oracle = "not applicable: infinite group";
    bool pass = true;
    if (m.rank == 0 && m.torsion_order() <= 10000) {
        const auto lit = abloc::fraction_oracle(abloc::FiniteGroup{m.torsion}, s);
        oracle = lit.str();
        pass = lit == local;
    }
    CheckRecord r = record("localize-group", "localize", pass, oracle, local.str());
    r.note = m.str() + " with " + s.str() + " inverted; expected column is the fraction construction";
    rep.add(std::move(r));
    return rep;
}

Report cat_localize(const std::string& path, const std::string& only_class)
{
    const catfrac::CatFile file = catfrac::load_cat(path);
    const auto& c = file.category;
    Report rep;
    rep.title = "cat localize " + file.name;
    bool found = false;
    for (const auto& [name, s] : file.classes) {
        if (!only_class.empty() && name != only_class) {
            continue;
        }
        found = true;
        const std::string label = file.name + "." + name;
        const Report axioms = catfrac::check_fraction_axioms(c, s, label);
        rep.append(axioms);
        if (!axioms.passed()) {
            rep.trace.push_back(label + ": " + catfrac::class_str(c, s) + " is not a right calculus; not localized");
            continue;
        }
        const auto loc = catfrac::localize(c, s);
        const auto zig = catfrac::zigzag_oracle(c, s);
        Table tab{label + ".homs", {"X", "Y", "|S^-1 C(X,Y)|", "zig-zag classes"}, {}};
        std::string witness;
        for (catfrac::ObjId x = 0; x < c.object_count(); ++x) {
            for (catfrac::ObjId y = 0; y < c.object_count(); ++y) {
                const std::size_t ours = loc.category.hom(x, y).size();
                const auto it = zig.classes.find({x, y});
                const std::size_t theirs = it == zig.classes.end() ? 0 : it->second.size();
                tab.rows.push_back({c.object_name(x), c.object_name(y), std::to_string(ours), std::to_string(theirs)});
                if (ours != theirs && witness.empty()) {
                    witness = c.object_name(x) + " -> " + c.object_name(y);
                }
            }
        }
        rep.tables.push_back(std::move(tab));
        rep.add(record(label + ".oracle", "localize", witness.empty(), "hom-set sizes of the zig-zag oracle",
                       witness.empty() ? "agree" : "differ", witness,
                       "oracle word length " + std::to_string(zig.length)));
        rep.add(record(label + ".q_invertible", "localize", catfrac::q_invertible(c, loc) == s, catfrac::class_str(c, s),
                       catfrac::class_str(c, catfrac::q_invertible(c, loc)), "", "morphisms inverted by Q"));
    }
    if (!found) {
        throw ParseError(only_class.empty() ? "no classes in " + path : "no class '" + only_class + "' in " + path);
    }
    return rep;
}

Report cat_check(const std::string& path)
{
    const catfrac::CatFile file = catfrac::load_cat(path);
    Report rep;
    rep.title = "cat check " + file.name;
    if (file.monads.empty()) {
        throw ParseError("no monads in " + path);
    }
    for (const auto& m : file.monads) {
        rep.append(catfrac::verify_universal_props(file.category, m, file.name));
    }
    return rep;
}

nlohmann::ordered_json to_json(const Report& report, const Config& config, const std::string& command,
                               std::optional<double> seconds)
{
    using nlohmann::ordered_json;
    ordered_json j;
    j["schema"] = kSchema;
    j["tool"] = "bpwb";
    j["version"] = kVersion;
    j["command"] = command;
    j["config"] = {{"prime", config.prime},
                   {"truncation", config.truncation},
                   {"degree_bound_q", config.bound_in_q()},
                   {"format", config.format}};
    if (seconds) {
        j["timing"] = {{"seconds", *seconds}};
    }
    j["title"] = report.title;
    j["status"] = report.passed() ? "pass" : "fail";
    const auto passed = std::count_if(report.records.begin(), report.records.end(), [](const auto& r) { return r.pass; });
    j["summary"] = {{"records", report.records.size()}, {"passed", passed}};
    j["records"] = ordered_json::array();
    for (const auto& r : report.records) {
        j["records"].push_back({{"id", r.id},
                                {"anchor", r.anchor},
                                {"status", r.pass ? "pass" : "fail"},
                                {"expected", r.expected},
                                {"computed", r.computed},
                                {"modulus", r.modulus},
                                {"witness", r.witness},
                                {"note", r.note}});
    }
    j["tables"] = ordered_json::array();
    for (const auto& t : report.tables) {
        j["tables"].push_back({{"name", t.name}, {"columns", t.columns}, {"rows", t.rows}});
    }
    j["trace"] = report.trace;
    return j;
}

Report from_json(const nlohmann::ordered_json& j)
{
    if (j.at("schema") != kSchema) {
        throw ParseError("unsupported report schema");
    }
    Report rep;
    rep.title = j.at("title").get<std::string>();
    for (const auto& r : j.at("records")) {
        CheckRecord rec;
        rec.id = r.at("id").get<std::string>();
        rec.anchor = r.at("anchor").get<std::string>();
        rec.pass = r.at("status") == "pass";
        rec.expected = r.at("expected").get<std::string>();
        rec.computed = r.at("computed").get<std::string>();
        rec.modulus = r.at("modulus").get<std::string>();
        rec.witness = r.at("witness").get<std::string>();
        rec.note = r.at("note").get<std::string>();
        rep.records.push_back(std::move(rec));
    }
    for (const auto& t : j.at("tables")) {
        rep.tables.push_back(Table{t.at("name").get<std::string>(), t.at("columns").get<std::vector<std::string>>(),
                                   t.at("rows").get<std::vector<std::vector<std::string>>>()});
    }
    rep.trace = j.at("trace").get<std::vector<std::string>>();
    return rep;
}

std::string to_text(const Report& report, const Config& config, const std::string& command, std::optional<double> seconds)
{
    std::ostringstream os;
    os << kSchema << "  bpwb " << kVersion << "\n";
    os << "command: " << command << "\n";
    os << "config:  prime=" << config.prime << " truncation=" << config.truncation
       << " degree-bound=" << config.bound_in_q() << "q\n";
    if (seconds) {
        os << "timing:  " << std::fixed << std::setprecision(3) << *seconds << "s\n";
    }
    std::size_t width = 0;
    for (const auto& r : report.records) {
        width = std::max(width, r.id.size());
    }
    os << "\n";
    for (const auto& r : report.records) {
        os << (r.pass ? "PASS  " : "FAIL  ") << pad(r.id, width) << "  [" << r.anchor << "]\n";
        if (!r.expected.empty()) {
            os << "      expected: " << r.expected << "\n";
        }
        os << "      computed: " << r.computed << "\n";
        if (r.modulus != "exact" && !r.modulus.empty()) {
            os << "      modulo:   " << r.modulus << "\n";
        }
        if (!r.witness.empty()) {
            os << "      witness:  " << r.witness << "\n";
        }
        if (!r.note.empty()) {
            os << "      note:     " << r.note << "\n";
        }
    }
    for (const auto& t : report.tables) {
        std::vector<std::size_t> w(t.columns.size(), 0);
        for (std::size_t i = 0; i < t.columns.size(); ++i) {
            w[i] = t.columns[i].size();
        }
        for (const auto& row : t.rows) {
            for (std::size_t i = 0; i < row.size() && i < w.size(); ++i) {
                w[i] = std::max(w[i], row[i].size());
            }
        }
        os << "\ntable " << t.name << "\n";
        auto line = [&](const std::vector<std::string>& cells) {
            os << " ";
            for (std::size_t i = 0; i < cells.size() && i < w.size(); ++i) {
                os << " " << (i + 1 == cells.size() ? cells[i] : pad(cells[i], w[i]));
            }
            os << "\n";
        };
        line(t.columns);
        for (const auto& row : t.rows) {
            line(row);
        }
    }
    if (!report.trace.empty()) {
        os << "\ntrace\n";
        for (const auto& l : report.trace) {
            os << "  " << l << "\n";
        }
    }
    const auto passed = std::count_if(report.records.begin(), report.records.end(), [](const auto& r) { return r.pass; });
    os << "\nstatus: " << (report.passed() ? "PASS" : "FAIL") << " (" << passed << "/" << report.records.size()
       << " records)\n";
    return os.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Config config;
    CLI::App app{"BP operation and localization workbench", "bpwb"};
    app.fallthrough();
    app.require_subcommand(1);
    app.add_option("--prime", config.prime, "odd prime p")->envname("BPWB_PRIME");
    app.add_option("--truncation", config.truncation, "number of v generators kept")->envname("BPWB_TRUNCATION");
    app.add_option("--degree-bound", config.degree_bound, "pairing window in units of q (default 2p+4)")
        ->envname("BPWB_DEGREE_BOUND");
    app.add_option("--format", config.format, "json or text")->envname("BPWB_FORMAT");
    app.add_option("--out", config.out, "write the report to this path")->envname("BPWB_OUT");
    app.add_flag("--timing", config.timing, "record wall-clock time in the report header")->envname("BPWB_TIMING");

    std::string target;
    auto* verify = app.add_subcommand("verify", "run a verification target");
    std::vector<std::string> choices = verify_targets();
    choices.emplace_back("all");
    verify->add_option("target", target, "target")->required()->check(CLI::IsMember(choices));

    std::string op;
    std::string poly;
    std::string modulo;
    auto* ev = app.add_subcommand("eval", "apply an operation to a polynomial");
    ev->add_option("operation", op, "e.g. R[1] or R[1]R[7] - R[7]R[1]")->required();
    ev->add_option("poly", poly, "e.g. v2 or 3*v1^2*v2")->required();
    ev->add_option("--modulo", modulo, "reduce modulo a monomial ideal, e.g. \"(p, v1)\"");

    std::string group;
    std::string invert;
    auto* lg = app.add_subcommand("localize-group", "localize a finitely generated abelian group");
    lg->add_option("group", group, "e.g. \"Z^2 + Z/12\"")->required();
    lg->add_option("--invert", invert, "primes to invert: 2,3 | at:2 | Q | none")->required();

    std::string file;
    std::string only_class;
    auto* cat = app.add_subcommand("cat", "finite categories of fractions");
    cat->require_subcommand(1);
    auto* cat_loc = cat->add_subcommand("localize", "localize every marked class");
    cat_loc->add_option("file", file, "category description")->required();
    cat_loc->add_option("--class", only_class, "only this class");
    auto* cat_chk = cat->add_subcommand("check", "check every monad and its universal properties");
    cat_chk->add_option("file", file, "category description")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kPass;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }

    std::string command;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (starts_with(args[i], "--out") || (i > 1 && args[i - 1] == "--out") || args[i] == "--timing") {
            continue;
        }
        command += (command.empty() ? "" : " ") + args[i];
    }

    try {
        config.validate();
        if ((!file.empty()) && !std::filesystem::exists(file)) {
            err << "error: cannot read " << file << "\n";
            return kIo;
        }
        const auto start = std::chrono::steady_clock::now();
        Report rep;
        bool short_text = false;
        if (verify->parsed()) {
            rep = verify_target(target, config);
        } else if (ev->parsed()) {
            rep = eval(op, poly, modulo, config);
            short_text = true;
        } else if (lg->parsed()) {
            rep = localize_group(group, invert);
            short_text = true;
        } else if (cat_loc->parsed()) {
            rep = cat_localize(file, only_class);
        } else {
            rep = cat_check(file);
        }
        std::optional<double> seconds;
        if (config.timing) {
            seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        }

        std::string text;
        if (config.format == "json") {
            text = to_json(rep, config, command, seconds).dump(2) + "\n";
        } else if (short_text && !rep.records.empty() && !config.timing) {
            text = rep.records.front().computed + "\n";
        } else {
            text = to_text(rep, config, command, seconds);
        }
        if (config.out.empty()) {
            out << text;
        } else {
            std::ofstream f(config.out, std::ios::binary);
            f << text;
            if (!f) {
                err << "error: cannot write " << config.out << "\n";
                return kIo;
            }
        }
        return rep.passed() ? kPass : kCheckFailure;
    } catch (const TruncationError& e) {
        err << "truncation error: " << e.what() << "\n";
        return kTruncation;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << "\n";
        return kDomain;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kDomain;
    }
}

}  // namespace bpwb::cli
