#include "bpwb/cli.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace bpwb;
using namespace bpwb::cli;

namespace {

const std::filesystem::path kData(BPWB_DATA_DIR);

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result call(std::vector<std::string> args)
{
    args.insert(args.begin(), "bpwb");
    std::ostringstream out;
    std::ostringstream err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name, const std::string& content)
{
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream(path) << content;
    return path;
}

}  // namespace

TEST_CASE("eval and localize-group examples")
{
    const auto r1 = call({"eval", "R[1]", "v2", "--prime", "7"});
    CHECK(r1.code == kPass);
    CHECK(r1.out == "-8*v1^7\n");
    CHECK(call({"eval", "R[1]", "v1", "--prime", "5"}).out == "5\n");
    CHECK(call({"eval", "R[0,1]", "v2", "--prime", "5"}).out == "5\n");
    CHECK(call({"eval", "R[1]", "v3", "--prime", "5", "--modulo", "(p, v1)"}).out == "-v2^5\n");
    // Composition applies the right-hand letter first.
    CHECK(call({"eval", "R[1]R[5] - R[5]R[1]", "v2", "--prime", "5"}).out ==
          call({"eval", "R[0,1]", "v2", "--prime", "5"}).out);

    const auto g = call({"localize-group", "Z/12", "--invert", "2"});
    CHECK(g.code == kPass);
    CHECK(g.out == "Z/3\n");
    CHECK(call({"localize-group", "Z/12", "--invert", "at:2"}).out == "Z/4\n");
    CHECK(call({"localize-group", "Z + Z/5", "--invert", "Q"}).out == "Q\n");
}

TEST_CASE("exit codes")
{
    CHECK(call({}).code == kUsage);
    CHECK(call({"frobnicate"}).code == kUsage);
    CHECK(call({"verify", "lemma9.9"}).code == kUsage);
    CHECK(call({"eval", "R[x]", "v2"}).code == kUsage);
    CHECK(call({"eval", "R[1]", "v2 +"}).code == kUsage);
    CHECK(call({"--prime", "4", "eval", "R[1]", "v2"}).code == kUsage);
    CHECK(call({"--prime", "2", "eval", "R[1]", "v2"}).code == kUsage);
    CHECK(call({"verify", "thm7.2", "--truncation", "2"}).code == kUsage);
    CHECK(call({"localize-group", "Z/12", "--invert", "6"}).code == kUsage);
    CHECK(call({"localize-group", "Z/12"}).code == kUsage);
    CHECK(call({"--format", "xml", "localize-group", "Z/12", "--invert", "2"}).code == kUsage);

    const auto trunc = call({"eval", "R[1]", "v7"});
    CHECK(trunc.code == kTruncation);
    CHECK(trunc.err.find("truncation") != std::string::npos);

    CHECK(call({"cat", "check", "/nonexistent/x.cat"}).code == kIo);
    CHECK(call({"localize-group", "Z/12", "--invert", "2", "--out", "/nonexistent/dir/r.json"}).code == kIo);

    const auto bad = temp_file("bpwb_bad.cat", "category bad\nobjects: a\nmor f : a -> a\ncompose f f = 1_a\n"
                                               "mor g : a -> a\ncompose g g = g\ncompose f g = g\ncompose g f = f\n");
    CHECK(call({"cat", "check", bad.string()}).code == kDomain);

    CHECK(call({"cat", "check", (kData / "mutants" / "twisted.cat").string()}).code == kCheckFailure);
    CHECK(call({"cat", "localize", (kData / "categories" / "parallel.cat").string()}).code == kCheckFailure);
    CHECK(call({"cat", "localize", (kData / "categories" / "parallel.cat").string(), "--class", "S"}).code == kPass);
    CHECK(call({"cat", "localize", (kData / "categories" / "parallel.cat").string(), "--class", "nope"}).code ==
          kUsage);
    CHECK(call({"--help"}).code == kPass);
}

TEST_CASE("verify targets")
{
    const auto thm = call({"verify", "thm7.2", "--prime", "7"});
    CHECK(thm.code == kPass);
    CHECK(thm.out.find("-2*v2^4") != std::string::npos);
    CHECK(thm.out.find("status: PASS") != std::string::npos);

    Config c;
    c.prime = 5;
    for (const auto& t : verify_targets()) {
        const Report rep = verify_target(t, c);
        CHECK_MESSAGE(rep.passed(), t);
        CHECK_FALSE(rep.records.empty());
        for (const auto& r : rep.records) {
            CHECK(!r.anchor.empty());
        }
    }
    const Report all = verify_target("all", c);
    CHECK(all.passed());
    std::size_t total = 0;
    for (const auto& t : verify_targets()) {
        total += verify_target(t, c).records.size();
    }
    CHECK(all.records.size() == total);
}

TEST_CASE("reports are deterministic and round-trip")
{
    const std::vector<std::string> args{"verify", "lemma7.3", "--prime", "5", "--format", "json"};
    const auto a = call(args);
    const auto b = call(args);
    CHECK(a.code == kPass);
    CHECK(a.out == b.out);
    const auto j = nlohmann::ordered_json::parse(a.out);
    CHECK(j.at("schema") == kSchema);
    CHECK(j.at("status") == "pass");
    CHECK(j.at("config").at("prime") == 5);
    CHECK_FALSE(j.contains("timing"));
    CHECK(j.begin().key() == "schema");

    const Report rep = from_json(j);
    Config c;
    c.prime = 5;
    c.format = "json";
    CHECK(to_json(rep, c, j.at("command").get<std::string>()).dump(2) + "\n" == a.out);

    auto timed = args;
    timed.emplace_back("--timing");
    const auto t = nlohmann::ordered_json::parse(call(timed).out);
    CHECK(t.contains("timing"));
    auto stripped = t;
    stripped.erase("timing");
    CHECK(stripped.dump() == j.dump());

    const auto text1 = call({"verify", "lemma7.9", "--prime", "5"});
    const auto text2 = call({"verify", "lemma7.9", "--prime", "5"});
    CHECK(text1.out == text2.out);

    const auto path = std::filesystem::temp_directory_path() / "bpwb_out.json";
    std::filesystem::remove(path);
    CHECK(call({"localize-group", "Z/12", "--invert", "2", "--format", "json", "--out", path.string()}).out.empty());
    std::ifstream in(path);
    const auto written = nlohmann::ordered_json::parse(in);
    CHECK(written.at("records").at(0).at("computed") == "Z/3");
    CHECK(written.at("records").at(0).at("expected") == "Z/3");
}

TEST_CASE("environment overrides")
{
    setenv("BPWB_PRIME", "5", 1);
    const auto r = call({"eval", "R[1]", "v2"});
    unsetenv("BPWB_PRIME");
    CHECK(r.out == "-6*v1^5\n");
    CHECK(call({"eval", "R[1]", "v2"}).out == "-8*v1^7\n");
    setenv("BPWB_FORMAT", "json", 1);
    const auto j = call({"localize-group", "Z/12", "--invert", "3"});
    unsetenv("BPWB_FORMAT");
    CHECK(nlohmann::ordered_json::parse(j.out).at("records").at(0).at("computed") == "Z/4");
}
