#pragma once

#include "bpwb/report.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace bpwb::cli {

inline constexpr const char* kSchema = "bpwb-report/1";
inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
    kPass = 0,
    kCheckFailure = 1,
    kUsage = 2,
    kTruncation = 3,
    kDomain = 4,
    kIo = 5,
};

struct Config {
    long prime = 7;
    int truncation = 4;
    /// Pairing window in units of q; defaults to 2p + 4.
    std::optional<long> degree_bound;
    std::string format = "text";
    std::string out;
    bool timing = false;

    [[nodiscard]] long bound_in_q() const { return degree_bound.value_or(2 * prime + 4); }
    /// Throws ParseError unless p is an odd prime and the truncation is at least 1.
    void validate() const;
};

/// Targets accepted by `verify`, in the order `all` runs them.
const std::vector<std::string>& verify_targets();

/// One verification target at the configured prime; `all` concatenates every target.
/// Throws ParseError for unknown targets or a truncation below 3.
Report verify_target(const std::string& target, const Config& config);

/// Applies an operation literal to a polynomial literal, optionally reduced modulo an ideal.
Report eval(const std::string& op, const std::string& poly, const std::string& modulo, const Config& config);

Report localize_group(const std::string& group, const std::string& invert);

/// Fraction axioms per class, and for classes satisfying them the localized hom-sets against
/// the zig-zag oracle.
Report cat_localize(const std::string& path, const std::string& only_class);
/// Monad checks and universal properties for every monad in the file.
Report cat_check(const std::string& path);

nlohmann::ordered_json to_json(const Report& report, const Config& config, const std::string& command,
                               std::optional<double> seconds = std::nullopt);
/// Inverse of to_json on the report body.
Report from_json(const nlohmann::ordered_json& j);
std::string to_text(const Report& report, const Config& config, const std::string& command,
                    std::optional<double> seconds = std::nullopt);

/// Full command line including the program name. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bpwb::cli
