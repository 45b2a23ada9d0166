#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "shapespace/error.hpp"

namespace shapespace::cli {

/// Version written into every output header and summary.
inline constexpr const char* kSchemaVersion = "1";

/// Exit codes of the driver.
enum ExitCode : int {
    kOk = 0,
    kRuntimeError = 1,
    kValidationError = 2,
    kNumericalError = 3,
};

/// Invalid problem file; `field` is a JSON path such as `kernel.sigma` or
/// `landmarks[2][0]`.
class SchemaError : public InvalidArgument {
public:
    SchemaError(std::string field, const std::string& what)
        : InvalidArgument(field + ": " + what), field_(std::move(field)) {}
    [[nodiscard]] const char* kind() const noexcept override { return "SchemaError"; }
    [[nodiscard]] const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

enum class Command { Shoot, Match, Curvature, HunterSaxton };

struct Options {
    Command command = Command::Shoot;
    std::filesystem::path input;
    std::filesystem::path out;
    /// curvature: add the finite-difference oracle to every report
    bool oracle = false;
    /// hs: number of (h, dt) halvings for the residual refinement table
    int refine = 0;
    /// match: seed of the multistart generator
    std::uint64_t seed = 0;
};

/// Runs one command, writing its files under options.out. Errors are
/// reported as one JSON object on `err`; the return value is the exit code.
int run(const Options& options, std::ostream& err);

/// `%.15g` with negative zero printed as 0.
[[nodiscard]] std::string format_double(double value);

}  // namespace shapespace::cli
