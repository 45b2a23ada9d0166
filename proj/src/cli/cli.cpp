#include "shapespace/cli.hpp"

#include <cstdio>
#include <ostream>

#include "commands.hpp"

namespace shapespace::cli {

std::string format_double(double value) {
    if (value == 0.0) return "0";
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.15g", value);
    return buffer;
}

namespace {

void report(std::ostream& err, const char* kind, const std::string& message, const std::string* field) {
    detail::json error = {{"kind", kind}, {"message", message}, {"field", nullptr}};
    if (field) error["field"] = *field;
    err << detail::json{{"error", error}}.dump() << '\n';
}

}  // namespace

int run(const Options& options, std::ostream& err) {
    try {
        if (options.refine < 0) throw SchemaError("--refine", "must be >= 0");
        if (options.refine > 0 && options.command != Command::HunterSaxton) {
            throw SchemaError("--refine", "only the hs command supports refinement");
        }
        const detail::ProblemFile file = detail::load(options.input);
        std::error_code ec;
        std::filesystem::create_directories(options.out, ec);
        if (ec) throw detail::OutputError("cannot create " + options.out.string() + ": " + ec.message());
        const detail::Node root = file.root();
        switch (options.command) {
            case Command::Shoot: return detail::cmd_shoot(root, options, err);
            case Command::Match: return detail::cmd_match(root, options, err);
            case Command::Curvature: return detail::cmd_curvature(root, options, err);
            case Command::HunterSaxton: return detail::cmd_hs(root, options, err);
        }
        return kRuntimeError;
    } catch (const SchemaError& e) {
        report(err, e.kind(), e.what(), &e.field());
        return kValidationError;
    } catch (const InvalidArgument& e) {
        report(err, e.kind(), e.what(), nullptr);
        return kValidationError;
    } catch (const NumericalError& e) {
        report(err, e.kind(), e.what(), nullptr);
        return kNumericalError;
    } catch (const Error& e) {
        report(err, e.kind(), e.what(), nullptr);
        return kRuntimeError;
    } catch (const std::exception& e) {
        report(err, "InternalError", e.what(), nullptr);
        return kRuntimeError;
    }
}

}  // namespace shapespace::cli
