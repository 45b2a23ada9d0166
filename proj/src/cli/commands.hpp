#pragma once

#include <ostream>

#include "json_input.hpp"

namespace shapespace::cli::detail {

/// File system failure while writing results.
class OutputError : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char* kind() const noexcept override { return "OutputError"; }
};

json number(double value);
void write_json(const std::filesystem::path& path, const json& document);
void write_text(const std::filesystem::path& path, const std::string& text);

int cmd_shoot(const Node& root, const Options& options, std::ostream& err);
int cmd_match(const Node& root, const Options& options, std::ostream& err);
int cmd_curvature(const Node& root, const Options& options, std::ostream& err);
int cmd_hs(const Node& root, const Options& options, std::ostream& err);

}  // namespace shapespace::cli::detail
