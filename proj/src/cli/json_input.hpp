#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "shapespace/cli.hpp"
#include "shapespace/geodesic.hpp"
#include "shapespace/hunter_saxton.hpp"
#include "shapespace/kernel.hpp"
#include "shapespace/landmarks.hpp"

namespace shapespace::cli::detail {

using nlohmann::json;

/// Read-only view of a JSON value that remembers its path, so every
/// validation failure can name the offending field.
class Node {
public:
    Node(const json& value, std::string path) : value_(&value), path_(std::move(path)) {}

    [[nodiscard]] const std::string& path() const noexcept { return path_; }
    [[nodiscard]] const json& raw() const noexcept { return *value_; }

    [[nodiscard]] bool has(const char* key) const;
    [[nodiscard]] Node at(const char* key) const;
    [[nodiscard]] std::optional<Node> find(const char* key) const;
    [[nodiscard]] Node at(std::size_t index) const;
    [[nodiscard]] std::size_t size() const;

    [[nodiscard]] double number() const;
    [[nodiscard]] double positive() const;
    [[nodiscard]] double non_negative() const;
    [[nodiscard]] int integer(int min) const;
    [[nodiscard]] std::string string() const;
    [[nodiscard]] std::vector<double> numbers() const;
    /// Nested rows x cols array; cols is taken from the first row when
    /// negative and rows must be >= 1.
    [[nodiscard]] PointArray rows(Eigen::Index expected_rows = -1, Eigen::Index expected_cols = -1) const;

    [[noreturn]] void fail(const std::string& what) const;

private:
    void require_object() const;
    const json* value_;
    std::string path_;
};

double number_or(const std::optional<Node>& parent, const char* key, double fallback);
int integer_or(const std::optional<Node>& parent, const char* key, int fallback, int min);

struct ProblemFile {
    json document;
    Node root() const { return Node(document, ""); }
};

/// Parses the file and checks schema_version.
ProblemFile load(const std::filesystem::path& input);

KernelSpec parse_kernel(const Node& root);
Landmarks parse_landmarks(const Node& node);
ShootOptions parse_shoot_options(const std::optional<Node>& node);

/// A grid function given either as explicit samples or as a sum of bumps.
struct GridFunctionSpec {
    std::optional<Eigen::VectorXd> samples;
    struct Bump {
        double center;
        double half_width;
        double amplitude;
    };
    std::vector<Bump> bumps;
    std::string path;

    [[nodiscard]] bool refinable() const { return !samples.has_value(); }
    [[nodiscard]] Eigen::VectorXd sample(const hs::Grid1D& grid) const;
};

GridFunctionSpec parse_grid_function(const Node& node);

}  // namespace shapespace::cli::detail
