#include "json_input.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

namespace shapespace::cli::detail {

namespace {

std::string child_path(const std::string& parent, const char* key) {
    return parent.empty() ? std::string(key) : parent + "." + key;
}

const char* type_name(const json& v) {
    return v.type_name();
}

}  // namespace

void Node::fail(const std::string& what) const {
    throw SchemaError(path_.empty() ? std::string("(root)") : path_, what);
}

void Node::require_object() const {
    if (!value_->is_object()) fail(std::string("expected an object, got ") + type_name(*value_));
}

bool Node::has(const char* key) const {
    require_object();
    return value_->contains(key);
}

Node Node::at(const char* key) const {
    require_object();
    const auto it = value_->find(key);
    if (it == value_->end()) throw SchemaError(child_path(path_, key), "required field is missing");
    return Node(*it, child_path(path_, key));
}

std::optional<Node> Node::find(const char* key) const {
    require_object();
    const auto it = value_->find(key);
    if (it == value_->end()) return std::nullopt;
    return Node(*it, child_path(path_, key));
}

Node Node::at(std::size_t index) const {
    if (!value_->is_array()) fail(std::string("expected an array, got ") + type_name(*value_));
    if (index >= value_->size()) fail("index " + std::to_string(index) + " out of range");
    return Node((*value_)[index], path_ + "[" + std::to_string(index) + "]");
}

std::size_t Node::size() const {
    if (!value_->is_array()) fail(std::string("expected an array, got ") + type_name(*value_));
    return value_->size();
}

double Node::number() const {
    if (!value_->is_number()) fail(std::string("expected a number, got ") + type_name(*value_));
    const double v = value_->get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
}

double Node::positive() const {
    const double v = number();
    if (!(v > 0.0)) fail("must be positive");
    return v;
}

double Node::non_negative() const {
    const double v = number();
    if (!(v >= 0.0)) fail("must be non-negative");
    return v;
}

int Node::integer(int min) const {
    if (!value_->is_number_integer()) fail(std::string("expected an integer, got ") + type_name(*value_));
    const auto v = value_->get<long long>();
    if (v < min) fail("must be >= " + std::to_string(min));
    if (v > 1000000000LL) fail("is unreasonably large");
    return int(v);
}

std::string Node::string() const {
    if (!value_->is_string()) fail(std::string("expected a string, got ") + type_name(*value_));
    return value_->get<std::string>();
}

std::vector<double> Node::numbers() const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = at(i).number();
    return out;
}

PointArray Node::rows(Eigen::Index expected_rows, Eigen::Index expected_cols) const {
    const auto n = Eigen::Index(size());
    if (n == 0) fail("must contain at least one row");
    if (expected_rows >= 0 && n != expected_rows) {
        fail("expected " + std::to_string(expected_rows) + " rows, got " + std::to_string(n));
    }
    const Eigen::Index cols = expected_cols >= 0 ? expected_cols : Eigen::Index(at(std::size_t{0}).size());
    if (cols == 0) fail("rows must not be empty");
    PointArray out(n, cols);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Node row = at(std::size_t(i));
        if (Eigen::Index(row.size()) != cols) {
            row.fail("expected " + std::to_string(cols) + " coordinates, got " + std::to_string(row.size()));
        }
        for (Eigen::Index a = 0; a < cols; ++a) out(i, a) = row.at(std::size_t(a)).number();
    }
    return out;
}

double number_or(const std::optional<Node>& parent, const char* key, double fallback) {
    if (!parent) return fallback;
    const auto child = parent->find(key);
    return child ? child->number() : fallback;
}

int integer_or(const std::optional<Node>& parent, const char* key, int fallback, int min) {
    if (!parent) return fallback;
    const auto child = parent->find(key);
    return child ? child->integer(min) : fallback;
}

ProblemFile load(const std::filesystem::path& input) {
    std::ifstream in(input);
    if (!in) throw SchemaError("--input", "cannot open " + input.string());
    ProblemFile file;
    try {
        file.document = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError("(root)", std::string("malformed JSON: ") + e.what());
    }
    const Node root = file.root();
    if (!root.raw().is_object()) root.fail("top level must be an object");
    const std::string version = root.at("schema_version").string();
    if (version != kSchemaVersion) {
        throw SchemaError("schema_version", "unsupported version '" + version + "' (expected '" +
                                                kSchemaVersion + "')");
    }
    return file;
}

KernelSpec parse_kernel(const Node& root) {
    const Node kernel = root.at("kernel");
    std::string family = "gaussian";
    if (const auto f = kernel.find("family")) {
        family = f->string();
        std::transform(family.begin(), family.end(), family.begin(),
                       [](unsigned char c) { return char(std::tolower(c)); });
        if (family != "gaussian") f->fail("unknown kernel family '" + f->string() + "'");
    }
    return KernelSpec(kernel.at("sigma").positive(), KernelFamily::Gaussian);
}

Landmarks parse_landmarks(const Node& node) {
    PointArray p = node.rows();
    try {
        return Landmarks(std::move(p));
    } catch (const InvalidLandmarks& e) {
        node.fail(e.what());
    }
}

ShootOptions parse_shoot_options(const std::optional<Node>& node) {
    ShootOptions opts;
    opts.drift_bound = number_or(node, "drift_bound", opts.drift_bound);
    opts.collision_factor = number_or(node, "collision_factor", opts.collision_factor);
    if (!(opts.drift_bound > 0.0)) node->at("drift_bound").fail("must be positive");
    if (!(opts.collision_factor >= 0.0)) node->at("collision_factor").fail("must be non-negative");
    return opts;
}

Eigen::VectorXd GridFunctionSpec::sample(const hs::Grid1D& grid) const {
    if (samples) {
        if (samples->size() != grid.size()) {
            throw SchemaError(path, "expected " + std::to_string(grid.size()) + " samples (grid.intervals + 1), got " +
                                        std::to_string(samples->size()));
        }
        return *samples;
    }
    Eigen::VectorXd out = Eigen::VectorXd::Zero(grid.size());
    for (const Bump& b : bumps) out += hs::smooth_bump(grid, b.center, b.half_width, b.amplitude);
    return out;
}

GridFunctionSpec parse_grid_function(const Node& node) {
    GridFunctionSpec spec;
    spec.path = node.path();
    if (node.raw().is_array()) {
        const std::vector<double> v = node.numbers();
        spec.samples = Eigen::Map<const Eigen::VectorXd>(v.data(), Eigen::Index(v.size()));
        return spec;
    }
    const Node bumps = node.at("bumps");
    for (std::size_t i = 0; i < bumps.size(); ++i) {
        const Node b = bumps.at(i);
        spec.bumps.push_back({b.at("center").number(), b.at("half_width").positive(), b.at("amplitude").number()});
    }
    return spec;
}

}  // namespace shapespace::cli::detail
