#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "shapespace/cli.hpp"
#include "shapespace/geodesic.hpp"
#include "test_support.hpp"

using namespace shapespace;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kData = SHAPESPACE_TEST_DATA_DIR;
const fs::path kGolden = SHAPESPACE_TEST_GOLDEN_DIR;

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("shapespace_test_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

fs::path write_input(const fs::path& dir, const json& doc) {
    const fs::path p = dir / "input.json";
    std::ofstream(p) << doc.dump(2);
    return p;
}

struct Outcome {
    int code;
    std::string err;
    fs::path out;
};

Outcome run_cli(cli::Command command, const fs::path& input, const fs::path& out, bool oracle = false,
                int refine = 0, std::uint64_t seed = 0) {
    cli::Options o;
    o.command = command;
    o.input = input;
    o.out = out;
    o.oracle = oracle;
    o.refine = refine;
    o.seed = seed;
    std::ostringstream err;
    const int code = cli::run(o, err);
    return {code, err.str(), out};
}

json base_problem() {
    return {{"schema_version", "1"},
            {"kernel", {{"family", "gaussian"}, {"sigma", 1.0}}},
            {"landmarks", {{0.0, 0.0}, {1.0, 0.0}}}};
}

json error_of(const Outcome& r) {
    REQUIRE(!r.err.empty());
    return json::parse(r.err).at("error");
}

std::vector<std::vector<double>> csv_rows(const fs::path& p) {
    std::istringstream in(slurp(p));
    std::string line;
    std::vector<std::vector<double>> rows;
    int skipped = 0;
    while (std::getline(in, line)) {
        if (skipped < 2) {
            ++skipped;
            continue;
        }
        std::vector<double> row;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) row.push_back(cell.empty() ? std::nan("") : std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

TEST_CASE("fixed number formatting") {
    CHECK(cli::format_double(0.1) == "0.1");
    CHECK(cli::format_double(-0.0) == "0");
    CHECK(cli::format_double(1.0 / 3.0) == "0.333333333333333");
    CHECK(cli::format_double(-2.5e-12) == "-2.5e-12");
    CHECK(cli::format_double(123456789012345678.0) == "1.23456789012346e+17");
}

TEST_CASE("shoot reproduces the golden trajectory byte for byte") {
    const fs::path out = scratch("golden");
    const Outcome r = run_cli(cli::Command::Shoot, kData / "shoot_golden.json", out);
    REQUIRE(r.code == 0);
    CHECK(slurp(out / "trajectory.csv") == slurp(kGolden / "shoot_n2_trajectory.csv"));

    // the frozen endpoint is a 20-step RK4 solution; check it against a fine integration
    PointArray q0(2, 2), a0(2, 2);
    q0 << 0.0, 0.0, 1.0, 0.0;
    a0 << 0.5, 0.5, -0.25, 0.75;
    const Landmarks fine = exp_map(KernelSpec(1.0), Landmarks(q0), Covector{a0}, 8000);
    const auto rows = csv_rows(kGolden / "shoot_n2_trajectory.csv");
    REQUIRE(rows.size() == 21);
    CHECK(rows.back()[0] == 1.0);
    for (int k = 0; k < 4; ++k) CHECK(std::abs(rows.back()[1 + k] - fine.points().data()[k]) < 1e-5);

    const json summary = read_json(out / "summary.json");
    CHECK(summary.at("relative_energy_drift").get<double>() < 1e-8);
    CHECK(summary.at("schema_version") == "1");
}

TEST_CASE("shoot output is deterministic across runs") {
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    REQUIRE(run_cli(cli::Command::Shoot, kData / "shoot_golden.json", a).code == 0);
    REQUIRE(run_cli(cli::Command::Shoot, kData / "shoot_golden.json", b).code == 0);
    CHECK(slurp(a / "trajectory.csv") == slurp(b / "trajectory.csv"));
    CHECK(slurp(a / "summary.json") == slurp(b / "summary.json"));
}

TEST_CASE("shoot with zero momentum and a free particle") {
    const fs::path dir = scratch("shoot_simple");
    json p = base_problem();
    p["shoot"] = {{"steps", 10}};
    Outcome r = run_cli(cli::Command::Shoot, write_input(dir, p), dir / "zero");
    REQUIRE(r.code == 0);
    for (const auto& row : csv_rows(dir / "zero" / "trajectory.csv")) {
        CHECK(row[1] == 0.0);
        CHECK(row[3] == 1.0);
    }
    CHECK(read_json(dir / "zero" / "summary.json").at("relative_energy_drift").get<double>() == 0.0);

    p["landmarks"] = {{0.5, -1.0}};
    p["momenta"] = {{0.3, 0.7}};
    r = run_cli(cli::Command::Shoot, write_input(dir, p), dir / "free");
    REQUIRE(r.code == 0);
    const json end = read_json(dir / "free" / "summary.json").at("endpoint");
    CHECK(end[0][0].get<double>() == doctest::Approx(0.8).epsilon(1e-14));
    CHECK(end[0][1].get<double>() == doctest::Approx(-0.3).epsilon(1e-14));
}

TEST_CASE("schema violations exit 2 with a field path") {
    const fs::path dir = scratch("schema");
    struct Case {
        const char* name;
        std::function<void(json&)> edit;
        const char* field;
    };
    const std::vector<Case> cases{
        {"missing sigma", [](json& p) { p["kernel"].erase("sigma"); }, "kernel.sigma"},
        {"negative sigma", [](json& p) { p["kernel"]["sigma"] = -1.0; }, "kernel.sigma"},
        {"unknown family", [](json& p) { p["kernel"]["family"] = "cauchy"; }, "kernel.family"},
        {"version", [](json& p) { p["schema_version"] = "9"; }, "schema_version"},
        {"ragged landmarks", [](json& p) { p["landmarks"][1] = {1.0}; }, "landmarks[1]"},
        {"non-numeric", [](json& p) { p["landmarks"][0][1] = "x"; }, "landmarks[0][1]"},
        {"duplicate landmarks", [](json& p) { p["landmarks"][1] = {0.0, 0.0}; }, "landmarks"},
        {"momenta shape", [](json& p) { p["momenta"] = {{1.0, 0.0}}; }, "momenta"},
        {"steps", [](json& p) { p["shoot"] = {{"steps", 0}}; }, "shoot.steps"},
    };
    for (const Case& c : cases) {
        CAPTURE(c.name);
        json p = base_problem();
        c.edit(p);
        const Outcome r = run_cli(cli::Command::Shoot, write_input(dir, p), dir / "out");
        CHECK(r.code == cli::kValidationError);
        const json e = error_of(r);
        CHECK(e.at("kind") == "SchemaError");
        CHECK(e.at("field") == c.field);
    }

    std::ofstream(dir / "broken.json") << "{\"schema_version\": \"1\",";
    const Outcome broken = run_cli(cli::Command::Shoot, dir / "broken.json", dir / "out");
    CHECK(broken.code == cli::kValidationError);
    CHECK(error_of(broken).at("message").get<std::string>().find("line") != std::string::npos);

    const Outcome bad = run_cli(cli::Command::Shoot, kData / "bad_schema.json", dir / "out");
    CHECK(bad.code == cli::kValidationError);
    CHECK(error_of(bad).at("field") == "landmarks[1]");
}

TEST_CASE("numerical failures exit 3") {
    const fs::path dir = scratch("numerical");
    json p = base_problem();
    p["momenta"] = {{8.0, 0.0}, {-8.0, 0.0}};
    p["shoot"] = {{"steps", 4}, {"drift_bound", 1e-12}};
    const Outcome r = run_cli(cli::Command::Shoot, write_input(dir, p), dir / "out");
    CHECK(r.code == cli::kNumericalError);
    CHECK(error_of(r).at("kind") == "EnergyDrift");
}

TEST_CASE("match of an identical target") {
    const fs::path dir = scratch("match_identity");
    json p = base_problem();
    p["targets"] = p["landmarks"];
    const Outcome r = run_cli(cli::Command::Match, write_input(dir, p), dir / "out");
    REQUIRE(r.code == 0);
    const json res = read_json(dir / "out" / "result.json");
    CHECK(res.at("iterations") == 0);
    CHECK(res.at("converged") == true);
    for (const auto& row : res.at("alpha0")) {
        for (const auto& v : row) CHECK(v.get<double>() == 0.0);
    }
    CHECK(fs::exists(dir / "out" / "trajectory.csv"));
}

TEST_CASE("match of an inverse-crime target with seeded multistart") {
    const fs::path dir = scratch("match_inverse");
    PointArray q0(3, 2), truth(3, 2);
    q0 << 0.0, 0.0, 1.0, 0.0, 0.0, 1.0;
    truth << 0.3, -0.2, -0.1, 0.4, 0.2, 0.1;
    const Landmarks target = exp_map(KernelSpec(1.0), Landmarks(q0), Covector{truth}, 200);
    json p = base_problem();
    p["landmarks"] = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
    p["targets"] = json::array();
    for (Eigen::Index i = 0; i < 3; ++i) p["targets"].push_back({target.points()(i, 0), target.points()(i, 1)});
    p["match"] = {{"lambda", 1e-6}, {"steps", 200}, {"multistart", 2}};
    const fs::path input = write_input(dir, p);

    REQUIRE(run_cli(cli::Command::Match, input, dir / "a", false, 0, 11).code == 0);
    REQUIRE(run_cli(cli::Command::Match, input, dir / "b", false, 0, 11).code == 0);
    const json res = read_json(dir / "a" / "result.json");
    CHECK(res.at("misfit").get<double>() < 1e-6);
    CHECK(res.at("starts") == 3);
    const auto& hist = res.at("objective_history");
    for (std::size_t k = 1; k < hist.size(); ++k) CHECK(hist[k].get<double>() <= hist[k - 1].get<double>());
    CHECK(slurp(dir / "a" / "result.json") == slurp(dir / "b" / "result.json"));
    CHECK(slurp(dir / "a" / "trajectory.csv") == slurp(dir / "b" / "trajectory.csv"));

    REQUIRE(run_cli(cli::Command::Match, kData / "match_inverse.json", dir / "c", false, 0, 3).code == 0);
    CHECK(read_json(dir / "c" / "result.json").at("converged") == true);
}

TEST_CASE("match line search failure still writes the partial result") {
    const fs::path dir = scratch("match_fail");
    json p = base_problem();
    p["targets"] = {{0.4, 0.9}, {1.5, -0.7}};
    p["match"] = {{"initial_step", 1e8}, {"max_halvings", 0}, {"steps", 50}};
    const Outcome r = run_cli(cli::Command::Match, write_input(dir, p), dir / "out");
    CHECK(r.code == cli::kNumericalError);
    CHECK(error_of(r).at("kind") == "LineSearchFailed");
    CHECK(read_json(dir / "out" / "result.json").at("converged") == false);
}

TEST_CASE("curvature command") {
    const fs::path dir = scratch("curvature");
    json p = base_problem();
    p["curvature"] = {{"alpha", {{1.0, 0.5}, {0.0, -1.0}}}, {"beta", {{1.0, 0.5}, {0.0, -1.0}}}};
    Outcome r = run_cli(cli::Command::Curvature, write_input(dir, p), dir / "same");
    CHECK(r.code == cli::kNumericalError);
    json rep = read_json(dir / "same" / "curvature.json");
    CHECK(std::abs(rep.at("numerator").get<double>()) < 1e-12);
    CHECK(rep.at("sectional").is_null());

    // one landmark on the line: every pair of momenta is parallel
    p["landmarks"] = {{0.3}};
    p["curvature"] = {{"alpha", {{1.0}}}, {"beta", {{-2.0}}}};
    r = run_cli(cli::Command::Curvature, write_input(dir, p), dir / "single");
    CHECK(r.code == cli::kNumericalError);
    CHECK(error_of(r).at("kind") == "DegeneratePlane");
    CHECK(read_json(dir / "single" / "curvature.json").at("numerator").get<double>() == 0.0);

    // one landmark in the plane: a genuine but flat plane
    p["landmarks"] = {{0.3, 0.1}};
    p["curvature"] = {{"alpha", {{1.0, 0.0}}}, {"beta", {{0.0, 1.0}}}};
    r = run_cli(cli::Command::Curvature, write_input(dir, p), dir / "flat");
    REQUIRE(r.code == 0);
    CHECK(read_json(dir / "flat" / "curvature.json").at("sectional").get<double>() == 0.0);

    r = run_cli(cli::Command::Curvature, kData / "curvature_sweep.json", dir / "sweep", true);
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(dir / "sweep" / "sweep.csv");
    REQUIRE(rows.size() == 3);
    double worst = 0.0;
    for (const auto& row : rows) worst = std::max(worst, row.at(5));
    CHECK(worst < 1e-4);
    CHECK(rows[0][0] == 0.5);
    CHECK(rows[2][0] == 2.0);
    rep = read_json(dir / "sweep" / "curvature.json");
    CHECK(rep.at("oracle").at("relative_discrepancy").get<double>() < 1e-4);

    p = read_json(kData / "curvature_sweep.json");
    p["landmarks"] = {{0.0}, {1.0}, {2.5}};
    p["curvature"]["alpha"] = {{1.0}, {0.0}, {0.0}};
    p["curvature"]["beta"] = {{0.0}, {1.0}, {0.0}};
    r = run_cli(cli::Command::Curvature, write_input(dir, p), dir / "bad_sweep");
    CHECK(r.code == cli::kValidationError);
    CHECK(error_of(r).at("field") == "curvature.sweep.distances");
}

TEST_CASE("hs command on equal endpoints") {
    const fs::path dir = scratch("hs_equal");
    const json bump = {{"bumps", {{{"center", 0.0}, {"half_width", 1.0}, {"amplitude", 0.5}}}}};
    const json p = {{"schema_version", "1"},
                    {"hs", {{"grid", {{"x_min", -3.0}, {"x_max", 3.0}, {"intervals", 120}}},
                            {"gamma0", bump},
                            {"gamma1", bump}}}};
    const Outcome r = run_cli(cli::Command::HunterSaxton, write_input(dir, p), dir / "out");
    REQUIRE(r.code == 0);
    const json s = read_json(dir / "out" / "summary.json");
    CHECK(s.at("distance").get<double>() == 0.0);
    CHECK(s.at("max_residual").get<double>() == 0.0);
    CHECK(s.at("hit_times").is_null());
    CHECK(s.at("exit_time").is_null());
}

TEST_CASE("hs command refinement and hit times") {
    const fs::path dir = scratch("hs");
    Outcome r = run_cli(cli::Command::HunterSaxton, kData / "hs_bumps.json", dir / "refine", false, 2);
    REQUIRE(r.code == 0);
    const json s = read_json(dir / "refine" / "summary.json");
    const json& levels = s.at("refinement").at("levels");
    REQUIRE(levels.size() == 3);
    CHECK(levels[2].at("intervals") == 1600);
    for (const auto& order : s.at("refinement").at("observed_order")) CHECK(order.get<double>() > 1.7);
    CHECK(csv_rows(dir / "refine" / "refinement.csv").size() == 3);
    CHECK(csv_rows(dir / "refine" / "geodesic.csv").size() == 5 * 401);

    const hs::Grid1D grid(-4.0, 4.0, 800);
    const auto amp = testing::constructed_hit_amplitudes(grid);
    auto two_bumps = [](double left, double right) {
        return json{{"bumps",
                     {{{"center", -1.5}, {"half_width", 1.0}, {"amplitude", left}},
                      {{"center", 1.5}, {"half_width", 1.0}, {"amplitude", right}}}}};
    };
    const json p = {{"schema_version", "1"},
                    {"hs", {{"grid", {{"x_min", -4.0}, {"x_max", 4.0}, {"intervals", 800}}},
                            {"gamma0", two_bumps(amp.a, amp.c)},
                            {"gamma1", two_bumps(amp.c, amp.a)}}}};
    r = run_cli(cli::Command::HunterSaxton, write_input(dir, p), dir / "hits");
    REQUIRE(r.code == 0);
    const json hits = read_json(dir / "hits" / "summary.json").at("hit_times");
    REQUIRE(hits.size() == 2);
    CHECK(std::abs(hits[0].get<double>() - 0.25) < 1e-8);
    CHECK(std::abs(hits[1].get<double>() - 0.75) < 1e-8);
}

TEST_CASE("hs input validation") {
    const fs::path dir = scratch("hs_invalid");
    json p = read_json(kData / "hs_bumps.json");
    p["hs"]["gamma0"] = json::array({0.0, 0.1, 0.0});
    Outcome r = run_cli(cli::Command::HunterSaxton, write_input(dir, p), dir / "out");
    CHECK(r.code == cli::kValidationError);
    CHECK(error_of(r).at("field") == "hs.gamma0");

    p = read_json(kData / "hs_bumps.json");
    p["hs"]["f_prime0"] = p["hs"]["gamma0"];
    r = run_cli(cli::Command::HunterSaxton, write_input(dir, p), dir / "out");
    CHECK(r.code == cli::kValidationError);
    CHECK(error_of(r).at("field") == "hs");

    p = read_json(kData / "hs_bumps.json");
    p["hs"]["grid"]["intervals"] = 4;
    p["hs"]["gamma0"] = json::array({0.0, 0.1, 0.2, 0.1, 0.0});
    r = run_cli(cli::Command::HunterSaxton, write_input(dir, p), dir / "out", false, 1);
    CHECK(r.code == cli::kValidationError);
    CHECK(error_of(r).at("field") == "hs.gamma0");

    p = read_json(kData / "hs_bumps.json");
    p["hs"]["gamma1"]["bumps"][0]["amplitude"] = -2.5;
    r = run_cli(cli::Command::HunterSaxton, write_input(dir, p), dir / "out");
    CHECK(r.code == cli::kNumericalError);
    CHECK(error_of(r).at("kind") == "BoundaryHit");
}
