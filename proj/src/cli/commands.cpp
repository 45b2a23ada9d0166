#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>

#include "shapespace/curvature.hpp"
#include "shapespace/landmark_metric.hpp"
#include "shapespace/matching.hpp"

namespace shapespace::cli::detail {

json number(double value) {
    if (!std::isfinite(value)) return nullptr;
    // Round through the fixed text form so JSON and CSV agree digit for digit.
    return std::strtod(format_double(value).c_str(), nullptr);
}

json rows_json(const PointArray& p) {
    json out = json::array();
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index a = 0; a < p.cols(); ++a) row.push_back(number(p(i, a)));
        out.push_back(std::move(row));
    }
    return out;
}

json vector_json(const std::vector<double>& v) {
    json out = json::array();
    for (double x : v) out.push_back(number(x));
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw OutputError("cannot write " + path.string());
    out << text;
    if (!out) throw OutputError("failed writing " + path.string());
}

void write_json(const std::filesystem::path& path, const json& document) {
    write_text(path, document.dump(2) + "\n");
}

namespace {

void append_row(std::string& text, const std::vector<double>& values) {
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (k) text += ',';
        text += format_double(values[k]);
    }
    text += '\n';
}

std::string trajectory_csv(const GeodesicPath& path) {
    const Eigen::Index n_pts = path.front().q.count();
    const Eigen::Index dim = path.front().q.dim();
    std::string text = "# shapespace trajectory v1\nt";
    for (const char* name : {"q", "alpha"}) {
        for (Eigen::Index i = 0; i < n_pts; ++i) {
            for (Eigen::Index a = 0; a < dim; ++a) {
                text += "," + std::string(name) + "[" + std::to_string(i) + "][" + std::to_string(a) + "]";
            }
        }
    }
    text += '\n';
    std::vector<double> row;
    for (const State& s : path.states) {
        row.assign(1, s.t);
        for (const PointArray* m : {&s.q.points(), &s.alpha.values}) {
            row.insert(row.end(), m->data(), m->data() + m->size());
        }
        append_row(text, row);
    }
    return text;
}

Covector parse_momenta(const Node& root, const Landmarks& q, const char* key) {
    if (const auto m = root.find(key)) return Covector{m->rows(q.count(), q.dim())};
    return Covector{PointArray::Zero(q.count(), q.dim())};
}

int steps_field(const std::optional<Node>& section, int fallback) {
    return integer_or(section, "steps", fallback, 1);
}

}  // namespace

int cmd_shoot(const Node& root, const Options& options, std::ostream&) {
    const KernelSpec spec = parse_kernel(root);
    const Landmarks q0 = parse_landmarks(root.at("landmarks"));
    const Covector alpha0 = parse_momenta(root, q0, "momenta");
    const auto section = root.find("shoot");
    const double duration = number_or(section, "T", 1.0);
    if (!(duration > 0.0)) section->at("T").fail("must be positive");
    const int steps = steps_field(section, kDefaultSteps);
    const ShootOptions shoot_opts = parse_shoot_options(section);

    const GeodesicPath path = shoot(spec, q0, alpha0, duration, steps, shoot_opts);
    write_text(options.out / "trajectory.csv", trajectory_csv(path));

    const std::vector<double> e = path.energies();
    json summary = {
        {"schema_version", kSchemaVersion},
        {"command", "shoot"},
        {"landmarks", q0.count()},
        {"dim", q0.dim()},
        {"T", number(duration)},
        {"steps", steps},
        {"initial_energy", number(e.front())},
        {"final_energy", number(e.back())},
        {"relative_energy_drift", number(path.relative_energy_drift())},
        {"endpoint", rows_json(path.back().q.points())},
        {"final_momentum", rows_json(path.back().alpha.values)},
    };
    write_json(options.out / "summary.json", summary);
    return kOk;
}

namespace {

OptimizerOptions parse_optimizer(const std::optional<Node>& section) {
    OptimizerOptions opt;
    opt.max_iters = integer_or(section, "max_iters", opt.max_iters, 0);
    opt.max_halvings = integer_or(section, "max_halvings", opt.max_halvings, 0);
    if (!section) return opt;
    if (const auto v = section->find("grad_tol")) opt.grad_tol = v->positive();
    if (const auto v = section->find("fd_step")) opt.fd_step = v->positive();
    if (const auto v = section->find("initial_step")) opt.initial_step = v->positive();
    if (const auto v = section->find("armijo_c")) {
        opt.armijo_c = v->number();
        if (!(opt.armijo_c > 0.0 && opt.armijo_c < 1.0)) v->fail("must lie in (0, 1)");
    }
    return opt;
}

json match_json(const MatchResult& r, const MatchProblem& problem, int starts, std::size_t best_start) {
    return {
        {"schema_version", kSchemaVersion},
        {"command", "match"},
        {"lambda", number(problem.lambda)},
        {"alpha0", rows_json(r.alpha0.values)},
        {"endpoint", rows_json(r.path.states.empty() ? PointArray() : r.path.back().q.points())},
        {"misfit", number(r.misfit)},
        {"energy", number(r.energy)},
        {"objective_history", vector_json(r.objective_history)},
        {"converged", r.converged},
        {"iterations", r.iterations},
        {"grad_norm", number(r.grad_norm)},
        {"starts", starts},
        {"best_start", best_start},
    };
}

/// Uniform double in [0, 1) from the top 53 bits, identical on every platform
/// (std::uniform_real_distribution is not).
double unit_draw(std::mt19937_64& engine) {
    return double(engine() >> 11) * 0x1.0p-53;
}

}  // namespace

int cmd_match(const Node& root, const Options& options, std::ostream& err) {
    const KernelSpec spec = parse_kernel(root);
    const Landmarks q0 = parse_landmarks(root.at("landmarks"));
    const Node target_node = root.at("targets");
    const Landmarks target(target_node.rows(q0.count(), q0.dim()));
    const auto section = root.find("match");

    MatchProblem problem{q0, target, spec, 0.0, kDefaultSteps, {}, {}};
    problem.lambda = number_or(section, "lambda", 0.0);
    if (!(problem.lambda >= 0.0)) section->at("lambda").fail("must be non-negative");
    problem.shoot_steps = steps_field(section, kDefaultSteps);
    problem.opt = parse_optimizer(section);
    problem.shoot = parse_shoot_options(root.find("shoot"));
    const int extra_starts = integer_or(section, "multistart", 0, 0);
    const double scale = number_or(section, "multistart_scale", 0.1);
    if (!(scale > 0.0)) section->at("multistart_scale").fail("must be positive");

    std::vector<Covector> starts{parse_momenta(root, q0, "momenta")};
    std::mt19937_64 engine(options.seed);
    for (int s = 0; s < extra_starts; ++s) {
        PointArray a(q0.count(), q0.dim());
        for (Eigen::Index k = 0; k < a.size(); ++k) a.data()[k] = scale * (2.0 * unit_draw(engine) - 1.0);
        starts.push_back(Covector{a});
    }

    std::optional<MatchResult> best;
    std::size_t best_index = 0;
    for (std::size_t s = 0; s < starts.size(); ++s) {
        try {
            MatchResult r = match(problem, starts[s]);
            if (!best || r.objective_history.back() < best->objective_history.back()) {
                best = std::move(r);
                best_index = s;
            }
        } catch (const LineSearchFailed& e) {
            // Keep whatever the optimizer reached so the run can be inspected.
            const MatchResult& partial = e.partial();
            MatchResult filled = partial;
            if (filled.path.states.empty()) {
                filled.path = shoot(spec, q0, filled.alpha0, 1.0, problem.shoot_steps, problem.shoot);
            }
            write_json(options.out / "result.json", match_json(filled, problem, int(starts.size()), s));
            write_text(options.out / "trajectory.csv", trajectory_csv(filled.path));
            throw;
        }
    }
    (void)err;
    write_json(options.out / "result.json", match_json(*best, problem, int(starts.size()), best_index));
    write_text(options.out / "trajectory.csv", trajectory_csv(best->path));
    return kOk;
}

namespace {

json terms_json(const CurvatureTerms& t) {
    return {
        {"stress_force", number(t.stress_force)},
        {"kernel_hessian", number(t.kernel_hessian)},
        {"force_norms", number(t.force_norms)},
        {"bracket", number(t.bracket)},
    };
}

/// Discrepancy scaled so that < 1e-4 means within max(1e-4 relative, 1e-7 absolute).
double oracle_discrepancy(double value, double oracle) {
    return std::abs(value - oracle) / std::max(std::abs(oracle), 1e-3);
}

double oracle_value(const KernelSpec& spec, const Landmarks& q, const Covector& a, const Covector& b) {
    return curvature_fd_oracle(spec, q, sharp(spec, q, a), sharp(spec, q, b));
}

std::string sweep_csv(const KernelSpec& spec, const Landmarks& q, const Covector& a, const Covector& b,
                      const Node& distances, bool with_oracle) {
    if (q.count() != 2) distances.fail("a distance sweep needs exactly two landmarks");
    const Eigen::RowVectorXd base = q.point(0);
    Eigen::RowVectorXd dir = q.point(1) - q.point(0);
    dir /= dir.norm();

    std::string text = "# shapespace curvature sweep v1\nd,numerator,area_squared,sectional";
    if (with_oracle) text += ",oracle,relative_discrepancy";
    text += '\n';
    for (std::size_t k = 0; k < distances.size(); ++k) {
        const double d = distances.at(k).positive();
        PointArray p(2, q.dim());
        p.row(0) = base;
        p.row(1) = base + d * dir;
        const Landmarks qd(p);
        const CurvatureReport r = sectional_numerator(spec, qd, a, b);
        text += format_double(d) + "," + format_double(r.numerator) + "," + format_double(r.area_squared) + ",";
        if (r.sectional) text += format_double(*r.sectional);
        if (with_oracle) {
            const double o = oracle_value(spec, qd, a, b);
            text += "," + format_double(o) + "," + format_double(oracle_discrepancy(r.numerator, o));
        }
        text += '\n';
    }
    return text;
}

}  // namespace

int cmd_curvature(const Node& root, const Options& options, std::ostream&) {
    const KernelSpec spec = parse_kernel(root);
    const Landmarks q = parse_landmarks(root.at("landmarks"));
    const Node section = root.at("curvature");
    const Covector a{section.at("alpha").rows(q.count(), q.dim())};
    const Covector b{section.at("beta").rows(q.count(), q.dim())};

    if (const auto sweep = section.find("sweep")) {
        write_text(options.out / "sweep.csv", sweep_csv(spec, q, a, b, sweep->at("distances"), options.oracle));
    }

    const CurvatureReport r = sectional_numerator(spec, q, a, b);
    json report = {
        {"schema_version", kSchemaVersion},
        {"command", "curvature"},
        {"numerator", number(r.numerator)},
        {"area_squared", number(r.area_squared)},
        {"sectional", r.sectional ? number(*r.sectional) : json(nullptr)},
        {"terms", terms_json(r.terms)},
    };
    if (options.oracle) {
        const double o = oracle_value(spec, q, a, b);
        report["oracle"] = {{"numerator", number(o)},
                            {"relative_discrepancy", number(oracle_discrepancy(r.numerator, o))}};
    }
    write_json(options.out / "curvature.json", report);
    if (!r.sectional) throw DegeneratePlane("sectional curvature undefined: alpha# and beta# span a degenerate plane");
    return kOk;
}

namespace {

struct HsEndpoints {
    GridFunctionSpec first;
    GridFunctionSpec second;
    bool chart = true;  ///< gamma inputs; otherwise f' inputs
};

HsEndpoints parse_endpoints(const Node& hs) {
    const bool has_gamma = hs.has("gamma0") || hs.has("gamma1");
    const bool has_fp = hs.has("f_prime0") || hs.has("f_prime1");
    if (has_gamma == has_fp) hs.fail("give either gamma0/gamma1 or f_prime0/f_prime1");
    if (has_gamma) return {parse_grid_function(hs.at("gamma0")), parse_grid_function(hs.at("gamma1")), true};
    return {parse_grid_function(hs.at("f_prime0")), parse_grid_function(hs.at("f_prime1")), false};
}

hs::LineDiffeo make_diffeo(const HsEndpoints& e, const GridFunctionSpec& f, const hs::Grid1D& grid) {
    const Eigen::VectorXd v = f.sample(grid);
    if (e.chart) return hs::r_inverse(hs::ChartFunction(grid, v));
    return hs::LineDiffeo(grid, v);
}

std::string geodesic_csv(const hs::LineDiffeo& phi0, const hs::LineDiffeo& phi1, int samples) {
    std::string text = "# shapespace hs geodesic v1\nt,x,gamma,f_prime,f,phi,u\n";
    const Eigen::VectorXd x = phi0.grid().nodes();
    for (int k = 0; k <= samples; ++k) {
        const double t = double(k) / samples;
        const hs::LineDiffeo phi = hs::hs_geodesic(phi0, phi1, t);
        const Eigen::VectorXd gamma = hs::r_map(phi).values();
        const Eigen::VectorXd f = phi.f();
        const Eigen::VectorXd ph = phi.phi();
        const Eigen::VectorXd u = hs::hs_velocity(phi0, phi1, t);
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            append_row(text, {t, x(i), gamma(i), phi.f_prime()(i), f(i), ph(i), u(i)});
        }
    }
    return text;
}

}  // namespace

int cmd_hs(const Node& root, const Options& options, std::ostream&) {
    const Node section = root.at("hs");
    const Node grid_node = section.at("grid");
    const double x_min = grid_node.at("x_min").number();
    const double x_max = grid_node.at("x_max").number();
    if (!(x_max > x_min)) grid_node.at("x_max").fail("must exceed x_min");
    const int intervals = grid_node.at("intervals").integer(2);
    const hs::Grid1D grid(x_min, x_max, intervals);
    const HsEndpoints ends = parse_endpoints(section);
    const int samples = integer_or(section, "samples", 10, 1);

    const auto residual_node = section.find("residual");
    hs::TimeSamples times;
    times.begin = number_or(residual_node, "begin", 0.0);
    times.end = number_or(residual_node, "end", 1.0);
    times.intervals = integer_or(residual_node, "intervals", 50, 2);
    if (!(times.end > times.begin)) residual_node->at("end").fail("must exceed begin");

    if (options.refine > 0 && !(ends.first.refinable() && ends.second.refinable())) {
        throw SchemaError(ends.first.refinable() ? ends.second.path : ends.first.path,
                          "--refine needs endpoints given in bump form");
    }

    const hs::LineDiffeo phi0 = make_diffeo(ends, ends.first, grid);
    const hs::LineDiffeo phi1 = make_diffeo(ends, ends.second, grid);

    write_text(options.out / "geodesic.csv", geodesic_csv(phi0, phi1, samples));

    json hit_times = nullptr;
    try {
        hit_times = vector_json(hs::diff_a_hit_times(phi0, phi1));
    } catch (const DegenerateDirection&) {
        // equal endpoints: the subgroup condition is either always or never met
    }
    const auto exit_time = hs::mon_exit_time(phi0, phi1);
    const hs::HitQuadratic quad = hs::hit_quadratic(phi0, phi1);
    const double residual = hs::hs_residual(phi0, phi1, times);

    json summary = {
        {"schema_version", kSchemaVersion},
        {"command", "hs"},
        {"intervals", intervals},
        {"distance", number(hs::hs_distance(phi0, phi1))},
        {"hit_times", hit_times},
        {"hit_quadratic", {{"c0", number(quad.c0)}, {"c1", number(quad.c1)}, {"c2", number(quad.c2)}}},
        {"exit_time", exit_time ? number(*exit_time) : json(nullptr)},
        {"max_residual", number(residual)},
        {"residual_time_intervals", times.intervals},
    };

    if (options.refine > 0) {
        std::string table = "# shapespace hs refinement v1\nlevel,intervals,time_intervals,h,dt,residual,observed_order\n";
        json levels = json::array();
        json orders = json::array();
        double previous = 0.0;
        for (int level = 0; level <= options.refine; ++level) {
            const int m = intervals << level;
            const hs::Grid1D g(x_min, x_max, m);
            hs::TimeSamples ts = times;
            ts.intervals = times.intervals << level;
            const double r = hs::hs_residual(make_diffeo(ends, ends.first, g), make_diffeo(ends, ends.second, g), ts);
            const double h = g.spacing();
            const double dt = (ts.end - ts.begin) / ts.intervals;
            std::optional<double> order;
            if (level > 0 && r > 0.0 && previous > 0.0) order = std::log2(previous / r);
            levels.push_back({{"level", level},
                              {"intervals", m},
                              {"time_intervals", ts.intervals},
                              {"h", number(h)},
                              {"dt", number(dt)},
                              {"residual", number(r)}});
            if (level > 0) orders.push_back(order ? number(*order) : json(nullptr));
            table += std::to_string(level) + "," + std::to_string(m) + "," + std::to_string(ts.intervals) + "," +
                     format_double(h) + "," + format_double(dt) + "," + format_double(r) + "," +
                     (order ? format_double(*order) : std::string()) + "\n";
            previous = r;
        }
        summary["refinement"] = {{"levels", levels}, {"observed_order", orders}};
        write_text(options.out / "refinement.csv", table);
    }
    write_json(options.out / "summary.json", summary);
    return kOk;
}

}  // namespace shapespace::cli::detail
