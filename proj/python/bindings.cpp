#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "shapespace/cli.hpp"
#include "shapespace/curvature.hpp"
#include "shapespace/geodesic.hpp"
#include "shapespace/hunter_saxton.hpp"
#include "shapespace/kernel.hpp"
#include "shapespace/landmark_metric.hpp"
#include "shapespace/matching.hpp"

namespace py = pybind11;
using namespace shapespace;

namespace {

using Points = Eigen::Ref<const PointArray>;

Landmarks landmarks(const Points& q) { return Landmarks(PointArray(q)); }

ShootOptions shoot_options(double drift_bound, double collision_factor) {
    ShootOptions o;
    o.drift_bound = drift_bound;
    o.collision_factor = collision_factor;
    return o;
}

py::array_t<double> stack(const std::vector<State>& states, bool momenta) {
    const auto s = py::ssize_t(states.size());
    const auto n = py::ssize_t(states.front().q.count());
    const auto d = py::ssize_t(states.front().q.dim());
    py::array_t<double> out({s, n, d});
    auto view = out.mutable_unchecked<3>();
    for (py::ssize_t k = 0; k < s; ++k) {
        const PointArray& m = momenta ? states[std::size_t(k)].alpha.values : states[std::size_t(k)].q.points();
        for (py::ssize_t i = 0; i < n; ++i) {
            for (py::ssize_t a = 0; a < d; ++a) view(k, i, a) = m(i, a);
        }
    }
    return out;
}

py::dict path_dict(const GeodesicPath& path) {
    std::vector<double> t;
    for (const State& s : path.states) t.push_back(s.t);
    py::dict out;
    out["t"] = py::array_t<double>(py::ssize_t(t.size()), t.data());
    out["q"] = stack(path.states, false);
    out["alpha"] = stack(path.states, true);
    const std::vector<double> e = path.energies();
    out["energy"] = py::array_t<double>(py::ssize_t(e.size()), e.data());
    out["relative_energy_drift"] = path.relative_energy_drift();
    return out;
}

hs::Grid1D grid_for(double x_min, double x_max, const Eigen::VectorXd& samples) {
    return hs::Grid1D(x_min, x_max, int(samples.size()) - 1);
}

hs::LineDiffeo from_chart(double x_min, double x_max, const Eigen::VectorXd& gamma) {
    return hs::r_inverse(hs::ChartFunction(grid_for(x_min, x_max, gamma), gamma));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Landmark shape space geometry and Hunter-Saxton geodesics";

    auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    auto invalid = py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    auto numerical = py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<ShapeMismatch>(m, "ShapeMismatch", invalid.ptr());
    py::register_exception<InvalidLandmarks>(m, "InvalidLandmarks", invalid.ptr());
    py::register_exception<InvalidDiffeo>(m, "InvalidDiffeo", invalid.ptr());
    py::register_exception<DegenerateDirection>(m, "DegenerateDirection", invalid.ptr());
    py::register_exception<NearSingular>(m, "NearSingular", numerical.ptr());
    py::register_exception<EnergyDrift>(m, "EnergyDrift", numerical.ptr());
    py::register_exception<Collision>(m, "Collision", numerical.ptr());
    py::register_exception<DegeneratePlane>(m, "DegeneratePlane", numerical.ptr());
    py::register_exception<BoundaryHit>(m, "BoundaryHit", numerical.ptr());
    py::register_exception<LineSearchFailed>(m, "LineSearchFailed", numerical.ptr());
    (void)error;

    m.def("kernel_eval", [](const Eigen::VectorXd& x, double sigma) { return kernel_eval(KernelSpec(sigma), x); },
          py::arg("x"), py::arg("sigma") = 1.0);
    m.def("kernel_grad", [](const Eigen::VectorXd& x, double sigma) { return kernel_grad(KernelSpec(sigma), x); },
          py::arg("x"), py::arg("sigma") = 1.0);
    m.def("gram", [](const Points& q, double sigma) { return gram(KernelSpec(sigma), landmarks(q)).entries(); },
          py::arg("q"), py::arg("sigma") = 1.0);

    m.def("cometric",
          [](const Points& q, const Points& a, const Points& b, double sigma) {
              return cometric(KernelSpec(sigma), landmarks(q), Covector{a}, Covector{b});
          },
          py::arg("q"), py::arg("alpha"), py::arg("beta"), py::arg("sigma") = 1.0);
    m.def("metric",
          [](const Points& q, const Points& p, const Points& r, double sigma) {
              return metric(KernelSpec(sigma), landmarks(q), Tangent{p}, Tangent{r});
          },
          py::arg("q"), py::arg("p"), py::arg("r"), py::arg("sigma") = 1.0);
    m.def("sharp",
          [](const Points& q, const Points& a, double sigma) {
              return sharp(KernelSpec(sigma), landmarks(q), Covector{a}).values;
          },
          py::arg("q"), py::arg("alpha"), py::arg("sigma") = 1.0);
    m.def("flat",
          [](const Points& q, const Points& p, double sigma) {
              return flat(KernelSpec(sigma), landmarks(q), Tangent{p}).values;
          },
          py::arg("q"), py::arg("p"), py::arg("sigma") = 1.0);
    m.def("energy",
          [](const Points& q, const Points& a, double sigma) {
              return energy(KernelSpec(sigma), landmarks(q), Covector{a});
          },
          py::arg("q"), py::arg("alpha"), py::arg("sigma") = 1.0);

    m.def("shoot",
          [](const Points& q0, const Points& a0, double duration, int steps, double sigma, double drift_bound,
             double collision_factor) {
              return path_dict(shoot(KernelSpec(sigma), landmarks(q0), Covector{a0}, duration, steps,
                                     shoot_options(drift_bound, collision_factor)));
          },
          py::arg("q0"), py::arg("alpha0"), py::arg("T") = 1.0, py::arg("steps") = kDefaultSteps,
          py::arg("sigma") = 1.0, py::arg("drift_bound") = ShootOptions{}.drift_bound,
          py::arg("collision_factor") = ShootOptions{}.collision_factor);
    m.def("exp_map",
          [](const Points& q0, const Points& a0, double sigma, int steps) {
              return exp_map(KernelSpec(sigma), landmarks(q0), Covector{a0}, steps).points();
          },
          py::arg("q0"), py::arg("alpha0"), py::arg("sigma") = 1.0, py::arg("steps") = kDefaultSteps);

    m.def("sectional_numerator",
          [](const Points& q, const Points& a, const Points& b, double sigma) {
              const CurvatureReport r = sectional_numerator(KernelSpec(sigma), landmarks(q), Covector{a}, Covector{b});
              py::dict terms;
              terms["stress_force"] = r.terms.stress_force;
              terms["kernel_hessian"] = r.terms.kernel_hessian;
              terms["force_norms"] = r.terms.force_norms;
              terms["bracket"] = r.terms.bracket;
              py::dict out;
              out["numerator"] = r.numerator;
              out["area_squared"] = r.area_squared;
              out["sectional"] = r.sectional ? py::object(py::float_(*r.sectional)) : py::object(py::none());
              out["terms"] = terms;
              return out;
          },
          py::arg("q"), py::arg("alpha"), py::arg("beta"), py::arg("sigma") = 1.0);
    m.def("sectional_curvature",
          [](const Points& q, const Points& a, const Points& b, double sigma) {
              return sectional_curvature(KernelSpec(sigma), landmarks(q), Covector{a}, Covector{b});
          },
          py::arg("q"), py::arg("alpha"), py::arg("beta"), py::arg("sigma") = 1.0);
    m.def("curvature_fd_oracle",
          [](const Points& q, const Points& p, const Points& r, double sigma) {
              return curvature_fd_oracle(KernelSpec(sigma), landmarks(q), Tangent{p}, Tangent{r});
          },
          py::arg("q"), py::arg("p"), py::arg("r"), py::arg("sigma") = 1.0);

    m.def("match",
          [](const Points& q0, const Points& target, double sigma, double lam, int steps, int max_iters,
             double grad_tol) {
              MatchProblem problem{landmarks(q0), landmarks(target), KernelSpec(sigma), lam, steps, {}, {}};
              problem.opt.max_iters = max_iters;
              problem.opt.grad_tol = grad_tol;
              const MatchResult r = match(problem);
              py::dict out;
              out["alpha0"] = r.alpha0.values;
              out["endpoint"] = r.path.back().q.points();
              out["misfit"] = r.misfit;
              out["energy"] = r.energy;
              out["objective_history"] = r.objective_history;
              out["converged"] = r.converged;
              out["iterations"] = r.iterations;
              out["grad_norm"] = r.grad_norm;
              return out;
          },
          py::arg("q0"), py::arg("target"), py::arg("sigma") = 1.0, py::arg("lam") = 0.0,
          py::arg("steps") = kDefaultSteps, py::arg("max_iters") = OptimizerOptions{}.max_iters,
          py::arg("grad_tol") = OptimizerOptions{}.grad_tol);

    // Hunter-Saxton functions take uniform-grid samples on [x_min, x_max];
    // the number of intervals is len(samples) - 1.
    m.def("smooth_bump",
          [](double x_min, double x_max, int intervals, double center, double half_width, double amplitude) {
              return hs::smooth_bump(hs::Grid1D(x_min, x_max, intervals), center, half_width, amplitude);
          },
          py::arg("x_min"), py::arg("x_max"), py::arg("intervals"), py::arg("center"), py::arg("half_width"),
          py::arg("amplitude"));
    m.def("r_inverse",
          [](double x_min, double x_max, const Eigen::VectorXd& gamma) {
              return from_chart(x_min, x_max, gamma).f_prime();
          },
          py::arg("x_min"), py::arg("x_max"), py::arg("gamma"));
    m.def("r_map",
          [](double x_min, double x_max, const Eigen::VectorXd& f_prime) {
              return hs::r_map(hs::LineDiffeo(grid_for(x_min, x_max, f_prime), f_prime)).values();
          },
          py::arg("x_min"), py::arg("x_max"), py::arg("f_prime"));
    m.def("hs_distance",
          [](double x_min, double x_max, const Eigen::VectorXd& g0, const Eigen::VectorXd& g1) {
              return hs::hs_distance(from_chart(x_min, x_max, g0), from_chart(x_min, x_max, g1));
          },
          py::arg("x_min"), py::arg("x_max"), py::arg("gamma0"), py::arg("gamma1"));
    m.def("hs_residual",
          [](double x_min, double x_max, const Eigen::VectorXd& g0, const Eigen::VectorXd& g1, int intervals,
             bool geodesic) {
              return hs::hs_residual(from_chart(x_min, x_max, g0), from_chart(x_min, x_max, g1),
                                     hs::TimeSamples{0.0, 1.0, intervals},
                                     geodesic ? hs::PathKind::ChartLine : hs::PathKind::FPrimeLine);
          },
          py::arg("x_min"), py::arg("x_max"), py::arg("gamma0"), py::arg("gamma1"), py::arg("time_intervals") = 50,
          py::arg("geodesic") = true);
    m.def("diff_a_hit_times",
          [](double x_min, double x_max, const Eigen::VectorXd& g0, const Eigen::VectorXd& g1) {
              return hs::diff_a_hit_times(from_chart(x_min, x_max, g0), from_chart(x_min, x_max, g1));
          },
          py::arg("x_min"), py::arg("x_max"), py::arg("gamma0"), py::arg("gamma1"));
    m.def("mon_exit_time",
          [](double x_min, double x_max, const Eigen::VectorXd& g0, const Eigen::VectorXd& g1) {
              return hs::mon_exit_time(from_chart(x_min, x_max, g0), from_chart(x_min, x_max, g1));
          },
          py::arg("x_min"), py::arg("x_max"), py::arg("gamma0"), py::arg("gamma1"));

    m.def("run_cli",
          [](const std::string& command, const std::filesystem::path& input, const std::filesystem::path& out,
             bool oracle, int refine, std::uint64_t seed) {
              cli::Options o;
              if (command == "shoot") o.command = cli::Command::Shoot;
              else if (command == "match") o.command = cli::Command::Match;
              else if (command == "curvature") o.command = cli::Command::Curvature;
              else if (command == "hs") o.command = cli::Command::HunterSaxton;
              else throw InvalidArgument("unknown command '" + command + "'");
              o.input = input;
              o.out = out;
              o.oracle = oracle;
              o.refine = refine;
              o.seed = seed;
              std::ostringstream err;
              const int code = cli::run(o, err);
              return py::make_tuple(code, err.str());
          },
          py::arg("command"), py::arg("input"), py::arg("out"), py::arg("oracle") = false, py::arg("refine") = 0,
          py::arg("seed") = 0);
}
