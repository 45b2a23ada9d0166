#include <doctest.h>

#include <cmath>

#include "shapespace/error.hpp"
#include "shapespace/landmark_metric.hpp"
#include "shapespace/matching.hpp"
#include "test_support.hpp"

using namespace shapespace;
using shapespace::testing::Rng;

namespace {

MatchProblem make_problem(const Landmarks& q0, const Landmarks& target, double lambda = 0.0) {
    return MatchProblem{q0, target, KernelSpec(1.0), lambda};
}

PointArray row(double x, double y) {
    PointArray p(1, 2);
    p << x, y;
    return p;
}

bool non_increasing(const std::vector<double>& h) {
    for (std::size_t k = 1; k < h.size(); ++k) {
        if (h[k] > h[k - 1]) return false;
    }
    return true;
}

// Target reached by shooting from q0 with a moderate random momentum.
Landmarks inverse_crime_target(Rng& rng, const Landmarks& q0, Covector& truth) {
    truth = Covector{rng.array(q0.count(), q0.dim(), -0.6, 0.6)};
    return exp_map(KernelSpec(1.0), q0, truth);
}

}  // namespace

TEST_CASE("objective examples") {
    Rng rng(51);
    const Landmarks q0 = rng.landmarks(3, 2, 0.5, 1.0);
    const Landmarks target = rng.landmarks(3, 2, 0.5, 1.0);
    const Covector zero{PointArray::Zero(3, 2)};
    CHECK(objective(make_problem(q0, q0), zero) == 0.0);
    CHECK(objective(make_problem(q0, target), zero) ==
          doctest::Approx(0.5 * (q0.points() - target.points()).squaredNorm()).epsilon(1e-15));

    const Landmarks p(row(0.2, -0.3));
    const PointArray v = row(0.7, 0.4);
    const MatchProblem free = make_problem(p, Landmarks(p.points() + v));
    CHECK(objective(free, Covector{v}) < 1e-28);

    const Covector a{rng.array(3, 2)};
    const MatchProblem weighted = make_problem(q0, target, 0.25);
    const double data = 0.5 * (exp_map(KernelSpec(1.0), q0, a).points() - target.points()).squaredNorm();
    CHECK(objective(weighted, a) == doctest::Approx(data + 0.25 * energy(KernelSpec(1.0), q0, a)).epsilon(1e-13));
}

TEST_CASE("problem validation") {
    Rng rng(52);
    const Landmarks q0 = rng.landmarks(3, 2, 0.5, 1.0);
    const Landmarks other = rng.landmarks(2, 2, 0.5, 1.0);
    CHECK_THROWS_AS((void)objective(make_problem(q0, other), Covector{PointArray::Zero(3, 2)}), ShapeMismatch);
    CHECK_THROWS_AS((void)objective(make_problem(q0, q0, -1.0), Covector{PointArray::Zero(3, 2)}),
                    InvalidArgument);
    CHECK_THROWS_AS((void)objective(make_problem(q0, q0), Covector{PointArray::Zero(2, 2)}), ShapeMismatch);
    MatchProblem bad = make_problem(q0, q0);
    bad.opt.armijo_c = 1.5;
    CHECK_THROWS_AS((void)match(bad), InvalidArgument);
}

TEST_CASE("gradient of the free-particle objective is exact") {
    const Landmarks p(row(0.0, 1.0));
    const PointArray v = row(-0.4, 0.9);
    const MatchProblem free = make_problem(p, Landmarks(p.points() + v));
    CHECK(gradient_fd(free, Covector{v}).values.norm() < 1e-6);

    const PointArray a = row(0.3, 0.1);
    const PointArray expected = exp_map(free.spec, p, Covector{a}).points() - free.target.points();
    // exact up to central-difference roundoff of a 1000-step integration
    CHECK((gradient_fd(free, Covector{a}).values - expected).norm() < 1e-7);
}

TEST_CASE("gradient agrees with directional differences") {
    Rng rng(53);
    for (int trial = 0; trial < 5; ++trial) {
        const Landmarks q0 = rng.landmarks(3, 2, 0.5, 1.0);
        const Landmarks target = rng.landmarks(3, 2, 0.5, 1.0);
        const MatchProblem problem = make_problem(q0, target, 1e-3);
        const Covector a{rng.array(3, 2, -0.5, 0.5)};
        PointArray d = rng.array(3, 2);
        d /= d.norm();
        const double h = 1e-5;
        const double directional = (objective(problem, Covector{a.values + h * d}) -
                                    objective(problem, Covector{a.values - h * d})) /
                                   (2 * h);
        CHECK(std::abs(gradient_fd(problem, a).values.cwiseProduct(d).sum() - directional) < 1e-6);
    }
}

TEST_CASE("matching an identical target does not move") {
    Rng rng(54);
    const Landmarks q0 = rng.landmarks(3, 2, 0.5, 1.0);
    const MatchResult r = match(make_problem(q0, q0));
    CHECK(r.converged);
    CHECK(r.iterations == 0);
    CHECK(r.alpha0.values.norm() == 0.0);
    CHECK(r.misfit == 0.0);
    CHECK(r.objective_history.size() == 1);
}

TEST_CASE("single landmark matching recovers the displacement") {
    const Landmarks p(row(0.5, 0.5));
    const PointArray v = row(1.2, -0.7);
    const MatchResult r = match(make_problem(p, Landmarks(p.points() + v)));
    CHECK(r.converged);
    CHECK((r.alpha0.values - v).norm() < 1e-6);
}

TEST_CASE("inverse-crime matching reaches the target") {
    Rng rng(55);
    for (int trial = 0; trial < 3; ++trial) {
        const Landmarks q0 = rng.landmarks(3, 2, 0.5, 1.0);
        Covector truth;
        const Landmarks target = inverse_crime_target(rng, q0, truth);
        const MatchResult r = match(make_problem(q0, target, 1e-6));
        CHECK(r.misfit < 1e-6);
        CHECK((r.path.back().q.points() - target.points()).cwiseAbs().maxCoeff() < 1e-4);
        CHECK(non_increasing(r.objective_history));
        CHECK(r.path.front().t == 0.0);
        CHECK(r.path.back().t == 1.0);
    }
}

TEST_CASE("misfit grows with the energy weight") {
    Rng rng(56);
    const Landmarks q0 = rng.landmarks(3, 2, 0.5, 1.0);
    Covector truth;
    const Landmarks target = inverse_crime_target(rng, q0, truth);
    double previous = -1.0;
    for (double lambda : {0.0, 1e-4, 1e-2}) {
        const MatchResult r = match(make_problem(q0, target, lambda));
        CHECK(r.misfit >= previous - 1e-8);
        previous = r.misfit;
    }
}

TEST_CASE("matching is translation equivariant") {
    Rng rng(57);
    const Landmarks q0 = rng.landmarks(3, 2, 0.5, 1.0);
    Covector truth;
    const Landmarks target = inverse_crime_target(rng, q0, truth);
    const Eigen::RowVectorXd c = rng.vector(2, -2, 2).transpose();
    const MatchResult a = match(make_problem(q0, target));
    const MatchResult b = match(make_problem(q0.translated(c), target.translated(c)));
    CHECK((a.alpha0.values - b.alpha0.values).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("line search failure carries the last iterate") {
    Rng rng(58);
    const Landmarks q0 = rng.landmarks(3, 2, 0.5, 1.0);
    const Landmarks target = rng.landmarks(3, 2, 0.5, 1.0);
    MatchProblem problem = make_problem(q0, target);
    problem.opt.initial_step = 1e8;
    problem.opt.max_halvings = 0;
    try {
        (void)match(problem);
        FAIL("expected LineSearchFailed");
    } catch (const LineSearchFailed& e) {
        CHECK(std::string(e.kind()) == "LineSearchFailed");
        CHECK(e.partial().alpha0.values.norm() == 0.0);
        CHECK(!e.partial().converged);
        CHECK(e.partial().objective_history.size() == 1);
    }
}
