#include <doctest.h>

#include <cmath>

#include "shapespace/error.hpp"
#include "shapespace/kernel.hpp"
#include "test_support.hpp"

using namespace shapespace;
using shapespace::testing::Rng;

namespace {

Eigen::VectorXd vec2(double a, double b) {
    Eigen::VectorXd v(2);
    v << a, b;
    return v;
}

PointArray column(std::initializer_list<double> xs) {
    PointArray p(Eigen::Index(xs.size()), 1);
    Eigen::Index i = 0;
    for (double x : xs) p(i++, 0) = x;
    return p;
}

}  // namespace

TEST_CASE("kernel spec rejects non-positive width") {
    CHECK_THROWS_AS(KernelSpec(0.0), InvalidArgument);
    CHECK_THROWS_AS(KernelSpec(-1.0), InvalidArgument);
    CHECK_THROWS_AS(KernelSpec(std::nan("")), InvalidArgument);
    CHECK_NOTHROW(KernelSpec(1e-3));
}

TEST_CASE("kernel_eval closed forms") {
    const KernelSpec s1(1.0);
    CHECK(kernel_eval(s1, vec2(0, 0)) == 1.0);
    CHECK(kernel_eval(s1, vec2(1, 0)) == doctest::Approx(0.3678794411714423).epsilon(1e-15));

    Rng rng(11);
    const KernelSpec s2(2.0);
    for (int k = 0; k < 20; ++k) {
        const Eigen::VectorXd x = rng.vector(3, -2, 2);
        CHECK(kernel_eval(s2, x) == kernel_eval(s2, -x));
        const double v = kernel_eval(s2, x);
        CHECK(v > 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("kernel_grad closed forms and oddness") {
    const KernelSpec s1(1.0);
    CHECK(kernel_grad(s1, vec2(0, 0)).norm() == 0.0);
    const Eigen::VectorXd g = kernel_grad(s1, vec2(1, 0));
    CHECK(g(0) == doctest::Approx(-2.0 * std::exp(-1.0)).epsilon(1e-15));
    CHECK(g(1) == 0.0);

    Rng rng(12);
    for (int k = 0; k < 20; ++k) {
        const Eigen::VectorXd x = rng.vector(2, -2, 2);
        CHECK((kernel_grad(s1, -x) + kernel_grad(s1, x)).norm() == 0.0);
    }
}

TEST_CASE("kernel_grad matches central differences of kernel_eval") {
    Rng rng(13);
    const double h = 1e-5;
    for (double sigma : {0.5, 1.0, 3.0}) {
        const KernelSpec spec(sigma);
        for (int k = 0; k < 25; ++k) {
            const Eigen::VectorXd x = rng.vector(3, -1.5, 1.5);
            const Eigen::VectorXd g = kernel_grad(spec, x);
            for (Eigen::Index a = 0; a < x.size(); ++a) {
                Eigen::VectorXd xp = x, xm = x;
                xp(a) += h;
                xm(a) -= h;
                const double fd = (kernel_eval(spec, xp) - kernel_eval(spec, xm)) / (2 * h);
                CHECK(std::abs(fd - g(a)) < 1e-8);
            }
        }
    }
}

TEST_CASE("kernel_hess closed form, symmetry and finite differences") {
    const KernelSpec s1(1.0);
    const Eigen::VectorXd e1 = vec2(1, 0);
    CHECK(kernel_hess(s1, vec2(0, 0), e1, e1) == -2.0);

    Rng rng(14);
    const double h = 1e-5;
    for (double sigma : {0.7, 1.0, 2.5}) {
        const KernelSpec spec(sigma);
        for (int k = 0; k < 25; ++k) {
            const Eigen::VectorXd x = rng.vector(2, -1.5, 1.5);
            const Eigen::VectorXd u = rng.vector(2);
            const Eigen::VectorXd v = rng.vector(2);
            CHECK(kernel_hess(spec, x, u, v) == doctest::Approx(kernel_hess(spec, x, v, u)).epsilon(1e-14));

            // differences of the gradient along u, paired with v
            const double fd_grad = (kernel_grad(spec, x + h * u) - kernel_grad(spec, x - h * u)).dot(v) / (2 * h);
            CHECK(std::abs(fd_grad - kernel_hess(spec, x, u, v)) < 1e-6);

            // second-order central differences of the value
            const double hh = 1e-4;
            const double fd2 = (kernel_eval(spec, x + hh * (u + v)) - kernel_eval(spec, x + hh * (u - v)) -
                                kernel_eval(spec, x - hh * (u - v)) + kernel_eval(spec, x - hh * (u + v))) /
                               (4 * hh * hh);
            CHECK(std::abs(fd2 - kernel_hess(spec, x, u, v)) < 1e-6);
        }
    }
}

TEST_CASE("gram matrix entries") {
    const KernelSpec s1(1.0);
    const GramMatrix one = gram(s1, Landmarks(column({0.3})));
    CHECK(one.size() == 1);
    CHECK(one.entries()(0, 0) == 1.0);

    const GramMatrix two = gram(s1, Landmarks(column({0.0, 1.0})));
    const double e = std::exp(-1.0);
    CHECK(two.entries()(0, 0) == 1.0);
    CHECK(two.entries()(1, 1) == 1.0);
    CHECK(two.entries()(0, 1) == doctest::Approx(e).epsilon(1e-15));
    CHECK(two.entries()(1, 0) == two.entries()(0, 1));
}

TEST_CASE("gram_solve on the 2x2 case matches the analytic inverse") {
    const KernelSpec s1(1.0);
    const GramMatrix g = gram(s1, Landmarks(column({0.0, 1.0})));
    const double e = std::exp(-1.0);
    const double det = 1.0 - e * e;
    const PointArray x = gram_solve(g, column({1.0, 0.0}));
    CHECK(x(0, 0) == doctest::Approx(1.0 / det).epsilon(1e-13));
    CHECK(x(1, 0) == doctest::Approx(-e / det).epsilon(1e-13));

    const PointArray zero = gram_solve(g, PointArray::Zero(2, 3));
    CHECK(zero.norm() == 0.0);
}

TEST_CASE("gram is symmetric, factorizable, and solve inverts apply") {
    Rng rng(15);
    for (int trial = 0; trial < 60; ++trial) {
        const double sigma = rng.uniform(0.3, 3.0);
        const KernelSpec spec(sigma);
        // A pair at separation 1e-3 sqrt(sigma) is always factorizable; larger
        // clusters at that separation are not (the smallest eigenvalue decays
        // like a power of the separation), so crowded sets use a wider spread.
        const Eigen::Index n = rng.integer(1, 16);
        const Eigen::Index dim = rng.integer(1, 3);
        const double separation = (n <= 2 ? 1e-3 : 0.2) * std::sqrt(sigma);
        const Landmarks q = rng.landmarks(n, dim, separation, 1.5 * std::sqrt(sigma) * double(n));
        const GramMatrix g = gram(spec, q);
        CHECK((g.entries() - g.entries().transpose()).norm() == 0.0);
        CHECK(g.min_pivot() > 0.0);
        const Eigen::MatrixXd l = g.factor();
        CHECK((l * l.transpose() - g.entries()).norm() < 1e-12 * double(n));

        if (min_pairwise_distance(q.points()) > 0.3 * std::sqrt(sigma) && n <= 16) {
            const PointArray x = rng.array(n, dim);
            const PointArray back = gram_solve(g, g.apply(x));
            CHECK((back - x).norm() <= 1e-10 * x.norm());
        }
    }
}

TEST_CASE("near-coincident landmarks are reported as NearSingular") {
    const KernelSpec spec(1.0);
    PointArray p(3, 1);
    p << 0.0, 1e-9, 1.0;
    CHECK_THROWS_AS((void)gram(spec, Landmarks(p)), NearSingular);
    CHECK_THROWS_AS((void)gram(spec, Landmarks(column({0.0, 1.0}))).solve(PointArray::Zero(3, 1)),
                    ShapeMismatch);
}
