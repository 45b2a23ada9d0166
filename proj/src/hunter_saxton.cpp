#include "shapespace/hunter_saxton.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "shapespace/error.hpp"

namespace shapespace::hs {

Grid1D::Grid1D(double x_min, double x_max, int intervals)
    : x_min_(x_min), x_max_(x_max), intervals_(intervals) {
    if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_max > x_min)) {
        throw InvalidArgument("grid: need finite x_min < x_max");
    }
    if (intervals < 2) throw InvalidArgument("grid: need at least 2 intervals");
}

Eigen::VectorXd Grid1D::nodes() const {
    Eigen::VectorXd x(size());
    for (Eigen::Index k = 0; k < size(); ++k) x(k) = node(k);
    return x;
}

namespace {

void require_grid(const Grid1D& grid, const Eigen::VectorXd& values, const char* what) {
    if (values.size() != grid.size()) {
        std::ostringstream msg;
        msg << what << ": expected " << grid.size() << " samples, got " << values.size();
        throw ShapeMismatch(msg.str());
    }
}

void require_same_grid(const LineDiffeo& a, const LineDiffeo& b) {
    if (!(a.grid() == b.grid())) throw ShapeMismatch("hunter_saxton: diffeomorphisms live on different grids");
}

void require_support(const Eigen::VectorXd& v, const char* what) {
    if (std::abs(v(0)) > kSupportTolerance || std::abs(v(v.size() - 1)) > kSupportTolerance) {
        throw InvalidArgument(std::string(what) + ": must vanish at both ends of the grid window");
    }
}

}  // namespace

double trapezoid(const Grid1D& grid, const Eigen::VectorXd& values) {
    require_grid(grid, values, "trapezoid");
    const Eigen::Index m = values.size() - 1;
    return grid.spacing() * (values.segment(1, m - 1).sum() + 0.5 * (values(0) + values(m)));
}

Eigen::VectorXd cumulative_trapezoid(const Grid1D& grid, const Eigen::VectorXd& values) {
    require_grid(grid, values, "cumulative_trapezoid");
    const double h = grid.spacing();
    Eigen::VectorXd out(values.size());
    out(0) = 0.0;
    for (Eigen::Index k = 1; k < values.size(); ++k) {
        out(k) = out(k - 1) + 0.5 * h * (values(k - 1) + values(k));
    }
    return out;
}

Eigen::VectorXd derivative(const Grid1D& grid, const Eigen::VectorXd& values) {
    require_grid(grid, values, "derivative");
    const double h = grid.spacing();
    const Eigen::Index m = values.size() - 1;
    Eigen::VectorXd out(values.size());
    for (Eigen::Index k = 1; k < m; ++k) out(k) = (values(k + 1) - values(k - 1)) / (2.0 * h);
    out(0) = (-3.0 * values(0) + 4.0 * values(1) - values(2)) / (2.0 * h);
    out(m) = (3.0 * values(m) - 4.0 * values(m - 1) + values(m - 2)) / (2.0 * h);
    return out;
}

Eigen::VectorXd smooth_bump(const Grid1D& grid, double center, double half_width, double amplitude) {
    if (!(half_width > 0.0)) throw InvalidArgument("smooth_bump: half_width must be positive");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(grid.size());
    for (Eigen::Index k = 0; k < grid.size(); ++k) {
        const double r = (grid.node(k) - center) / half_width;
        if (std::abs(r) < 1.0) out(k) = amplitude * std::exp(1.0 - 1.0 / (1.0 - r * r));
    }
    return out;
}

ChartFunction::ChartFunction(Grid1D grid, Eigen::VectorXd values)
    : grid_(grid), values_(std::move(values)) {
    require_grid(grid_, values_, "chart function");
    if (!values_.allFinite()) throw InvalidArgument("chart function: non-finite sample");
    require_support(values_, "chart function");
    if (values_.minCoeff() < -2.0) {
        throw BoundaryHit("chart function: values below -2 leave the monotone completion");
    }
}

LineDiffeo::LineDiffeo(Grid1D grid, Eigen::VectorXd f_prime) : grid_(grid), f_prime_(std::move(f_prime)) {
    require_grid(grid_, f_prime_, "line diffeomorphism");
    if (!f_prime_.allFinite()) throw InvalidDiffeo("line diffeomorphism: non-finite f'");
    if (f_prime_.minCoeff() <= -1.0) throw InvalidDiffeo("line diffeomorphism: f' <= -1 somewhere");
    require_support(f_prime_, "line diffeomorphism f'");
}

LineDiffeo LineDiffeo::identity(const Grid1D& grid) {
    return LineDiffeo(grid, Eigen::VectorXd::Zero(grid.size()));
}

Eigen::VectorXd LineDiffeo::f() const { return cumulative_trapezoid(grid_, f_prime_); }

Eigen::VectorXd LineDiffeo::phi() const { return grid_.nodes() + f(); }

ChartFunction r_map(const LineDiffeo& phi) {
    const Eigen::VectorXd& fp = phi.f_prime();
    Eigen::VectorXd gamma(fp.size());
    for (Eigen::Index k = 0; k < fp.size(); ++k) {
        // 2 (sqrt(1 + f') - 1) without cancellation for small f'
        gamma(k) = 2.0 * fp(k) / (std::sqrt(1.0 + fp(k)) + 1.0);
    }
    return ChartFunction(phi.grid(), std::move(gamma));
}

namespace {

Eigen::VectorXd f_prime_of(const Eigen::VectorXd& gamma) {
    return 0.25 * gamma.array() * (gamma.array() + 4.0);
}

Eigen::VectorXd chart_point(const LineDiffeo& phi0, const LineDiffeo& phi1, double t) {
    require_same_grid(phi0, phi1);
    const Eigen::VectorXd g0 = r_map(phi0).values();
    const Eigen::VectorXd g1 = r_map(phi1).values();
    return (1.0 - t) * g0 + t * g1;
}

void require_in_group(const Eigen::VectorXd& gamma, double t) {
    if (gamma.minCoeff() <= -2.0) {
        std::ostringstream msg;
        msg << "chart line leaves the diffeomorphism group at t=" << t;
        throw BoundaryHit(msg.str());
    }
}

struct CubicHermite {
    double y0, y1, m0, m1;  // values and slopes already scaled by h
    [[nodiscard]] double value(double s) const {
        const double s2 = s * s, s3 = s2 * s;
        return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * m0 + (-2 * s3 + 3 * s2) * y1 +
               (s3 - s2) * m1;
    }
    [[nodiscard]] double slope(double s) const {
        const double s2 = s * s;
        return (6 * s2 - 6 * s) * y0 + (3 * s2 - 4 * s + 1) * m0 + (-6 * s2 + 6 * s) * y1 +
               (3 * s2 - 2 * s) * m1;
    }
};

// Solves H(s) = y on [0, 1] for a monotone increasing cubic with H(0) <= y < H(1).
double invert_cubic(const CubicHermite& c, double y) {
    double lo = 0.0, hi = 1.0;
    double s = (y - c.y0) / (c.y1 - c.y0);
    for (int it = 0; it < 60; ++it) {
        const double r = c.value(s) - y;
        if (r > 0.0) hi = s; else lo = s;
        const double d = c.slope(s);
        double next = d > 0.0 ? s - r / d : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - s) < 1e-15) return next;
        s = next;
    }
    return s;
}

// u = (d/dt phi) o phi^{-1} from nodal f'_t and d/dt f'_t. phi and the time
// derivative of f are evaluated between nodes by cubic Hermite interpolation
// using the exact nodal derivatives; the bracketing interval comes from the
// strictly increasing samples of phi.
Eigen::VectorXd eulerian_velocity(const Grid1D& grid, const Eigen::VectorXd& fp,
                                  const Eigen::VectorXd& dfp) {
    const double h = grid.spacing();
    const Eigen::VectorXd x = grid.nodes();
    const Eigen::VectorXd f = cumulative_trapezoid(grid, fp);
    const Eigen::VectorXd df = cumulative_trapezoid(grid, dfp);
    const Eigen::VectorXd phi = x + f;
    const Eigen::Index m = grid.intervals();
    Eigen::VectorXd u(grid.size());
    for (Eigen::Index j = 0; j < grid.size(); ++j) {
        const double y = x(j);
        if (y <= phi(0)) {
            u(j) = df(0);
        } else if (y >= phi(m)) {
            u(j) = df(m);
        } else {
            const auto it = std::upper_bound(phi.data(), phi.data() + phi.size(), y);
            const Eigen::Index k = Eigen::Index(it - phi.data()) - 1;
            const CubicHermite map{phi(k), phi(k + 1), h * (1.0 + fp(k)), h * (1.0 + fp(k + 1))};
            const CubicHermite rate{df(k), df(k + 1), h * dfp(k), h * dfp(k + 1)};
            u(j) = rate.value(invert_cubic(map, y));
        }
    }
    return u;
}

struct PathSample {
    Eigen::VectorXd f_prime;
    Eigen::VectorXd f_prime_rate;
};

PathSample sample_path(const LineDiffeo& phi0, const LineDiffeo& phi1, double t, PathKind kind) {
    require_same_grid(phi0, phi1);
    if (kind == PathKind::ChartLine) {
        const Eigen::VectorXd g0 = r_map(phi0).values();
        const Eigen::VectorXd g1 = r_map(phi1).values();
        const Eigen::VectorXd gt = (1.0 - t) * g0 + t * g1;
        require_in_group(gt, t);
        // d/dt 1/4 (gamma^2 + 4 gamma) = 1/4 (2 gamma + 4) (gamma1 - gamma0)
        return {f_prime_of(gt), (0.25 * (2.0 * gt.array() + 4.0) * (g1 - g0).array()).matrix()};
    }
    const Eigen::VectorXd fp = (1.0 - t) * phi0.f_prime() + t * phi1.f_prime();
    if (fp.minCoeff() <= -1.0) {
        std::ostringstream msg;
        msg << "f' line leaves the diffeomorphism group at t=" << t;
        throw BoundaryHit(msg.str());
    }
    return {fp, phi1.f_prime() - phi0.f_prime()};
}

}  // namespace

LineDiffeo r_inverse(const ChartFunction& gamma) {
    if (!gamma.in_group()) {
        throw BoundaryHit("r_inverse: min(gamma) <= -2, the point lies in the monotone completion");
    }
    return LineDiffeo(gamma.grid(), f_prime_of(gamma.values()));
}

LineDiffeo hs_geodesic(const LineDiffeo& phi0, const LineDiffeo& phi1, double t) {
    const Eigen::VectorXd gt = chart_point(phi0, phi1, t);
    require_in_group(gt, t);
    return LineDiffeo(phi0.grid(), f_prime_of(gt));
}

double hs_distance(const LineDiffeo& phi0, const LineDiffeo& phi1) {
    require_same_grid(phi0, phi1);
    const Eigen::VectorXd d = r_map(phi1).values() - r_map(phi0).values();
    return std::sqrt(trapezoid(phi0.grid(), d.array().square().matrix()));
}

Eigen::VectorXd hs_velocity(const LineDiffeo& phi0, const LineDiffeo& phi1, double t, PathKind kind) {
    const PathSample s = sample_path(phi0, phi1, t, kind);
    return eulerian_velocity(phi0.grid(), s.f_prime, s.f_prime_rate);
}

double hs_residual(const LineDiffeo& phi0, const LineDiffeo& phi1, const TimeSamples& times,
                   PathKind kind) {
    require_same_grid(phi0, phi1);
    if (times.intervals < 2 || !(times.end > times.begin)) {
        throw InvalidArgument("hs_residual: need at least 2 time intervals on a non-empty window");
    }
    const Grid1D& grid = phi0.grid();
    const double dt = (times.end - times.begin) / times.intervals;
    std::vector<Eigen::VectorXd> u;
    u.reserve(std::size_t(times.intervals) + 1);
    for (int k = 0; k <= times.intervals; ++k) {
        u.push_back(hs_velocity(phi0, phi1, times.begin + k * dt, kind));
    }
    double worst = 0.0;
    for (int k = 1; k < times.intervals; ++k) {
        const Eigen::VectorXd& uk = u[std::size_t(k)];
        const Eigen::VectorXd ut = (u[std::size_t(k + 1)] - u[std::size_t(k - 1)]) / (2.0 * dt);
        const Eigen::VectorXd ux = derivative(grid, uk);
        const Eigen::VectorXd source = cumulative_trapezoid(grid, ux.array().square().matrix());
        for (Eigen::Index j = 1; j + 1 < grid.size(); ++j) {
            worst = std::max(worst, std::abs(ut(j) + uk(j) * ux(j) - 0.5 * source(j)));
        }
    }
    return worst;
}

HitQuadratic hit_quadratic(const LineDiffeo& phi0, const LineDiffeo& phi1) {
    require_same_grid(phi0, phi1);
    const Grid1D& grid = phi0.grid();
    const Eigen::ArrayXd g0 = r_map(phi0).values().array();
    const Eigen::ArrayXd d = r_map(phi1).values().array() - g0;
    return {trapezoid(grid, (g0 * g0 + 4.0 * g0).matrix()),
            trapezoid(grid, (2.0 * g0 * d + 4.0 * d).matrix()),
            trapezoid(grid, (d * d).matrix())};
}

std::vector<double> diff_a_hit_times(const LineDiffeo& phi0, const LineDiffeo& phi1) {
    require_same_grid(phi0, phi1);
    if ((r_map(phi1).values() - r_map(phi0).values()).cwiseAbs().maxCoeff() == 0.0) {
        throw DegenerateDirection("diff_a_hit_times: phi0 and phi1 have the same chart image");
    }
    const HitQuadratic c = hit_quadratic(phi0, phi1);
    const double disc = c.c1 * c.c1 - 4.0 * c.c2 * c.c0;
    if (disc < 0.0) return {};
    if (disc == 0.0) return {-c.c1 / (2.0 * c.c2)};
    const double q = -0.5 * (c.c1 + std::copysign(std::sqrt(disc), c.c1));
    std::vector<double> roots{q / c.c2, c.c0 / q};
    std::sort(roots.begin(), roots.end());
    return roots;
}

std::optional<double> mon_exit_time(const LineDiffeo& phi0, const LineDiffeo& phi1) {
    require_same_grid(phi0, phi1);
    const Eigen::VectorXd g0 = r_map(phi0).values();
    const Eigen::VectorXd d = r_map(phi1).values() - g0;
    std::optional<double> exit;
    for (Eigen::Index k = 0; k < g0.size(); ++k) {
        if (d(k) < 0.0) {
            const double t = (-2.0 - g0(k)) / d(k);
            if (t > 1.0 && (!exit || t < *exit)) exit = t;
        }
    }
    return exit;
}

}  // namespace shapespace::hs
