#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace shapespace::hs {

/// Uniform grid x_min = x_0 < ... < x_M = x_max.
class Grid1D {
public:
    Grid1D(double x_min, double x_max, int intervals);

    [[nodiscard]] double x_min() const noexcept { return x_min_; }
    [[nodiscard]] double x_max() const noexcept { return x_max_; }
    [[nodiscard]] int intervals() const noexcept { return intervals_; }
    [[nodiscard]] Eigen::Index size() const noexcept { return intervals_ + 1; }
    [[nodiscard]] double spacing() const noexcept { return (x_max_ - x_min_) / intervals_; }
    [[nodiscard]] double node(Eigen::Index k) const noexcept {
        return k == intervals_ ? x_max_ : x_min_ + double(k) * spacing();
    }
    [[nodiscard]] Eigen::VectorXd nodes() const;

    friend bool operator==(const Grid1D&, const Grid1D&) = default;

private:
    double x_min_;
    double x_max_;
    int intervals_;
};

/// Trapezoid rule over the whole grid.
[[nodiscard]] double trapezoid(const Grid1D& grid, const Eigen::VectorXd& values);
/// Running trapezoid integral from x_min, zero at the first node.
[[nodiscard]] Eigen::VectorXd cumulative_trapezoid(const Grid1D& grid, const Eigen::VectorXd& values);
/// Central differences inside, second-order one-sided differences at the ends.
[[nodiscard]] Eigen::VectorXd derivative(const Grid1D& grid, const Eigen::VectorXd& values);

/// C-infinity bump a * exp(1 - 1/(1 - r^2)), r = (x - center)/half_width,
/// sampled on the grid (peak value a at the center).
[[nodiscard]] Eigen::VectorXd smooth_bump(const Grid1D& grid, double center, double half_width,
                                          double amplitude);

/// Samples of gamma = R(phi), compactly supported inside the grid window.
/// Accepts min(gamma) >= -2 (the monotone completion); in_group() tells
/// whether the point lies in the diffeomorphism group itself.
class ChartFunction {
public:
    ChartFunction(Grid1D grid, Eigen::VectorXd values);

    [[nodiscard]] const Grid1D& grid() const noexcept { return grid_; }
    [[nodiscard]] const Eigen::VectorXd& values() const noexcept { return values_; }
    [[nodiscard]] bool in_group() const { return values_.minCoeff() > -2.0; }

private:
    Grid1D grid_;
    Eigen::VectorXd values_;
};

/// phi = Id + f on the line, stored through samples of f' > -1 with compact
/// support; f is recovered by cumulative trapezoid quadrature with f(x_min) = 0.
class LineDiffeo {
public:
    LineDiffeo(Grid1D grid, Eigen::VectorXd f_prime);

    static LineDiffeo identity(const Grid1D& grid);

    [[nodiscard]] const Grid1D& grid() const noexcept { return grid_; }
    [[nodiscard]] const Eigen::VectorXd& f_prime() const noexcept { return f_prime_; }
    [[nodiscard]] Eigen::VectorXd f() const;
    [[nodiscard]] Eigen::VectorXd phi() const;

private:
    Grid1D grid_;
    Eigen::VectorXd f_prime_;
};

/// Boundary zeros are enforced to this absolute tolerance.
inline constexpr double kSupportTolerance = 1e-12;

/// R(phi) = 2 (sqrt(phi') - 1).
[[nodiscard]] ChartFunction r_map(const LineDiffeo& phi);

/// R^{-1}(gamma)(x) = x + 1/4 int_{-inf}^x (gamma^2 + 4 gamma). Throws
/// BoundaryHit when min(gamma) <= -2.
[[nodiscard]] LineDiffeo r_inverse(const ChartFunction& gamma);

/// Point at parameter t on the straight chart line through R(phi0), R(phi1).
[[nodiscard]] LineDiffeo hs_geodesic(const LineDiffeo& phi0, const LineDiffeo& phi1, double t);

/// |R(phi1) - R(phi0)|_{L^2}.
[[nodiscard]] double hs_distance(const LineDiffeo& phi0, const LineDiffeo& phi1);

/// Which family of paths between phi0 and phi1 to differentiate.
enum class PathKind {
    ChartLine,   ///< the geodesic: straight line in the R-chart
    FPrimeLine,  ///< straight line in f' (not a geodesic; used as a control)
};

/// Eulerian velocity u(t, .) = (d/dt phi_t) o phi_t^{-1} sampled on the grid.
[[nodiscard]] Eigen::VectorXd hs_velocity(const LineDiffeo& phi0, const LineDiffeo& phi1, double t,
                                          PathKind kind = PathKind::ChartLine);

struct TimeSamples {
    double begin = 0.0;
    double end = 1.0;
    int intervals = 10;
};

/// max over interior space/time nodes of |u_t + u u_x - 1/2 int_{-inf}^x u_x^2|.
[[nodiscard]] double hs_residual(const LineDiffeo& phi0, const LineDiffeo& phi1,
                                 const TimeSamples& times, PathKind kind = PathKind::ChartLine);

/// Coefficients of c(t) = int (gamma_t^2 + 4 gamma_t) = c0 + c1 t + c2 t^2.
struct HitQuadratic {
    double c0;
    double c1;
    double c2;
};

[[nodiscard]] HitQuadratic hit_quadratic(const LineDiffeo& phi0, const LineDiffeo& phi1);

/// Parameters t at which the geodesic lies in the subgroup with f(+inf) = 0,
/// sorted ascending; at most two.
[[nodiscard]] std::vector<double> diff_a_hit_times(const LineDiffeo& phi0, const LineDiffeo& phi1);

/// First t > 1 where the extended geodesic reaches gamma = -2 somewhere.
[[nodiscard]] std::optional<double> mon_exit_time(const LineDiffeo& phi0, const LineDiffeo& phi1);

}  // namespace shapespace::hs
