#pragma once

#include <functional>
#include <optional>

#include <Eigen/Dense>

#include "shapespace/kernel.hpp"
#include "shapespace/landmarks.hpp"

namespace shapespace {

/// Stress D(alpha, beta): the derivative of the field q -> beta#(q) in the
/// direction alpha#, slot i = sum_j <grad K(q_i - q_j), alpha#_i - alpha#_j> beta_j.
/// D(alpha, beta) - D(beta, alpha) is the Lie bracket [alpha#, beta#].
[[nodiscard]] Tangent stress(const KernelSpec& spec, const Landmarks& q, const Covector& alpha,
                             const Covector& beta);

/// Force F(alpha, beta) = 1/2 d(cometric(alpha, beta)), slot i =
/// 1/2 sum_k grad K(q_i - q_k) (<alpha_i, beta_k> + <beta_i, alpha_k>).
[[nodiscard]] Covector force(const KernelSpec& spec, const Landmarks& q, const Covector& alpha,
                             const Covector& beta);

/// Coordinate Lie bracket [alpha#, beta#] of the constant-covector fields.
[[nodiscard]] Tangent bracket(const KernelSpec& spec, const Landmarks& q, const Covector& alpha,
                              const Covector& beta);

/// Per-term breakdown of the curvature numerator.
struct CurvatureTerms {
    /// <D(a,b)+D(b,a), F(a,b)> - <D(a,a), F(b,b)> - <D(b,b), F(a,a)>
    double stress_force = 0.0;
    /// -1/2 sum_ij ( d2K(db,db)<a_i,a_j> - 2 d2K(db,da)<b_i,a_j> + d2K(da,da)<b_i,b_j> )
    double kernel_hessian = 0.0;
    /// -|F(a,b)|^2_{g^-1} + g^-1(F(a,a), F(b,b))
    double force_norms = 0.0;
    /// 3/4 |[a#, b#]|^2_g
    double bracket = 0.0;

    [[nodiscard]] double sum() const noexcept {
        return stress_force + kernel_hessian + force_norms + bracket;
    }
};

struct CurvatureReport {
    /// g(R(a#, b#) a#, b#) for the constant 1-forms a, b.
    double numerator = 0.0;
    /// |a#|^2 |b#|^2 - g(a#, b#)^2
    double area_squared = 0.0;
    /// Sectional curvature of the plane span{a#, b#}; empty when degenerate.
    std::optional<double> sectional;
    CurvatureTerms terms;
};

/// Relative area floor: a plane is degenerate when
/// area_squared <= kDegenerateArea * |a#|^2 |b#|^2.
inline constexpr double kDegenerateArea = 1e-10;

/// Curvature numerator in terms of stress and force. With the convention
/// R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y] this equals g(R(X,Y)X,Y), which is
/// minus K(X,Y) times the squared area.
[[nodiscard]] CurvatureReport sectional_numerator(const KernelSpec& spec, const Landmarks& q,
                                                  const Covector& alpha, const Covector& beta);

/// Sectional curvature K(a#, b#) = -numerator / area_squared. Throws
/// DegeneratePlane when a# and b# are (nearly) parallel.
[[nodiscard]] double sectional_curvature(const KernelSpec& spec, const Landmarks& q,
                                         const Covector& alpha, const Covector& beta);

/// Metric tensor field on an open subset of R^d.
using MetricField = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

struct FiniteDifferenceSteps {
    double metric = 1e-4;       ///< step for derivatives of the metric tensor
    double christoffel = 1e-3;  ///< step for derivatives of the Christoffel symbols
    /// curvature_fd_oracle only: extrapolate over (christoffel, christoffel / 2)
    /// to cancel the leading h^2 error of the outer difference.
    bool richardson = true;
};

/// Christoffel symbols Gamma^m_{ij} at x from central differences of g,
/// returned as a d x (d*d) matrix with column i*d + j.
[[nodiscard]] Eigen::MatrixXd christoffel_symbols(const MetricField& g, const Eigen::VectorXd& x,
                                                  double h);

/// g(R(P,Q)Q, P) in coordinates, with R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y]
/// and R^l_{ijk} = d_i Gamma^l_{jk} - d_j Gamma^l_{ik} + Gamma^l_{im} Gamma^m_{jk}
///                 - Gamma^l_{jm} Gamma^m_{ik}.
/// Positive on the round sphere.
[[nodiscard]] double coordinate_curvature(const MetricField& g, const Eigen::VectorXd& x,
                                          const Eigen::VectorXd& p, const Eigen::VectorXd& r,
                                          const FiniteDifferenceSteps& steps);

/// Finite-difference curvature of the landmark metric G_{(ia)(jb)} = K^{-1}(q)_{ij} delta_ab,
/// treating Land^N as an open subset of R^{N n}. Returns g(R(P,Q)P,Q), the same
/// quantity as sectional_numerator(flat P, flat Q). Steps scale with sqrt(sigma).
[[nodiscard]] double curvature_fd_oracle(const KernelSpec& spec, const Landmarks& q, const Tangent& p,
                                         const Tangent& r, FiniteDifferenceSteps steps = {});

}  // namespace shapespace
