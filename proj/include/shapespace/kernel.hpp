#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "shapespace/landmarks.hpp"

namespace shapespace {

enum class KernelFamily { Gaussian };

/// Scalar reproducing kernel K(x) = exp(-|x|^2 / sigma), the Green's function
/// of the inertia operator. sigma is a squared length scale.
class KernelSpec {
public:
    explicit KernelSpec(double sigma, KernelFamily family = KernelFamily::Gaussian);

    [[nodiscard]] double sigma() const noexcept { return sigma_; }
    [[nodiscard]] KernelFamily family() const noexcept { return family_; }

    /// K as a function of r2 = |x|^2.
    [[nodiscard]] double profile(double r2) const noexcept { return std::exp(-r2 / sigma_); }

    /// grad K(x) = slope(K(x)) * x, i.e. slope = -2 K / sigma.
    [[nodiscard]] double slope(double k) const noexcept { return -2.0 * k / sigma_; }

private:
    double sigma_;
    KernelFamily family_;
};

[[nodiscard]] double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x);

[[nodiscard]] Eigen::VectorXd kernel_grad(const KernelSpec& spec,
                                          const Eigen::Ref<const Eigen::VectorXd>& x);

/// Second derivative d^2K(x)(u, v) = K(x) [ (4/sigma^2) <x,u><x,v> - (2/sigma) <u,v> ].
[[nodiscard]] double kernel_hess(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                                 const Eigen::Ref<const Eigen::VectorXd>& u,
                                 const Eigen::Ref<const Eigen::VectorXd>& v);

/// K(q)_{ij} = K(q_i - q_j) together with its Cholesky factor. Immutable.
class GramMatrix {
public:
    /// Factorization fails with NearSingular when a Cholesky pivot drops below
    /// pivot_floor(N).
    GramMatrix(const KernelSpec& spec, const Landmarks& q);

    /// Builds from raw points without re-validating distinctness.
    GramMatrix(const KernelSpec& spec, const PointArray& points);

    [[nodiscard]] Eigen::Index size() const noexcept { return entries_.rows(); }
    [[nodiscard]] const Eigen::MatrixXd& entries() const noexcept { return entries_; }
    [[nodiscard]] Eigen::MatrixXd factor() const { return llt_.matrixL(); }
    [[nodiscard]] double min_pivot() const noexcept { return min_pivot_; }
    /// Reciprocal of the LLT 1-norm condition estimate.
    [[nodiscard]] double condition_estimate() const noexcept { return condition_; }

    /// Solves K X = rhs column by column; rhs has N rows.
    [[nodiscard]] PointArray solve(const PointArray& rhs) const;

    /// Product K * x.
    [[nodiscard]] PointArray apply(const PointArray& x) const;

    [[nodiscard]] static double pivot_floor(Eigen::Index n) noexcept { return 1e-12 * double(n); }

private:
    void factorize();

    Eigen::MatrixXd entries_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    double min_pivot_ = 0.0;
    double condition_ = 0.0;
};

[[nodiscard]] GramMatrix gram(const KernelSpec& spec, const Landmarks& q);

[[nodiscard]] PointArray gram_solve(const GramMatrix& g, const PointArray& rhs);

}  // namespace shapespace
