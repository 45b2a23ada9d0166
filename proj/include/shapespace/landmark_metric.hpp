#pragma once

#include <Eigen/Dense>

#include "shapespace/kernel.hpp"
#include "shapespace/landmarks.hpp"

namespace shapespace {

/// Inverse metric sum_{i,j} K(q_i - q_j) <alpha_i, beta_j>.
[[nodiscard]] double cometric(const KernelSpec& spec, const Landmarks& q, const Covector& alpha,
                              const Covector& beta);

/// Metric sum_{k,l} K^{-1}(q)_{kl} <P_k, Q_l>, evaluated through the Cholesky
/// factor of the Gram matrix.
[[nodiscard]] double metric(const KernelSpec& spec, const Landmarks& q, const Tangent& p,
                            const Tangent& r);

/// alpha#_k = sum_i K(q_k - q_i) alpha_i.
[[nodiscard]] Tangent sharp(const KernelSpec& spec, const Landmarks& q, const Covector& alpha);

/// Inverse of sharp: solves K(q) alpha = P.
[[nodiscard]] Covector flat(const KernelSpec& spec, const Landmarks& q, const Tangent& p);

/// E(q, alpha) = 1/2 cometric(q, alpha, alpha).
[[nodiscard]] double energy(const KernelSpec& spec, const Landmarks& q, const Covector& alpha);

/// Minimal-norm vector field on R^n whose values at the landmarks are P:
/// P^hor(x) = sum_{i,j} K(x - q_i) K^{-1}(q)_{ij} P_j.
class HorizontalLift {
public:
    HorizontalLift(KernelSpec spec, PointArray centers, PointArray weights)
        : spec_(spec), centers_(std::move(centers)), weights_(std::move(weights)) {}

    [[nodiscard]] Eigen::VectorXd operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const;

    /// Evaluates the field at every row of `xs`.
    [[nodiscard]] PointArray evaluate(const PointArray& xs) const;

    /// The momenta K^{-1}(q) P carried by each landmark.
    [[nodiscard]] const PointArray& weights() const noexcept { return weights_; }

private:
    KernelSpec spec_;
    PointArray centers_;
    PointArray weights_;
};

[[nodiscard]] HorizontalLift horizontal_lift(const KernelSpec& spec, const Landmarks& q,
                                             const Tangent& p);

}  // namespace shapespace
