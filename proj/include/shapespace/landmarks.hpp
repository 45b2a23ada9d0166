#pragma once

#include <Eigen/Dense>

namespace shapespace {

/// N x n array, one row per landmark. Row-major so a landmark's coordinates
/// are contiguous and numpy arrays map onto it without a copy.
using PointArray = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// An ordered tuple of pairwise-distinct points q_1..q_N in R^n.
class Landmarks {
public:
    /// Minimum pairwise distance below which a configuration is rejected.
    static constexpr double kMinSeparation = 1e-12;

    /// Throws InvalidLandmarks when N or n is zero, a coordinate is not
    /// finite, or two points are closer than kMinSeparation.
    explicit Landmarks(PointArray points);

    [[nodiscard]] const PointArray& points() const noexcept { return points_; }
    [[nodiscard]] Eigen::Index count() const noexcept { return points_.rows(); }
    [[nodiscard]] Eigen::Index dim() const noexcept { return points_.cols(); }
    [[nodiscard]] auto point(Eigen::Index i) const { return points_.row(i); }

    [[nodiscard]] double min_pairwise_distance() const;
    [[nodiscard]] Landmarks translated(const Eigen::Ref<const Eigen::RowVectorXd>& shift) const;

private:
    PointArray points_;
};

/// Smallest pairwise distance between the rows of `points` (+inf for N = 1).
[[nodiscard]] double min_pairwise_distance(const PointArray& points);

/// Momenta alpha_1..alpha_N, an element of the cotangent space at q.
struct Covector {
    PointArray values;
};

/// Velocities P_1..P_N, an element of the tangent space at q.
struct Tangent {
    PointArray values;
};

/// Canonical pairing sum_i <v_i, c_i> between a tangent vector and a covector.
[[nodiscard]] inline double pairing(const Tangent& v, const Covector& c) {
    return v.values.cwiseProduct(c.values).sum();
}

/// Throws ShapeMismatch unless `values` is count() x dim() of `q`.
void require_shape(const Landmarks& q, const PointArray& values, const char* what);

}  // namespace shapespace
