#include "shapespace/landmarks.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "shapespace/error.hpp"

namespace shapespace {

double min_pairwise_distance(const PointArray& points) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < points.rows(); ++j) {
            best = std::min(best, (points.row(i) - points.row(j)).squaredNorm());
        }
    }
    return std::sqrt(best);
}

Landmarks::Landmarks(PointArray points) : points_(std::move(points)) {
    if (points_.rows() < 1 || points_.cols() < 1) {
        throw InvalidLandmarks("landmarks: need at least one point of dimension >= 1");
    }
    if (!points_.allFinite()) {
        throw InvalidLandmarks("landmarks: non-finite coordinate");
    }
    for (Eigen::Index i = 0; i < points_.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < points_.rows(); ++j) {
            if ((points_.row(i) - points_.row(j)).norm() <= kMinSeparation) {
                throw InvalidLandmarks("landmarks: points " + std::to_string(i) + " and " +
                                       std::to_string(j) + " coincide");
            }
        }
    }
}

double Landmarks::min_pairwise_distance() const {
    return shapespace::min_pairwise_distance(points_);
}

Landmarks Landmarks::translated(const Eigen::Ref<const Eigen::RowVectorXd>& shift) const {
    if (shift.size() != dim()) {
        throw ShapeMismatch("translated: shift has wrong dimension");
    }
    PointArray moved = points_;
    moved.rowwise() += shift;
    return Landmarks(std::move(moved));
}

void require_shape(const Landmarks& q, const PointArray& values, const char* what) {
    if (values.rows() != q.count() || values.cols() != q.dim()) {
        throw ShapeMismatch(std::string(what) + ": expected " + std::to_string(q.count()) + "x" +
                            std::to_string(q.dim()) + ", got " + std::to_string(values.rows()) +
                            "x" + std::to_string(values.cols()));
    }
}

}  // namespace shapespace
