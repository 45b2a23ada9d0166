#include "shapespace/landmark_metric.hpp"

#include "shapespace/error.hpp"

namespace shapespace {

double cometric(const KernelSpec& spec, const Landmarks& q, const Covector& alpha,
                const Covector& beta) {
    require_shape(q, alpha.values, "cometric alpha");
    require_shape(q, beta.values, "cometric beta");
    const PointArray& x = q.points();
    double total = 0.0;
    for (Eigen::Index i = 0; i < q.count(); ++i) {
        total += alpha.values.row(i).dot(beta.values.row(i));
        for (Eigen::Index j = i + 1; j < q.count(); ++j) {
            const double k = spec.profile((x.row(i) - x.row(j)).squaredNorm());
            total += k * (alpha.values.row(i).dot(beta.values.row(j)) +
                          alpha.values.row(j).dot(beta.values.row(i)));
        }
    }
    return total;
}

double metric(const KernelSpec& spec, const Landmarks& q, const Tangent& p, const Tangent& r) {
    require_shape(q, p.values, "metric P");
    require_shape(q, r.values, "metric Q");
    const GramMatrix g(spec, q);
    return g.solve(p.values).cwiseProduct(r.values).sum();
}

Tangent sharp(const KernelSpec& spec, const Landmarks& q, const Covector& alpha) {
    require_shape(q, alpha.values, "sharp");
    return {GramMatrix(spec, q).apply(alpha.values)};
}

Covector flat(const KernelSpec& spec, const Landmarks& q, const Tangent& p) {
    require_shape(q, p.values, "flat");
    return {GramMatrix(spec, q).solve(p.values)};
}

double energy(const KernelSpec& spec, const Landmarks& q, const Covector& alpha) {
    return 0.5 * cometric(spec, q, alpha, alpha);
}

Eigen::VectorXd HorizontalLift::operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    if (x.size() != centers_.cols()) {
        throw ShapeMismatch("horizontal lift: evaluation point has wrong dimension");
    }
    Eigen::VectorXd out = Eigen::VectorXd::Zero(centers_.cols());
    for (Eigen::Index i = 0; i < centers_.rows(); ++i) {
        const double k = spec_.profile((x.transpose() - centers_.row(i)).squaredNorm());
        out += k * weights_.row(i).transpose();
    }
    return out;
}

PointArray HorizontalLift::evaluate(const PointArray& xs) const {
    PointArray out(xs.rows(), centers_.cols());
    for (Eigen::Index r = 0; r < xs.rows(); ++r) {
        out.row(r) = (*this)(xs.row(r).transpose()).transpose();
    }
    return out;
}

HorizontalLift horizontal_lift(const KernelSpec& spec, const Landmarks& q, const Tangent& p) {
    require_shape(q, p.values, "horizontal_lift");
    return HorizontalLift(spec, q.points(), GramMatrix(spec, q).solve(p.values));
}

}  // namespace shapespace
