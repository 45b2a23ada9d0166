#include "shapespace/kernel.hpp"

#include <limits>
#include <sstream>

#include "shapespace/error.hpp"

namespace shapespace {

KernelSpec::KernelSpec(double sigma, KernelFamily family) : sigma_(sigma), family_(family) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw InvalidArgument("kernel: sigma must be positive and finite");
    }
}

double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x) {
    return spec.profile(x.squaredNorm());
}

Eigen::VectorXd kernel_grad(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x) {
    return spec.slope(spec.profile(x.squaredNorm())) * x;
}

double kernel_hess(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                   const Eigen::Ref<const Eigen::VectorXd>& u,
                   const Eigen::Ref<const Eigen::VectorXd>& v) {
    if (u.size() != x.size() || v.size() != x.size()) {
        throw ShapeMismatch("kernel_hess: argument dimensions differ");
    }
    const double s = spec.sigma();
    const double k = spec.profile(x.squaredNorm());
    return k * (4.0 / (s * s) * x.dot(u) * x.dot(v) - 2.0 / s * u.dot(v));
}

GramMatrix::GramMatrix(const KernelSpec& spec, const Landmarks& q) : GramMatrix(spec, q.points()) {}

GramMatrix::GramMatrix(const KernelSpec& spec, const PointArray& points) {
    const Eigen::Index n = points.rows();
    entries_.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        entries_(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double k = spec.profile((points.row(i) - points.row(j)).squaredNorm());
            entries_(i, j) = k;
            entries_(j, i) = k;
        }
    }
    factorize();
}

void GramMatrix::factorize() {
    llt_.compute(entries_);
    const Eigen::Index n = entries_.rows();
    if (llt_.info() != Eigen::Success) {
        throw NearSingular("gram: Cholesky factorization failed (landmarks nearly coincident)");
    }
    // The Cholesky pivot at step i is L_ii^2.
    min_pivot_ = llt_.matrixLLT().diagonal().array().square().minCoeff();
    if (min_pivot_ < pivot_floor(n)) {
        std::ostringstream msg;
        msg << "gram: Cholesky pivot " << min_pivot_ << " below floor " << pivot_floor(n)
            << " (landmarks nearly coincident relative to sigma)";
        throw NearSingular(msg.str());
    }
    const double rcond = llt_.rcond();
    condition_ = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
}

PointArray GramMatrix::solve(const PointArray& rhs) const {
    if (rhs.rows() != size()) {
        throw ShapeMismatch("gram_solve: right-hand side has wrong number of rows");
    }
    return llt_.solve(rhs);
}

PointArray GramMatrix::apply(const PointArray& x) const {
    if (x.rows() != size()) {
        throw ShapeMismatch("gram: operand has wrong number of rows");
    }
    return entries_ * x;
}

GramMatrix gram(const KernelSpec& spec, const Landmarks& q) { return GramMatrix(spec, q); }

PointArray gram_solve(const GramMatrix& g, const PointArray& rhs) { return g.solve(rhs); }

}  // namespace shapespace
