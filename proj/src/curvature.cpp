#include "shapespace/curvature.hpp"

#include <cmath>

#include "shapespace/error.hpp"
#include "shapespace/landmark_metric.hpp"

namespace shapespace {

namespace {

struct Sharpened {
    PointArray alpha_sharp;
    PointArray beta_sharp;
};

// D(alpha, beta) given alpha# precomputed.
PointArray stress_from_sharp(const KernelSpec& spec, const PointArray& q, const PointArray& a_sharp,
                             const PointArray& beta) {
    const Eigen::Index n = q.rows();
    PointArray out = PointArray::Zero(n, q.cols());
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const auto diff = (q.row(i) - q.row(j)).eval();
            const double slope = spec.slope(spec.profile(diff.squaredNorm()));
            const double c = slope * diff.dot(a_sharp.row(i) - a_sharp.row(j));
            out.row(i) += c * beta.row(j);
        }
    }
    return out;
}

PointArray force_raw(const KernelSpec& spec, const PointArray& q, const PointArray& alpha,
                     const PointArray& beta) {
    const Eigen::Index n = q.rows();
    PointArray out = PointArray::Zero(n, q.cols());
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < n; ++k) {
            if (i == k) continue;
            const auto diff = (q.row(i) - q.row(k)).eval();
            const double slope = spec.slope(spec.profile(diff.squaredNorm()));
            const double c = 0.5 * (alpha.row(i).dot(beta.row(k)) + beta.row(i).dot(alpha.row(k)));
            out.row(i) += (slope * c) * diff;
        }
    }
    return out;
}

double hess_raw(const KernelSpec& spec, double k, const Eigen::RowVectorXd& x,
                const Eigen::RowVectorXd& u, const Eigen::RowVectorXd& v) {
    const double s = spec.sigma();
    return k * (4.0 / (s * s) * x.dot(u) * x.dot(v) - 2.0 / s * u.dot(v));
}

}  // namespace

Tangent stress(const KernelSpec& spec, const Landmarks& q, const Covector& alpha, const Covector& beta) {
    require_shape(q, alpha.values, "stress alpha");
    require_shape(q, beta.values, "stress beta");
    const PointArray a_sharp = GramMatrix(spec, q).apply(alpha.values);
    return {stress_from_sharp(spec, q.points(), a_sharp, beta.values)};
}

Covector force(const KernelSpec& spec, const Landmarks& q, const Covector& alpha, const Covector& beta) {
    require_shape(q, alpha.values, "force alpha");
    require_shape(q, beta.values, "force beta");
    return {force_raw(spec, q.points(), alpha.values, beta.values)};
}

Tangent bracket(const KernelSpec& spec, const Landmarks& q, const Covector& alpha,
                const Covector& beta) {
    require_shape(q, alpha.values, "bracket alpha");
    require_shape(q, beta.values, "bracket beta");
    const GramMatrix g(spec, q);
    const PointArray a_sharp = g.apply(alpha.values);
    const PointArray b_sharp = g.apply(beta.values);
    return {stress_from_sharp(spec, q.points(), a_sharp, beta.values) -
            stress_from_sharp(spec, q.points(), b_sharp, alpha.values)};
}

CurvatureReport sectional_numerator(const KernelSpec& spec, const Landmarks& q, const Covector& alpha,
                                    const Covector& beta) {
    require_shape(q, alpha.values, "sectional_numerator alpha");
    require_shape(q, beta.values, "sectional_numerator beta");
    const PointArray& x = q.points();
    const PointArray& a = alpha.values;
    const PointArray& b = beta.values;
    const GramMatrix g(spec, q);
    const PointArray as = g.apply(a);
    const PointArray bs = g.apply(b);

    const Tangent d_ab{stress_from_sharp(spec, x, as, b)};
    const Tangent d_ba{stress_from_sharp(spec, x, bs, a)};
    const Tangent d_aa{stress_from_sharp(spec, x, as, a)};
    const Tangent d_bb{stress_from_sharp(spec, x, bs, b)};
    const Covector f_ab{force_raw(spec, x, a, b)};
    const Covector f_aa{force_raw(spec, x, a, a)};
    const Covector f_bb{force_raw(spec, x, b, b)};

    CurvatureReport report;
    CurvatureTerms& t = report.terms;
    t.stress_force = pairing(Tangent{d_ab.values + d_ba.values}, f_ab) - pairing(d_aa, f_bb) -
                     pairing(d_bb, f_aa);

    double hess_sum = 0.0;
    for (Eigen::Index i = 0; i < q.count(); ++i) {
        for (Eigen::Index j = 0; j < q.count(); ++j) {
            const Eigen::RowVectorXd diff = x.row(i) - x.row(j);
            const Eigen::RowVectorXd db = bs.row(i) - bs.row(j);
            const Eigen::RowVectorXd da = as.row(i) - as.row(j);
            const double k = spec.profile(diff.squaredNorm());
            const double bb = hess_raw(spec, k, diff, db, db) * a.row(i).dot(a.row(j));
            const double ba = 2.0 * hess_raw(spec, k, diff, db, da) * b.row(i).dot(a.row(j));
            const double aa = hess_raw(spec, k, diff, da, da) * b.row(i).dot(b.row(j));
            hess_sum += (bb - ba) + aa;
        }
    }
    t.kernel_hessian = -0.5 * hess_sum;

    t.force_norms = -cometric(spec, q, f_ab, f_ab) + cometric(spec, q, f_aa, f_bb);

    const PointArray br = d_ab.values - d_ba.values;
    t.bracket = 0.75 * g.solve(br).cwiseProduct(br).sum();

    report.numerator = t.sum();
    const double aa = cometric(spec, q, alpha, alpha);
    const double bb = cometric(spec, q, beta, beta);
    const double ab = cometric(spec, q, alpha, beta);
    report.area_squared = aa * bb - ab * ab;
    if (report.area_squared > kDegenerateArea * aa * bb) {
        report.sectional = -report.numerator / report.area_squared;
    }
    return report;
}

double sectional_curvature(const KernelSpec& spec, const Landmarks& q, const Covector& alpha,
                           const Covector& beta) {
    const CurvatureReport report = sectional_numerator(spec, q, alpha, beta);
    if (!report.sectional) {
        throw DegeneratePlane("sectional_curvature: alpha# and beta# span a degenerate plane");
    }
    return *report.sectional;
}

Eigen::MatrixXd christoffel_symbols(const MetricField& g, const Eigen::VectorXd& x, double h) {
    const Eigen::Index d = x.size();
    std::vector<Eigen::MatrixXd> dg(static_cast<std::size_t>(d));
    for (Eigen::Index k = 0; k < d; ++k) {
        Eigen::VectorXd xp = x, xm = x;
        xp(k) += h;
        xm(k) -= h;
        dg[std::size_t(k)] = (g(xp) - g(xm)) / (2.0 * h);
    }
    const Eigen::MatrixXd g_inv = g(x).inverse();
    // First-kind symbols [ij, l] = 1/2 (d_i g_jl + d_j g_il - d_l g_ij).
    Eigen::MatrixXd first(d, d * d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            for (Eigen::Index l = 0; l < d; ++l) {
                first(l, i * d + j) = 0.5 * (dg[std::size_t(i)](j, l) + dg[std::size_t(j)](i, l) -
                                             dg[std::size_t(l)](i, j));
            }
        }
    }
    return g_inv * first;
}

namespace {

// Gamma(u, v)^m = Gamma^m_{ij} u^i v^j
Eigen::VectorXd contract(const Eigen::MatrixXd& gamma, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    const Eigen::Index d = u.size();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            out += gamma.col(i * d + j) * (u(i) * v(j));
        }
    }
    return out;
}

}  // namespace

double coordinate_curvature(const MetricField& g, const Eigen::VectorXd& x, const Eigen::VectorXd& p,
                            const Eigen::VectorXd& r, const FiniteDifferenceSteps& steps) {
    const Eigen::Index d = x.size();
    if (p.size() != d || r.size() != d) {
        throw ShapeMismatch("coordinate_curvature: vectors do not match the chart dimension");
    }
    const Eigen::MatrixXd gamma = christoffel_symbols(g, x, steps.metric);
    // sum_i P^i d_i Gamma(Q,Q) - sum_j Q^j d_j Gamma(P,Q)
    Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
    for (Eigen::Index k = 0; k < d; ++k) {
        Eigen::VectorXd xp = x, xm = x;
        xp(k) += steps.christoffel;
        xm(k) -= steps.christoffel;
        const Eigen::MatrixXd d_gamma = (christoffel_symbols(g, xp, steps.metric) -
                                         christoffel_symbols(g, xm, steps.metric)) /
                                        (2.0 * steps.christoffel);
        w += p(k) * contract(d_gamma, r, r) - r(k) * contract(d_gamma, p, r);
    }
    w += contract(gamma, p, contract(gamma, r, r)) - contract(gamma, r, contract(gamma, p, r));
    return p.dot(g(x) * w);
}

double curvature_fd_oracle(const KernelSpec& spec, const Landmarks& q, const Tangent& p,
                           const Tangent& r, FiniteDifferenceSteps steps) {
    require_shape(q, p.values, "curvature_fd_oracle P");
    require_shape(q, r.values, "curvature_fd_oracle Q");
    const Eigen::Index count = q.count();
    const Eigen::Index dim = q.dim();
    const MetricField metric_tensor = [&](const Eigen::VectorXd& flat_q) -> Eigen::MatrixXd {
        const PointArray pts = Eigen::Map<const PointArray>(flat_q.data(), count, dim);
        const GramMatrix gm(spec, pts);
        const Eigen::MatrixXd k_inv = gm.solve(PointArray::Identity(count, count));
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(count * dim, count * dim);
        for (Eigen::Index i = 0; i < count; ++i) {
            for (Eigen::Index j = 0; j < count; ++j) {
                for (Eigen::Index a = 0; a < dim; ++a) out(i * dim + a, j * dim + a) = k_inv(i, j);
            }
        }
        return out;
    };
    const double scale = std::sqrt(spec.sigma());
    steps.metric *= scale;
    steps.christoffel *= scale;
    const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(q.points().data(), count * dim);
    const Eigen::VectorXd pv = Eigen::Map<const Eigen::VectorXd>(p.values.data(), count * dim);
    const Eigen::VectorXd rv = Eigen::Map<const Eigen::VectorXd>(r.values.data(), count * dim);
    // g(R(P,Q)P,Q) = -g(R(P,Q)Q,P)
    const double coarse = -coordinate_curvature(metric_tensor, x, pv, rv, steps);
    if (!steps.richardson) return coarse;
    // The outer difference dominates the error and is even in its step.
    FiniteDifferenceSteps half = steps;
    half.christoffel *= 0.5;
    const double fine = -coordinate_curvature(metric_tensor, x, pv, rv, half);
    return (4.0 * fine - coarse) / 3.0;
}

}  // namespace shapespace
