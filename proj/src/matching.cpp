#include "shapespace/matching.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "shapespace/landmark_metric.hpp"

namespace shapespace {

void MatchProblem::validate() const {
    if (template_points.count() != target.count() || template_points.dim() != target.dim()) {
        throw ShapeMismatch("match: template and target must have the same shape");
    }
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw InvalidArgument("match: lambda must be a finite non-negative number");
    }
    if (shoot_steps < 1) throw InvalidArgument("match: shoot_steps must be >= 1");
    if (opt.max_iters < 0) throw InvalidArgument("match: max_iters must be >= 0");
    if (!(opt.grad_tol > 0.0)) throw InvalidArgument("match: grad_tol must be positive");
    if (!(opt.fd_step > 0.0)) throw InvalidArgument("match: fd_step must be positive");
    if (!(opt.armijo_c > 0.0 && opt.armijo_c < 1.0)) {
        throw InvalidArgument("match: armijo_c must lie in (0, 1)");
    }
    if (opt.max_halvings < 0) throw InvalidArgument("match: max_halvings must be >= 0");
    if (!(opt.initial_step > 0.0)) throw InvalidArgument("match: initial_step must be positive");
}

namespace {

double objective_raw(const MatchProblem& p, const PointArray& alpha) {
    const PointArray end = detail::integrate_endpoint(p.spec, p.template_points.points(), alpha, 1.0,
                                                      p.shoot_steps, p.shoot);
    const double data = 0.5 * (end - p.target.points()).squaredNorm();
    if (p.lambda == 0.0) return data;
    PointArray dq, da;
    return data + p.lambda * detail::hamiltonian_field(p.spec, p.template_points.points(), alpha, dq, da);
}

PointArray gradient_raw(const MatchProblem& p, const PointArray& alpha) {
    const double h = p.opt.fd_step * (alpha.norm() + 1.0);
    PointArray grad(alpha.rows(), alpha.cols());
    PointArray probe = alpha;
    for (Eigen::Index i = 0; i < alpha.rows(); ++i) {
        for (Eigen::Index a = 0; a < alpha.cols(); ++a) {
            probe(i, a) = alpha(i, a) + h;
            const double up = objective_raw(p, probe);
            probe(i, a) = alpha(i, a) - h;
            const double down = objective_raw(p, probe);
            probe(i, a) = alpha(i, a);
            grad(i, a) = (up - down) / (2.0 * h);
        }
    }
    return grad;
}

MatchResult finish(const MatchProblem& p, const PointArray& alpha, std::vector<double> history,
                   bool converged, int iterations, double grad_norm) {
    const Covector a{alpha};
    GeodesicPath path = shoot(p.spec, p.template_points, a, 1.0, p.shoot_steps, p.shoot);
    const double misfit = 0.5 * (path.back().q.points() - p.target.points()).squaredNorm();
    const double e = energy(p.spec, p.template_points, a);
    return MatchResult{a, std::move(path), std::move(history), misfit, e, converged, iterations, grad_norm};
}

}  // namespace

double objective(const MatchProblem& problem, const Covector& alpha0) {
    problem.validate();
    require_shape(problem.template_points, alpha0.values, "objective");
    return objective_raw(problem, alpha0.values);
}

Covector gradient_fd(const MatchProblem& problem, const Covector& alpha0) {
    problem.validate();
    require_shape(problem.template_points, alpha0.values, "gradient_fd");
    return {gradient_raw(problem, alpha0.values)};
}

MatchResult match(const MatchProblem& problem, const std::optional<Covector>& start) {
    problem.validate();
    const OptimizerOptions& opt = problem.opt;
    PointArray alpha = PointArray::Zero(problem.template_points.count(), problem.template_points.dim());
    if (start) {
        require_shape(problem.template_points, start->values, "match start");
        alpha = start->values;
    }

    double f = objective_raw(problem, alpha);
    std::vector<double> history{f};
    PointArray grad = gradient_raw(problem, alpha);
    PointArray prev_alpha, prev_grad;
    int iterations = 0;

    while (true) {
        const double grad_norm = grad.norm();
        if (grad_norm < opt.grad_tol) {
            return finish(problem, alpha, std::move(history), true, iterations, grad_norm);
        }
        if (iterations >= opt.max_iters) {
            return finish(problem, alpha, std::move(history), false, iterations, grad_norm);
        }

        double step = opt.initial_step;
        if (opt.barzilai_borwein && iterations > 0) {
            const PointArray s = alpha - prev_alpha;
            const double sy = s.cwiseProduct(grad - prev_grad).sum();
            const double bb = s.squaredNorm() / sy;
            if (sy > 0.0 && std::isfinite(bb)) step = bb;
        }

        const double slope = grad_norm * grad_norm;
        bool accepted = false;
        PointArray trial;
        double f_trial = std::numeric_limits<double>::infinity();
        for (int halving = 0; halving <= opt.max_halvings; ++halving, step *= 0.5) {
            trial = alpha - step * grad;
            try {
                f_trial = objective_raw(problem, trial);
            } catch (const NumericalError&) {
                // Trial geodesic collided or drifted: treat as no decrease.
                continue;
            }
            if (f_trial <= f - opt.armijo_c * step * slope) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            std::ostringstream msg;
            msg << "match: no Armijo decrease after " << opt.max_halvings << " halvings at iteration "
                << iterations << " (|grad| = " << grad_norm << ")";
            throw LineSearchFailed(msg.str(), finish(problem, alpha, std::move(history), false,
                                                     iterations, grad_norm));
        }

        prev_alpha = std::move(alpha);
        prev_grad = std::move(grad);
        alpha = std::move(trial);
        f = f_trial;
        history.push_back(f);
        ++iterations;
        grad = gradient_raw(problem, alpha);
    }
}

}  // namespace shapespace
