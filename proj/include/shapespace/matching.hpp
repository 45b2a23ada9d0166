#pragma once

#include <optional>
#include <vector>

#include "shapespace/error.hpp"
#include "shapespace/geodesic.hpp"
#include "shapespace/kernel.hpp"
#include "shapespace/landmarks.hpp"

namespace shapespace {

struct OptimizerOptions {
    int max_iters = 500;
    double grad_tol = 1e-6;
    /// Central-difference step, scaled by (|alpha0| + 1).
    double fd_step = 1e-5;
    double armijo_c = 1e-4;
    int max_halvings = 30;
    /// Trial step of the first iteration.
    double initial_step = 1.0;
    /// Start each later line search from the Barzilai-Borwein step
    /// <s,s>/<s,y> instead of initial_step.
    bool barzilai_borwein = true;
};

struct MatchProblem {
    Landmarks template_points;
    Landmarks target;
    KernelSpec spec;
    /// Weight of the path energy.
    double lambda = 0.0;
    int shoot_steps = kDefaultSteps;
    OptimizerOptions opt;
    ShootOptions shoot;

    /// Throws ShapeMismatch / InvalidArgument on inconsistent fields.
    void validate() const;
};

struct MatchResult {
    Covector alpha0;
    GeodesicPath path;
    /// Objective at the start point and after every accepted step.
    std::vector<double> objective_history;
    /// 1/2 |q(1) - target|^2
    double misfit = 0.0;
    double energy = 0.0;
    bool converged = false;
    int iterations = 0;
    double grad_norm = 0.0;
};

/// Raised when Armijo backtracking finds no decrease; carries the best iterate.
class LineSearchFailed : public NumericalError {
public:
    LineSearchFailed(const std::string& what, MatchResult partial)
        : NumericalError(what), partial_(std::move(partial)) {}
    [[nodiscard]] const char* kind() const noexcept override { return "LineSearchFailed"; }
    [[nodiscard]] const MatchResult& partial() const noexcept { return partial_; }

private:
    MatchResult partial_;
};

/// 1/2 |exp_map(q0, alpha0) - target|_F^2 + lambda * E(q0, alpha0).
[[nodiscard]] double objective(const MatchProblem& problem, const Covector& alpha0);

/// Central differences of objective over all N*n momentum coordinates.
[[nodiscard]] Covector gradient_fd(const MatchProblem& problem, const Covector& alpha0);

/// Gradient descent with Armijo backtracking on the initial momentum, started
/// from `start` (zero when empty).
[[nodiscard]] MatchResult match(const MatchProblem& problem,
                                const std::optional<Covector>& start = std::nullopt);

}  // namespace shapespace
