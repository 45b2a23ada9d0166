#include "shapespace/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "shapespace/error.hpp"
#include "shapespace/landmark_metric.hpp"

namespace shapespace {

namespace detail {

double hamiltonian_field(const KernelSpec& spec, const PointArray& q, const PointArray& alpha,
                         PointArray& dq, PointArray& dalpha) {
    const Eigen::Index n = q.rows();
    dq = alpha;
    dalpha.setZero(n, q.cols());
    double twice_energy = alpha.squaredNorm();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = i + 1; k < n; ++k) {
            const auto diff = (q.row(i) - q.row(k)).eval();
            const double kik = spec.profile(diff.squaredNorm());
            const double a_ik = alpha.row(i).dot(alpha.row(k));
            dq.row(k) += kik * alpha.row(i);
            dq.row(i) += kik * alpha.row(k);
            // grad K(q_k - q_i) = -slope * diff, grad K(q_i - q_k) = slope * diff
            const double w = spec.slope(kik) * a_ik;
            dalpha.row(i) -= w * diff;
            dalpha.row(k) += w * diff;
            twice_energy += 2.0 * kik * a_ik;
        }
    }
    return 0.5 * twice_energy;
}

namespace {

double collision_floor(const KernelSpec& spec, const ShootOptions& options) {
    return std::max(options.collision_factor * std::sqrt(spec.sigma()), Landmarks::kMinSeparation);
}

void check_collision(const PointArray& q, double floor, double t) {
    const double d = min_pairwise_distance(q);
    if (d < floor) {
        std::ostringstream msg;
        msg << "collision at t=" << t << ": min pairwise distance " << d << " below " << floor;
        throw Collision(msg.str());
    }
}

void check_drift(double e0, double e, double bound, double& worst) {
    const double drift = e0 > 0.0 ? std::abs(e - e0) / e0 : std::abs(e);
    worst = std::max(worst, drift);
    if (!std::isfinite(e) || drift > bound) {
        std::ostringstream msg;
        msg << "energy drift " << drift << " exceeds bound " << bound;
        throw EnergyDrift(msg.str());
    }
}

void require_steps(double duration, int steps) {
    if (steps < 1) throw InvalidArgument("shoot: steps must be >= 1");
    if (!std::isfinite(duration)) throw InvalidArgument("shoot: duration must be finite");
}

// One classical RK4 step of (x, y)' = field(x, y); returns the value reported
// by the field at the start of the step (the energy).
template <class Field>
double rk4_step(Field& field, PointArray& x, PointArray& y, double h) {
    PointArray k1x, k1y, k2x, k2y, k3x, k3y, k4x, k4y;
    const double e = field(x, y, k1x, k1y);
    field(x + 0.5 * h * k1x, y + 0.5 * h * k1y, k2x, k2y);
    field(x + 0.5 * h * k2x, y + 0.5 * h * k2y, k3x, k3y);
    field(x + h * k3x, y + h * k3y, k4x, k4y);
    x += (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    y += (h / 6.0) * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
    return e;
}

// Second-order form on raw arrays; returns the energy 1/2 <K^{-1} v, v>.
double vector_form_field(const KernelSpec& spec, const PointArray& q, const PointArray& v,
                         PointArray& dq, PointArray& dv) {
    const GramMatrix g(spec, q);
    const PointArray alpha = g.solve(v);
    const Eigen::Index n = q.rows();
    dq = v;
    dv.setZero(n, q.cols());
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const auto diff = (q.row(i) - q.row(j)).eval();
            const auto grad = (spec.slope(spec.profile(diff.squaredNorm())) * diff).eval();
            const double a_ij = alpha.row(i).dot(alpha.row(j));
            for (Eigen::Index m = 0; m < n; ++m) {
                dv.row(m) -= 0.5 * (g.entries()(i, m) - g.entries()(j, m)) * a_ij * grad;
            }
        }
    }
    for (Eigen::Index m = 0; m < n; ++m) {
        for (Eigen::Index i = 0; i < n; ++i) {
            if (i == m) continue;
            const auto diff = (q.row(i) - q.row(m)).eval();
            const double c = spec.slope(spec.profile(diff.squaredNorm())) * diff.dot(v.row(i) - v.row(m));
            dv.row(m) += c * alpha.row(i);
        }
    }
    return 0.5 * alpha.cwiseProduct(v).sum();
}

struct HamiltonianField {
    const KernelSpec& spec;
    double operator()(const PointArray& q, const PointArray& a, PointArray& dq, PointArray& da) const {
        return hamiltonian_field(spec, q, a, dq, da);
    }
};

struct VectorFormField {
    const KernelSpec& spec;
    double operator()(const PointArray& q, const PointArray& v, PointArray& dq, PointArray& dv) const {
        return vector_form_field(spec, q, v, dq, dv);
    }
};

template <class Field, class Record>
void integrate(Field field, const KernelSpec& spec, PointArray x, PointArray y, double duration,
               int steps, const ShootOptions& options, Record&& record) {
    require_steps(duration, steps);
    const double h = duration / steps;
    const double floor = collision_floor(spec, options);
    check_collision(x, floor, 0.0);
    double e0 = 0.0;
    double worst = 0.0;
    for (int k = 0; k < steps; ++k) {
        const double e = rk4_step(field, x, y, h);
        if (k == 0) e0 = e;
        check_drift(e0, e, options.drift_bound, worst);
        const double t = (k + 1 == steps) ? duration : (k + 1) * h;
        check_collision(x, floor, t);
        record(t, x, y);
    }
    PointArray dx, dy;
    check_drift(e0, field(x, y, dx, dy), options.drift_bound, worst);
}

}  // namespace

PointArray integrate_endpoint(const KernelSpec& spec, const PointArray& q0, const PointArray& alpha0,
                              double duration, int steps, const ShootOptions& options) {
    PointArray end = q0;
    integrate(HamiltonianField{spec}, spec, q0, alpha0, duration, steps, options,
              [&](double, const PointArray& q, const PointArray&) { end = q; });
    return end;
}

}  // namespace detail

std::vector<double> GeodesicPath::energies() const {
    std::vector<double> out;
    out.reserve(states.size());
    for (const State& s : states) out.push_back(energy(spec, s.q, s.alpha));
    return out;
}

double GeodesicPath::relative_energy_drift() const {
    const std::vector<double> e = energies();
    double worst = 0.0;
    for (double v : e) {
        worst = std::max(worst, e.front() > 0.0 ? std::abs(v - e.front()) / e.front() : std::abs(v));
    }
    return worst;
}

PhaseVelocity hamiltonian_rhs(const KernelSpec& spec, const State& s) {
    require_shape(s.q, s.alpha.values, "hamiltonian_rhs");
    PhaseVelocity out;
    detail::hamiltonian_field(spec, s.q.points(), s.alpha.values, out.dq.values, out.dalpha.values);
    return out;
}

GeodesicPath shoot(const KernelSpec& spec, const Landmarks& q0, const Covector& alpha0,
                   double duration, int steps, const ShootOptions& options) {
    require_shape(q0, alpha0.values, "shoot");
    detail::require_steps(duration, steps);
    GeodesicPath path{spec, Integrator::RK4, duration / steps, {}};
    path.states.reserve(std::size_t(steps) + 1);
    path.states.push_back(State{0.0, q0, alpha0});
    detail::integrate(detail::HamiltonianField{spec}, spec, q0.points(), alpha0.values, duration,
                      steps, options, [&](double t, const PointArray& q, const PointArray& a) {
                          path.states.push_back(State{t, Landmarks(q), Covector{a}});
                      });
    return path;
}

Landmarks exp_map(const KernelSpec& spec, const Landmarks& q0, const Covector& alpha0, int steps,
                  const ShootOptions& options) {
    require_shape(q0, alpha0.values, "exp_map");
    return Landmarks(detail::integrate_endpoint(spec, q0.points(), alpha0.values, 1.0, steps, options));
}

Tangent accel_vector_form(const KernelSpec& spec, const Landmarks& q, const Tangent& qdot) {
    require_shape(q, qdot.values, "accel_vector_form");
    PointArray dq, dv;
    detail::vector_form_field(spec, q.points(), qdot.values, dq, dv);
    return {std::move(dv)};
}

GeodesicPath shoot_second_order(const KernelSpec& spec, const Landmarks& q0, const Tangent& qdot0,
                                double duration, int steps, const ShootOptions& options) {
    require_shape(q0, qdot0.values, "shoot_second_order");
    detail::require_steps(duration, steps);
    GeodesicPath path{spec, Integrator::RK4, duration / steps, {}};
    path.states.reserve(std::size_t(steps) + 1);
    path.states.push_back(State{0.0, q0, flat(spec, q0, qdot0)});
    detail::integrate(detail::VectorFormField{spec}, spec, q0.points(), qdot0.values, duration, steps,
                      options, [&](double t, const PointArray& q, const PointArray& v) {
                          Landmarks ql(q);
                          Covector alpha = flat(spec, ql, Tangent{v});
                          path.states.push_back(State{t, std::move(ql), std::move(alpha)});
                      });
    return path;
}

}  // namespace shapespace
