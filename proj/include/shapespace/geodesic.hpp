#pragma once

#include <vector>

#include "shapespace/kernel.hpp"
#include "shapespace/landmarks.hpp"

namespace shapespace {

inline constexpr int kDefaultSteps = 1000;

enum class Integrator { RK4 };

/// A point (q, alpha) of the cotangent bundle at time t.
struct State {
    double t;
    Landmarks q;
    Covector alpha;
};

struct ShootOptions {
    /// Relative energy drift tolerated before EnergyDrift is raised.
    double drift_bound = 1e-6;
    /// Integration stops with Collision when two landmarks come closer than
    /// collision_factor * sqrt(sigma).
    double collision_factor = 1e-6;
};

struct GeodesicPath {
    KernelSpec spec;
    Integrator integrator = Integrator::RK4;
    double step = 0.0;
    std::vector<State> states;

    [[nodiscard]] const State& front() const { return states.front(); }
    [[nodiscard]] const State& back() const { return states.back(); }
    [[nodiscard]] std::vector<double> energies() const;
    /// max_t |E(t) - E(0)| / E(0), or the absolute drift when E(0) = 0.
    [[nodiscard]] double relative_energy_drift() const;
};

struct PhaseVelocity {
    Tangent dq;
    Covector dalpha;
};

/// Hamiltonian vector field of E(q, alpha):
///   dq_k     = sum_i K(q_i - q_k) alpha_i
///   dalpha_k = -sum_i grad K(q_k - q_i) <alpha_i, alpha_k>
[[nodiscard]] PhaseVelocity hamiltonian_rhs(const KernelSpec& spec, const State& s);

/// Classical RK4 on the Hamiltonian system with step T / steps. Every
/// intermediate state is returned.
[[nodiscard]] GeodesicPath shoot(const KernelSpec& spec, const Landmarks& q0, const Covector& alpha0,
                                 double duration, int steps, const ShootOptions& options = {});

/// Endpoint of shoot(q0, alpha0, T = 1, steps).
[[nodiscard]] Landmarks exp_map(const KernelSpec& spec, const Landmarks& q0, const Covector& alpha0,
                                int steps = kDefaultSteps, const ShootOptions& options = {});

/// Acceleration of the second-order (vector form) geodesic equation
///   qddot_n = -1/2 sum_{k,i,j,l} K^{-1}_{ki} grad K(q_i - q_j) (K_in - K_jn) K^{-1}_{jl} <qdot_k, qdot_l>
///             + sum_{k,i} K^{-1}_{ki} <grad K(q_i - q_n), qdot_i - qdot_n> qdot_k
/// with the k and l sums carried out as a Cholesky solve.
[[nodiscard]] Tangent accel_vector_form(const KernelSpec& spec, const Landmarks& q, const Tangent& qdot);

/// RK4 on (q, qdot) using accel_vector_form. States carry alpha = flat(q, qdot).
[[nodiscard]] GeodesicPath shoot_second_order(const KernelSpec& spec, const Landmarks& q0,
                                              const Tangent& qdot0, double duration, int steps,
                                              const ShootOptions& options = {});

namespace detail {

/// Allocation-light Hamiltonian field on raw arrays; returns E(q, alpha).
double hamiltonian_field(const KernelSpec& spec, const PointArray& q, const PointArray& alpha,
                         PointArray& dq, PointArray& dalpha);

/// Integrates to T without recording the path; used by the matching loop.
PointArray integrate_endpoint(const KernelSpec& spec, const PointArray& q0, const PointArray& alpha0,
                              double duration, int steps, const ShootOptions& options);

}  // namespace detail

}  // namespace shapespace
