#ifndef TIKFLOW_DIAGNOSTICS_HPP
#define TIKFLOW_DIAGNOSTICS_HPP

#include <array>
#include <optional>
#include <string>

#include "tikflow/integrator.hpp"

namespace tikflow {

struct NoConvergence : std::runtime_error {
    explicit NoConvergence(const std::string& msg) : std::runtime_error(msg) {}
};
struct MissingReference : std::runtime_error {
    explicit MissingReference(const std::string& msg) : std::runtime_error(msg) {}
};
struct InsufficientData : std::runtime_error {
    explicit InsufficientData(const std::string& msg) : std::runtime_error(msg) {}
};
struct NonPositiveValue : std::runtime_error {
    explicit NonPositiveValue(const std::string& msg) : std::runtime_error(msg) {}
};

/// Unique zero of A_eta + eps*Id. Matrix-backed operators are solved directly
/// through the resolvent algebra; custom-resolvent operators fall back to a
/// damped fixed-point iteration (A_eta + eps*Id is eps-strongly monotone and
/// Lipschitz, so the iteration contracts).
Vec viscosity_point(const OperatorSpec& op, double eps);

/// Damped-iteration route, also used to cross-check the direct solve.
Vec viscosity_point_iterative(const OperatorSpec& op, double eps,
                              double tol = 1e-11, long max_iter = 1000000);

struct EnergyRecord {
    double t = 0.0;
    double energy = 0.0;
    Vec x_eps;
    // bound minus quantity for the three energy inequalities:
    //   E/eps - ||x - x_eps||^2
    //   (4 + 2 gamma^2) E - ||xdot||^2
    //   E/(rho+eta) - ||A_eta x + eps*x_eps||^2
    std::array<double, 3> bound_residuals{};
};

EnergyRecord energy(double t, const Vec& x, const Vec& xdot, const DynamicsParams& p,
                    const TikhonovSchedule& s, const OperatorSpec& op);

/// Max over the grid of ||d/dt x_eps|| (finite difference) minus the bound
/// (-deps/eps)*||x_eps||, both evaluated at interval midpoints.
double lemma_ineq_check(const OperatorSpec& op, const TikhonovSchedule& s,
                        const std::vector<double>& t_grid);

struct DecayCertificate {
    double t1 = 0.0;
    double a_choice = 0.0;
    std::vector<double> times;          // sample times >= t1
    std::vector<double> mu_samples;
    std::vector<double> omega_samples;
    std::vector<double> bound_curve;    // B(t)
    std::vector<double> energy_curve;   // E(t)
    bool satisfied = false;
    // closed-form vs quadrature omega agreement (power schedules only)
    std::optional<double> omega_max_rel_dev;
};

/// Energy-decay certificate: checks E(t) <= B(t)*(1+1e-6)+1e-9 on all samples
/// past t1, with a fixed at the midpoint (2*gamma-delta)*(rho+eta) of its
/// admissible interval and omega computed by refined Simpson quadrature
/// (cross-checked against the closed form for power schedules).
DecayCertificate decay_certificate(const Trajectory& traj, const DynamicsParams& p,
                                   const TikhonovSchedule& s, const OperatorSpec& op,
                                   double t1, const std::optional<Vec>& x_star);

struct RateFit {
    std::string quantity;
    double t_lo = 0.0;
    double t_hi = 0.0;
    double slope = 0.0;
    double r_squared = 0.0;
    double theory_exponent = 0.0;
};

/// Least-squares slope of log(value) vs log(t) over the trailing
/// window_fraction of the log-time range.
RateFit fit_rate(const std::vector<std::pair<double, double>>& series,
                 double window_fraction, const std::string& quantity = "",
                 double theory_exponent = 0.0);

/// Proof-side rate exponent for ||x - x_eps||^2 under eps(t) = t^{-q}.
double theory_exponent_distance_sq(double q);

} // namespace tikflow

#endif
