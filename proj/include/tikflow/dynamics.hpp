#ifndef TIKFLOW_DYNAMICS_HPP
#define TIKFLOW_DYNAMICS_HPP

#include "tikflow/operators.hpp"
#include "tikflow/schedule.hpp"

namespace tikflow {

struct PhaseState {
    double t = 0.0;
    Vec x;
    Vec y;
};

enum class SystemKind { DS, TDS };

struct PhaseDerivative {
    Vec xdot;
    Vec ydot;
};

/// Phase-space field of the Tikhonov-regularized inertial system:
///   xdot = -y - g / (gamma*sqrt(eps)),   g = A_eta x + eps*x
///   ydot = -delta*sqrt(eps)*y + kappa(t)*g
/// with kappa(t) = (gamma-delta)/gamma - (1/gamma) d/dt(1/sqrt(eps)).
PhaseDerivative ds_vector_field(const PhaseState& state, const DynamicsParams& p,
                                const TikhonovSchedule& s, const OperatorSpec& op);

/// Phase-space field of the baseline Newton-like inertial system under the
/// substitution y = xdot + A_eta x:
///   xdot = y - A_eta x
///   ydot = -(alpha/t)(y - A_eta x) - (beta/t) A_eta x
PhaseDerivative tds_vector_field(const PhaseState& state, const DynamicsParams& p,
                                 const OperatorSpec& op);

/// Builds the phase-space initial state matching position x0 and velocity v0.
PhaseState initial_phase_state(SystemKind kind, const Vec& x0, const Vec& v0, double t0,
                               const DynamicsParams& p, const TikhonovSchedule& s,
                               const OperatorSpec& op);

/// Velocity recovered from the first phase equation at a sampled state.
Vec recover_velocity(SystemKind kind, const PhaseState& state, const DynamicsParams& p,
                     const TikhonovSchedule& s, const OperatorSpec& op);

} // namespace tikflow

#endif
