#include "tikflow/dynamics.hpp"

#include <cmath>

namespace tikflow {

PhaseDerivative ds_vector_field(const PhaseState& state, const DynamicsParams& p,
                                const TikhonovSchedule& s, const OperatorSpec& op) {
    const ScheduleValues sv = s.eval(state.t);
    const double sqeps = std::sqrt(sv.eps);
    const Vec g = op.yosida(state.x) + sv.eps * state.x;
    const double kappa = (p.gamma - p.delta) / p.gamma - sv.dinv_sqrt / p.gamma;

    PhaseDerivative d;
    d.xdot = (-1.0) * state.y + (-1.0 / (p.gamma * sqeps)) * g;
    d.ydot = (-p.delta * sqeps) * state.y + kappa * g;
    return d;
}

PhaseDerivative tds_vector_field(const PhaseState& state, const DynamicsParams& p,
                                 const OperatorSpec& op) {
    if (!(state.t > 0.0)) throw DomainError("tds_vector_field: t must be positive");
    const Vec a = op.yosida(state.x);
    PhaseDerivative d;
    d.xdot = state.y - a;
    d.ydot = (-p.alpha / state.t) * d.xdot + (-p.beta / state.t) * a;
    return d;
}

PhaseState initial_phase_state(SystemKind kind, const Vec& x0, const Vec& v0, double t0,
                               const DynamicsParams& p, const TikhonovSchedule& s,
                               const OperatorSpec& op) {
    if (!(t0 > 0.0)) throw DomainError("initial_phase_state: t0 must be positive");
    if (x0.size() != op.dim() || v0.size() != op.dim())
        throw DimensionMismatch("initial_phase_state: state dimension");
    PhaseState st;
    st.t = t0;
    st.x = x0;
    if (kind == SystemKind::DS) {
        const ScheduleValues sv = s.eval(t0);
        const Vec g = op.yosida(x0) + sv.eps * x0;
        st.y = (-1.0) * v0 + (-1.0 / (p.gamma * std::sqrt(sv.eps))) * g;
    } else {
        st.y = v0 + op.yosida(x0);
    }
    return st;
}

Vec recover_velocity(SystemKind kind, const PhaseState& state, const DynamicsParams& p,
                     const TikhonovSchedule& s, const OperatorSpec& op) {
    if (kind == SystemKind::DS) return ds_vector_field(state, p, s, op).xdot;
    return tds_vector_field(state, p, op).xdot;
}

} // namespace tikflow
