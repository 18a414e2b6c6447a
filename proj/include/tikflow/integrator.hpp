#ifndef TIKFLOW_INTEGRATOR_HPP
#define TIKFLOW_INTEGRATOR_HPP

#include <functional>
#include <limits>

#include "tikflow/dynamics.hpp"

namespace tikflow {

struct StepSizeUnderflow : std::runtime_error {
    explicit StepSizeUnderflow(const std::string& msg) : std::runtime_error(msg) {}
};

struct NonFiniteDerivative : std::runtime_error {
    explicit NonFiniteDerivative(const std::string& msg) : std::runtime_error(msg) {}
};

struct IntegratorConfig {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double max_step = std::numeric_limits<double>::infinity();
    double initial_step = 0.0; // 0 = automatic selection
    std::vector<double> sample_times;
};

struct StepStats {
    long accepted = 0;
    long rejected = 0;
    double min_step = std::numeric_limits<double>::infinity();
    double max_step = 0.0;
};

/// Derivative callback: writes f(t, y) into dydt (same size as y).
using FieldFn = std::function<void(double, const Vec&, Vec&)>;

struct RawTrajectory {
    std::vector<double> times;
    std::vector<Vec> states;
    StepStats stats;
};

/// Adaptive Dormand-Prince 5(4) integration from t0 to tf with PI step-size
/// control and 4th-order dense output at cfg.sample_times.
RawTrajectory integrate(const FieldFn& field, double t0, const Vec& y0, double tf,
                        const IntegratorConfig& cfg);

struct TrajectorySample {
    double t;
    Vec x;
    Vec y;
    Vec xdot;
};

struct Trajectory {
    SystemKind kind = SystemKind::DS;
    std::vector<TrajectorySample> samples;
    StepStats stats;
};

/// Integrates a phase-space system and recovers the velocity at each sample
/// from the first phase equation.
Trajectory integrate_phase(SystemKind kind, const PhaseState& state0, double tf,
                           const IntegratorConfig& cfg, const DynamicsParams& p,
                           const TikhonovSchedule& s, const OperatorSpec& op);

} // namespace tikflow

#endif
