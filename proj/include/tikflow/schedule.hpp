#ifndef TIKFLOW_SCHEDULE_HPP
#define TIKFLOW_SCHEDULE_HPP

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tikflow/linalg.hpp"
#include "tikflow/operators.hpp"

namespace tikflow {

struct ScheduleValues {
    double eps;          // eps(t)
    double deps;         // d/dt eps
    double ddeps;        // d2/dt2 eps
    double dinv_sqrt;    // d/dt (1/sqrt(eps)) = -deps / (2 eps^{3/2})
};

struct PowerSchedule {
    double q; // eps(t) = t^{-q}, 0 < q < 1
};

struct CustomSchedule {
    std::function<double(double)> eps;
    std::function<double(double)> deps;
    std::function<double(double)> ddeps;
};

/// Tikhonov regularization path eps(t): positive, nonincreasing, with first
/// and second derivatives available on [t0, inf).
class TikhonovSchedule {
public:
    TikhonovSchedule(PowerSchedule kind, double t0);
    TikhonovSchedule(CustomSchedule kind, double t0);

    double t0() const { return t0_; }
    bool is_power() const { return std::holds_alternative<PowerSchedule>(kind_); }
    std::optional<double> power_q() const;

    ScheduleValues eval(double t) const;

private:
    std::variant<PowerSchedule, CustomSchedule> kind_;
    double t0_;
};

struct DynamicsParams {
    double gamma = 1.0;
    double delta = 4.0 / 3.0;
    // baseline system coefficients
    double alpha = 4.0 / 3.0;
    double beta = 1.0;
};

struct OpenInterval {
    double lo;
    double hi;
    bool contains(double x) const { return x > lo && x < hi; }
};

/// Admissible delta range (gamma, gamma + gamma/(gamma^2/2 + 1)).
OpenInterval delta_window(double gamma);

enum class Verdict { Satisfied, Failed, Indeterminate };

std::string to_string(Verdict v);

struct HypothesisEntry {
    std::string name;
    Verdict verdict = Verdict::Indeterminate;
    bool pointwise = false;            // exact grid check vs asymptotic trend
    std::optional<double> t1_estimate; // condition (e) only
    std::string evidence;
};

struct HypothesisReport {
    std::vector<HypothesisEntry> entries;
    bool all_satisfied() const;
    const HypothesisEntry* find(const std::string& name) const;
};

/// Evaluates hypothesis (H) plus the parameter/decay conditions the
/// energy-decay certificate and strong-convergence analysis require, on a time grid.
/// Asymptotic limits are reported as trend verdicts, never as proofs; closed-form
/// power schedules are decided analytically.
HypothesisReport check_hypotheses(const TikhonovSchedule& s, const DynamicsParams& p,
                                  const OperatorSpec& op, const std::vector<double>& t_grid);

/// Default grid: n logarithmically spaced points on [t0, t_end].
std::vector<double> log_grid(double t0, double t_end, std::size_t n = 200);

} // namespace tikflow

#endif
