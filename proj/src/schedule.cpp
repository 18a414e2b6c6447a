#include "tikflow/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tikflow {

TikhonovSchedule::TikhonovSchedule(PowerSchedule kind, double t0)
    : kind_(kind), t0_(t0) {
    if (!(t0 > 0.0)) throw DomainError("TikhonovSchedule: t0 must be positive");
    if (!(kind.q > 0.0 && kind.q < 1.0))
        throw DomainError("TikhonovSchedule: power exponent q must lie in (0,1)");
}

TikhonovSchedule::TikhonovSchedule(CustomSchedule kind, double t0)
    : kind_(std::move(kind)), t0_(t0) {
    if (!(t0 > 0.0)) throw DomainError("TikhonovSchedule: t0 must be positive");
    const auto& c = std::get<CustomSchedule>(kind_);
    if (!c.eps || !c.deps || !c.ddeps)
        throw DomainError("TikhonovSchedule: custom schedule needs eps, deps, ddeps");
}

std::optional<double> TikhonovSchedule::power_q() const {
    if (auto* p = std::get_if<PowerSchedule>(&kind_)) return p->q;
    return std::nullopt;
}

ScheduleValues TikhonovSchedule::eval(double t) const {
    if (t < t0_) throw DomainError("TikhonovSchedule::eval: t below t0");
    ScheduleValues v{};
    if (auto* p = std::get_if<PowerSchedule>(&kind_)) {
        const double q = p->q;
        v.eps = std::pow(t, -q);
        v.deps = -q * std::pow(t, -q - 1.0);
        v.ddeps = q * (q + 1.0) * std::pow(t, -q - 2.0);
        v.dinv_sqrt = 0.5 * q * std::pow(t, 0.5 * q - 1.0);
    } else {
        const auto& c = std::get<CustomSchedule>(kind_);
        v.eps = c.eps(t);
        v.deps = c.deps(t);
        v.ddeps = c.ddeps(t);
        if (!(v.eps > 0.0)) throw DomainError("TikhonovSchedule: eps(t) must be positive");
        v.dinv_sqrt = -v.deps / (2.0 * std::pow(v.eps, 1.5));
    }
    return v;
}

OpenInterval delta_window(double gamma) {
    if (!(gamma > 0.0)) throw DomainError("delta_window: gamma must be positive");
    return {gamma, gamma + gamma / (0.5 * gamma * gamma + 1.0)};
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Satisfied: return "satisfied";
        case Verdict::Failed: return "failed";
        default: return "indeterminate";
    }
}

bool HypothesisReport::all_satisfied() const {
    return std::all_of(entries.begin(), entries.end(),
                       [](const HypothesisEntry& e) { return e.verdict == Verdict::Satisfied; });
}

const HypothesisEntry* HypothesisReport::find(const std::string& name) const {
    for (const auto& e : entries)
        if (e.name == name) return &e;
    return nullptr;
}

std::vector<double> log_grid(double t0, double t_end, std::size_t n) {
    if (!(t0 > 0.0) || !(t_end > t0) || n < 2)
        throw DomainError("log_grid: need 0 < t0 < t_end and n >= 2");
    std::vector<double> g(n);
    const double l0 = std::log(t0), l1 = std::log(t_end);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = std::exp(l0 + (l1 - l0) * static_cast<double>(i) / static_cast<double>(n - 1));
    g.front() = t0;
    g.back() = t_end;
    return g;
}

namespace {

constexpr double kTrendMagnitude = 1e-3;

std::string tail_evidence(const std::vector<double>& vals) {
    std::ostringstream os;
    os.precision(6);
    const std::size_t n = vals.size();
    os << "tail values: ";
    for (std::size_t i = (n > 4 ? n - 4 : 0); i < n; ++i) os << vals[i] << " ";
    return os.str();
}

// Trend toward zero on the grid tail: monotone decay of |v| over the last half
// plus |v| below the magnitude threshold at grid end.
Verdict decay_trend(const std::vector<double>& vals) {
    const std::size_t n = vals.size();
    if (n < 4) return Verdict::Indeterminate;
    bool decaying = true;
    for (std::size_t i = n / 2; i + 1 < n; ++i)
        if (std::abs(vals[i + 1]) > std::abs(vals[i]) * (1.0 + 1e-12)) decaying = false;
    if (!decaying && std::abs(vals.back()) > std::abs(vals[n / 2]))
        return Verdict::Failed;
    if (decaying && std::abs(vals.back()) <= kTrendMagnitude) return Verdict::Satisfied;
    return Verdict::Indeterminate;
}

} // namespace

HypothesisReport check_hypotheses(const TikhonovSchedule& s, const DynamicsParams& p,
                                  const OperatorSpec& op, const std::vector<double>& t_grid) {
    if (t_grid.size() < 4 || !std::is_sorted(t_grid.begin(), t_grid.end()))
        throw DomainError("check_hypotheses: grid must be ascending with >= 4 points");
    HypothesisReport report;
    const std::size_t n = t_grid.size();
    std::vector<ScheduleValues> sv(n);
    for (std::size_t i = 0; i < n; ++i) sv[i] = s.eval(t_grid[i]);
    const auto q = s.power_q();
    const double g = p.gamma;

    // (a) eps positive, nonincreasing, vanishing
    {
        HypothesisEntry e;
        e.name = "eps_nonincreasing_to_zero";
        bool nonincreasing = true, positive = true;
        for (std::size_t i = 0; i < n; ++i) {
            positive = positive && sv[i].eps > 0.0;
            nonincreasing = nonincreasing && sv[i].deps <= 0.0;
            if (i + 1 < n) nonincreasing = nonincreasing && sv[i + 1].eps <= sv[i].eps * (1.0 + 1e-12);
        }
        if (!positive || !nonincreasing) {
            e.verdict = Verdict::Failed;
            e.evidence = "eps not positive-nonincreasing on grid";
        } else if (q) {
            e.verdict = Verdict::Satisfied;
            e.evidence = "eps = t^{-q}, q > 0";
        } else {
            std::vector<double> eps(n);
            for (std::size_t i = 0; i < n; ++i) eps[i] = sv[i].eps;
            e.verdict = decay_trend(eps);
            e.evidence = tail_evidence(eps);
        }
        report.entries.push_back(std::move(e));
    }

    // (b) eta > max(-2 rho, 0)
    {
        HypothesisEntry e;
        e.name = "eta_exceeds_comonotonicity_bound";
        e.pointwise = true;
        const bool ok = op.eta() > std::max(-2.0 * op.rho(), 0.0);
        e.verdict = ok ? Verdict::Satisfied : Verdict::Failed;
        std::ostringstream os;
        os << "eta=" << op.eta() << ", bound=" << std::max(-2.0 * op.rho(), 0.0);
        e.evidence = os.str();
        report.entries.push_back(std::move(e));
    }

    // (c) delta in (gamma, gamma + gamma/(gamma^2/2 + 1))
    {
        HypothesisEntry e;
        e.name = "delta_in_window";
        e.pointwise = true;
        const OpenInterval w = delta_window(g);
        e.verdict = w.contains(p.delta) ? Verdict::Satisfied : Verdict::Failed;
        std::ostringstream os;
        os << "delta=" << p.delta << ", window=(" << w.lo << "," << w.hi << ")";
        e.evidence = os.str();
        report.entries.push_back(std::move(e));
    }

    // (d) d/dt(1/sqrt(eps)) -> 0
    {
        HypothesisEntry e;
        e.name = "dinv_sqrt_eps_to_zero";
        if (q) {
            e.verdict = (*q < 2.0) ? Verdict::Satisfied : Verdict::Failed;
            e.evidence = "closed form (q/2) t^{q/2-1}";
        } else {
            std::vector<double> vals(n);
            for (std::size_t i = 0; i < n; ++i) vals[i] = sv[i].dinv_sqrt;
            e.verdict = decay_trend(vals);
            e.evidence = tail_evidence(vals);
        }
        report.entries.push_back(std::move(e));
    }

    // (e) eps^{-1/2} ddeps <= -(1/4)(delta-gamma) deps, pointwise from some t1 on
    {
        HypothesisEntry e;
        e.name = "second_derivative_decay";
        e.pointwise = true;
        std::vector<bool> holds(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double lhs = sv[i].ddeps / std::sqrt(sv[i].eps);
            const double rhs = -0.25 * (p.delta - g) * sv[i].deps;
            holds[i] = lhs <= rhs + 1e-15;
        }
        std::size_t first = n;
        for (std::size_t i = n; i-- > 0;) {
            if (!holds[i]) break;
            first = i;
        }
        if (first < n) {
            e.verdict = Verdict::Satisfied;
            e.t1_estimate = t_grid[first];
            std::ostringstream os;
            os << "holds from grid t=" << t_grid[first] << " onward";
            e.evidence = os.str();
        } else {
            e.verdict = Verdict::Failed;
            e.evidence = "violated at grid end";
        }
        report.entries.push_back(std::move(e));
    }

    // (f) eps^{-2-1/gamma^2} deps -> 0
    {
        HypothesisEntry e;
        e.name = "scaled_eps_derivative_to_zero";
        const double expo = 2.0 + 1.0 / (g * g);
        if (q) {
            // value = -q t^{q(1+1/gamma^2)-1}
            const double growth = *q * (1.0 + 1.0 / (g * g)) - 1.0;
            e.verdict = growth < 0.0 ? Verdict::Satisfied : Verdict::Failed;
            std::ostringstream os;
            os << "closed-form exponent q(1+1/gamma^2)-1 = " << growth;
            e.evidence = os.str();
        } else {
            std::vector<double> vals(n);
            for (std::size_t i = 0; i < n; ++i)
                vals[i] = std::pow(sv[i].eps, -expo) * sv[i].deps;
            e.verdict = decay_trend(vals);
            e.evidence = tail_evidence(vals);
        }
        report.entries.push_back(std::move(e));
    }

    // (g) int sqrt(eps) ds diverges
    {
        HypothesisEntry e;
        e.name = "sqrt_eps_integral_diverges";
        if (q) {
            e.verdict = (*q < 2.0) ? Verdict::Satisfied : Verdict::Failed;
            e.evidence = "closed form: integrand t^{-q/2} with q/2 < 1";
        } else {
            std::vector<double> cum(n, 0.0);
            for (std::size_t i = 1; i < n; ++i)
                cum[i] = cum[i - 1] + 0.5 * (std::sqrt(sv[i].eps) + std::sqrt(sv[i - 1].eps)) *
                                          (t_grid[i] - t_grid[i - 1]);
            // local growth rate t*sqrt(eps): bounded away from zero means the
            // integral keeps gaining a fixed amount per doubling of t
            const double rate = t_grid.back() * std::sqrt(sv.back().eps);
            e.verdict = rate >= 1.0 ? Verdict::Satisfied : Verdict::Indeterminate;
            e.evidence = tail_evidence(cum);
        }
        report.entries.push_back(std::move(e));
    }

    return report;
}

} // namespace tikflow
