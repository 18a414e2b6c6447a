#include "tikflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace tikflow {

Vec viscosity_point(const OperatorSpec& op, double eps) {
    if (!(eps > 0.0)) throw DomainError("viscosity_point: eps must be positive");
    if (const Mat* m = op.matrix()) {
        // With u = J_eta x one has A_eta x = M u - b and x = u + eta*(M u - b),
        // so A_eta x + eps*x = 0 becomes ((1+eps*eta) M + eps I) u = (1+eps*eta) b.
        const std::size_t n = op.dim();
        const double c = 1.0 + eps * op.eta();
        Mat sys = c * (*m);
        for (std::size_t i = 0; i < n; ++i) sys(i, i) += eps;
        Vec rhs(n, 0.0);
        if (const Vec* b = op.offset()) rhs = c * (*b);
        const Vec u = solve_dense(sys, rhs);
        Vec mu = matvec(*m, u);
        if (const Vec* b = op.offset()) mu = mu - *b;
        return u + op.eta() * mu;
    }
    return viscosity_point_iterative(op, eps);
}

Vec viscosity_point_iterative(const OperatorSpec& op, double eps, double tol, long max_iter) {
    if (!(eps > 0.0)) throw DomainError("viscosity_point_iterative: eps must be positive");
    const double lip = 1.0 / (op.rho() + op.eta()) + eps;
    const double tau = eps / (lip * lip);
    Vec x(op.dim(), 0.0);
    for (long it = 0; it < max_iter; ++it) {
        const Vec r = op.yosida(x) + eps * x;
        if (norm(r) <= tol) return x;
        x = x - tau * r;
    }
    throw NoConvergence("viscosity_point_iterative: iteration cap reached");
}

EnergyRecord energy(double t, const Vec& x, const Vec& xdot, const DynamicsParams& p,
                    const TikhonovSchedule& s, const OperatorSpec& op) {
    const ScheduleValues sv = s.eval(t);
    EnergyRecord rec;
    rec.t = t;
    rec.x_eps = viscosity_point(op, sv.eps);

    const Vec diff = x - rec.x_eps;
    const Vec g = op.yosida(x) + sv.eps * x;
    const Vec w = p.gamma * std::sqrt(sv.eps) * diff + xdot;
    rec.energy = 0.5 * dot(w, w) + dot(g, diff);

    const Vec a_shift = op.yosida(x) + sv.eps * rec.x_eps;
    rec.bound_residuals[0] = rec.energy / sv.eps - dot(diff, diff);
    rec.bound_residuals[1] = (4.0 + 2.0 * p.gamma * p.gamma) * rec.energy - dot(xdot, xdot);
    rec.bound_residuals[2] = rec.energy / (op.rho() + op.eta()) - dot(a_shift, a_shift);
    return rec;
}

double lemma_ineq_check(const OperatorSpec& op, const TikhonovSchedule& s,
                        const std::vector<double>& t_grid) {
    if (t_grid.size() < 2) throw DomainError("lemma_ineq_check: need at least 2 grid points");
    double worst = -std::numeric_limits<double>::infinity();
    Vec prev = viscosity_point(op, s.eval(t_grid[0]).eps);
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        const Vec cur = viscosity_point(op, s.eval(t_grid[i]).eps);
        const double dt = t_grid[i] - t_grid[i - 1];
        const double lhs = norm(cur - prev) / dt;
        const double tm = 0.5 * (t_grid[i] + t_grid[i - 1]);
        const ScheduleValues sv = s.eval(tm);
        const Vec mid = viscosity_point(op, sv.eps);
        const double rhs = (-sv.deps / sv.eps) * norm(mid);
        worst = std::max(worst, lhs - rhs);
        prev = cur;
    }
    return worst;
}

namespace {

double mu_value(double t, const DynamicsParams& p, const TikhonovSchedule& s) {
    const ScheduleValues sv = s.eval(t);
    return std::sqrt(sv.eps) *
           ((1.0 - 2.0 / (p.gamma * p.gamma)) * sv.dinv_sqrt + p.delta - p.gamma);
}

double bound_integrand(double t, const TikhonovSchedule& s) {
    const ScheduleValues sv = s.eval(t);
    return std::pow(sv.eps, -2.5) * sv.deps * sv.deps - sv.deps;
}

} // namespace

DecayCertificate decay_certificate(const Trajectory& traj, const DynamicsParams& p,
                                   const TikhonovSchedule& s, const OperatorSpec& op,
                                   double t1, const std::optional<Vec>& x_star) {
    if (!x_star)
        throw MissingReference("decay_certificate: reference solution x* not configured");
    if (traj.samples.empty() || t1 < traj.samples.front().t)
        throw DomainError("decay_certificate: t1 must lie within the trajectory");

    DecayCertificate cert;
    cert.a_choice = (2.0 * p.gamma - p.delta) * (op.rho() + op.eta());
    if (!(cert.a_choice > 0.0))
        throw DomainError("decay_certificate: (2*gamma-delta)*(rho+eta) must be positive");

    std::size_t i0 = 0;
    while (i0 < traj.samples.size() && traj.samples[i0].t < t1) ++i0;
    if (i0 >= traj.samples.size())
        throw DomainError("decay_certificate: no samples at or past t1");
    cert.t1 = traj.samples[i0].t;

    const double xs_norm2 = dot(*x_star, *x_star);
    const auto q = s.power_q();
    const double delta0 = q ? 2.0 * (p.delta - p.gamma) / (2.0 - *q) : 0.0;
    const double omega_expo = q ? (0.5 - 1.0 / (p.gamma * p.gamma)) * *q : 0.0;

    // Cumulative integrals of mu and of the bound integrand times omega,
    // refined Simpson between consecutive samples.
    double log_omega = 0.0;     // log omega(t) accumulated from t1
    double bound_integral = 0.0; // int_{t1}^{t} f(s) omega(s) ds
    double max_rel_dev = 0.0;
    constexpr int kSub = 16;

    double prev_t = cert.t1;
    cert.satisfied = true;
    for (std::size_t i = i0; i < traj.samples.size(); ++i) {
        const auto& smp = traj.samples[i];
        if (i > i0) {
            const double a = prev_t, b = smp.t;
            const double h = (b - a) / kSub;
            for (int k = 0; k < kSub; ++k) {
                const double lo = a + k * h, mid = lo + 0.5 * h, hi = lo + h;
                const double mu_lo = mu_value(lo, p, s), mu_mid = mu_value(mid, p, s),
                             mu_hi = mu_value(hi, p, s);
                const double log_omega_lo = log_omega;
                const double dlog = h / 6.0 * (mu_lo + 4.0 * mu_mid + mu_hi);
                // Simpson on f*omega, with omega at the midpoint advanced by
                // half the Simpson increment of mu
                const double log_omega_mid = log_omega_lo +
                    0.5 * h / 6.0 * (mu_lo + 4.0 * mu_value(lo + 0.25 * h, p, s) + mu_mid);
                log_omega += dlog;
                const double f_lo = bound_integrand(lo, s) * std::exp(log_omega_lo);
                const double f_mid = bound_integrand(mid, s) * std::exp(log_omega_mid);
                const double f_hi = bound_integrand(hi, s) * std::exp(log_omega);
                bound_integral += h / 6.0 * (f_lo + 4.0 * f_mid + f_hi);
            }
            prev_t = b;
        }

        const double omega = std::exp(log_omega);
        if (q) {
            const double closed = std::pow(smp.t / cert.t1, omega_expo) *
                                  std::exp(delta0 * (std::pow(smp.t, 1.0 - 0.5 * *q) -
                                                     std::pow(cert.t1, 1.0 - 0.5 * *q)));
            max_rel_dev = std::max(max_rel_dev, std::abs(closed - omega) / closed);
        }

        const EnergyRecord er = energy(smp.t, smp.x, smp.xdot, p, s, op);
        const double e_t1_term = (i == i0) ? er.energy : cert.energy_curve.front();
        const double bound = xs_norm2 / cert.a_choice * bound_integral / omega +
                             e_t1_term / omega;

        cert.times.push_back(smp.t);
        cert.mu_samples.push_back(mu_value(smp.t, p, s));
        cert.omega_samples.push_back(omega);
        cert.energy_curve.push_back(er.energy);
        cert.bound_curve.push_back(bound);
        if (er.energy > bound * (1.0 + 1e-6) + 1e-9) cert.satisfied = false;
    }
    if (q) cert.omega_max_rel_dev = max_rel_dev;
    return cert;
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& series,
                 double window_fraction, const std::string& quantity,
                 double theory_exponent) {
    if (!(window_fraction > 0.0 && window_fraction < 1.0))
        throw DomainError("fit_rate: window_fraction must lie in (0,1)");
    if (series.size() < 10) throw InsufficientData("fit_rate: need at least 10 points");

    const double log_lo = std::log(series.front().first);
    const double log_hi = std::log(series.back().first);
    const double cut = log_hi - window_fraction * (log_hi - log_lo);

    std::vector<std::pair<double, double>> pts;
    for (const auto& [t, v] : series) {
        if (std::log(t) < cut) continue;
        if (!(v > 0.0)) throw NonPositiveValue("fit_rate: nonpositive value at t=" +
                                               std::to_string(t));
        pts.emplace_back(std::log(t), std::log(v));
    }
    if (pts.size() < 10) throw InsufficientData("fit_rate: fewer than 10 points in window");

    double sx = 0, sy = 0;
    for (const auto& [x, y] : pts) {
        sx += x;
        sy += y;
    }
    const double mx = sx / pts.size(), my = sy / pts.size();
    double sxx = 0, sxy = 0, syy = 0;
    for (const auto& [x, y] : pts) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }

    RateFit fit;
    fit.quantity = quantity;
    fit.t_lo = std::exp(pts.front().first);
    fit.t_hi = std::exp(pts.back().first);
    fit.slope = sxy / sxx;
    fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    fit.theory_exponent = theory_exponent;
    return fit;
}

double theory_exponent_distance_sq(double q) {
    return q < 2.0 / 3.0 ? 0.5 * q - 1.0 : 2.0 * q - 2.0;
}

} // namespace tikflow
