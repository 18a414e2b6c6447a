#include "tikflow/integrator.hpp"

#include <algorithm>
#include <cmath>

namespace tikflow {

namespace {

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
// error coefficients (5th order minus embedded 4th order)
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// dense-output coefficients
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

bool finite(const Vec& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

struct DenseCoeffs {
    Vec r1, r2, r3, r4, r5;
    Vec eval(double theta) const {
        const std::size_t n = r1.size();
        Vec out(n);
        const double th1 = 1.0 - theta;
        for (std::size_t i = 0; i < n; ++i)
            out[i] = r1[i] + theta * (r2[i] + th1 * (r3[i] + theta * (r4[i] + th1 * r5[i])));
        return out;
    }
};

double initial_step_guess(const FieldFn& field, double t0, const Vec& y0, const Vec& f0,
                          double tf, double rel_tol, double abs_tol) {
    const std::size_t n = y0.size();
    double d0 = 0.0, d1n = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double sc = abs_tol + rel_tol * std::abs(y0[i]);
        d0 += (y0[i] / sc) * (y0[i] / sc);
        d1n += (f0[i] / sc) * (f0[i] / sc);
    }
    d0 = std::sqrt(d0 / n);
    d1n = std::sqrt(d1n / n);
    double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
    h0 = std::min(h0, tf - t0);

    Vec y1(n), f1(n);
    for (std::size_t i = 0; i < n; ++i) y1[i] = y0[i] + h0 * f0[i];
    field(t0 + h0, y1, f1);
    double d2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double sc = abs_tol + rel_tol * std::abs(y0[i]);
        d2 += ((f1[i] - f0[i]) / sc) * ((f1[i] - f0[i]) / sc);
    }
    d2 = std::sqrt(d2 / n) / h0;
    const double dm = std::max(d1n, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                  : std::pow(0.01 / dm, 0.2);
    return std::min({100.0 * h0, h1, tf - t0});
}

} // namespace

RawTrajectory integrate(const FieldFn& field, double t0, const Vec& y0, double tf,
                        const IntegratorConfig& cfg) {
    if (!(tf > t0)) throw DomainError("integrate: tf must exceed t0");
    if (!(cfg.rel_tol > 0.0 && cfg.abs_tol > 0.0))
        throw DomainError("integrate: tolerances must be positive");
    for (std::size_t i = 0; i < cfg.sample_times.size(); ++i) {
        const double st = cfg.sample_times[i];
        if (st < t0 || st > tf || (i > 0 && st <= cfg.sample_times[i - 1]))
            throw DomainError("integrate: sample_times must be strictly increasing in [t0, tf]");
    }

    const std::size_t n = y0.size();
    RawTrajectory out;
    Vec y = y0, k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n);

    field(t0, y, k1);
    if (!finite(k1)) throw NonFiniteDerivative("integrate: non-finite derivative at t0");

    std::size_t next_sample = 0;
    if (next_sample < cfg.sample_times.size() && cfg.sample_times[next_sample] == t0) {
        out.times.push_back(t0);
        out.states.push_back(y);
        ++next_sample;
    }

    double t = t0;
    double h = cfg.initial_step > 0.0
                   ? std::min(cfg.initial_step, tf - t0)
                   : initial_step_guess(field, t0, y, k1, tf, cfg.rel_tol, cfg.abs_tol);
    h = std::min(h, cfg.max_step);

    double err_old = 1e-4;
    bool previous_rejected = false;

    while (t < tf) {
        if (h < 1e-14 * std::max(std::abs(t), 1.0))
            throw StepSizeUnderflow("integrate: step size underflow at t=" + std::to_string(t));
        const bool last = t + h >= tf;
        if (last) h = tf - t;

        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
        field(t + c2 * h, ytmp, k2);
        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        field(t + c3 * h, ytmp, k3);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        field(t + c4 * h, ytmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        field(t + c5 * h, ytmp, k5);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                  a65 * k5[i]);
        field(t + h, ytmp, k6);
        for (std::size_t i = 0; i < n; ++i)
            ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] +
                                  a76 * k6[i]);
        field(t + h, ynew, k7); // FSAL stage

        if (!finite(ynew) || !finite(k7))
            throw NonFiniteDerivative("integrate: non-finite state or derivative at t=" +
                                      std::to_string(t + h));

        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                   e6 * k6[i] + e7 * k7[i]);
            const double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (ei / sc) * (ei / sc);
        }
        err = std::sqrt(err / n);

        if (err <= 1.0) {
            ++out.stats.accepted;
            out.stats.min_step = std::min(out.stats.min_step, h);
            out.stats.max_step = std::max(out.stats.max_step, h);

            if (next_sample < cfg.sample_times.size() && cfg.sample_times[next_sample] <= t + h) {
                DenseCoeffs dc;
                dc.r1 = y;
                dc.r2.resize(n);
                dc.r3.resize(n);
                dc.r4.resize(n);
                dc.r5.resize(n);
                for (std::size_t i = 0; i < n; ++i) {
                    const double ydiff = ynew[i] - y[i];
                    const double bspl = h * k1[i] - ydiff;
                    dc.r2[i] = ydiff;
                    dc.r3[i] = bspl;
                    dc.r4[i] = ydiff - h * k7[i] - bspl;
                    dc.r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                    d6 * k6[i] + d7 * k7[i]);
                }
                while (next_sample < cfg.sample_times.size() &&
                       cfg.sample_times[next_sample] <= t + h) {
                    const double ts = cfg.sample_times[next_sample];
                    out.times.push_back(ts);
                    out.states.push_back(dc.eval((ts - t) / h));
                    ++next_sample;
                }
            }

            t += h;
            std::swap(k1, k7); // FSAL
            std::swap(y, ynew);

            // PI step-size controller
            const double alpha = 0.7 / 5.0, beta = 0.4 / 5.0;
            double fac = 0.9 * std::pow(err > 1e-300 ? err : 1e-300, -alpha) *
                         std::pow(err_old, beta);
            fac = std::clamp(fac, 0.2, previous_rejected ? 1.0 : 10.0);
            h = std::min(h * fac, cfg.max_step);
            err_old = std::max(err, 1e-4);
            previous_rejected = false;
        } else {
            ++out.stats.rejected;
            const double fac = std::max(0.2, 0.9 * std::pow(err, -0.2));
            h *= std::min(fac, 1.0);
            previous_rejected = true;
        }
    }

    return out;
}

Trajectory integrate_phase(SystemKind kind, const PhaseState& state0, double tf,
                           const IntegratorConfig& cfg, const DynamicsParams& p,
                           const TikhonovSchedule& s, const OperatorSpec& op) {
    const std::size_t n = op.dim();
    FieldFn field = [&](double t, const Vec& z, Vec& dz) {
        PhaseState st;
        st.t = t;
        st.x.assign(z.begin(), z.begin() + n);
        st.y.assign(z.begin() + n, z.end());
        const PhaseDerivative d = kind == SystemKind::DS ? ds_vector_field(st, p, s, op)
                                                         : tds_vector_field(st, p, op);
        dz.resize(2 * n);
        std::copy(d.xdot.begin(), d.xdot.end(), dz.begin());
        std::copy(d.ydot.begin(), d.ydot.end(), dz.begin() + n);
    };

    Vec z0(2 * n);
    std::copy(state0.x.begin(), state0.x.end(), z0.begin());
    std::copy(state0.y.begin(), state0.y.end(), z0.begin() + n);

    const RawTrajectory raw = integrate(field, state0.t, z0, tf, cfg);

    Trajectory traj;
    traj.kind = kind;
    traj.stats = raw.stats;
    traj.samples.reserve(raw.times.size());
    for (std::size_t k = 0; k < raw.times.size(); ++k) {
        TrajectorySample smp;
        smp.t = raw.times[k];
        smp.x.assign(raw.states[k].begin(), raw.states[k].begin() + n);
        smp.y.assign(raw.states[k].begin() + n, raw.states[k].end());
        PhaseState st{smp.t, smp.x, smp.y};
        smp.xdot = recover_velocity(kind, st, p, s, op);
        traj.samples.push_back(std::move(smp));
    }
    return traj;
}

} // namespace tikflow
