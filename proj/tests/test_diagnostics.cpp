#include <doctest.h>

#include <cmath>
#include <random>

#include "tikflow/diagnostics.hpp"
#include "test_support.hpp"

using namespace tikflow;
using tikflow::testing::affine_op;
using tikflow::testing::example_op;
using tikflow::testing::random_vec;

TEST_CASE("viscosity point of the example operator is the origin") {
    for (double eps : {1e-4, 0.01, 0.5, 1.0, 10.0}) {
        CHECK(norm(viscosity_point(example_op(), eps)) < 1e-12);
    }
}

TEST_CASE("viscosity point of the affine operator follows the closed form") {
    const OperatorSpec op = affine_op();
    for (double eps : {1e-4, 1e-3, 0.05, 0.3, 1.0}) {
        const Vec x = viscosity_point(op, eps);
        CHECK(x[0] == doctest::Approx(1.0 / (1.0 + 2.0 * eps)).epsilon(1e-12));
        CHECK(std::abs(x[1]) < 1e-12);
        const Vec resid = op.yosida(x) + eps * x;
        CHECK(norm(resid) <= 1e-11);
    }
    // tends to the minimum-norm zero as eps -> 0
    CHECK(norm(viscosity_point(op, 1e-9) - Vec{1.0, 0.0}) < 1e-8);
}

TEST_CASE("viscosity point of the zero operator is the origin") {
    const OperatorSpec zero(LinearMatrix{Mat(2)}, 0.0, 1.0);
    for (double eps : {1e-3, 1.0}) CHECK(norm(viscosity_point(zero, eps)) < 1e-12);
}

TEST_CASE("iterative and direct viscosity solves agree") {
    for (const OperatorSpec& op : {example_op(), affine_op()}) {
        for (double eps : {0.01, 0.2, 1.0}) {
            const Vec direct = viscosity_point(op, eps);
            const Vec iter = viscosity_point_iterative(op, eps);
            CHECK(norm(direct - iter) < 1e-9);
        }
    }
}

TEST_CASE("viscosity point for custom-resolvent operators uses the damped iteration") {
    const OperatorSpec custom(
        CustomResolvent{[](double eta, const Vec& z) {
            Mat sys = Mat::identity(3) + eta * Mat::diag({1.0, 0.0, -1.0});
            return solve_dense(sys, z);
        }},
        -1.0, 3.0, 3);
    CHECK(norm(viscosity_point(custom, 0.1)) < 1e-10);
}

TEST_CASE("viscosity point rejects nonpositive eps") {
    CHECK_THROWS_AS(viscosity_point(example_op(), 0.0), DomainError);
}

TEST_CASE("regularized operator is strongly monotone on samples") {
    std::mt19937_64 rng(11);
    for (const OperatorSpec& op : {example_op(), affine_op()}) {
        for (double eps : {0.05, 0.7}) {
            for (int trial = 0; trial < 1000; ++trial) {
                const Vec x = random_vec(rng, op.dim(), 10.0);
                const Vec y = random_vec(rng, op.dim(), 10.0);
                const Vec tx = op.yosida(x) + eps * x;
                const Vec ty = op.yosida(y) + eps * y;
                const Vec d = x - y;
                CHECK(dot(tx - ty, d) >= eps * dot(d, d) - 1e-9);
            }
        }
    }
}

TEST_CASE("energy vanishes at the viscosity point") {
    const TikhonovSchedule s(PowerSchedule{0.5}, 0.1);
    const EnergyRecord rec =
        energy(1.0, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, DynamicsParams{}, s, example_op());
    CHECK(std::abs(rec.energy) < 1e-14);
    for (double r : rec.bound_residuals) CHECK(std::abs(r) < 1e-13);
}

TEST_CASE("energy at the reference state") {
    const TikhonovSchedule s(PowerSchedule{0.5}, 0.1);
    const EnergyRecord rec =
        energy(1.0, {1.0, 1.0, 1.0}, {0.0, 0.0, 0.0}, DynamicsParams{}, s, example_op());
    CHECK(rec.energy == doctest::Approx(5.25).epsilon(1e-13));
    CHECK(norm(rec.x_eps) < 1e-12);
    for (double r : rec.bound_residuals) CHECK(r >= 0.0);
}

TEST_CASE("viscosity curve stays inside the reference ball and decays") {
    const OperatorSpec op = affine_op();
    const TikhonovSchedule s(PowerSchedule{0.5}, 1.0);
    const auto grid = log_grid(1.0, 1e8, 400);
    double prev = -1.0;
    for (double t : grid) {
        const double n = norm(viscosity_point(op, s.eval(t).eps));
        CHECK(n <= 1.0 + 1e-12);
        CHECK(n >= prev - 1e-12); // nonincreasing in eps = nondecreasing in t
        prev = n;
    }
}

TEST_CASE("viscosity velocity bound holds under finite differences") {
    const OperatorSpec op = affine_op();
    const TikhonovSchedule s(PowerSchedule{0.5}, 1.0);
    // relative spacing ln(1e8)/20000 < 1e-3
    const double violation = lemma_ineq_check(op, s, log_grid(1.0, 1e8, 20000));
    CHECK(violation <= 1e-6);

    const double zero_curve =
        lemma_ineq_check(example_op(), s, log_grid(1.0, 100.0, 50));
    CHECK(std::abs(zero_curve) < 1e-12);
}

TEST_CASE("rate fit on exact and perturbed power laws") {
    std::vector<std::pair<double, double>> exact, constant, perturbed;
    for (double t : log_grid(1.0, 100.0, 200)) {
        exact.emplace_back(t, std::pow(t, -0.75));
        constant.emplace_back(t, 2.5);
        perturbed.emplace_back(t, std::pow(t, -0.75) * (1.0 + 0.01 * std::sin(t)));
    }
    const RateFit f = fit_rate(exact, 0.5, "exact", -0.75);
    CHECK(f.slope == doctest::Approx(-0.75).epsilon(1e-12));
    CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.t_lo < f.t_hi);
    CHECK(f.theory_exponent == -0.75);

    CHECK(std::abs(fit_rate(constant, 0.5).slope) < 1e-12);

    const RateFit fp = fit_rate(perturbed, 0.5);
    CHECK(std::abs(fp.slope + 0.75) < 0.02);
}

TEST_CASE("rate fit input validation") {
    std::vector<std::pair<double, double>> few = {{1.0, 1.0}, {2.0, 0.5}};
    CHECK_THROWS_AS(fit_rate(few, 0.5), InsufficientData);

    std::vector<std::pair<double, double>> bad;
    for (double t : log_grid(1.0, 100.0, 50)) bad.emplace_back(t, 1.0 / t - 0.5);
    CHECK_THROWS_AS(fit_rate(bad, 0.9), NonPositiveValue);

    std::vector<std::pair<double, double>> ok;
    for (double t : log_grid(1.0, 100.0, 50)) ok.emplace_back(t, 1.0 / t);
    CHECK_THROWS_AS(fit_rate(ok, 0.0), DomainError);
}

TEST_CASE("theory exponents switch branch at q=2/3") {
    CHECK(theory_exponent_distance_sq(0.5) == doctest::Approx(-0.75));
    CHECK(theory_exponent_distance_sq(0.2) == doctest::Approx(-0.9));
    CHECK(theory_exponent_distance_sq(2.0 / 3.0) == doctest::Approx(-2.0 / 3.0));
    CHECK(theory_exponent_distance_sq(5.0 / 6.0) == doctest::Approx(-1.0 / 3.0));
}

namespace {

Trajectory reference_run(double q, double tf, double rel_tol, double abs_tol,
                         std::size_t samples) {
    const OperatorSpec op = example_op();
    const TikhonovSchedule s(PowerSchedule{q}, 0.1);
    const DynamicsParams p;
    const PhaseState st0 = initial_phase_state(SystemKind::DS, {1.0, 1.0, 1.0},
                                               {1.0, 2.0, 3.0}, 0.1, p, s, op);
    IntegratorConfig cfg;
    cfg.rel_tol = rel_tol;
    cfg.abs_tol = abs_tol;
    cfg.sample_times = log_grid(0.1, tf, samples);
    return integrate_phase(SystemKind::DS, st0, tf, cfg, p, s, op);
}

} // namespace

TEST_CASE("decay certificate holds on the reference run") {
    const double q = 1.0 / 3.0;
    const OperatorSpec op = example_op();
    const TikhonovSchedule s(PowerSchedule{q}, 0.1);
    const DynamicsParams p;
    const Trajectory traj = reference_run(q, 100.0, 1e-10, 1e-12, 400);

    const HypothesisReport rep = check_hypotheses(s, p, op, log_grid(0.1, 100.0, 200));
    REQUIRE(rep.all_satisfied());
    const double t1 = *rep.find("second_derivative_decay")->t1_estimate;

    const Vec x_star = {0.0, 0.0, 0.0};
    const DecayCertificate cert = decay_certificate(traj, p, s, op, t1, x_star);
    CHECK(cert.satisfied);
    CHECK(cert.a_choice == doctest::Approx((2.0 - 4.0 / 3.0) * 2.0).epsilon(1e-14));
    REQUIRE_FALSE(cert.times.empty());
    CHECK(cert.omega_samples.front() == doctest::Approx(1.0).epsilon(1e-14));
    for (std::size_t i = 1; i < cert.omega_samples.size(); ++i)
        CHECK(cert.omega_samples[i] > cert.omega_samples[i - 1]);
    REQUIRE(cert.omega_max_rel_dev.has_value());
    CHECK(*cert.omega_max_rel_dev <= 1e-6);
}

TEST_CASE("decay certificate requires a reference solution") {
    const double q = 1.0 / 3.0;
    const Trajectory traj = reference_run(q, 20.0, 1e-8, 1e-10, 100);
    const TikhonovSchedule s(PowerSchedule{q}, 0.1);
    CHECK_THROWS_AS(decay_certificate(traj, DynamicsParams{}, s, example_op(), 1.0,
                                      std::nullopt),
                    MissingReference);
}

TEST_CASE("energy bound residuals stay nonnegative along a run") {
    const double q = 0.5;
    const TikhonovSchedule s(PowerSchedule{q}, 0.1);
    const Trajectory traj = reference_run(q, 20.0, 1e-8, 1e-10, 150);
    for (const auto& smp : traj.samples) {
        const EnergyRecord rec =
            energy(smp.t, smp.x, smp.xdot, DynamicsParams{}, s, example_op());
        for (double r : rec.bound_residuals)
            CHECK(r >= -1e-6 * (1.0 + rec.energy));
    }
}

TEST_CASE("observed distance decay is at least as fast as the proven bound") {
    // The theory exponent is an upper bound on the decay rate; trajectories of
    // the example operator decay strictly faster (see the acceptance suite for
    // the two-sided reading).
    const double q = 1.0 / 3.0;
    const TikhonovSchedule s(PowerSchedule{q}, 0.1);
    const Trajectory traj = reference_run(q, 100.0, 1e-10, 1e-12, 400);
    std::vector<std::pair<double, double>> series;
    for (const auto& smp : traj.samples) {
        const Vec x_eps = viscosity_point(example_op(), s.eval(smp.t).eps);
        const Vec d = smp.x - x_eps;
        series.emplace_back(smp.t, dot(d, d));
    }
    const RateFit fit = fit_rate(series, 0.5, "dist", theory_exponent_distance_sq(q));
    CHECK(fit.slope <= fit.theory_exponent + 0.15);
}
