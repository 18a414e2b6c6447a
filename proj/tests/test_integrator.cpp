#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>

#include "tikflow/integrator.hpp"

using namespace tikflow;

namespace {

const FieldFn kDecay = [](double, const Vec& y, Vec& dy) { dy[0] = -y[0]; };

const FieldFn kOscillator = [](double, const Vec& y, Vec& dy) {
    dy[0] = y[1];
    dy[1] = -y[0];
};

double oscillator_endpoint_error(double rel_tol, double abs_tol) {
    IntegratorConfig cfg;
    cfg.rel_tol = rel_tol;
    cfg.abs_tol = abs_tol;
    const double period = 2.0 * std::acos(-1.0);
    cfg.sample_times = {period};
    const RawTrajectory out = integrate(kOscillator, 0.0, {1.0, 0.0}, period, cfg);
    const Vec& end = out.states.back();
    return std::hypot(end[0] - 1.0, end[1]);
}

} // namespace

TEST_CASE("exponential decay endpoint") {
    IntegratorConfig cfg;
    cfg.sample_times = {5.0};
    const RawTrajectory out = integrate(kDecay, 0.0, {1.0}, 5.0, cfg);
    REQUIRE(out.times.size() == 1);
    CHECK(std::abs(out.states[0][0] - std::exp(-5.0)) < 1e-8);
    CHECK(out.stats.accepted > 0);
}

TEST_CASE("zero field keeps the state constant") {
    IntegratorConfig cfg;
    cfg.sample_times = {0.5, 1.0, 2.0, 3.0};
    const FieldFn zero = [](double, const Vec&, Vec& dy) { dy.assign(dy.size(), 0.0); };
    const RawTrajectory out = integrate(zero, 0.0, {3.0, -1.0}, 3.0, cfg);
    for (const Vec& s : out.states) {
        CHECK(s[0] == 3.0);
        CHECK(s[1] == -1.0);
    }
}

TEST_CASE("harmonic oscillator returns after one period") {
    CHECK(oscillator_endpoint_error(1e-8, 1e-10) < 1e-7);
}

TEST_CASE("harmonic oscillator conserves energy at default tolerances") {
    IntegratorConfig cfg;
    const double period = 2.0 * std::acos(-1.0);
    for (int i = 1; i <= 64; ++i) cfg.sample_times.push_back(period * i / 64.0);
    const RawTrajectory out = integrate(kOscillator, 0.0, {1.0, 0.0}, period, cfg);
    for (const Vec& s : out.states) {
        const double energy = s[0] * s[0] + s[1] * s[1];
        CHECK(std::abs(energy - 1.0) < 1e-7);
    }
}

TEST_CASE("tolerance study is consistent with a fifth-order scheme") {
    const double coarse = oscillator_endpoint_error(1e-6, 1e-8);
    const double fine = oscillator_endpoint_error(1e-9, 1e-11);
    CHECK(fine < coarse);
    CHECK(coarse / fine >= 100.0);
}

TEST_CASE("dense output matches the step solution at a step endpoint") {
    // fixed step size: the sample at t=1 is an accepted step endpoint in both runs
    IntegratorConfig fixed;
    fixed.rel_tol = 1e-3;
    fixed.abs_tol = 1e-3;
    fixed.initial_step = 0.25;
    fixed.max_step = 0.25;
    fixed.sample_times = {1.0};
    const RawTrajectory through = integrate(kOscillator, 0.0, {1.0, 0.0}, 2.0, fixed);
    const RawTrajectory ending = integrate(kOscillator, 0.0, {1.0, 0.0}, 1.0, fixed);
    REQUIRE(through.times.size() == 1);
    REQUIRE(ending.times.size() == 1);
    CHECK(std::abs(through.states[0][0] - ending.states[0][0]) <= 1e-13);
    CHECK(std::abs(through.states[0][1] - ending.states[0][1]) <= 1e-13);
}

TEST_CASE("dense output tracks the analytic solution between steps") {
    IntegratorConfig cfg;
    for (int i = 0; i <= 500; ++i) cfg.sample_times.push_back(i * 0.01);
    const RawTrajectory out = integrate(kOscillator, 0.0, {1.0, 0.0}, 5.0, cfg);
    REQUIRE(out.times.size() == 501);
    for (std::size_t i = 0; i < out.times.size(); ++i) {
        CHECK(std::abs(out.states[i][0] - std::cos(out.times[i])) < 1e-7);
        CHECK(std::abs(out.states[i][1] + std::sin(out.times[i])) < 1e-7);
    }
}

TEST_CASE("integration is deterministic") {
    IntegratorConfig cfg;
    for (int i = 1; i <= 100; ++i) cfg.sample_times.push_back(0.05 * i);
    const RawTrajectory a = integrate(kOscillator, 0.0, {1.0, 0.0}, 5.0, cfg);
    const RawTrajectory b = integrate(kOscillator, 0.0, {1.0, 0.0}, 5.0, cfg);
    REQUIRE(a.states.size() == b.states.size());
    for (std::size_t i = 0; i < a.states.size(); ++i) {
        CHECK(std::memcmp(a.states[i].data(), b.states[i].data(),
                          a.states[i].size() * sizeof(double)) == 0);
    }
    CHECK(a.stats.accepted == b.stats.accepted);
    CHECK(a.stats.rejected == b.stats.rejected);
}

TEST_CASE("non-finite derivatives abort integration") {
    const FieldFn blowup = [](double t, const Vec& y, Vec& dy) {
        dy[0] = t > 1.0 ? std::numeric_limits<double>::quiet_NaN() : -y[0];
    };
    IntegratorConfig cfg;
    CHECK_THROWS_AS(integrate(blowup, 0.0, {1.0}, 2.0, cfg), NonFiniteDerivative);
}

TEST_CASE("invalid configurations are rejected") {
    IntegratorConfig cfg;
    CHECK_THROWS_AS(integrate(kDecay, 1.0, {1.0}, 1.0, cfg), DomainError);
    cfg.sample_times = {0.5, 0.4};
    CHECK_THROWS_AS(integrate(kDecay, 0.0, {1.0}, 1.0, cfg), DomainError);
    cfg.sample_times = {2.0};
    CHECK_THROWS_AS(integrate(kDecay, 0.0, {1.0}, 1.0, cfg), DomainError);
    cfg.sample_times.clear();
    cfg.rel_tol = 0.0;
    CHECK_THROWS_AS(integrate(kDecay, 0.0, {1.0}, 1.0, cfg), DomainError);
}
