#include <doctest.h>

#include <cmath>
#include <random>

#include "tikflow/operators.hpp"
#include "test_support.hpp"

using namespace tikflow;
using tikflow::testing::affine_op;
using tikflow::testing::example_op;
using tikflow::testing::random_vec;

TEST_CASE("resolvent of the zero operator is the identity") {
    const OperatorSpec op(LinearMatrix{Mat(2)}, 0.0, 1.0);
    const Vec j = op.resolvent({5.0, -2.0});
    CHECK(j[0] == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(j[1] == doctest::Approx(-2.0).epsilon(1e-14));
}

TEST_CASE("resolvent of the example operator at eta=3") {
    const Vec j = example_op().resolvent({1.0, 1.0, 1.0});
    CHECK(j[0] == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(j[1] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(j[2] == doctest::Approx(-0.5).epsilon(1e-14));
}

TEST_CASE("resolvent of the affine operator") {
    const Vec j = affine_op().resolvent({3.0, 7.0});
    CHECK(j[0] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(j[1] == doctest::Approx(7.0).epsilon(1e-14));
}

TEST_CASE("yosida of the example operator") {
    const Vec a = example_op().yosida({1.0, 1.0, 1.0});
    CHECK(a[0] == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(std::abs(a[1]) < 1e-15);
    CHECK(a[2] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("yosida vanishes on zeros of the operator") {
    const OperatorSpec op = example_op();
    const Vec z = {0.0, 4.0, 0.0};
    CHECK(norm(op.yosida(z)) < 1e-14);
    const Vec j = op.resolvent(z);
    CHECK(norm(j - z) < 1e-14);
}

TEST_CASE("yosida of the identity operator halves at eta=1") {
    const OperatorSpec op(LinearMatrix{Mat::identity(2)}, 1.0, 1.0);
    const Vec a = op.yosida({2.0, 0.0});
    CHECK(a[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(a[1]) < 1e-15);
}

TEST_CASE("hypothesis on eta is enforced at construction") {
    const Mat a = Mat::diag({1.0, 0.0, -1.0});
    CHECK_THROWS_AS(OperatorSpec(LinearMatrix{a}, -1.0, 1.5), DomainError);
    CHECK_THROWS_AS(OperatorSpec(LinearMatrix{a}, -1.0, 2.0), DomainError);
    CHECK_THROWS_AS(OperatorSpec(LinearMatrix{a}, 0.0, 0.0), DomainError);
    CHECK_NOTHROW(OperatorSpec(LinearMatrix{a}, -1.0, 2.0 + 1e-9));
}

TEST_CASE("resolvent rejects dimension mismatches") {
    CHECK_THROWS_AS(example_op().resolvent({1.0, 2.0}), DimensionMismatch);
    CHECK_THROWS_AS(OperatorSpec(Affine{Mat::identity(2), {1.0}}, 0.0, 1.0),
                    DimensionMismatch);
}

TEST_CASE("comonotonicity certification of the example matrix") {
    const Mat a = Mat::diag({1.0, 0.0, -1.0});

    const auto holds = certify_comonotone(a, -1.0);
    CHECK(holds.holds);
    CHECK(std::abs(holds.witness_min_eigen) < 1e-10);
    CHECK_FALSE(holds.counterexample.has_value());

    const auto fails = certify_comonotone(a, 0.0);
    CHECK_FALSE(fails.holds);
    CHECK(fails.witness_min_eigen == doctest::Approx(-1.0).epsilon(1e-10));
    REQUIRE(fails.counterexample.has_value());
    const Vec& u = *fails.counterexample;
    const Vec au = matvec(a, u);
    CHECK(dot(u, au) < 0.0 * dot(au, au));
}

TEST_CASE("identity is 1-cocoercive") {
    CHECK(certify_comonotone(Mat::identity(3), 1.0).holds);
}

TEST_CASE("certification agrees with brute-force sampling") {
    struct Case {
        Mat m;
        double rho;
    };
    Mat rot(2);
    rot(0, 1) = 1.0;
    rot(1, 0) = -1.0;
    const std::vector<Case> cases = {
        {Mat::diag({1.0, 0.0, -1.0}), -1.0}, {Mat::diag({1.0, 0.0, -1.0}), 0.0},
        {Mat::identity(3), 1.0},             {Mat::diag({1.0, 0.0}), 0.0},
        {rot, 0.0},                          {rot, 0.5},
    };
    std::mt19937_64 rng(2024);
    for (const auto& c : cases) {
        const auto cert = certify_comonotone(c.m, c.rho);
        double sampled_min = std::numeric_limits<double>::infinity();
        for (int trial = 0; trial < 10000; ++trial) {
            const Vec u = random_vec(rng, c.m.dim(), 1.0);
            const Vec mu = matvec(c.m, u);
            sampled_min = std::min(sampled_min, dot(u, mu) - c.rho * dot(mu, mu));
        }
        if (cert.holds) {
            CHECK(sampled_min >= -1e-9);
        } else {
            REQUIRE(cert.counterexample.has_value());
            const Vec mu = matvec(c.m, *cert.counterexample);
            CHECK(dot(*cert.counterexample, mu) - c.rho * dot(mu, mu) < -1e-12);
        }
    }
}

TEST_CASE("cocoercivity sampling at the sharp modulus") {
    const OperatorSpec op = example_op();
    const auto ok = check_cocoercivity_sample(op, 2.0, 1000, 7);
    CHECK(ok.pass);
    CHECK(ok.worst_margin >= -1e-9);

    const auto bad = check_cocoercivity_sample(op, 5.0, 1000, 7);
    CHECK_FALSE(bad.pass);
    CHECK(bad.worst_margin < 0.0);
}

TEST_CASE("degenerate sampling box gives zero margins") {
    const auto res = check_cocoercivity_sample(example_op(), 2.0, 100, 7, 0.0);
    CHECK(res.pass);
    CHECK(std::abs(res.worst_margin) < 1e-15);
}

TEST_CASE("resolvent averagedness and yosida Lipschitz bounds hold on samples") {
    std::mt19937_64 rng(31);
    for (const OperatorSpec& op : {example_op(), affine_op()}) {
        const double theta = op.eta() / (2.0 * (op.rho() + op.eta()));
        const double lip = 1.0 / (op.rho() + op.eta());
        for (int trial = 0; trial < 2000; ++trial) {
            const Vec x = random_vec(rng, op.dim(), 10.0);
            const Vec y = random_vec(rng, op.dim(), 10.0);
            const Vec jx = op.resolvent(x), jy = op.resolvent(y);
            const Vec rx = x - jx, ry = y - jy;
            const Vec dr = rx - ry;
            const Vec dj = jx - jy;
            const Vec dxy = x - y;
            CHECK((1.0 - theta) * dot(dr, dr) <=
                  theta * (dot(dxy, dxy) - dot(dj, dj)) + 1e-9);
            const Vec da = op.yosida(x) - op.yosida(y);
            CHECK(norm(da) <= (1.0 + 1e-9) * lip * norm(dxy));
        }
    }
}

TEST_CASE("custom resolvent operators delegate") {
    // wraps the example operator's resolvent behind a callable
    const OperatorSpec direct = example_op();
    const OperatorSpec custom(
        CustomResolvent{[](double eta, const Vec& z) {
            const Mat a = Mat::diag({1.0, 0.0, -1.0});
            Mat sys = Mat::identity(3) + eta * a;
            return solve_dense(sys, z);
        }},
        -1.0, 3.0, 3);
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const Vec z = random_vec(rng, 3, 10.0);
        CHECK(norm(custom.yosida(z) - direct.yosida(z)) < 1e-12);
    }
}
