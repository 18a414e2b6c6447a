#include "tikflow/operators.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace tikflow {

namespace {

void check_hypothesis_h(double rho, double eta) {
    if (!(eta > std::max(-2.0 * rho, 0.0)))
        throw DomainError("OperatorSpec: eta must exceed max(-2*rho, 0)");
}

// (1/eta)*I + M; the resolvent solve scales the right-hand side by 1/eta.
Mat shifted(const Mat& m, double eta) {
    Mat s = m;
    for (std::size_t i = 0; i < s.dim(); ++i) s(i, i) += 1.0 / eta;
    return s;
}

} // namespace

OperatorSpec::OperatorSpec(LinearMatrix kind, double rho, double eta)
    : kind_(std::move(kind)), rho_(rho), eta_(eta),
      dim_(std::get<LinearMatrix>(kind_).m.dim()) {
    check_hypothesis_h(rho, eta);
    lu_ = std::make_shared<LuFactor>(shifted(std::get<LinearMatrix>(kind_).m, eta));
}

OperatorSpec::OperatorSpec(Affine kind, double rho, double eta)
    : kind_(std::move(kind)), rho_(rho), eta_(eta),
      dim_(std::get<Affine>(kind_).m.dim()) {
    check_hypothesis_h(rho, eta);
    const auto& a = std::get<Affine>(kind_);
    if (a.b.size() != dim_) throw DimensionMismatch("OperatorSpec: affine offset dimension");
    lu_ = std::make_shared<LuFactor>(shifted(a.m, eta));
}

OperatorSpec::OperatorSpec(CustomResolvent kind, double rho, double eta, std::size_t dim)
    : kind_(std::move(kind)), rho_(rho), eta_(eta), dim_(dim) {
    check_hypothesis_h(rho, eta);
    if (dim == 0) throw DomainError("OperatorSpec: dimension must be positive");
}

const Mat* OperatorSpec::matrix() const {
    if (auto* l = std::get_if<LinearMatrix>(&kind_)) return &l->m;
    if (auto* a = std::get_if<Affine>(&kind_)) return &a->m;
    return nullptr;
}

const Vec* OperatorSpec::offset() const {
    if (auto* a = std::get_if<Affine>(&kind_)) return &a->b;
    return nullptr;
}

Vec OperatorSpec::resolvent(const Vec& z) const {
    if (z.size() != dim_) throw DimensionMismatch("resolvent: input dimension");
    if (auto* c = std::get_if<CustomResolvent>(&kind_)) {
        Vec r = c->resolvent(eta_, z);
        if (r.size() != dim_) throw DimensionMismatch("resolvent: callable output dimension");
        return r;
    }
    // (I + eta*M) x = z + eta*b  <=>  ((1/eta)I + M) x = (z + eta*b)/eta
    Vec rhs = (1.0 / eta_) * z;
    if (const Vec* b = offset()) rhs += *b;
    return lu_->solve(rhs);
}

Vec OperatorSpec::yosida(const Vec& z) const {
    return (1.0 / eta_) * (z - resolvent(z));
}

ComonotonicityCertificate certify_comonotone(const Mat& m, double rho) {
    const std::size_t n = m.dim();
    Mat sym(n);
    const Mat mt = m.transpose();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) sym(i, j) = 0.5 * (m(i, j) + mt(i, j));
    const Mat witness = sym - rho * (mt * m);

    Vec values;
    Mat vectors;
    sym_eigen(witness, values, vectors);

    ComonotonicityCertificate cert;
    cert.rho = rho;
    cert.witness_min_eigen = values.front();
    cert.holds = values.front() >= -1e-10;
    if (!cert.holds) {
        Vec u(n);
        for (std::size_t i = 0; i < n; ++i) u[i] = vectors(i, 0);
        cert.counterexample = u;
    }
    return cert;
}

CocoercivityCheck check_cocoercivity_sample(const OperatorSpec& op, double beta,
                                            int trials, std::uint64_t seed,
                                            double box, double slack) {
    if (beta <= 0.0) throw DomainError("check_cocoercivity_sample: beta must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-box, box);

    CocoercivityCheck result;
    result.pass = true;
    result.worst_margin = std::numeric_limits<double>::infinity();
    const std::size_t n = op.dim();
    Vec x(n), y(n);
    for (int t = 0; t < trials; ++t) {
        for (std::size_t i = 0; i < n; ++i) x[i] = uni(rng);
        for (std::size_t i = 0; i < n; ++i) y[i] = uni(rng);
        const Vec du = op.yosida(x) - op.yosida(y);
        const Vec dx = x - y;
        const double margin = dot(du, dx) - beta * dot(du, du);
        result.worst_margin = std::min(result.worst_margin, margin);
        if (margin < -slack) result.pass = false;
    }
    if (trials == 0) result.worst_margin = 0.0;
    return result;
}

} // namespace tikflow
