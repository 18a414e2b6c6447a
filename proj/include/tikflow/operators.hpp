#ifndef TIKFLOW_OPERATORS_HPP
#define TIKFLOW_OPERATORS_HPP

#include <functional>
#include <memory>
#include <optional>
#include <variant>

#include "tikflow/linalg.hpp"

namespace tikflow {

/// Resolvent callable for operators given only through J_eta: (eta, z) -> J_eta z.
using ResolventFn = std::function<Vec(double, const Vec&)>;

struct LinearMatrix {
    Mat m;
};
struct Affine {
    Mat m;
    Vec b;
};
struct CustomResolvent {
    ResolventFn resolvent;
};

/// A maximally rho-comonotone operator presented through a computable
/// resolvent, together with the Yosida index eta. Requires
/// eta > max(-2*rho, 0) so that J_eta is single-valued and total.
class OperatorSpec {
public:
    OperatorSpec(LinearMatrix kind, double rho, double eta);
    OperatorSpec(Affine kind, double rho, double eta);
    OperatorSpec(CustomResolvent kind, double rho, double eta, std::size_t dim);

    std::size_t dim() const { return dim_; }
    double rho() const { return rho_; }
    double eta() const { return eta_; }

    bool is_linear() const { return std::holds_alternative<LinearMatrix>(kind_); }
    bool is_affine() const { return std::holds_alternative<Affine>(kind_); }
    bool is_custom() const { return std::holds_alternative<CustomResolvent>(kind_); }
    const Mat* matrix() const;
    const Vec* offset() const;

    /// J_eta z = (Id + eta*A)^{-1} z.
    Vec resolvent(const Vec& z) const;

    /// A_eta z = (z - J_eta z) / eta.
    Vec yosida(const Vec& z) const;

private:
    std::variant<LinearMatrix, Affine, CustomResolvent> kind_;
    double rho_;
    double eta_;
    std::size_t dim_;
    std::shared_ptr<const LuFactor> lu_; // factorization of I + eta*M, matrix kinds only
};

struct ComonotonicityCertificate {
    double rho = 0.0;
    bool holds = false;
    double witness_min_eigen = 0.0;
    std::optional<Vec> counterexample;
};

/// Decides rho-comonotonicity of the linear operator x -> M x through the
/// equivalent PSD condition sym(M) - rho*M^T M >= 0. On failure the returned
/// counterexample u satisfies u^T M u < rho*||M u||^2.
ComonotonicityCertificate certify_comonotone(const Mat& m, double rho);

struct CocoercivityCheck {
    bool pass = false;
    double worst_margin = 0.0;
};

/// Samples pairs (x, y) uniformly from [-10, 10]^dim and checks the
/// beta-cocoercivity inequality of A_eta with slack 1e-9.
CocoercivityCheck check_cocoercivity_sample(const OperatorSpec& op, double beta,
                                            int trials, std::uint64_t seed,
                                            double box = 10.0, double slack = 1e-9);

} // namespace tikflow

#endif
