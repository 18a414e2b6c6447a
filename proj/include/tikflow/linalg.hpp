#ifndef TIKFLOW_LINALG_HPP
#define TIKFLOW_LINALG_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace tikflow {

using Vec = std::vector<double>;

struct SingularMatrix : std::runtime_error {
    explicit SingularMatrix(const std::string& msg) : std::runtime_error(msg) {}
};

struct NotSymmetric : std::runtime_error {
    explicit NotSymmetric(const std::string& msg) : std::runtime_error(msg) {}
};

struct DimensionMismatch : std::invalid_argument {
    explicit DimensionMismatch(const std::string& msg) : std::invalid_argument(msg) {}
};

struct DomainError : std::domain_error {
    explicit DomainError(const std::string& msg) : std::domain_error(msg) {}
};

/// Dense square matrix, row-major.
class Mat {
public:
    Mat() = default;
    explicit Mat(std::size_t n, double fill = 0.0) : n_(n), a_(n * n, fill) {}
    Mat(std::size_t n, std::vector<double> entries);

    static Mat identity(std::size_t n);
    static Mat diag(const Vec& d);

    std::size_t dim() const { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
    const std::vector<double>& data() const { return a_; }

    Mat transpose() const;
    double max_abs() const;

private:
    std::size_t n_ = 0;
    std::vector<double> a_;
};

Mat operator+(const Mat& a, const Mat& b);
Mat operator-(const Mat& a, const Mat& b);
Mat operator*(const Mat& a, const Mat& b);
Mat operator*(double s, const Mat& a);

// vector helpers
Vec operator+(const Vec& a, const Vec& b);
Vec operator-(const Vec& a, const Vec& b);
Vec operator*(double s, const Vec& a);
Vec& operator+=(Vec& a, const Vec& b);
double dot(const Vec& a, const Vec& b);
double norm(const Vec& a);
Vec matvec(const Mat& m, const Vec& x);

/// LU factorization with partial pivoting, reusable across right-hand sides.
class LuFactor {
public:
    explicit LuFactor(const Mat& a);
    Vec solve(const Vec& b) const;
    std::size_t dim() const { return lu_.dim(); }

private:
    Mat lu_;
    std::vector<std::size_t> perm_;
};

/// Solves a*x = b by partial-pivoted Gaussian elimination.
/// Throws SingularMatrix when a pivot magnitude drops below 1e-14 * max|a|.
Vec solve_dense(const Mat& a, const Vec& b);

/// Smallest eigenvalue of a symmetric matrix via cyclic Jacobi rotations.
/// Throws NotSymmetric when relative asymmetry exceeds 1e-10.
double sym_eigen_min(const Mat& s);

/// Full symmetric eigendecomposition (values ascending, columns of v are
/// the matching eigenvectors).
void sym_eigen(const Mat& s, Vec& values, Mat& vectors);

} // namespace tikflow

#endif
