#include "tikflow/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tikflow {

Mat::Mat(std::size_t n, std::vector<double> entries) : n_(n), a_(std::move(entries)) {
    if (a_.size() != n * n)
        throw DimensionMismatch("Mat: entry count " + std::to_string(a_.size()) +
                                " does not match dimension " + std::to_string(n));
    for (double v : a_)
        if (!std::isfinite(v)) throw std::invalid_argument("Mat: non-finite entry");
}

Mat Mat::identity(std::size_t n) {
    Mat m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Mat Mat::diag(const Vec& d) {
    Mat m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

Mat Mat::transpose() const {
    Mat t(n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

double Mat::max_abs() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::abs(v));
    return m;
}

Mat operator+(const Mat& a, const Mat& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("Mat+: dimension mismatch");
    Mat r(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j) r(i, j) = a(i, j) + b(i, j);
    return r;
}

Mat operator-(const Mat& a, const Mat& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("Mat-: dimension mismatch");
    Mat r(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j) r(i, j) = a(i, j) - b(i, j);
    return r;
}

Mat operator*(const Mat& a, const Mat& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("Mat*: dimension mismatch");
    const std::size_t n = a.dim();
    Mat r(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const double aik = a(i, k);
            for (std::size_t j = 0; j < n; ++j) r(i, j) += aik * b(k, j);
        }
    return r;
}

Mat operator*(double s, const Mat& a) {
    Mat r(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j) r(i, j) = s * a(i, j);
    return r;
}

Vec operator+(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw DimensionMismatch("Vec+: dimension mismatch");
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

Vec operator-(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw DimensionMismatch("Vec-: dimension mismatch");
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

Vec operator*(double s, const Vec& a) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
    return r;
}

Vec& operator+=(Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw DimensionMismatch("Vec+=: dimension mismatch");
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
}

double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw DimensionMismatch("dot: dimension mismatch");
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

Vec matvec(const Mat& m, const Vec& x) {
    if (m.dim() != x.size()) throw DimensionMismatch("matvec: dimension mismatch");
    Vec r(m.dim(), 0.0);
    for (std::size_t i = 0; i < m.dim(); ++i)
        for (std::size_t j = 0; j < m.dim(); ++j) r[i] += m(i, j) * x[j];
    return r;
}

LuFactor::LuFactor(const Mat& a) : lu_(a), perm_(a.dim()) {
    const std::size_t n = lu_.dim();
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});
    const double pivot_floor = 1e-14 * std::max(lu_.max_abs(), 1e-300);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(lu_(i, k)) > std::abs(lu_(p, k))) p = i;
        if (std::abs(lu_(p, k)) < pivot_floor)
            throw SingularMatrix("solve_dense: pivot below threshold at column " +
                                 std::to_string(k));
        if (p != k) {
            std::swap(perm_[p], perm_[k]);
            for (std::size_t j = 0; j < n; ++j) {
                double tmp = lu_(p, j);
                lu_(p, j) = lu_(k, j);
                lu_(k, j) = tmp;
            }
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            lu_(i, k) /= lu_(k, k);
            const double lik = lu_(i, k);
            for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= lik * lu_(k, j);
        }
    }
}

Vec LuFactor::solve(const Vec& b) const {
    const std::size_t n = lu_.dim();
    if (b.size() != n) throw DimensionMismatch("LuFactor::solve: dimension mismatch");
    Vec x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) x[i] -= lu_(i, j) * x[j];
    for (std::size_t ii = n; ii-- > 0;) {
        for (std::size_t j = ii + 1; j < n; ++j) x[ii] -= lu_(ii, j) * x[j];
        x[ii] /= lu_(ii, ii);
    }
    return x;
}

Vec solve_dense(const Mat& a, const Vec& b) { return LuFactor(a).solve(b); }

namespace {

// One sweep of cyclic Jacobi rotations; returns the off-diagonal Frobenius norm
// before the sweep.
double jacobi_sweep(Mat& a, Mat* v) {
    const std::size_t n = a.dim();
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = p + 1; q < n; ++q) off += 2.0 * a(p, q) * a(p, q);
    off = std::sqrt(off);
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
            const double apq = a(p, q);
            if (apq == 0.0) continue;
            const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
            const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                             (std::abs(theta) + std::sqrt(theta * theta + 1.0));
            const double c = 1.0 / std::sqrt(t * t + 1.0);
            const double s = t * c;
            for (std::size_t k = 0; k < n; ++k) {
                const double akp = a(k, p), akq = a(k, q);
                a(k, p) = c * akp - s * akq;
                a(k, q) = s * akp + c * akq;
            }
            for (std::size_t k = 0; k < n; ++k) {
                const double apk = a(p, k), aqk = a(q, k);
                a(p, k) = c * apk - s * aqk;
                a(q, k) = s * apk + c * aqk;
            }
            if (v) {
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = (*v)(k, p), vkq = (*v)(k, q);
                    (*v)(k, p) = c * vkp - s * vkq;
                    (*v)(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    return off;
}

void check_symmetry(const Mat& s) {
    const double scale = std::max(s.max_abs(), 1e-300);
    for (std::size_t i = 0; i < s.dim(); ++i)
        for (std::size_t j = i + 1; j < s.dim(); ++j)
            if (std::abs(s(i, j) - s(j, i)) > 1e-10 * scale)
                throw NotSymmetric("sym_eigen: relative asymmetry exceeds 1e-10");
}

} // namespace

void sym_eigen(const Mat& s, Vec& values, Mat& vectors) {
    check_symmetry(s);
    const std::size_t n = s.dim();
    Mat a = s;
    vectors = Mat::identity(n);
    const double tol = 1e-14 * std::max(s.max_abs(), 1.0);
    for (int sweep = 0; sweep < 100; ++sweep) {
        if (jacobi_sweep(a, &vectors) < tol) break;
    }
    values.resize(n);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Vec diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = a(i, i);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return diag[i] < diag[j]; });
    Mat sorted(n);
    for (std::size_t j = 0; j < n; ++j) {
        values[j] = diag[order[j]];
        for (std::size_t i = 0; i < n; ++i) sorted(i, j) = vectors(i, order[j]);
    }
    vectors = sorted;
}

double sym_eigen_min(const Mat& s) {
    Vec values;
    Mat vectors;
    sym_eigen(s, values, vectors);
    return values.front();
}

} // namespace tikflow
