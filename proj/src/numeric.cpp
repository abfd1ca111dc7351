#include "ptcsim/numeric.hpp"

#include <cmath>
#include <utility>

namespace ptcsim {

namespace {
constexpr double kPivotRelTol = 1e-12;
}

LuFactorization::LuFactorization(const Matrix& a) : lu_(a), perm_(a.rows()) {
    if (a.rows() != a.cols())
        throw std::invalid_argument("solve_linear: matrix is not square");
    const Eigen::Index n = a.rows();
    for (Eigen::Index i = 0; i < n; ++i) perm_(i) = static_cast<int>(i);

    for (Eigen::Index k = 0; k < n; ++k) {
        double colmax = a.col(k).cwiseAbs().maxCoeff();
        Eigen::Index piv = k;
        double best = std::abs(lu_(k, k));
        for (Eigen::Index i = k + 1; i < n; ++i) {
            double v = std::abs(lu_(i, k));
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        if (!(best > kPivotRelTol * colmax) || best == 0.0)
            throw SingularMatrix("singular matrix: pivot " + std::to_string(best) +
                                 " in column " + std::to_string(k));
        if (piv != k) {
            lu_.row(k).swap(lu_.row(piv));
            std::swap(perm_(k), perm_(piv));
        }
        const double d = lu_(k, k);
        for (Eigen::Index i = k + 1; i < n; ++i) {
            double l = lu_(i, k) / d;
            lu_(i, k) = l;
            if (l != 0.0)
                lu_.row(i).tail(n - k - 1) -= l * lu_.row(k).tail(n - k - 1);
        }
    }
}

Vector LuFactorization::solve(const Vector& b) const {
    const Eigen::Index n = lu_.rows();
    if (b.size() != n) throw std::invalid_argument("solve_linear: dimension mismatch");
    Vector x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = b(perm_(i));
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < i; ++j) x(i) -= lu_(i, j) * x(j);
    for (Eigen::Index i = n - 1; i >= 0; --i) {
        for (Eigen::Index j = i + 1; j < n; ++j) x(i) -= lu_(i, j) * x(j);
        x(i) /= lu_(i, i);
    }
    return x;
}

Vector solve_linear(const Matrix& a, const Vector& b) {
    return LuFactorization(a).solve(b);
}

double norm(const Vector& v) {
    if (v.size() == 0) return 0.0;
    return v.norm() / std::sqrt(static_cast<double>(v.size()));
}

bool all_finite(const Vector& v) {
    return v.allFinite();
}

Matrix fd_jacobian(const VectorFunction& f, const Vector& x, double h) {
    if (!(h > 0)) throw std::invalid_argument("fd_jacobian: h must be positive");
    const Eigen::Index n = x.size();
    Matrix jac;
    Vector xp = x;
    for (Eigen::Index j = 0; j < n; ++j) {
        xp(j) = x(j) + h;
        Vector fp = f(xp);
        xp(j) = x(j) - h;
        Vector fm = f(xp);
        xp(j) = x(j);
        if (!fp.allFinite() || !fm.allFinite())
            throw NonFiniteResidual("fd_jacobian: non-finite evaluation");
        if (j == 0) jac.resize(fp.size(), n);
        jac.col(j) = (fp - fm) / (2.0 * h);
    }
    if (n == 0) jac.resize(f(x).size(), 0);
    return jac;
}

}  // namespace ptcsim
