#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>

namespace ptcsim {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SingularMatrix : public Error {
public:
    using Error::Error;
};

class NonFiniteResidual : public Error {
public:
    using Error::Error;
};

// Dense LU with partial pivoting. A pivot is rejected when it falls below
// 1e-12 times the largest magnitude in the same column of the input matrix.
class LuFactorization {
public:
    explicit LuFactorization(const Matrix& a);
    Vector solve(const Vector& b) const;
    int size() const { return static_cast<int>(lu_.rows()); }

private:
    Matrix lu_;
    Eigen::VectorXi perm_;
};

Vector solve_linear(const Matrix& a, const Vector& b);

// l2 norm divided by sqrt(len); zero for an empty vector.
double norm(const Vector& v);

bool all_finite(const Vector& v);

using VectorFunction = std::function<Vector(const Vector&)>;

// Central differences, column j = (F(x + h e_j) - F(x - h e_j)) / 2h.
Matrix fd_jacobian(const VectorFunction& f, const Vector& x, double h);

}  // namespace ptcsim
