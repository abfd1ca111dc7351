#include "toy.hpp"

#include "ptcsim/numeric.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace ptcsim;
using Catch::Approx;

TEST_CASE("solve_linear on identity and diagonal systems") {
    CHECK(solve_linear(Matrix::Identity(3, 3), toy::vec({1, 2, 3})).isApprox(toy::vec({1, 2, 3})));
    Matrix a(2, 2);
    a << 2, 0, 0, 4;
    const Vector x = solve_linear(a, toy::vec({2, 8}));
    CHECK(x[0] == 1.0);
    CHECK(x[1] == 2.0);
}

TEST_CASE("solve_linear rejects a rank-deficient matrix") {
    Matrix a(2, 2);
    a << 1, 2, 2, 4;
    CHECK_THROWS_AS(solve_linear(a, toy::vec({1, 1})), SingularMatrix);
    CHECK_THROWS_AS(solve_linear(Matrix::Zero(3, 3), Vector::Ones(3)), SingularMatrix);
}

TEST_CASE("singularity threshold is relative to the original column") {
    Matrix a(2, 2);
    a << 1, 1, 1, 1 + 1e-13;
    CHECK_THROWS_AS(solve_linear(a, toy::vec({1, 1})), SingularMatrix);
    a(1, 1) = 1 + 1e-9;
    CHECK_NOTHROW(solve_linear(a, toy::vec({1, 1})));
    // Tiny but well-scaled columns are fine.
    CHECK(solve_linear(Matrix::Identity(2, 2) * 1e-20, toy::vec({1e-20, 2e-20}))
              .isApprox(toy::vec({1, 2})));
}

TEST_CASE("solve_linear residual on random well-conditioned systems") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + trial % 12;
        const Matrix a = toy::random_matrix(rng, n);
        Eigen::JacobiSVD<Matrix> svd(a);
        const double cond = svd.singularValues()(0) / svd.singularValues()(n - 1);
        if (!(cond < 1e6)) continue;
        const Vector b = toy::random_vector(rng, n);
        const Vector x = solve_linear(a, b);
        CHECK((a * x - b).norm() <= 1e-8 * b.norm());
    }
}

TEST_CASE("norm is dimension-scaled l2") {
    CHECK(norm(Vector::Zero(4)) == 0.0);
    CHECK(norm(toy::vec({3, 4})) == Approx(5.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(norm(Vector::Ones(4)) == 1.0);
    CHECK(norm(Vector(0)) == 0.0);
}

TEST_CASE("norm is absolutely homogeneous") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> c(-1e3, 1e3);
    for (int i = 0; i < 100; ++i) {
        const Vector v = toy::random_vector(rng, 1 + i % 9);
        const double k = c(rng);
        CHECK(norm(k * v) == Approx(std::abs(k) * norm(v)).epsilon(1e-14));
    }
}

TEST_CASE("fd_jacobian examples") {
    const Matrix j1 = fd_jacobian([](const Vector& x) { return x; }, toy::vec({1}), 1e-6);
    CHECK(std::abs(j1(0, 0) - 1.0) < 1e-8);

    const auto f = [](const Vector& v) { return toy::vec({v[0] * v[0], v[0] * v[1]}); };
    const Matrix j2 = fd_jacobian(f, toy::vec({2, 3}), 1e-5);
    Matrix expect(2, 2);
    expect << 4, 0, 3, 2;
    CHECK((j2 - expect).cwiseAbs().maxCoeff() < 1e-6);

    const Matrix j3 = fd_jacobian([](const Vector& x) { return Vector(x.array().sin()); },
                                  toy::vec({0}), 1e-6);
    CHECK(std::abs(j3(0, 0) - 1.0) < 1e-8);
}

TEST_CASE("fd_jacobian is exact to O(h^2) on quadratics") {
    // F(x) = A x + (x^T B_i x)_i, J = A + (B_i + B_i^T) x.
    std::mt19937 rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 1 + trial % 5;
        const Matrix a = toy::random_matrix(rng, n);
        std::vector<Matrix> b;
        for (int i = 0; i < n; ++i) b.push_back(toy::random_matrix(rng, n));
        auto f = [&](const Vector& x) {
            Vector out = a * x;
            for (int i = 0; i < n; ++i) out[i] += x.dot(b[i] * x);
            return out;
        };
        const Vector x = toy::random_vector(rng, n, 2.0);
        Matrix exact = a;
        for (int i = 0; i < n; ++i) exact.row(i) += ((b[i] + b[i].transpose()) * x).transpose();
        CHECK((fd_jacobian(f, x, 1e-5) - exact).cwiseAbs().maxCoeff() < 1e-7);
    }
}

TEST_CASE("fd_jacobian reports non-finite evaluations") {
    auto f = [](const Vector& x) { return Vector(x.array().log()); };
    CHECK_THROWS_AS(fd_jacobian(f, toy::vec({0.0}), 1e-6), NonFiniteResidual);
}
