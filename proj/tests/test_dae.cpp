#include "toy.hpp"

#include "ptcsim/power_system.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace ptcsim;

TEST_CASE("stacked residual sign convention on the linear problem") {
    const DaeProblem p = toy::linear3();
    const Vector f = eval_residual(p, toy::state(toy::vec({1}), toy::vec({1}), toy::vec({1})));
    CHECK(f.isApprox(toy::vec({1, 1, 0})));
    CHECK(eval_residual(p, toy::state(toy::vec({0}), toy::vec({0}), toy::vec({0}))).norm() <= 1e-12);
}

TEST_CASE("Jacobian of the linear problem") {
    // dF/dp of F = -[h_c; f; g] = (z, x, y - x).
    const DaeProblem p = toy::linear3();
    Matrix expect(3, 3);
    expect << 1, 0, 0, 0, 1, 0, 0, -1, 1;
    const Matrix j = eval_jacobian(p, toy::state(toy::vec({0.3}), toy::vec({-2}), toy::vec({5})));
    CHECK((j - expect).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("mass sign convention reproduces dz/dt = h_c") {
    // D dp/dt = -F: with F = -h_c, dz_c/dt = h_c.
    const DaeProblem p = toy::linear3();
    const SystemState s = toy::state(toy::vec({0.7}), toy::vec({0.2}), toy::vec({0.2}));
    Residuals r;
    p.eval(s, r);
    const Vector rhs = -assemble_mass(p) * eval_residual(p, s);
    CHECK(rhs[0] == r.hc[0]);
    CHECK(rhs[1] == r.f[0]);
}

TEST_CASE("Jacobian with an empty algebraic block") {
    const DaeProblem p = toy::ode(2, [](const Vector& z) { return toy::vec({-z[0] * z[1], z[0]}); });
    const Matrix j = eval_jacobian(p, toy::state(toy::vec({2, 3}), Vector(0), Vector(0)));
    REQUIRE(j.rows() == 2);
    Matrix expect(2, 2);
    expect << 3, 2, -1, 0;
    CHECK((j - expect).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("mass matrices") {
    DaeProblem p;
    p.n_zc = 2;
    p.n_x = 1;
    p.n_y = 1;
    CHECK(assemble_mass(p).diagonal() == toy::vec({1, 1, 1, 0}));
    CHECK(mass_structure(p).kind == MassStructure::Kind::D1_LongTerm);
    p.model_kind = ModelKind::Qss;
    CHECK(assemble_mass(p).diagonal() == toy::vec({1, 1, 0, 0}));
    CHECK(mass_structure(p).active_count == 2);
    DaeProblem alg;
    alg.n_y = 3;
    CHECK(assemble_mass(alg).isZero());
    for (const DaeProblem& q : {p, p.with_kind(ModelKind::LongTerm), alg}) {
        const Matrix d = assemble_mass(q);
        CHECK(d * d == d);
    }
}

TEST_CASE("consistency checks") {
    DaeProblem p = toy::linear3();
    CHECK(check_consistency(p, toy::state(toy::vec({0}), toy::vec({0}), toy::vec({0})), 1e-8).consistent);
    const auto off = check_consistency(p, toy::state(toy::vec({0}), toy::vec({1e-3}), toy::vec({0})), 1e-6);
    CHECK_FALSE(off.consistent);
    CHECK(off.g_norm == Catch::Approx(1e-3));
    p.model_kind = ModelKind::Qss;
    // g = 0 but f = -x = -0.1
    const auto q = check_consistency(p, toy::state(toy::vec({0}), toy::vec({0.1}), toy::vec({0.1})), 1e-6);
    CHECK_FALSE(q.consistent);
    CHECK(q.f_norm == Catch::Approx(0.1));
}

TEST_CASE("projection onto the algebraic manifold") {
    const DaeProblem p = toy::linear3();
    const SystemState good = toy::state(toy::vec({0.4}), toy::vec({2}), toy::vec({2}));
    const SystemState same = project_consistent(p, good, 1e-12, 10);
    CHECK(same.packed() == good.packed());

    SystemState bad = good;
    bad.y[0] += 0.5;
    Counters c;
    // One Newton step suffices; the finite-difference Jacobian limits the accuracy.
    const SystemState fixed = project_consistent(p, bad, 1e-9, 1);
    CHECK(fixed.y[0] == Catch::Approx(2.0).epsilon(1e-9));
    CHECK(fixed.x[0] == 2.0);
    CHECK(check_consistency(p, fixed, 1e-9).consistent);
}

TEST_CASE("projection past the solvability boundary fails") {
    // Two buses, lossless line x = 0.5, constant-power load P at the far end:
    // no solution for P > V^2 / (2x) = 1.
    for (double load : {0.5, 3.0}) {
        DaeProblem p;
        p.n_y = 2;  // theta2, V2
        p.eval = [load](const SystemState& s, Residuals& r) {
            const double th = s.y[0], v = s.y[1], b = 2.0;
            r.hc = Vector(0);
            r.f = Vector(0);
            r.g = toy::vec({-load - v * b * std::sin(th), v * b * std::cos(th) - v * v * b});
        };
        const SystemState s0 = toy::state(Vector(0), Vector(0), toy::vec({0.0, 1.0}));
        if (load < 1.0) {
            const SystemState s = project_consistent(p, s0, 1e-10, 50);
            CHECK(check_consistency(p, s, 1e-10).consistent);
        } else {
            CHECK_THROWS_AS(project_consistent(p, s0, 1e-10, 50), NoConvergence);
        }
    }
}

TEST_CASE("non-finite residuals are reported") {
    DaeProblem p = toy::ode(1, [](const Vector& z) { return Vector(z.array().log()); });
    CHECK_THROWS_AS(eval_residual(p, toy::state(toy::vec({-1}), Vector(0), Vector(0))),
                    NonFiniteResidual);
}
