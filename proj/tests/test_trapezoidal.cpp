#include "toy.hpp"

#include "ptcsim/trapezoidal.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace ptcsim;

namespace {

DaeProblem decay() { return toy::ode(1, [](const Vector& z) { return Vector(-z); }); }

// z' = -z, 0 = y - z
DaeProblem decay_dae() {
    DaeProblem p;
    p.n_zc = 1;
    p.n_y = 1;
    p.eval = [](const SystemState& s, Residuals& r) {
        r.hc = -s.zc;
        r.f = Vector(0);
        r.g = s.y - s.zc;
    };
    return p;
}

double error_at_one(double h) {
    TrapConfig cfg;
    cfg.h = h;
    const auto run = trap_integrate(decay(), toy::state(toy::vec({1}), Vector(0), Vector(0)), 1.0, cfg);
    return std::abs(run.trajectory.back().zc[0] - std::exp(-1.0));
}

}  // namespace

TEST_CASE("trapezoidal step closed forms") {
    const double z1 = (1 - 0.05) / (1 + 0.05);
    const auto s = trap_step(decay(), toy::state(toy::vec({1}), Vector(0), Vector(0)), 0.1);
    CHECK(s.zc[0] == Catch::Approx(z1).epsilon(1e-12));
    CHECK(s.t == Catch::Approx(0.1));
    const auto d = trap_step(decay_dae(), toy::state(toy::vec({1}), Vector(0), toy::vec({1})), 0.1);
    CHECK(d.zc[0] == Catch::Approx(z1).epsilon(1e-12));
    CHECK(d.y[0] == Catch::Approx(z1).epsilon(1e-12));
}

TEST_CASE("algebraic row stays satisfied") {
    DaeProblem p;
    p.n_zc = 1;
    p.n_y = 1;
    p.eval = [](const SystemState& s, Residuals& r) {
        r.hc = toy::vec({std::sin(s.zc[0]) - s.y[0]});
        r.f = Vector(0);
        r.g = toy::vec({2.0 - s.y[0]});
    };
    SystemState s = toy::state(toy::vec({0.3}), Vector(0), toy::vec({2}));
    for (int i = 0; i < 20; ++i) {
        s = trap_step(p, s, 0.2);
        CHECK(std::abs(s.y[0] - 2.0) <= 1e-12);
    }
}

TEST_CASE("integration error against exp(-1)") {
    CHECK(error_at_one(0.01) <= 2e-5);
}

TEST_CASE("second-order convergence") {
    for (double h : {0.1, 0.05, 0.02}) {
        const double ratio = error_at_one(h) / error_at_one(h / 2);
        CHECK(ratio >= 3.5);
        CHECK(ratio <= 4.5);
    }
}

TEST_CASE("zero-length span") {
    const auto s0 = toy::state(toy::vec({1}), Vector(0), Vector(0), 3.0);
    const auto run = trap_integrate(decay(), s0, 3.0, TrapConfig{});
    REQUIRE(run.trajectory.size() == 1);
    CHECK(run.trajectory[0].zc == s0.zc);
    CHECK(run.outcome.status == TrapStatus::Completed);
}

TEST_CASE("last step lands on t_end") {
    TrapConfig cfg;
    cfg.h = 0.3;
    const auto run = trap_integrate(decay(), toy::state(toy::vec({1}), Vector(0), Vector(0)), 1.0, cfg);
    CHECK(run.trajectory.back().t == 1.0);
    CHECK(run.trajectory.size() == 5);
}

TEST_CASE("trapezoidal matrix equals the derivative of the step residual") {
    // Nonlinear DAE with all three blocks.
    DaeProblem p;
    p.n_zc = 1;
    p.n_x = 2;
    p.n_y = 2;
    p.eval = [](const SystemState& s, Residuals& r) {
        r.hc = toy::vec({-0.1 * s.zc[0] + 0.05 * s.y[0] * s.y[1]});
        r.f = toy::vec({s.x[1] - std::sin(s.x[0]) * s.y[1], -s.x[0] - 0.3 * s.x[1] + s.zc[0] * s.y[0]});
        r.g = toy::vec({s.y[0] - std::cos(s.x[0]) - 0.2 * s.y[1] * s.y[1], s.y[1] * (1 + s.y[0] * s.y[0]) - s.x[1]});
    };
    std::mt19937 rng(41);
    for (ModelKind kind : {ModelKind::LongTerm, ModelKind::Qss}) {
        const DaeProblem q = p.with_kind(kind);
        for (int trial = 0; trial < 20; ++trial) {
            const SystemState prev = toy::state(toy::random_vector(rng, 1), toy::random_vector(rng, 2),
                                                toy::random_vector(rng, 2));
            SystemState cur = prev;
            cur.unpack(prev.packed() + toy::random_vector(rng, 5, 0.1));
            const double h = 0.05;
            auto hfun = [&](const Vector& v) {
                SystemState c = cur;
                c.unpack(v);
                return trap_residual(q, prev, c, h);
            };
            const Matrix fd = fd_jacobian(hfun, cur.packed(), 1e-6);
            const Matrix a = trap_matrix(q, cur, h);
            CHECK((a - fd).cwiseAbs().maxCoeff() <= 1e-5 * std::max(1.0, fd.cwiseAbs().maxCoeff()));
        }
    }
}

TEST_CASE("every accepted step satisfies the algebraic constraints") {
    TrapConfig cfg;
    cfg.h = 0.1;
    const auto run = trap_integrate(decay_dae(), toy::state(toy::vec({1}), Vector(0), toy::vec({1})), 2.0, cfg);
    for (const auto& s : run.trajectory) CHECK(norm(s.y - s.zc) <= cfg.newton_tol);
}

TEST_CASE("QSS singularity stops the integration with a failure time") {
    // Fast subsystem 0 = x^2 - (1 - z): the root vanishes as z reaches 1.
    DaeProblem p;
    p.n_zc = 1;
    p.n_x = 1;
    p.model_kind = ModelKind::Qss;
    p.eval = [](const SystemState& s, Residuals& r) {
        r.hc = toy::vec({0.5});
        r.f = toy::vec({s.x[0] * s.x[0] - (1 - s.zc[0])});
        r.g = Vector(0);
    };
    TrapConfig cfg;
    cfg.h = 0.1;
    const auto run = trap_integrate(p, toy::state(toy::vec({0}), toy::vec({1}), Vector(0)), 5.0, cfg);
    CHECK(run.outcome.status != TrapStatus::Completed);
    CHECK(run.outcome.failure_time > 0.0);
    CHECK(run.outcome.failure_time <= 2.0);
}

TEST_CASE("step hook sees every boundary") {
    std::vector<double> seen;
    TrapConfig cfg;
    cfg.h = 0.25;
    trap_integrate(decay(), toy::state(toy::vec({1}), Vector(0), Vector(0)), 1.0, cfg,
                   [&](SystemState& s) { seen.push_back(s.t); });
    CHECK(seen == std::vector<double>{0.0, 0.25, 0.5, 0.75});
}
