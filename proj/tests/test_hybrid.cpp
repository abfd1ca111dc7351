#include "toy.hpp"

#include "ptcsim/power_system.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace ptcsim;

namespace {

EventRule toy_rule(int id, int zd_index, double threshold, double delay) {
    EventRule r;
    r.device_id = id;
    r.device = "D" + std::to_string(id);
    r.zd_index = zd_index;
    r.delay = delay;
    r.lower = 0.0;
    r.upper = 1.0;
    r.guard = [threshold](const SystemState& s) { return s.y[0] > threshold ? 1 : 0; };
    r.transition = [zd_index](const SystemState& s, int) { return s.zd[zd_index] + 0.25; };
    return r;
}

struct Runs {
    HybridSystem sys;
    RunResult base, ptc;
};

Runs longterm(const Scenario& sc) {
    Runs r{build_problem(sc, ModelKind::LongTerm), {}, {}};
    r.base = run_baseline(r.sys, make_plan(sc, ModelKind::LongTerm, Method::Trapezoidal));
    r.ptc = run_longterm_ptc(r.sys, make_plan(sc, ModelKind::LongTerm, Method::Ptc));
    return r;
}

double max_diff(const SystemState& a, const SystemState& b) {
    return (a.packed() - b.packed()).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("event detection") {
    SystemState s = toy::state(Vector(0), Vector(0), toy::vec({0.0}));
    s.zd = toy::vec({0.0, 0.0});
    EventMonitor mon({toy_rule(2, 1, 0.5, 0.0), toy_rule(1, 0, 0.5, 0.0)});
    CHECK(detect_events(mon, s).empty());
    s.y[0] = 1.0;
    const auto tr = detect_events(mon, s);
    REQUIRE(tr.size() == 2);
    CHECK(tr[0].device_id == 1);
    CHECK(tr[1].device_id == 2);
}

TEST_CASE("timers fire once per delay and stamp the expiry") {
    SystemState s = toy::state(Vector(0), Vector(0), toy::vec({1.0}), 10.0);
    s.zd = toy::vec({0.0});
    EventMonitor mon({toy_rule(1, 0, 0.5, 3.0)});
    CHECK(mon.detect(s).empty());
    CHECK(mon.next_expiry() == 13.0);
    s.t = 17.5;
    const auto tr = mon.detect(s);
    REQUIRE(tr.size() == 1);
    CHECK(tr[0].time == 13.0);
    CHECK(mon.next_expiry() == 16.0);
    s.y[0] = 0.0;
    CHECK(mon.detect(s).empty());
    CHECK_FALSE(mon.next_expiry().has_value());
}

TEST_CASE("applying transitions") {
    DaeProblem p;
    SystemState s = toy::state(Vector(0), Vector(0), Vector(0));
    s.zd = toy::vec({1.0, 0.5});
    bool changed = true;
    CHECK(apply_events(p, s, {}, nullptr, &changed).zd == s.zd);
    CHECK_FALSE(changed);

    Transition up{1, "T1", 1, 0.5, 0.5 + 0.0125, 0.0, 0.0, 1.0};
    const SystemState a = apply_events(p, s, {up}, nullptr, &changed);
    CHECK(changed);
    CHECK(a.zd[1] == s.zd[1] + 0.0125);

    Transition over{2, "T2", 0, 1.0, 1.0125, 0.0, 0.0, 1.0};
    std::vector<EventLogEntry> log;
    const SystemState b = apply_events(p, s, {over}, &log, &changed);
    CHECK_FALSE(changed);
    CHECK(b.zd == s.zd);
    REQUIRE(log.size() == 1);
    CHECK(log[0].saturated);
}

TEST_CASE("stable scenario: pseudo-transient continuation agrees with the baseline") {
    const Scenario sc = scenario_stable();
    const Runs r = longterm(sc);
    REQUIRE(r.base.status == RunStatus::Completed);
    REQUIRE(r.ptc.status == RunStatus::Converged);
    CHECK(r.base.final_fnorm <= 1e-6);
    CHECK(max_diff(r.base.final_state, r.ptc.final_state) <= 1e-4);
    CHECK(r.ptc.counters.linear_solves < r.base.counters.linear_solves);
    CHECK(r.ptc.final_fnorm <= sc.plan.f_tol);
    CHECK(norm(eval_residual(r.sys.problem, r.ptc.final_state)) <= sc.plan.f_tol);
    REQUIRE(r.ptc.switch_time.has_value());
    CHECK(*r.ptc.switch_time == sc.plan.t0);
    // Same discrete outcome.
    CHECK(r.base.final_state.zd == r.ptc.final_state.zd);
}

TEST_CASE("delta returns to delta0 after every restart and restarts are consistent") {
    const Scenario sc = scenario_stable();
    const Runs r = longterm(sc);
    const auto& rec = r.ptc.ptc_trace.records;
    int restarts = 0;
    for (std::size_t k = 0; k < rec.size(); ++k) {
        if (!rec[k].restart) continue;
        ++restarts;
        if (k + 1 < rec.size()) {
            CHECK(rec[k + 1].delta == sc.plan.delta0);
            CHECK(rec[k + 1].entry_g_norm <= 1e-6);
        }
    }
    CHECK(restarts >= 1);
    REQUIRE_FALSE(rec.empty());
    CHECK(rec.front().entry_g_norm <= 1e-6);
    for (const auto& it : rec) CHECK(it.delta <= sc.plan.delta_max);
}

TEST_CASE("events are chronological") {
    for (const Scenario& sc : {scenario_stable(), scenario_unstable()}) {
        const Runs r = longterm(sc);
        for (const RunResult* res : {&r.base, &r.ptc})
            for (std::size_t k = 1; k < res->events.size(); ++k)
                CHECK(res->events[k - 1].t <= res->events[k].t);
    }
}

TEST_CASE("unstable scenario: both methods detect instability") {
    const Runs r = longterm(scenario_unstable());
    CHECK(r.base.status == RunStatus::NewtonNoConvergence);
    CHECK(r.base.failure_time.has_value());
    CHECK(r.ptc.status == RunStatus::IterationBoundReached);
}

TEST_CASE("QSS difficulty: fallback rescues the run") {
    const Scenario sc = scenario_qss_difficulty();
    const HybridSystem qss = build_problem(sc, ModelKind::Qss);
    const RunResult plain = run_baseline(qss, make_plan(sc, ModelKind::Qss, Method::Trapezoidal));
    REQUIRE(plain.status == RunStatus::NewtonNoConvergence);
    REQUIRE(plain.failure_time.has_value());
    CHECK(*plain.failure_time > sc.plan.t1);
    CHECK(*plain.failure_time < sc.plan.t_end);

    const RunResult rescued = run_qss_ptc(qss, make_plan(sc, ModelKind::Qss, Method::QssTrapWithPtcFallback));
    REQUIRE(rescued.status == RunStatus::Converged);
    REQUIRE(rescued.switch_time.has_value());
    CHECK(*rescued.switch_time == *plain.failure_time);

    const HybridSystem lt = build_problem(sc, ModelKind::LongTerm);
    const RunResult ref = run_baseline(lt, make_plan(sc, ModelKind::LongTerm, Method::Trapezoidal));
    REQUIRE(ref.status == RunStatus::Completed);
    CHECK(max_diff(ref.final_state, rescued.final_state) <= 1e-3);
}

TEST_CASE("fallback stays idle when QSS integration succeeds") {
    const Scenario sc = scenario_stable();
    const HybridSystem qss = build_problem(sc, ModelKind::Qss);
    const RunResult plain = run_baseline(qss, make_plan(sc, ModelKind::Qss, Method::Trapezoidal));
    const RunResult fb = run_qss_ptc(qss, make_plan(sc, ModelKind::Qss, Method::QssTrapWithPtcFallback));
    REQUIRE(plain.status == RunStatus::Completed);
    CHECK(fb.status == RunStatus::Completed);
    CHECK_FALSE(fb.switch_time.has_value());
    CHECK(fb.counters == plain.counters);
    REQUIRE(fb.trajectory.size() == plain.trajectory.size());
    CHECK(fb.final_state.packed() == plain.final_state.packed());
}

TEST_CASE("baseline ending before any event") {
    const Scenario sc = scenario_stable();
    const HybridSystem sys = build_problem(sc, ModelKind::LongTerm);
    RunPlan plan = make_plan(sc, ModelKind::LongTerm, Method::Trapezoidal);
    plan.t0 = plan.t1 = 0.0;
    plan.t_end = 0.5;
    const RunResult r = run_baseline(sys, plan);
    CHECK(r.status == RunStatus::Completed);
    CHECK(r.events.empty());
    CHECK(max_diff(r.final_state, sys.initial) <= 1e-10);
}

TEST_CASE("equilibrium start without events converges immediately") {
    Scenario sc = scenario_stable();
    sc.fault.line.clear();
    const HybridSystem sys = build_problem(sc, ModelKind::LongTerm);
    RunPlan plan = make_plan(sc, ModelKind::LongTerm, Method::Ptc);
    plan.t0 = 0.0;
    const RunResult r = run_longterm_ptc(sys, plan);
    CHECK(r.status == RunStatus::Converged);
    CHECK(r.counters.ptc_iterations == 0);
    CHECK(r.events.empty());
}

TEST_CASE("run plan validation") {
    RunPlan plan;
    CHECK_NOTHROW(plan.validate());
    plan.t0 = -1;
    CHECK_THROWS(plan.validate());
    plan.t0 = 5;
    plan.model_kind = ModelKind::Qss;
    plan.t1 = plan.t_end + 1;
    CHECK_THROWS(plan.validate());
    plan.model_kind = ModelKind::LongTerm;
    CHECK_NOTHROW(plan.validate());
}
