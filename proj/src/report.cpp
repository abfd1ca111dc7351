#include "ptcsim/report.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <sstream>

namespace ptcsim {

namespace {

std::string fmt(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void counters_lines(std::ostringstream& out, const Counters& c, const std::string& prefix) {
    out << prefix << "steps: " << c.steps << '\n';
    out << prefix << "ptc_iterations: " << c.ptc_iterations << '\n';
    out << prefix << "linear_solves: " << c.linear_solves << '\n';
    out << prefix << "residual_evals: " << c.residual_evals << '\n';
    out << prefix << "jacobian_evals: " << c.jacobian_evals << '\n';
}

}  // namespace

RunReport make_report(const std::string& scenario, const RunPlan& plan, const RunResult& result,
                      double wall_seconds) {
    RunReport r;
    r.scenario = scenario;
    r.model_kind = plan.model_kind;
    r.method = plan.method;
    r.status = result.status;
    r.message = result.message;
    r.wall_seconds = wall_seconds;
    r.counters = result.counters;
    r.events = result.events;
    std::stable_sort(r.events.begin(), r.events.end(),
                     [](const EventLogEntry& a, const EventLogEntry& b) { return a.t < b.t; });
    r.failure_time = result.failure_time;
    r.switch_time = result.switch_time;
    r.final_time = result.final_state.t;
    r.final_fnorm = result.final_fnorm;
    r.step_h = plan.trap.h;
    return r;
}

int exit_code(RunStatus status) {
    switch (status) {
        case RunStatus::Converged:
        case RunStatus::Completed: return 0;
        case RunStatus::IterationBoundReached:
        case RunStatus::NewtonNoConvergence: return 2;
        case RunStatus::LinearSolveFailure:
        case RunStatus::NonFiniteResidual: return 3;
    }
    return 3;
}

std::string format_report(const RunReport& r) {
    std::ostringstream out;
    out << "scenario: " << r.scenario << '\n';
    out << "model: " << to_string(r.model_kind) << '\n';
    out << "method: " << to_string(r.method) << '\n';
    out << "status: " << to_string(r.status) << '\n';
    if (!r.message.empty()) out << "message: " << r.message << '\n';
    out << "exit_code: " << exit_code(r.status) << '\n';
    out << "trap_step_h: " << fmt(r.step_h) << '\n';
    out << "final_time: " << fmt(r.final_time) << '\n';
    out << "final_residual_norm: " << fmt(r.final_fnorm) << '\n';
    out << "failure_time: " << (r.failure_time ? fmt(*r.failure_time) : "none") << '\n';
    out << "switch_time: " << (r.switch_time ? fmt(*r.switch_time) : "none") << '\n';
    counters_lines(out, r.counters, "");
    out << "events: " << r.events.size() << '\n';
    for (const EventLogEntry& e : r.events) {
        out << "event: t=" << fmt(e.t) << ' ' << e.device << ' ' << fmt(e.old_value) << "->"
            << fmt(e.new_value) << (e.saturated ? " saturated" : "") << '\n';
    }
    out << "wall_seconds: " << fmt(r.wall_seconds) << '\n';
    return out.str();
}

double speedup(const RunReport& baseline, const RunReport& ptc) {
    if (ptc.counters.linear_solves == 0) return std::numeric_limits<double>::infinity();
    return static_cast<double>(baseline.counters.linear_solves) /
           static_cast<double>(ptc.counters.linear_solves);
}

std::string format_comparison(const RunReport& baseline, const RunReport& ptc) {
    std::ostringstream out;
    auto side = [&](const RunReport& r, const std::string& p) {
        out << p << "method: " << to_string(r.method) << '\n';
        out << p << "status: " << to_string(r.status) << '\n';
        out << p << "final_time: " << fmt(r.final_time) << '\n';
        out << p << "failure_time: " << (r.failure_time ? fmt(*r.failure_time) : "none") << '\n';
        out << p << "switch_time: " << (r.switch_time ? fmt(*r.switch_time) : "none") << '\n';
        counters_lines(out, r.counters, p);
        out << p << "events: " << r.events.size() << '\n';
        out << p << "wall_seconds: " << fmt(r.wall_seconds) << '\n';
    };
    out << "scenario: " << baseline.scenario << '\n';
    out << "model: " << to_string(baseline.model_kind) << '\n';
    out << "trap_step_h: " << fmt(baseline.step_h) << '\n';
    side(baseline, "baseline_");
    side(ptc, "ptc_");
    out << "speedup_linear_solves: " << fmt(speedup(baseline, ptc)) << '\n';
    return out.str();
}

std::string trajectory_csv(const std::vector<std::string>& names,
                           const std::vector<SystemState>& trajectory) {
    std::ostringstream out;
    out << 't';
    for (const std::string& n : names) out << ',' << n;
    out << '\n';
    for (const SystemState& s : trajectory) {
        out << fmt(s.t);
        const Vector p = s.packed();
        for (Eigen::Index i = 0; i < p.size(); ++i) out << ',' << fmt(p[i]);
        out << '\n';
    }
    return out.str();
}

}  // namespace ptcsim
