#include "ptcsim/hybrid.hpp"

#include <cmath>

#include <algorithm>
#include <limits>

namespace ptcsim {

const char* to_string(Method method) {
    switch (method) {
    case Method::Trapezoidal: return "trap";
    case Method::Ptc: return "ptc";
    case Method::QssTrapWithPtcFallback: return "qss-fallback";
    }
    return "?";
}

const char* to_string(RunStatus status) {
    switch (status) {
    case RunStatus::Converged: return "Converged";
    case RunStatus::Completed: return "Completed";
    case RunStatus::IterationBoundReached: return "IterationBoundReached";
    case RunStatus::NewtonNoConvergence: return "NewtonNoConvergence";
    case RunStatus::LinearSolveFailure: return "LinearSolveFailure";
    case RunStatus::NonFiniteResidual: return "NonFiniteResidual";
    }
    return "?";
}

void RunPlan::validate() const {
    if (!(t0 >= 0 && t1 >= 0 && t_end >= 0 && std::isfinite(t0 + t1 + t_end)))
        throw std::invalid_argument("run plan: need finite t0, t1, t_end >= 0");
    // The QSS switch only matters when the QSS model is used.
    if (model_kind == ModelKind::Qss && t1 > t_end)
        throw std::invalid_argument("run plan: need t1 <= t_end for the QSS model");
    ptc.validate();
    trap.validate();
}

namespace {

RunStatus from_trap(TrapStatus s) {
    switch (s) {
    case TrapStatus::Completed: return RunStatus::Completed;
    case TrapStatus::NewtonNoConvergence: return RunStatus::NewtonNoConvergence;
    case TrapStatus::LinearSolveFailure: return RunStatus::LinearSolveFailure;
    case TrapStatus::NonFiniteResidual: return RunStatus::NonFiniteResidual;
    }
    return RunStatus::Completed;
}

RunStatus from_ptc(SolveStatus s) {
    switch (s) {
    case SolveStatus::Converged: return RunStatus::Converged;
    case SolveStatus::IterationBoundReached: return RunStatus::IterationBoundReached;
    case SolveStatus::LinearSolveFailure: return RunStatus::LinearSolveFailure;
    case SolveStatus::NonFiniteResidual: return RunStatus::NonFiniteResidual;
    }
    return RunStatus::IterationBoundReached;
}

class Orchestrator {
public:
    Orchestrator(const HybridSystem& sys, const RunPlan& plan)
        : sys_(sys), plan_(plan), monitor_(sys.rules) {}

    RunResult& result() { return res_; }

    StepHook trap_hook(const DaeProblem& prob) {
        return [this, &prob](SystemState& s) {
            auto tr = monitor_.detect(s);
            if (!tr.empty()) s = apply_events(prob, s, tr, &res_.events);
        };
    }

    // Trapezoidal leg from s to t_end. Returns false when integration failed.
    bool integrate(const DaeProblem& prob, SystemState& s, double t_end) {
        TrapRun run = trap_integrate(prob, s, t_end, plan_.trap, trap_hook(prob));
        res_.counters += run.outcome.counters;
        append(run.trajectory);
        s = run.final_state;
        if (run.outcome.status == TrapStatus::Completed) return true;
        res_.status = from_trap(run.outcome.status);
        res_.message = run.outcome.message;
        res_.failure_time = run.outcome.failure_time;
        return false;
    }

    PtcEventHook ptc_hook(const DaeProblem& prob) {
        return [this, &prob](SystemState& s, bool converged, Counters& counters) {
            HookResult r;
            auto tr = monitor_.detect(s);
            if (tr.empty() && converged) {
                // at equilibrium nothing moves; jump the clock to the next timer
                if (auto te = monitor_.next_expiry(); te && *te > s.t) {
                    SystemState probe = s;
                    probe.t = *te;
                    tr = monitor_.detect(probe);
                }
            }
            if (tr.empty()) return r;
            bool changed = false;
            SystemState next = apply_events(prob, s, tr, &res_.events, &changed);
            if (!changed) return r;
            double t_event = tr.front().time;
            for (const auto& x : tr) t_event = std::min(t_event, x.time);
            next.t = t_event;
            const double d0 = plan_.ptc.delta0;
            try {
                s = restart(prob, next, d0, counters);
            } catch (const NewtonNoConvergence& e) {
                r.action = HookResult::Action::Stop;
                r.status = SolveStatus::IterationBoundReached;
                r.message = std::string("restart step failed: ") + e.what();
                return r;
            } catch (const SingularMatrix& e) {
                r.action = HookResult::Action::Stop;
                r.status = SolveStatus::LinearSolveFailure;
                r.message = std::string("restart step failed: ") + e.what();
                return r;
            } catch (const NonFiniteResidual& e) {
                r.action = HookResult::Action::Stop;
                r.status = SolveStatus::NonFiniteResidual;
                r.message = std::string("restart step failed: ") + e.what();
                return r;
            }
            r.action = HookResult::Action::Restarted;
            return r;
        };
    }

    void pseudo_transient(const DaeProblem& prob, const SystemState& s) {
        SolveOutcome out = ptc_solve(prob, s, plan_.ptc, ptc_hook(prob));
        res_.counters += out.trace.counters;
        res_.ptc_trace = out.trace;
        append(out.trajectory, false);
        res_.status = from_ptc(out.status);
        res_.message = out.message;
        res_.final_state = out.final_state;
        has_final_ = true;
    }

    void finish(const DaeProblem& prob) {
        if (res_.trajectory.empty()) res_.trajectory.push_back(sys_.initial);
        if (!has_final_) res_.final_state = res_.trajectory.back();
        try {
            res_.final_fnorm = norm(eval_residual(prob, res_.final_state));
        } catch (const NonFiniteResidual&) {
            res_.final_fnorm = std::numeric_limits<double>::infinity();
        }
        std::stable_sort(res_.events.begin(), res_.events.end(),
                         [](const EventLogEntry& a, const EventLogEntry& b) { return a.t < b.t; });
    }

private:
    SystemState restart(const DaeProblem& prob, const SystemState& s, double d0, Counters& c) {
        try {
            return trap_step(prob, s, d0, plan_.trap, &c);
        } catch (const NewtonNoConvergence&) {
        } catch (const SingularMatrix&) {
        }
        return trap_step(prob, s, d0 / 10.0, plan_.trap, &c);
    }

    void append(const std::vector<SystemState>& states, bool skip_duplicate_start = true) {
        std::size_t first = 0;
        if (skip_duplicate_start && !res_.trajectory.empty() && !states.empty()) first = 1;
        res_.trajectory.insert(res_.trajectory.end(), states.begin() + first, states.end());
    }

    const HybridSystem& sys_;
    const RunPlan& plan_;
    EventMonitor monitor_;
    RunResult res_;
    bool has_final_ = false;
};

}  // namespace

RunResult run_longterm_ptc(const HybridSystem& sys, const RunPlan& plan) {
    plan.validate();
    const DaeProblem prob = sys.problem.with_kind(ModelKind::LongTerm);
    Orchestrator orc(sys, plan);
    SystemState s = sys.initial;
    if (orc.integrate(prob, s, plan.t0)) {
        orc.result().switch_time = s.t;
        orc.pseudo_transient(prob, s);
    }
    orc.finish(prob);
    return orc.result();
}

RunResult run_qss_ptc(const HybridSystem& sys, const RunPlan& plan) {
    plan.validate();
    const DaeProblem lt = sys.problem.with_kind(ModelKind::LongTerm);
    const DaeProblem qss = sys.problem.with_kind(ModelKind::Qss);
    Orchestrator orc(sys, plan);
    SystemState s = sys.initial;
    if (!orc.integrate(lt, s, plan.t1)) {
        orc.finish(lt);
        return orc.result();
    }
    if (orc.integrate(qss, s, plan.t_end)) {
        orc.result().status = RunStatus::Completed;
        orc.finish(qss);
        return orc.result();
    }
    RunResult& res = orc.result();
    res.switch_time = res.failure_time;
    res.failure_time.reset();
    orc.pseudo_transient(qss, s);
    orc.finish(qss);
    return orc.result();
}

RunResult run_baseline(const HybridSystem& sys, const RunPlan& plan) {
    plan.validate();
    const DaeProblem lt = sys.problem.with_kind(ModelKind::LongTerm);
    Orchestrator orc(sys, plan);
    SystemState s = sys.initial;
    if (plan.model_kind == ModelKind::LongTerm) {
        if (orc.integrate(lt, s, plan.t_end)) orc.result().status = RunStatus::Completed;
        orc.finish(lt);
        return orc.result();
    }
    const DaeProblem qss = sys.problem.with_kind(ModelKind::Qss);
    if (orc.integrate(lt, s, plan.t1) && orc.integrate(qss, s, plan.t_end))
        orc.result().status = RunStatus::Completed;
    orc.finish(qss);
    return orc.result();
}

RunResult run_plan(const HybridSystem& sys, const RunPlan& plan) {
    switch (plan.method) {
    case Method::Trapezoidal: return run_baseline(sys, plan);
    case Method::Ptc:
        if (plan.model_kind == ModelKind::Qss) return run_qss_ptc(sys, plan);
        return run_longterm_ptc(sys, plan);
    case Method::QssTrapWithPtcFallback: return run_qss_ptc(sys, plan);
    }
    return run_baseline(sys, plan);
}

}  // namespace ptcsim
