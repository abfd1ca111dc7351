#pragma once

#include "ptcsim/events.hpp"
#include "ptcsim/ptc.hpp"
#include "ptcsim/trapezoidal.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ptcsim {

enum class Method { Trapezoidal, Ptc, QssTrapWithPtcFallback };

const char* to_string(Method method);

struct RunPlan {
    ModelKind model_kind = ModelKind::LongTerm;
    Method method = Method::Ptc;
    double t0 = 5.0;
    double t1 = 30.0;
    double t_end = 300.0;
    PtcConfig ptc;
    TrapConfig trap;

    void validate() const;
};

// A DAE together with its initial state and discrete devices.
struct HybridSystem {
    DaeProblem problem;
    SystemState initial;
    std::vector<EventRule> rules;
    std::vector<std::string> names;  // continuous variables, [z_c | x | y] order
};

enum class RunStatus {
    Converged,
    Completed,
    IterationBoundReached,
    NewtonNoConvergence,
    LinearSolveFailure,
    NonFiniteResidual,
};

const char* to_string(RunStatus status);

struct RunResult {
    RunStatus status = RunStatus::Completed;
    std::string message;
    std::vector<SystemState> trajectory;
    Counters counters;
    std::vector<EventLogEntry> events;
    std::optional<double> failure_time;
    std::optional<double> switch_time;  // trapezoidal -> pseudo-transient handoff
    PtcTrace ptc_trace;
    SystemState final_state;
    double final_fnorm = 0.0;
};

// Trapezoidal run-up to t0, then pseudo-transient continuation of the long-term model.
RunResult run_longterm_ptc(const HybridSystem& sys, const RunPlan& plan);
// Long-term model to t1, QSS model by trapezoidal, pseudo-transient fallback on failure.
RunResult run_qss_ptc(const HybridSystem& sys, const RunPlan& plan);
// Plain trapezoidal integration to t_end (QSS runs switch model at t1).
RunResult run_baseline(const HybridSystem& sys, const RunPlan& plan);
// Dispatches on plan.method.
RunResult run_plan(const HybridSystem& sys, const RunPlan& plan);

}  // namespace ptcsim
