#pragma once

#include "ptcsim/dae.hpp"

#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace ptcsim {

struct TrapConfig {
    double h = 0.05;
    double newton_tol = 1e-8;
    int newton_max_iters = 20;

    void validate() const;
};

class NewtonNoConvergence : public Error {
public:
    using Error::Error;
};

// H(cur) for a step of length h from prev. Rows carrying d/dt use the
// trapezoidal rule; the remaining rows ({g} or {f, g} for QSS) are enforced as is.
Vector trap_residual(const DaeProblem& prob, const SystemState& prev, const SystemState& cur,
                     double h);
// dH/dp at cur.
Matrix trap_matrix(const DaeProblem& prob, const SystemState& cur, double h,
                   Counters* counters = nullptr);

SystemState trap_step(const DaeProblem& prob, const SystemState& s, double h,
                      const TrapConfig& cfg = {}, Counters* counters = nullptr);

enum class TrapStatus { Completed, NewtonNoConvergence, LinearSolveFailure, NonFiniteResidual };

const char* to_string(TrapStatus status);

struct TrapOutcome {
    TrapStatus status = TrapStatus::Completed;
    double failure_time = std::numeric_limits<double>::quiet_NaN();
    std::string message;
    Counters counters;
};

struct TrapRun {
    std::vector<SystemState> trajectory;  // starts with s0, one entry per accepted step
    TrapOutcome outcome;
    // Where the next step would start: the last accepted state with any
    // discrete jumps the hook applied before the failed step.
    SystemState final_state;
};

// Called at each step boundary before the step is taken; may change z_d.
using StepHook = std::function<void(SystemState&)>;

TrapRun trap_integrate(const DaeProblem& prob, const SystemState& s0, double t_end,
                       const TrapConfig& cfg, const StepHook& hook = {});

}  // namespace ptcsim
