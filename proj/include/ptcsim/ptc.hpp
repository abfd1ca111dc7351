#pragma once

#include "ptcsim/dae.hpp"

#include <functional>
#include <string>
#include <vector>

namespace ptcsim {

struct PtcConfig {
    double delta0 = 0.1;
    double delta_max = 1e4;
    double f_tol = 1e-6;
    int max_iters = 500;
    int max_delta_shrink = 40;

    void validate() const;
};

struct PtcIterate {
    int n = 0;
    double t = 0.0;         // pseudo clock after the iteration
    double delta = 0.0;     // step used by this iteration
    double fnorm = 0.0;     // norm(F) after the iteration
    double step_norm = 0.0;
    bool restart = false;   // trapezoidal restart after a discrete jump
    // Consistency of the state the iteration started from.
    double entry_g_norm = 0.0;
    double entry_f_norm = 0.0;
};

struct PtcTrace {
    std::vector<PtcIterate> records;
    Counters counters;
};

enum class SolveStatus { Converged, IterationBoundReached, LinearSolveFailure, NonFiniteResidual };

const char* to_string(SolveStatus status);

struct SolveOutcome {
    SolveStatus status = SolveStatus::IterationBoundReached;
    SystemState final_state;
    PtcTrace trace;
    std::vector<SystemState> trajectory;  // every iterate after the start state
    std::string message;
};

double ser_update(double delta_prev, double fnorm_prev, double fnorm_cur, double delta_max);

struct PtcStep {
    SystemState state;
    double fnorm = 0.0;
    double step_norm = 0.0;
    Vector residual;
};

// One iteration of (D/delta + F'(p)) s = -F(p); t and z_d are left alone.
PtcStep ptc_step(const DaeProblem& prob, const SystemState& s, double delta, const Matrix& mass,
                 Counters* counters = nullptr);

// First Newton iterate on G(eta) = eta + delta D^{-1} F(eta) - p_n from eta = p_n.
// Requires the mass matrix to be invertible (pure ODE problems).
SystemState backward_euler_first_newton(const DaeProblem& prob, const SystemState& s, double delta);

// Called before every iteration. The hook may apply discrete jumps to the state
// and restore consistency; it then reports Restarted so delta goes back to delta0.
struct HookResult {
    enum class Action { Continue, Restarted, Stop };
    Action action = Action::Continue;
    SolveStatus status = SolveStatus::IterationBoundReached;  // for Stop
    std::string message;
};

using PtcEventHook = std::function<HookResult(SystemState& s, bool converged, Counters& counters)>;

SolveOutcome ptc_solve(const DaeProblem& prob, const SystemState& s0, const PtcConfig& cfg,
                       const PtcEventHook& hook = {});

}  // namespace ptcsim
