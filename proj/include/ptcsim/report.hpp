#pragma once

#include "ptcsim/hybrid.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ptcsim {

struct RunReport {
    std::string scenario;
    ModelKind model_kind = ModelKind::LongTerm;
    Method method = Method::Ptc;
    RunStatus status = RunStatus::Completed;
    std::string message;
    double wall_seconds = 0.0;
    Counters counters;
    std::vector<EventLogEntry> events;  // chronological
    std::optional<double> failure_time;
    std::optional<double> switch_time;
    double final_time = 0.0;
    double final_fnorm = 0.0;
    double step_h = 0.0;  // baseline step, recorded so comparisons are self-describing
};

RunReport make_report(const std::string& scenario, const RunPlan& plan, const RunResult& result,
                      double wall_seconds);

// 0 converged/completed, 2 instability detected, 3 numerical failure.
int exit_code(RunStatus status);

// key: value lines.
std::string format_report(const RunReport& r);
// Side-by-side baseline vs pseudo-transient, with speedup = baseline solves / ptc solves.
std::string format_comparison(const RunReport& baseline, const RunReport& ptc);
double speedup(const RunReport& baseline, const RunReport& ptc);

// Header "t,<names>", one row per trajectory state, shortest round-trip numbers.
std::string trajectory_csv(const std::vector<std::string>& names,
                           const std::vector<SystemState>& trajectory);

}  // namespace ptcsim
