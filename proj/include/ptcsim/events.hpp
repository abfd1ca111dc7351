#pragma once

#include "ptcsim/dae.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ptcsim {

// A discrete device acting on one z_d entry. The guard returns a nonzero mode
// while the device wants to act (e.g. +1 tap up, -1 tap down); the mode has to
// persist for `delay` seconds before the transition fires.
struct EventRule {
    int device_id = 0;
    std::string device;
    int zd_index = 0;
    double delay = 0.0;
    double lower = 0.0;  // admissible range of the z_d entry
    double upper = 0.0;
    std::function<int(const SystemState&)> guard;
    std::function<double(const SystemState&, int mode)> transition;
};

struct Transition {
    int device_id = 0;
    std::string device;
    int zd_index = 0;
    double old_value = 0.0;
    double new_value = 0.0;
    double time = 0.0;  // when the timer expired
    double lower = 0.0;
    double upper = 0.0;
};

struct EventLogEntry {
    double t = 0.0;
    std::string device;
    double old_value = 0.0;
    double new_value = 0.0;
    bool saturated = false;
};

class EventMonitor {
public:
    explicit EventMonitor(std::vector<EventRule> rules);

    // Advances the timers to s.t and returns the transitions due, sorted by device id.
    std::vector<Transition> detect(const SystemState& s);
    // Earliest expiry among armed timers.
    std::optional<double> next_expiry() const;
    const std::vector<EventRule>& rules() const { return rules_; }

private:
    struct Timer {
        int mode = 0;
        double since = 0.0;
    };
    std::vector<EventRule> rules_;
    std::vector<Timer> timers_;
};

std::vector<Transition> detect_events(EventMonitor& monitor, const SystemState& s);

class InadmissibleTransition : public Error {
public:
    using Error::Error;
};

// Writes the new z_d values. A value outside the device range is not applied and
// is logged as saturated. `changed` tells whether any entry actually moved.
SystemState apply_events(const DaeProblem& prob, const SystemState& s,
                         const std::vector<Transition>& transitions,
                         std::vector<EventLogEntry>* log = nullptr, bool* changed = nullptr);

}  // namespace ptcsim
