#include "ptcsim/events.hpp"

#include <algorithm>

namespace ptcsim {

namespace {
constexpr double kTimeSlack = 1e-9;
constexpr double kRangeSlack = 1e-12;
}  // namespace

EventMonitor::EventMonitor(std::vector<EventRule> rules)
    : rules_(std::move(rules)), timers_(rules_.size()) {
    std::stable_sort(rules_.begin(), rules_.end(),
                     [](const EventRule& a, const EventRule& b) { return a.device_id < b.device_id; });
}

std::vector<Transition> EventMonitor::detect(const SystemState& s) {
    std::vector<Transition> out;
    for (std::size_t i = 0; i < rules_.size(); ++i) {
        const EventRule& r = rules_[i];
        Timer& tm = timers_[i];
        const int mode = r.guard(s);
        if (mode == 0) {
            tm.mode = 0;
            continue;
        }
        if (tm.mode != mode) {
            tm.mode = mode;
            tm.since = s.t;
        }
        if (s.t - tm.since < r.delay - kTimeSlack) continue;
        Transition tr;
        tr.device_id = r.device_id;
        tr.device = r.device;
        tr.zd_index = r.zd_index;
        tr.old_value = s.zd(r.zd_index);
        tr.new_value = r.transition(s, mode);
        tr.time = tm.since + r.delay;
        tr.lower = r.lower;
        tr.upper = r.upper;
        out.push_back(tr);
        // keep acting every `delay` seconds while the mode persists
        tm.since = tr.time;
    }
    return out;
}

std::optional<double> EventMonitor::next_expiry() const {
    std::optional<double> best;
    for (std::size_t i = 0; i < rules_.size(); ++i) {
        if (timers_[i].mode == 0) continue;
        double t = timers_[i].since + rules_[i].delay;
        if (!best || t < *best) best = t;
    }
    return best;
}

std::vector<Transition> detect_events(EventMonitor& monitor, const SystemState& s) {
    return monitor.detect(s);
}

SystemState apply_events(const DaeProblem& prob, const SystemState& s,
                         const std::vector<Transition>& transitions,
                         std::vector<EventLogEntry>* log, bool* changed) {
    if (s.zc.size() != prob.n_zc || s.x.size() != prob.n_x || s.y.size() != prob.n_y)
        throw std::invalid_argument("apply_events: state does not match the problem");
    SystemState out = s;
    bool moved = false;
    for (const Transition& tr : transitions) {
        if (tr.zd_index < 0 || tr.zd_index >= out.zd.size())
            throw InadmissibleTransition("transition targets a missing discrete variable");
        EventLogEntry e{tr.time, tr.device, out.zd(tr.zd_index), tr.new_value, false};
        if (tr.new_value < tr.lower - kRangeSlack || tr.new_value > tr.upper + kRangeSlack) {
            e.new_value = e.old_value;
            e.saturated = true;
        } else {
            out.zd(tr.zd_index) = tr.new_value;
            if (tr.new_value != e.old_value) moved = true;
        }
        if (log) log->push_back(e);
    }
    if (changed) *changed = moved;
    return out;
}

}  // namespace ptcsim
