#include "ptcsim/scenario.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

namespace ptcsim {

const char* to_string(Archetype a) {
    switch (a) {
    case Archetype::StableFast: return "stable";
    case Archetype::QssDifficulty: return "qss_difficulty";
    case Archetype::Unstable: return "unstable";
    }
    return "?";
}

namespace {

void require(bool ok, const std::string& what, const std::string& where) {
    if (!ok) throw ValidationError(where + ": violates \"" + what + "\"");
}

bool finite_all(std::initializer_list<double> xs) {
    for (double x : xs)
        if (!std::isfinite(x)) return false;
    return true;
}

template <class T>
void unique_names(const std::vector<T>& items, const std::string& kind) {
    std::set<std::string> seen;
    for (const T& it : items) {
        require(!it.name.empty(), "names are non-empty", kind);
        require(seen.insert(it.name).second, "names are unique", kind + " " + it.name);
    }
}

}  // namespace

void validate(const Scenario& sc) {
    const Network& net = sc.network;
    const ComponentSet& cs = sc.components;
    require(!net.buses.empty(), "at least one bus", "network");
    unique_names(net.buses, "bus");
    unique_names(net.lines, "line");
    unique_names(cs.generators, "generator");
    unique_names(cs.exciters, "exciter");
    unique_names(cs.governors, "governor");
    unique_names(cs.loads, "load");
    unique_names(cs.ltcs, "ltc");
    unique_names(cs.oxls, "oxl");
    require(net.base_mva > 0, "base power > 0", "network");
    require(net.f_base > 0, "base frequency > 0", "network");

    std::set<std::string> buses;
    int slack = 0;
    for (const Bus& b : net.buses) {
        buses.insert(b.name);
        if (b.kind == BusKind::Slack) ++slack;
        require(finite_all({b.v_set, b.theta_set, b.g_shunt, b.b_shunt}), "values finite",
                "bus " + b.name);
        if (b.kind != BusKind::PQ) require(b.v_set > 0, "voltage setpoint > 0", "bus " + b.name);
    }
    require(slack == 1, "exactly one slack bus", "network");

    auto known_bus = [&](const std::string& n, const std::string& where) {
        require(buses.count(n) == 1, "bus exists", where + " (bus " + n + ")");
    };
    // connectivity over in-service lines and transformers
    std::map<std::string, std::string> parent;
    std::function<std::string(const std::string&)> root = [&](const std::string& a) {
        auto it = parent.find(a);
        if (it == parent.end() || it->second == a) return a;
        return it->second = root(it->second);
    };
    auto join = [&](const std::string& a, const std::string& b) { parent[root(a)] = root(b); };

    for (const Line& l : net.lines) {
        const std::string w = "line " + l.name;
        known_bus(l.from, w);
        known_bus(l.to, w);
        require(l.from != l.to, "line ends differ", w);
        require(finite_all({l.r, l.x, l.b}), "admittances finite", w);
        require(l.r != 0.0 || l.x != 0.0, "admittances finite", w);
        if (l.in_service) join(l.from, l.to);
    }
    for (const Ltc& t : cs.ltcs) {
        const std::string w = "ltc " + t.name;
        known_bus(t.from, w);
        known_bus(t.to, w);
        require(t.from != t.to, "transformer ends differ", w);
        require(std::isfinite(t.x) && t.x != 0.0, "admittances finite", w);
        require(t.step > 0, "tap step > 0", w);
        require(t.deadband > 0, "deadband > 0", w);
        require(t.delay >= 0, "delay >= 0", w);
        require(t.ratio_min > 0 && t.ratio_min <= t.ratio && t.ratio <= t.ratio_max,
                "0 < ratio_min <= ratio <= ratio_max", w);
        join(t.from, t.to);
    }
    const std::string r0 = root(net.buses.front().name);
    for (const Bus& b : net.buses)
        require(root(b.name) == r0, "connected graph on in-service lines", "bus " + b.name);

    std::set<std::string> gens, gen_buses, excited;
    for (const Generator& g : cs.generators) {
        const std::string w = "generator " + g.name;
        known_bus(g.bus, w);
        for (const Bus& b : net.buses)
            if (b.name == g.bus) require(b.kind == BusKind::PV, "generators sit on PV buses", w);
        require(gen_buses.insert(g.bus).second, "one generator per bus", w);
        require(finite_all({g.p_set, g.d}), "values finite", w);
        require(g.h > 0, "inertia > 0", w);
        require(g.xd > 0 && g.xq > 0 && g.xdp > 0 && g.xqp > 0, "reactances > 0", w);
        require(g.td0p > 0 && g.tq0p > 0, "time constants > 0", w);
        gens.insert(g.name);
    }
    for (const Bus& b : net.buses)
        if (b.kind == BusKind::PV)
            require(gen_buses.count(b.name) == 1, "every PV bus has a generator", "bus " + b.name);

    std::set<std::string> seen;
    for (const Exciter& e : cs.exciters) {
        const std::string w = "exciter " + e.name;
        require(gens.count(e.gen) == 1, "generator exists", w);
        require(seen.insert(e.gen).second, "one exciter per generator", w);
        require(e.ka > 0, "gain > 0", w);
        require(e.ta > 0, "time constants > 0", w);
        excited.insert(e.gen);
    }
    seen.clear();
    for (const Governor& g : cs.governors) {
        const std::string w = "governor " + g.name;
        require(gens.count(g.gen) == 1, "generator exists", w);
        require(seen.insert(g.gen).second, "one governor per generator", w);
        require(g.r > 0, "droop > 0", w);
        require(g.tg > 0, "time constants > 0", w);
    }
    for (const Load& l : cs.loads) {
        const std::string w = "load " + l.name;
        known_bus(l.bus, w);
        require(finite_all({l.p0, l.q0, l.alpha_s, l.alpha_t, l.beta_s, l.beta_t}),
                "values finite", w);
        if (l.kind == LoadKind::ExponentialRecovery)
            require(l.tp > 0 && l.tq > 0, "time constants > 0", w);
    }
    seen.clear();
    for (const Oxl& o : cs.oxls) {
        const std::string w = "oxl " + o.name;
        require(excited.count(o.gen) == 1, "limited generator has an exciter", w);
        require(seen.insert(o.gen).second, "one limiter per generator", w);
        require(o.t_reset > 0, "time constants > 0", w);
        require(o.sharpness > 0, "sharpness > 0", w);
        require(o.pickup > 0, "pickup > 0", w);
        require(finite_all({o.i_lim, o.efd_lim}), "values finite", w);
    }

    if (!sc.fault.line.empty()) {
        bool found = false;
        for (const Line& l : net.lines) found = found || l.name == sc.fault.line;
        require(found, "fault line exists", "fault");
        require(sc.fault.t_fault < sc.plan.t0, "t_fault < t0", "fault");
        require(sc.fault.t_fault >= 0, "t_fault >= 0", "fault");
    }

    const ScenarioPlan& p = sc.plan;
    require(0 <= p.t0 && p.t0 <= p.t1 && p.t1 <= p.t_end, "0 <= t0 <= t1 <= t_end", "plan");
    require(p.h > 0, "h > 0", "plan");
    require(p.newton_tol > 0, "newton_tol > 0", "plan");
    require(p.newton_max_iters >= 1, "newton_max_iters >= 1", "plan");
    require(p.delta0 > 0 && p.delta0 <= p.delta_max, "0 < delta0 <= delta_max", "plan");
    require(p.f_tol > 0, "f_tol > 0", "plan");
    require(p.max_iters >= 1, "max_iters >= 1", "plan");
    require(p.max_delta_shrink >= 1, "max_delta_shrink >= 1", "plan");
}

namespace {

// Four buses: infinite bus B1 feeds transmission bus B3 over a double line,
// generator G1 at B2 is tied to B3, and a tap changer supplies load bus B4.
// Tripping one of the B1-B3 circuits at t = 1 s weakens the supply to the load.
Scenario four_bus(double load_p) {
    Scenario sc;
    Network& n = sc.network;
    n.buses = {
        {"B1", BusKind::Slack, 1.0, 0.0, 0.0, 0.0},
        {"B2", BusKind::PV, 1.02, 0.0, 0.0, 0.0},
        {"B3", BusKind::PQ, 1.0, 0.0, 0.0, 0.0},
        {"B4", BusKind::PQ, 1.0, 0.0, 0.0, 0.0},
    };
    n.lines = {
        {"L1", "B1", "B3", 0.0, 0.8, 0.0, true},
        {"L2", "B1", "B3", 0.0, 0.8, 0.0, true},
        {"L3", "B2", "B3", 0.0, 0.1, 0.0, true},
    };
    ComponentSet& c = sc.components;
    c.generators = {{"G1", "B2", 0.6, 4.0, 2.0, 1.8, 1.7, 0.3, 0.55, 6.0, 0.4}};
    c.exciters = {{"AVR1", "G1", 20.0, 0.2}};
    c.governors = {{"GOV1", "G1", 0.05, 5.0}};
    c.loads = {{"LD1", "B4", LoadKind::ExponentialRecovery, load_p, 0.3, 5.0, 5.0, 0.0, 2.0, 0.0, 2.0}};
    c.ltcs = {{"T1", "B3", "B4", 0.1, 1.05, 0.8, 1.2, 0.0125, 1.0, 0.02, 30.0}};
    sc.fault = {"L1", 1.0};
    return sc;
}

}  // namespace

Scenario scenario_stable() {
    Scenario sc = four_bus(1.2);
    sc.label = "stable";
    sc.archetype = Archetype::StableFast;
    return sc;
}

// No voltage regulator, so in the QSS model the machine is E_fd behind x_d. The
// load looks like constant power at first and recovers to constant impedance;
// the taps keep raising its voltage and with it the steady demand. The resulting
// equilibrium sits just past the fold of the QSS manifold while the long-term
// model is stable there.
Scenario scenario_qss_difficulty() {
    Scenario sc = four_bus(1.1);
    sc.label = "qss_difficulty";
    sc.archetype = Archetype::QssDifficulty;
    sc.components.exciters.clear();
    Load& ld = sc.components.loads.front();
    ld.alpha_s = 2.0;
    ld.alpha_t = 0.0;
    ld.beta_s = 2.0;
    ld.beta_t = 0.0;
    sc.components.ltcs.front().ratio_max = 1.15;
    sc.plan.t_end = 400.0;
    return sc;
}

Scenario scenario_unstable() {
    Scenario sc = four_bus(1.2);
    sc.label = "unstable";
    sc.archetype = Archetype::Unstable;
    sc.components.oxls = {{"OXL1", "G1", 2.3, 2.2, 20.0, 60.0, 100.0}};
    return sc;
}

Scenario bundled_scenario(const std::string& label) {
    if (label == "stable") return scenario_stable();
    if (label == "qss_difficulty") return scenario_qss_difficulty();
    if (label == "unstable") return scenario_unstable();
    throw std::invalid_argument("unknown bundled scenario " + label);
}

}  // namespace ptcsim
