#pragma once

#include "ptcsim/numeric.hpp"

#include <string>
#include <vector>

namespace ptcsim {

enum class BusKind { Slack, PV, PQ };

struct Bus {
    std::string name;
    BusKind kind = BusKind::PQ;
    double v_set = 1.0;      // slack and PV buses
    double theta_set = 0.0;  // slack bus
    double g_shunt = 0.0;
    double b_shunt = 0.0;
    bool operator==(const Bus&) const = default;
};

struct Line {
    std::string name;
    std::string from;
    std::string to;
    double r = 0.0;
    double x = 0.1;
    double b = 0.0;  // total charging susceptance
    bool in_service = true;
    bool operator==(const Line&) const = default;
};

struct Network {
    std::vector<Bus> buses;
    std::vector<Line> lines;
    double base_mva = 100.0;
    double f_base = 60.0;
    bool operator==(const Network&) const = default;
};

// Two-axis machine.
struct Generator {
    std::string name;
    std::string bus;
    double p_set = 0.0;
    double h = 4.0;
    double d = 2.0;
    double xd = 1.8;
    double xq = 1.7;
    double xdp = 0.3;
    double xqp = 0.55;
    double td0p = 6.0;
    double tq0p = 0.4;
    bool operator==(const Generator&) const = default;
};

// First-order AVR: T_A dE_fd/dt = K_A (V_ref - V) - E_fd.
struct Exciter {
    std::string name;
    std::string gen;
    double ka = 20.0;
    double ta = 0.2;
    bool operator==(const Exciter&) const = default;
};

// T_g dP_m/dt = P_ref - P_m - (omega - 1) / R.
struct Governor {
    std::string name;
    std::string gen;
    double r = 0.05;
    double tg = 5.0;
    bool operator==(const Governor&) const = default;
};

enum class LoadKind { ExponentialRecovery, Static };

// Exponential recovery load: dz_p/dt = -z_p/T_p + P0 (V/V0)^a_s - P0 (V/V0)^a_t,
// consumed P = z_p/T_p + P0 (V/V0)^a_t, same for Q with b_s, b_t.
// A static load consumes P0 (V/V0)^a_t and Q0 (V/V0)^b_t.
struct Load {
    std::string name;
    std::string bus;
    LoadKind kind = LoadKind::ExponentialRecovery;
    double p0 = 0.0;
    double q0 = 0.0;
    double tp = 30.0;
    double tq = 30.0;
    double alpha_s = 0.0;
    double alpha_t = 2.0;
    double beta_s = 0.0;
    double beta_t = 2.0;
    bool operator==(const Load&) const = default;
};

// Tap changer between `from` (primary) and `to` (controlled secondary).
struct Ltc {
    std::string name;
    std::string from;
    std::string to;
    double x = 0.1;
    double ratio = 1.0;
    double ratio_min = 0.8;
    double ratio_max = 1.2;
    double step = 0.0125;
    double v_ref = 1.0;
    double deadband = 0.02;
    double delay = 30.0;
    bool operator==(const Ltc&) const = default;
};

// Over-excitation limiter. The timer state integrates the overload indicator
// sigmoid(k (I_fd - I_lim)) and leaks with t_reset; once it reaches `pickup`
// the exciter is switched to hold E_fd at efd_lim.
struct Oxl {
    std::string name;
    std::string gen;
    double i_lim = 2.0;
    double efd_lim = 1.9;
    double pickup = 20.0;
    double t_reset = 60.0;
    double sharpness = 100.0;
    bool operator==(const Oxl&) const = default;
};

struct ComponentSet {
    std::vector<Generator> generators;
    std::vector<Exciter> exciters;
    std::vector<Governor> governors;
    std::vector<Load> loads;
    std::vector<Ltc> ltcs;
    std::vector<Oxl> oxls;
    bool operator==(const ComponentSet&) const = default;
};

struct FaultSpec {
    std::string line;
    double t_fault = 1.0;
    bool operator==(const FaultSpec&) const = default;
};

// Run settings stored with a scenario; the CLI can override each of them.
struct ScenarioPlan {
    double t0 = 5.0;
    double t1 = 30.0;
    double t_end = 300.0;
    double h = 0.05;
    double newton_tol = 1e-8;
    int newton_max_iters = 20;
    double delta0 = 0.1;
    double delta_max = 1e4;
    double f_tol = 1e-6;
    int max_iters = 500;
    int max_delta_shrink = 40;
    bool operator==(const ScenarioPlan&) const = default;
};

enum class Archetype { StableFast, QssDifficulty, Unstable };

const char* to_string(Archetype a);

struct Scenario {
    std::string label;
    Archetype archetype = Archetype::StableFast;
    Network network;
    ComponentSet components;
    FaultSpec fault;
    ScenarioPlan plan;
    bool operator==(const Scenario&) const = default;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

// Throws ValidationError naming the violated invariant.
void validate(const Scenario& sc);

Scenario scenario_stable();
Scenario scenario_qss_difficulty();
Scenario scenario_unstable();
// Looks up a bundled scenario by label; throws std::invalid_argument.
Scenario bundled_scenario(const std::string& label);

}  // namespace ptcsim
