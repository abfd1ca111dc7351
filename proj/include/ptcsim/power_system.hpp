#pragma once

#include "ptcsim/hybrid.hpp"
#include "ptcsim/network.hpp"
#include "ptcsim/scenario.hpp"

#include <memory>
#include <string>
#include <vector>

namespace ptcsim {

// Variable layout:
//   z_c = [governor P_m..., ERL (z_p, z_q)..., OXL timers...]
//   x   = per generator [delta, omega, e'_q, e'_d, (E_fd if it has an exciter)]
//   y   = [theta_1..theta_B, V_1..V_B]
//   z_d = [LTC ratios..., OXL flags..., line statuses...]
class PowerSystemModel {
public:
    // Validates the scenario and initializes from the pre-fault power flow.
    explicit PowerSystemModel(const Scenario& sc);

    void eval(const SystemState& s, Residuals& r) const;
    // dF/d[z_c, x, y] of F = -[h_c; f; g].
    Matrix jacobian(const SystemState& s) const;

    const SystemState& initial_state() const { return initial_; }
    std::vector<EventRule> event_rules() const;

    int n_zc() const { return n_zc_; }
    int n_x() const { return n_x_; }
    int n_y() const { return 2 * nbus_; }
    double epsilon() const { return epsilon_; }
    const std::vector<std::string>& names() const { return names_; }
    const std::vector<std::string>& zd_names() const { return zd_names_; }

    int bus_index(const std::string& name) const;
    int line_status_index(const std::string& line) const;  // into z_d
    // Position of a bus voltage magnitude inside y.
    int v_index(int bus) const { return nbus_ + bus; }
    int theta_index(int bus) const { return bus; }
    int slack_bus() const { return slack_; }

    // Network admittance for a given set of discrete values.
    Admittance admittance(const Vector& zd) const;

private:
    struct GenData {
        Generator p;
        int bus = 0;
        int ix = 0;        // delta position in x
        int efd = -1;      // E_fd position in x, -1 without exciter
        int gov = -1;      // P_m position in z_c
        int oxl = -1;      // index into oxls_
        double ka = 0, ta = 1, v_ref = 0;
        double r = 1, tg = 1, p_ref = 0;
        double pm_fixed = 0, efd_fixed = 0;
    };
    struct OxlData {
        Oxl p;
        int gen = 0;
        int zc = 0;
        int flag = 0;  // in z_d
    };
    struct LoadData {
        Load p;
        int bus = 0;
        int zc = -1;   // z_p position, z_q follows
        double v0 = 1.0;
    };
    struct LtcData {
        Ltc p;
        int from = 0, to = 0;
        int zd = 0;
    };
    struct LineData {
        Line p;
        int from = 0, to = 0;
        int zd = 0;
    };

    void initialize();

    Scenario sc_;
    int nbus_ = 0;
    int slack_ = 0;
    int n_zc_ = 0, n_x_ = 0;
    double omega_b_ = 0;
    double epsilon_ = 1;
    std::vector<GenData> gens_;
    std::vector<OxlData> oxls_;
    std::vector<LoadData> loads_;
    std::vector<LtcData> ltcs_;
    std::vector<LineData> lines_;
    std::vector<std::string> names_, zd_names_;
    SystemState initial_;
};

// Tap changer acting on z_d(zd_index) and watching y(v_index): below the band
// the tap moves up one step (raising the secondary voltage), above it moves down.
EventRule ltc_rule(const Ltc& ltc, int device_id, int zd_index, int v_index);

// Problem, initial state, discrete devices (tap changers, limiters, the fault).
HybridSystem build_problem(const Scenario& sc, ModelKind kind);

RunPlan make_plan(const Scenario& sc, ModelKind kind, Method method);

}  // namespace ptcsim
