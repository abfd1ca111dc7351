#pragma once

#include "ptcsim/scenario.hpp"

#include <vector>

namespace ptcsim {

// Bus admittance matrix Y = G + jB.
struct Admittance {
    Matrix g;
    Matrix b;
};

// Series branch with an optional off-nominal ratio on the `from` side:
// Y_ff += ratio^2 y, Y_tt += y, Y_ft = Y_tf -= ratio y. Charging b is split
// between the two ends (plain lines only).
struct Branch {
    int from = 0;
    int to = 0;
    double r = 0.0;
    double x = 0.1;
    double b = 0.0;
    double ratio = 1.0;
};

Admittance build_admittance(int nbus, const std::vector<Branch>& branches,
                            const std::vector<double>& g_shunt, const std::vector<double>& b_shunt);

struct Injections {
    Vector p;
    Vector q;
};

// S_i = V_i e^{j theta_i} conj(sum_k Y_ik V_k e^{j theta_k}).
Injections injections(const Admittance& y, const Vector& theta, const Vector& v);

struct InjectionJacobian {
    Matrix dp_dtheta;
    Matrix dp_dv;
    Matrix dq_dtheta;
    Matrix dq_dv;
};

InjectionJacobian injection_jacobian(const Admittance& y, const Vector& theta, const Vector& v);

class PowerFlowNoConvergence : public Error {
public:
    using Error::Error;
};

struct PowerFlowResult {
    Vector theta;
    Vector v;
    int iterations = 0;
};

// Newton power flow. Slack buses fix (V, theta), PV buses fix (P, V), PQ buses fix (P, Q).
PowerFlowResult solve_power_flow(const Admittance& y, const std::vector<BusKind>& kinds,
                                 const Vector& v_set, const Vector& theta_set, const Vector& p_spec,
                                 const Vector& q_spec, double tol = 1e-12, int max_iters = 50);

}  // namespace ptcsim
