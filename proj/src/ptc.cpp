#include "ptcsim/ptc.hpp"

#include <algorithm>
#include <cmath>

namespace ptcsim {

void PtcConfig::validate() const {
    if (!(delta0 > 0) || !(delta0 <= delta_max))
        throw std::invalid_argument("ptc config: need 0 < delta0 <= delta_max");
    if (!(f_tol > 0)) throw std::invalid_argument("ptc config: need f_tol > 0");
    if (max_iters < 1) throw std::invalid_argument("ptc config: need max_iters >= 1");
    if (max_delta_shrink < 1) throw std::invalid_argument("ptc config: need max_delta_shrink >= 1");
}

const char* to_string(SolveStatus status) {
    switch (status) {
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::IterationBoundReached: return "IterationBoundReached";
    case SolveStatus::LinearSolveFailure: return "LinearSolveFailure";
    case SolveStatus::NonFiniteResidual: return "NonFiniteResidual";
    }
    return "?";
}

double ser_update(double delta_prev, double fnorm_prev, double fnorm_cur, double delta_max) {
    return std::min(delta_prev * fnorm_prev / fnorm_cur, delta_max);
}

namespace {

PtcStep step_from(const DaeProblem& prob, const SystemState& s, const Vector& F, double delta,
                  const Matrix& mass, Counters* counters) {
    Matrix a = mass / delta + eval_jacobian(prob, s, counters);
    if (counters) ++counters->linear_solves;
    Vector step = solve_linear(a, -F);
    PtcStep out{s, 0.0, norm(step), {}};
    out.state.unpack(s.packed() + step);
    out.residual = eval_residual(prob, out.state, counters);
    out.fnorm = norm(out.residual);
    return out;
}

}  // namespace

PtcStep ptc_step(const DaeProblem& prob, const SystemState& s, double delta, const Matrix& mass,
                 Counters* counters) {
    if (!(delta > 0)) throw std::invalid_argument("ptc_step: delta must be positive");
    Vector F = eval_residual(prob, s, counters);
    return step_from(prob, s, F, delta, mass, counters);
}

SystemState backward_euler_first_newton(const DaeProblem& prob, const SystemState& s,
                                        double delta) {
    const int n = prob.size();
    Matrix mass = assemble_mass(prob);
    LuFactorization dlu(mass);
    Matrix dinv_j(n, n);
    Matrix J = eval_jacobian(prob, s);
    for (int j = 0; j < n; ++j) dinv_j.col(j) = dlu.solve(J.col(j));
    Vector dinv_f = dlu.solve(eval_residual(prob, s));
    // G(p_n) = delta D^{-1} F(p_n), G'(p_n) = I + delta D^{-1} F'(p_n)
    Matrix gp = Matrix::Identity(n, n) + delta * dinv_j;
    Vector eta = s.packed() - solve_linear(gp, delta * dinv_f);
    SystemState out = s;
    out.unpack(eta);
    return out;
}

SolveOutcome ptc_solve(const DaeProblem& prob, const SystemState& s0, const PtcConfig& cfg,
                       const PtcEventHook& hook) {
    cfg.validate();
    SolveOutcome out;
    Counters& counters = out.trace.counters;
    const Matrix mass = assemble_mass(prob);
    SystemState s = s0;
    auto finish = [&](SolveStatus st, std::string msg) {
        out.status = st;
        out.final_state = s;
        out.message = std::move(msg);
        return out;
    };

    Vector F;
    try {
        F = eval_residual(prob, s, &counters);
    } catch (const NonFiniteResidual& e) {
        return finish(SolveStatus::NonFiniteResidual, e.what());
    }
    double fn = norm(F);
    double delta = cfg.delta0;
    int shrinks = 0;
    int n = 0;

    for (;;) {
        const bool converged = fn <= cfg.f_tol;
        if (hook) {
            const double g_entry = norm(F.tail(prob.n_y));
            const double f_entry = norm(F.segment(prob.n_zc, prob.n_x));
            const double t_before = s.t;
            HookResult r = hook(s, converged, counters);
            if (r.action == HookResult::Action::Stop) return finish(r.status, r.message);
            if (r.action == HookResult::Action::Restarted) {
                try {
                    F = eval_residual(prob, s, &counters);
                } catch (const NonFiniteResidual& e) {
                    return finish(SolveStatus::NonFiniteResidual, e.what());
                }
                fn = norm(F);
                PtcIterate rec;
                rec.n = n;
                rec.t = s.t;
                rec.delta = s.t - t_before;
                rec.fnorm = fn;
                rec.restart = true;
                rec.entry_g_norm = g_entry;
                rec.entry_f_norm = f_entry;
                out.trace.records.push_back(rec);
                out.trajectory.push_back(s);
                delta = cfg.delta0;
                shrinks = 0;
                if (++n >= cfg.max_iters)
                    return finish(SolveStatus::IterationBoundReached, "iteration bound reached");
                continue;
            }
        }
        if (converged) return finish(SolveStatus::Converged, "");
        if (n >= cfg.max_iters)
            return finish(SolveStatus::IterationBoundReached, "iteration bound reached");

        PtcIterate rec;
        rec.n = n;
        rec.delta = delta;
        rec.entry_g_norm = norm(F.tail(prob.n_y));
        rec.entry_f_norm = norm(F.segment(prob.n_zc, prob.n_x));
        PtcStep st;
        try {
            st = step_from(prob, s, F, delta, mass, &counters);
        } catch (const SingularMatrix& e) {
            return finish(SolveStatus::LinearSolveFailure, e.what());
        } catch (const NonFiniteResidual& e) {
            return finish(SolveStatus::NonFiniteResidual, e.what());
        }
        ++counters.ptc_iterations;
        s = st.state;
        s.t += delta;
        F = st.residual;
        rec.t = s.t;
        rec.fnorm = st.fnorm;
        rec.step_norm = st.step_norm;
        out.trace.records.push_back(rec);
        out.trajectory.push_back(s);
        ++n;

        if (st.fnorm > 0) {
            double next = ser_update(delta, fn, st.fnorm, cfg.delta_max);
            shrinks = next < delta ? shrinks + 1 : 0;
            delta = next;
        }
        fn = st.fnorm;
        if (shrinks >= cfg.max_delta_shrink)
            return finish(SolveStatus::IterationBoundReached,
                          "pseudo-time step kept shrinking (stagnation)");
    }
}

}  // namespace ptcsim
