#include "ptcsim/trapezoidal.hpp"

#include <cmath>

namespace ptcsim {

void TrapConfig::validate() const {
    if (!(h > 0)) throw std::invalid_argument("trapezoidal config: need h > 0");
    if (!(newton_tol > 0)) throw std::invalid_argument("trapezoidal config: need newton_tol > 0");
    if (newton_max_iters < 1)
        throw std::invalid_argument("trapezoidal config: need newton_max_iters >= 1");
}

const char* to_string(TrapStatus status) {
    switch (status) {
    case TrapStatus::Completed: return "Completed";
    case TrapStatus::NewtonNoConvergence: return "NewtonNoConvergence";
    case TrapStatus::LinearSolveFailure: return "LinearSolveFailure";
    case TrapStatus::NonFiniteResidual: return "NonFiniteResidual";
    }
    return "?";
}

namespace {

// F = -[h_c; f; g], so the dynamic rows of H are q - p + h/2 (F(q) + F(p)).
Vector residual_from(const DaeProblem& prob, const Vector& p_prev, const Vector& F_prev,
                     const Vector& p_cur, const Vector& F_cur, double h) {
    const int na = prob.active_count();
    const int n = prob.size();
    Vector H(n);
    H.head(na) = p_cur.head(na) - p_prev.head(na) + 0.5 * h * (F_cur.head(na) + F_prev.head(na));
    H.tail(n - na) = -F_cur.tail(n - na);
    return H;
}

Matrix matrix_from(const DaeProblem& prob, const Matrix& J, double h) {
    const int na = prob.active_count();
    const int n = prob.size();
    Matrix A(n, n);
    A.topRows(na) = 0.5 * h * J.topRows(na);
    A.topLeftCorner(na, na).diagonal().array() += 1.0;
    A.bottomRows(n - na) = -J.bottomRows(n - na);
    return A;
}

}  // namespace

Vector trap_residual(const DaeProblem& prob, const SystemState& prev, const SystemState& cur,
                     double h) {
    return residual_from(prob, prev.packed(), eval_residual(prob, prev), cur.packed(),
                         eval_residual(prob, cur), h);
}

Matrix trap_matrix(const DaeProblem& prob, const SystemState& cur, double h, Counters* counters) {
    return matrix_from(prob, eval_jacobian(prob, cur, counters), h);
}

SystemState trap_step(const DaeProblem& prob, const SystemState& s, double h,
                      const TrapConfig& cfg, Counters* counters) {
    if (!(h > 0)) throw std::invalid_argument("trap_step: h must be positive");
    const int na = prob.active_count();
    const int n = prob.size();
    const Vector p_prev = s.packed();
    const Vector F_prev = eval_residual(prob, s, counters);
    SystemState cur = s;
    cur.t = s.t + h;
    Vector p = p_prev;
    double hn = 0.0;
    for (int it = 0;; ++it) {
        Vector F = eval_residual(prob, cur, counters);
        Vector H = residual_from(prob, p_prev, F_prev, p, F, h);
        hn = std::max(norm(H.head(na)), norm(H.tail(n - na)));
        if (hn <= cfg.newton_tol) break;
        if (it >= cfg.newton_max_iters)
            throw NewtonNoConvergence("trapezoidal Newton did not converge at t=" +
                                      std::to_string(cur.t) + " (residual " +
                                      std::to_string(hn) + ")");
        Matrix A = matrix_from(prob, eval_jacobian(prob, cur, counters), h);
        if (counters) ++counters->linear_solves;
        p -= solve_linear(A, H);
        if (!p.allFinite()) throw NonFiniteResidual("trapezoidal Newton produced a non-finite iterate");
        cur.unpack(p);
    }
    if (counters) ++counters->steps;
    return cur;
}

TrapRun trap_integrate(const DaeProblem& prob, const SystemState& s0, double t_end,
                       const TrapConfig& cfg, const StepHook& hook) {
    cfg.validate();
    TrapRun run;
    run.trajectory.push_back(s0);
    SystemState s = s0;
    const double t_start = s0.t;
    const double span = t_end - t_start;
    const long nsteps = span > 0 ? static_cast<long>(std::ceil(span / cfg.h - 1e-9)) : 0;
    for (long k = 0; k < nsteps; ++k) {
        if (hook) hook(s);
        const double t_next = k + 1 == nsteps ? t_end : t_start + (k + 1) * cfg.h;
        try {
            s = trap_step(prob, s, t_next - s.t, cfg, &run.outcome.counters);
        } catch (const NewtonNoConvergence& e) {
            run.outcome.status = TrapStatus::NewtonNoConvergence;
            run.outcome.message = e.what();
        } catch (const SingularMatrix& e) {
            run.outcome.status = TrapStatus::LinearSolveFailure;
            run.outcome.message = e.what();
        } catch (const NonFiniteResidual& e) {
            run.outcome.status = TrapStatus::NonFiniteResidual;
            run.outcome.message = e.what();
        }
        if (run.outcome.status != TrapStatus::Completed) {
            run.outcome.failure_time = s.t;
            run.final_state = s;
            return run;
        }
        s.t = t_next;
        run.trajectory.push_back(s);
    }
    run.final_state = s;
    return run;
}

}  // namespace ptcsim
