#include "ptcsim/dae.hpp"

#include <string>

namespace ptcsim {

const char* to_string(ModelKind kind) {
    return kind == ModelKind::LongTerm ? "longterm" : "qss";
}

Vector SystemState::packed() const {
    Vector p(zc.size() + x.size() + y.size());
    p << zc, x, y;
    return p;
}

void SystemState::unpack(const Vector& p) {
    const auto nz = zc.size(), nx = x.size(), ny = y.size();
    if (p.size() != nz + nx + ny) throw std::invalid_argument("unpack: size mismatch");
    zc = p.head(nz);
    x = p.segment(nz, nx);
    y = p.tail(ny);
}

DaeProblem DaeProblem::with_kind(ModelKind kind) const {
    DaeProblem out = *this;
    out.model_kind = kind;
    return out;
}

Counters& Counters::operator+=(const Counters& o) {
    steps += o.steps;
    ptc_iterations += o.ptc_iterations;
    linear_solves += o.linear_solves;
    residual_evals += o.residual_evals;
    jacobian_evals += o.jacobian_evals;
    return *this;
}

static void check_dims(const DaeProblem& prob, const SystemState& s) {
    if (s.zc.size() != prob.n_zc || s.x.size() != prob.n_x || s.y.size() != prob.n_y)
        throw std::invalid_argument("state dimensions do not match the problem");
}

Vector eval_residual(const DaeProblem& prob, const SystemState& s, Counters* counters) {
    check_dims(prob, s);
    Residuals r;
    r.hc = Vector::Zero(prob.n_zc);
    r.f = Vector::Zero(prob.n_x);
    r.g = Vector::Zero(prob.n_y);
    prob.eval(s, r);
    if (counters) ++counters->residual_evals;
    Vector F(prob.size());
    F << -r.hc, -r.f, -r.g;
    if (!F.allFinite()) throw NonFiniteResidual("non-finite residual at t=" + std::to_string(s.t));
    return F;
}

Matrix eval_jacobian(const DaeProblem& prob, const SystemState& s, Counters* counters) {
    check_dims(prob, s);
    if (counters) ++counters->jacobian_evals;
    if (prob.analytic_jacobian) {
        Matrix J = prob.analytic_jacobian(s);
        if (!J.allFinite()) throw NonFiniteResidual("non-finite Jacobian");
        return J;
    }
    SystemState work = s;
    auto F = [&](const Vector& p) {
        work.unpack(p);
        return eval_residual(prob, work);
    };
    return fd_jacobian(F, s.packed(), 1e-6);
}

MassStructure mass_structure(const DaeProblem& prob) {
    return {prob.model_kind == ModelKind::LongTerm ? MassStructure::Kind::D1_LongTerm
                                                   : MassStructure::Kind::D2_Qss,
            prob.active_count()};
}

Matrix assemble_mass(const DaeProblem& prob) {
    const int n = prob.size();
    Matrix d = Matrix::Zero(n, n);
    for (int i = 0; i < prob.active_count(); ++i) d(i, i) = 1.0;
    return d;
}

ConsistencyReport check_consistency(const DaeProblem& prob, const SystemState& s, double tol) {
    Vector F = eval_residual(prob, s);
    ConsistencyReport rep;
    rep.g_norm = norm(F.tail(prob.n_y));
    rep.f_norm = norm(F.segment(prob.n_zc, prob.n_x));
    rep.consistent = rep.g_norm <= tol;
    if (prob.model_kind == ModelKind::Qss) rep.consistent = rep.consistent && rep.f_norm <= tol;
    return rep;
}

SystemState project_consistent(const DaeProblem& prob, const SystemState& s, double tol,
                               int max_iters) {
    const int first = prob.model_kind == ModelKind::LongTerm ? prob.n_zc + prob.n_x : prob.n_zc;
    const int len = prob.size() - first;
    SystemState cur = s;
    for (int it = 0;; ++it) {
        Vector F;
        try {
            F = eval_residual(prob, cur);
        } catch (const NonFiniteResidual&) {
            throw NoConvergence("project_consistent: iterate left the model domain");
        }
        Vector r = F.tail(len);
        if (check_consistency(prob, cur, tol).consistent) return cur;
        if (it >= max_iters)
            throw NoConvergence("project_consistent: no convergence after " +
                                std::to_string(max_iters) + " iterations (residual " +
                                std::to_string(norm(r)) + ")");
        Matrix J = eval_jacobian(prob, cur);
        Vector step = solve_linear(J.bottomRightCorner(len, len), -r);
        Vector p = cur.packed();
        p.tail(len) += step;
        cur.unpack(p);
    }
}

}  // namespace ptcsim
