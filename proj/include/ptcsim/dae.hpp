#pragma once

#include "ptcsim/numeric.hpp"

#include <functional>

namespace ptcsim {

enum class ModelKind { LongTerm, Qss };

const char* to_string(ModelKind kind);

// Continuous part is ordered [z_c | x | y] everywhere a packed vector is used.
struct SystemState {
    double t = 0.0;
    Vector zc;
    Vector zd;
    Vector x;
    Vector y;

    Vector packed() const;
    void unpack(const Vector& p);
};

struct Residuals {
    Vector hc;
    Vector f;
    Vector g;
};

struct DaeProblem {
    int n_zc = 0;
    int n_x = 0;
    int n_y = 0;
    ModelKind model_kind = ModelKind::LongTerm;
    double epsilon = 1.0;

    // Fills h_c, f and g at s (z_d held fixed).
    std::function<void(const SystemState&, Residuals&)> eval;
    // Optional: dF/d[z_c, x, y] of the stacked residual F = -[h_c; f; g].
    std::function<Matrix(const SystemState&)> analytic_jacobian;

    int size() const { return n_zc + n_x + n_y; }
    // Rows carrying d/dt: p+m for the long-term model, p for QSS.
    int active_count() const { return model_kind == ModelKind::LongTerm ? n_zc + n_x : n_zc; }
    DaeProblem with_kind(ModelKind kind) const;
};

struct MassStructure {
    enum class Kind { D1_LongTerm, D2_Qss };
    Kind kind;
    int active_count;
};

struct Counters {
    long steps = 0;
    long ptc_iterations = 0;
    long linear_solves = 0;
    long residual_evals = 0;
    long jacobian_evals = 0;

    Counters& operator+=(const Counters& o);
    bool operator==(const Counters&) const = default;
};

class NoConvergence : public Error {
public:
    using Error::Error;
};

Vector eval_residual(const DaeProblem& prob, const SystemState& s, Counters* counters = nullptr);
Matrix eval_jacobian(const DaeProblem& prob, const SystemState& s, Counters* counters = nullptr);

MassStructure mass_structure(const DaeProblem& prob);
Matrix assemble_mass(const DaeProblem& prob);

struct ConsistencyReport {
    bool consistent = false;
    double g_norm = 0.0;
    double f_norm = 0.0;  // only checked for QSS
};

ConsistencyReport check_consistency(const DaeProblem& prob, const SystemState& s, double tol);

// Newton on g = 0 over y (long-term) or on {f, g} = 0 over (x, y) (QSS).
SystemState project_consistent(const DaeProblem& prob, const SystemState& s, double tol,
                               int max_iters);

}  // namespace ptcsim
