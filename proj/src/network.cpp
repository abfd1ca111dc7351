#include "ptcsim/network.hpp"

#include <cmath>
#include <complex>
#include <string>

namespace ptcsim {

Admittance build_admittance(int nbus, const std::vector<Branch>& branches,
                            const std::vector<double>& g_shunt, const std::vector<double>& b_shunt) {
    Admittance y{Matrix::Zero(nbus, nbus), Matrix::Zero(nbus, nbus)};
    for (const Branch& br : branches) {
        const std::complex<double> ys = 1.0 / std::complex<double>(br.r, br.x);
        const double a = br.ratio;
        auto add = [&](int i, int k, std::complex<double> v) {
            y.g(i, k) += v.real();
            y.b(i, k) += v.imag();
        };
        add(br.from, br.from, a * a * ys + std::complex<double>(0, br.b / 2));
        add(br.to, br.to, ys + std::complex<double>(0, br.b / 2));
        add(br.from, br.to, -a * ys);
        add(br.to, br.from, -a * ys);
    }
    for (int i = 0; i < nbus; ++i) {
        y.g(i, i) += g_shunt[i];
        y.b(i, i) += b_shunt[i];
    }
    return y;
}

Injections injections(const Admittance& y, const Vector& theta, const Vector& v) {
    const Eigen::Index n = v.size();
    Injections s{Vector::Zero(n), Vector::Zero(n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < n; ++k) {
            if (y.g(i, k) == 0.0 && y.b(i, k) == 0.0) continue;
            const double c = std::cos(theta(i) - theta(k));
            const double sn = std::sin(theta(i) - theta(k));
            s.p(i) += v(i) * v(k) * (y.g(i, k) * c + y.b(i, k) * sn);
            s.q(i) += v(i) * v(k) * (y.g(i, k) * sn - y.b(i, k) * c);
        }
    }
    return s;
}

InjectionJacobian injection_jacobian(const Admittance& y, const Vector& theta, const Vector& v) {
    const Eigen::Index n = v.size();
    InjectionJacobian j{Matrix::Zero(n, n), Matrix::Zero(n, n), Matrix::Zero(n, n),
                        Matrix::Zero(n, n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < n; ++k) {
            const double gik = y.g(i, k), bik = y.b(i, k);
            if (gik == 0.0 && bik == 0.0) continue;
            const double c = std::cos(theta(i) - theta(k));
            const double sn = std::sin(theta(i) - theta(k));
            // P_i gets V_i V_k pc, Q_i gets V_i V_k qc
            const double pc = gik * c + bik * sn;
            const double qc = gik * sn - bik * c;
            j.dp_dtheta(i, i) += v(i) * v(k) * (-gik * sn + bik * c);
            j.dq_dtheta(i, i) += v(i) * v(k) * (gik * c + bik * sn);
            j.dp_dtheta(i, k) -= v(i) * v(k) * (-gik * sn + bik * c);
            j.dq_dtheta(i, k) -= v(i) * v(k) * (gik * c + bik * sn);
            j.dp_dv(i, i) += v(k) * pc;
            j.dq_dv(i, i) += v(k) * qc;
            j.dp_dv(i, k) += v(i) * pc;
            j.dq_dv(i, k) += v(i) * qc;
        }
    }
    return j;
}

PowerFlowResult solve_power_flow(const Admittance& y, const std::vector<BusKind>& kinds,
                                 const Vector& v_set, const Vector& theta_set, const Vector& p_spec,
                                 const Vector& q_spec, double tol, int max_iters) {
    const int n = static_cast<int>(kinds.size());
    std::vector<int> ang, mag;  // unknown angles (non-slack), unknown magnitudes (PQ)
    for (int i = 0; i < n; ++i) {
        if (kinds[i] != BusKind::Slack) ang.push_back(i);
        if (kinds[i] == BusKind::PQ) mag.push_back(i);
    }
    PowerFlowResult res{theta_set, Vector::Ones(n), 0};
    for (int i = 0; i < n; ++i)
        if (kinds[i] != BusKind::PQ) res.v(i) = v_set(i);
    for (int i : ang) res.theta(i) = 0.0;
    const int na = static_cast<int>(ang.size()), nm = static_cast<int>(mag.size());

    for (int it = 0;; ++it) {
        Injections s = injections(y, res.theta, res.v);
        Vector mis(na + nm);
        for (int a = 0; a < na; ++a) mis(a) = p_spec(ang[a]) - s.p(ang[a]);
        for (int b = 0; b < nm; ++b) mis(na + b) = q_spec(mag[b]) - s.q(mag[b]);
        if (!mis.allFinite()) throw PowerFlowNoConvergence("power flow diverged");
        if (mis.size() == 0 || mis.cwiseAbs().maxCoeff() <= tol) {
            res.iterations = it;
            return res;
        }
        if (it >= max_iters)
            throw PowerFlowNoConvergence("power flow did not converge in " +
                                         std::to_string(max_iters) + " iterations");
        InjectionJacobian j = injection_jacobian(y, res.theta, res.v);
        Matrix jac(na + nm, na + nm);
        for (int a = 0; a < na; ++a) {
            for (int c = 0; c < na; ++c) jac(a, c) = j.dp_dtheta(ang[a], ang[c]);
            for (int c = 0; c < nm; ++c) jac(a, na + c) = j.dp_dv(ang[a], mag[c]);
        }
        for (int b = 0; b < nm; ++b) {
            for (int c = 0; c < na; ++c) jac(na + b, c) = j.dq_dtheta(mag[b], ang[c]);
            for (int c = 0; c < nm; ++c) jac(na + b, na + c) = j.dq_dv(mag[b], mag[c]);
        }
        Vector dx;
        try {
            dx = solve_linear(jac, mis);
        } catch (const SingularMatrix&) {
            throw PowerFlowNoConvergence("power flow Jacobian is singular");
        }
        for (int a = 0; a < na; ++a) res.theta(ang[a]) += dx(a);
        for (int b = 0; b < nm; ++b) res.v(mag[b]) += dx(na + b);
    }
}

}  // namespace ptcsim
