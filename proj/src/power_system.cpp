#include "ptcsim/power_system.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>

namespace ptcsim {

namespace {

double logistic(double u) {
    if (u >= 0) return 1.0 / (1.0 + std::exp(-u));
    const double e = std::exp(u);
    return e / (1.0 + e);
}

// d/dr of r^a
double dpow(double r, double a) {
    return a == 0.0 ? 0.0 : a * std::pow(r, a - 1.0);
}

template <class T>
int find_by_name(const std::vector<T>& items, const std::string& name) {
    for (std::size_t i = 0; i < items.size(); ++i)
        if (items[i].name == name) return static_cast<int>(i);
    return -1;
}

}  // namespace

PowerSystemModel::PowerSystemModel(const Scenario& sc) : sc_(sc) {
    validate(sc_);
    const auto& net = sc_.network;
    const auto& cs = sc_.components;
    nbus_ = static_cast<int>(net.buses.size());
    omega_b_ = 2.0 * std::numbers::pi * net.f_base;
    for (int i = 0; i < nbus_; ++i)
        if (net.buses[i].kind == BusKind::Slack) slack_ = i;

    int zd = 0;
    for (const Ltc& l : cs.ltcs) {
        LtcData d{l, bus_index(l.from), bus_index(l.to), zd++};
        ltcs_.push_back(d);
        zd_names_.push_back(l.name + ".ratio");
    }
    const int oxl_flag0 = zd;
    zd += static_cast<int>(cs.oxls.size());
    for (const Oxl& o : cs.oxls) zd_names_.push_back(o.name + ".active");
    for (const Line& l : net.lines) {
        LineData d{l, bus_index(l.from), bus_index(l.to), zd++};
        lines_.push_back(d);
        zd_names_.push_back(l.name + ".status");
    }

    // z_c
    std::vector<std::string> zc_names;
    std::map<std::string, int> gov_of;
    for (const Governor& g : cs.governors) {
        gov_of[g.gen] = n_zc_++;
        zc_names.push_back(g.name + ".pm");
    }
    for (const Load& l : cs.loads) {
        LoadData d{l, bus_index(l.bus), -1, 1.0};
        if (l.kind == LoadKind::ExponentialRecovery) {
            d.zc = n_zc_;
            n_zc_ += 2;
            zc_names.push_back(l.name + ".zp");
            zc_names.push_back(l.name + ".zq");
        }
        loads_.push_back(d);
    }
    for (std::size_t k = 0; k < cs.oxls.size(); ++k) {
        const Oxl& o = cs.oxls[k];
        OxlData d{o, find_by_name(cs.generators, o.gen), n_zc_++, oxl_flag0 + static_cast<int>(k)};
        oxls_.push_back(d);
        zc_names.push_back(o.name + ".timer");
    }

    // x
    std::vector<std::string> x_names;
    for (const Generator& g : cs.generators) {
        GenData d;
        d.p = g;
        d.bus = bus_index(g.bus);
        d.ix = n_x_;
        n_x_ += 4;
        for (const char* v : {".delta", ".omega", ".eqp", ".edp"}) x_names.push_back(g.name + v);
        for (const Exciter& e : cs.exciters) {
            if (e.gen != g.name) continue;
            d.efd = n_x_++;
            d.ka = e.ka;
            d.ta = e.ta;
            x_names.push_back(g.name + ".efd");
        }
        for (const Governor& gv : cs.governors) {
            if (gv.gen != g.name) continue;
            d.gov = gov_of[g.name];
            d.r = gv.r;
            d.tg = gv.tg;
        }
        gens_.push_back(d);
    }
    for (std::size_t k = 0; k < oxls_.size(); ++k) gens_[oxls_[k].gen].oxl = static_cast<int>(k);

    names_ = zc_names;
    names_.insert(names_.end(), x_names.begin(), x_names.end());
    for (const Bus& b : net.buses) names_.push_back(b.name + ".theta");
    for (const Bus& b : net.buses) names_.push_back(b.name + ".v");

    double tmax = 0.0;
    for (const GenData& g : gens_) {
        tmax = std::max({tmax, g.p.td0p, g.p.tq0p});
        if (g.efd >= 0) tmax = std::max(tmax, g.ta);
        if (g.gov >= 0) tmax = std::max(tmax, g.tg);
    }
    for (const LoadData& l : loads_)
        if (l.zc >= 0) tmax = std::max({tmax, l.p.tp, l.p.tq});
    for (const OxlData& o : oxls_) tmax = std::max(tmax, o.p.t_reset);
    epsilon_ = tmax > 0 ? 1.0 / tmax : 1.0;

    initialize();
}

int PowerSystemModel::bus_index(const std::string& name) const {
    int i = find_by_name(sc_.network.buses, name);
    if (i < 0) throw std::invalid_argument("unknown bus " + name);
    return i;
}

int PowerSystemModel::line_status_index(const std::string& line) const {
    for (const LineData& l : lines_)
        if (l.p.name == line) return l.zd;
    throw std::invalid_argument("unknown line " + line);
}

Admittance PowerSystemModel::admittance(const Vector& zd) const {
    std::vector<Branch> br;
    for (const LineData& l : lines_)
        if (zd(l.zd) > 0.5) br.push_back({l.from, l.to, l.p.r, l.p.x, l.p.b, 1.0});
    for (const LtcData& t : ltcs_) br.push_back({t.from, t.to, 0.0, t.p.x, 0.0, zd(t.zd)});
    std::vector<double> gs, bs;
    for (const Bus& b : sc_.network.buses) {
        gs.push_back(b.g_shunt);
        bs.push_back(b.b_shunt);
    }
    return build_admittance(nbus_, br, gs, bs);
}

void PowerSystemModel::initialize() {
    const auto& net = sc_.network;
    SystemState s;
    s.zc = Vector::Zero(n_zc_);
    s.x = Vector::Zero(n_x_);
    s.y = Vector::Zero(2 * nbus_);
    s.zd = Vector::Zero(static_cast<Eigen::Index>(zd_names_.size()));
    for (const LtcData& t : ltcs_) s.zd(t.zd) = t.p.ratio;
    for (const LineData& l : lines_) s.zd(l.zd) = l.p.in_service ? 1.0 : 0.0;

    std::vector<BusKind> kinds;
    Vector vset(nbus_), thset(nbus_), pspec = Vector::Zero(nbus_), qspec = Vector::Zero(nbus_);
    for (int i = 0; i < nbus_; ++i) {
        kinds.push_back(net.buses[i].kind);
        vset(i) = net.buses[i].v_set;
        thset(i) = net.buses[i].theta_set;
    }
    for (const GenData& g : gens_) pspec(g.bus) += g.p.p_set;
    for (const LoadData& l : loads_) {
        pspec(l.bus) -= l.p.p0;
        qspec(l.bus) -= l.p.q0;
    }
    const Admittance y = admittance(s.zd);
    PowerFlowResult pf = solve_power_flow(y, kinds, vset, thset, pspec, qspec);
    s.y << pf.theta, pf.v;
    const Injections inj = injections(y, pf.theta, pf.v);

    using cplx = std::complex<double>;
    for (GenData& g : gens_) {
        double qload = 0.0;
        for (const LoadData& l : loads_)
            if (l.bus == g.bus) qload += l.p.q0;
        const double pg = g.p.p_set;
        const double qg = inj.q(g.bus) + qload;
        const cplx vt = std::polar(pf.v(g.bus), pf.theta(g.bus));
        const cplx i = std::conj(cplx(pg, qg) / vt);
        const cplx e = vt + cplx(0, g.p.xq) * i;
        const double delta = std::arg(e);
        const cplx rot = std::polar(1.0, -(delta - std::numbers::pi / 2));
        const cplx idq = i * rot, vdq = vt * rot;
        const double eqp = vdq.imag() + g.p.xdp * idq.real();
        const double edp = (g.p.xq - g.p.xqp) * idq.imag();
        const double efd = eqp + (g.p.xd - g.p.xdp) * idq.real();
        s.x(g.ix) = delta;
        s.x(g.ix + 1) = 1.0;
        s.x(g.ix + 2) = eqp;
        s.x(g.ix + 3) = edp;
        g.pm_fixed = pg;
        g.p_ref = pg;
        g.efd_fixed = efd;
        if (g.gov >= 0) s.zc(g.gov) = pg;
        if (g.efd >= 0) {
            s.x(g.efd) = efd;
            g.v_ref = pf.v(g.bus) + efd / g.ka;
        }
        if (g.oxl >= 0) {
            const Oxl& o = oxls_[g.oxl].p;
            s.zc(oxls_[g.oxl].zc) = o.t_reset * logistic(o.sharpness * (efd - o.i_lim));
        }
    }
    for (LoadData& l : loads_) l.v0 = pf.v(l.bus);
    initial_ = s;
}

void PowerSystemModel::eval(const SystemState& s, Residuals& r) const {
    const Vector theta = s.y.head(nbus_);
    const Vector v = s.y.tail(nbus_);
    const Injections inj = injections(admittance(s.zd), theta, v);
    Vector gp = -inj.p, gq = -inj.q;

    for (const GenData& g : gens_) {
        const Generator& m = g.p;
        const double delta = s.x(g.ix), omega = s.x(g.ix + 1);
        const double eqp = s.x(g.ix + 2), edp = s.x(g.ix + 3);
        const double a = delta - theta(g.bus), vb = v(g.bus);
        const double vd = vb * std::sin(a), vq = vb * std::cos(a);
        const double id = (eqp - vq) / m.xdp, iq = (vd - edp) / m.xqp;
        const double pe = vd * id + vq * iq, qe = vq * id - vd * iq;
        gp(g.bus) += pe;
        gq(g.bus) += qe;
        const double pm = g.gov >= 0 ? s.zc(g.gov) : g.pm_fixed;
        const double efd = g.efd >= 0 ? s.x(g.efd) : g.efd_fixed;
        r.f(g.ix) = omega_b_ * (omega - 1.0);
        r.f(g.ix + 1) = (pm - pe - m.d * (omega - 1.0)) / (2.0 * m.h);
        r.f(g.ix + 2) = (efd - eqp - (m.xd - m.xdp) * id) / m.td0p;
        r.f(g.ix + 3) = (-edp + (m.xq - m.xqp) * iq) / m.tq0p;
        if (g.efd >= 0) {
            const bool limited = g.oxl >= 0 && s.zd(oxls_[g.oxl].flag) > 0.5;
            r.f(g.efd) = limited ? (oxls_[g.oxl].p.efd_lim - efd) / g.ta
                                 : (g.ka * (g.v_ref - vb) - efd) / g.ta;
        }
        if (g.gov >= 0) r.hc(g.gov) = (g.p_ref - pm - (omega - 1.0) / g.r) / g.tg;
        if (g.oxl >= 0) {
            const OxlData& o = oxls_[g.oxl];
            const double ifd = eqp + (m.xd - m.xdp) * id;
            r.hc(o.zc) = logistic(o.p.sharpness * (ifd - o.p.i_lim)) - s.zc(o.zc) / o.p.t_reset;
        }
    }

    for (const LoadData& l : loads_) {
        const Load& p = l.p;
        const double vr = v(l.bus) / l.v0;
        const double pt = p.p0 * std::pow(vr, p.alpha_t), qt = p.q0 * std::pow(vr, p.beta_t);
        if (l.zc >= 0) {
            const double zp = s.zc(l.zc), zq = s.zc(l.zc + 1);
            r.hc(l.zc) = -zp / p.tp + p.p0 * std::pow(vr, p.alpha_s) - pt;
            r.hc(l.zc + 1) = -zq / p.tq + p.q0 * std::pow(vr, p.beta_s) - qt;
            gp(l.bus) -= zp / p.tp + pt;
            gq(l.bus) -= zq / p.tq + qt;
        } else {
            gp(l.bus) -= pt;
            gq(l.bus) -= qt;
        }
    }

    const Bus& sl = sc_.network.buses[slack_];
    gp(slack_) = theta(slack_) - sl.theta_set;
    gq(slack_) = v(slack_) - sl.v_set;
    r.g << gp, gq;
}

Matrix PowerSystemModel::jacobian(const SystemState& s) const {
    const int p = n_zc_, m = n_x_, nb = nbus_;
    const int n = p + m + 2 * nb;
    const int xo = p, yo = p + m;  // column/row offsets of x and y
    Matrix k = Matrix::Zero(n, n);  // d[h_c; f; g]/d[z_c, x, y]
    const Vector theta = s.y.head(nb);
    const Vector v = s.y.tail(nb);

    const InjectionJacobian nj = injection_jacobian(admittance(s.zd), theta, v);
    k.block(yo, yo, nb, nb) = -nj.dp_dtheta;
    k.block(yo, yo + nb, nb, nb) = -nj.dp_dv;
    k.block(yo + nb, yo, nb, nb) = -nj.dq_dtheta;
    k.block(yo + nb, yo + nb, nb, nb) = -nj.dq_dv;

    for (const GenData& g : gens_) {
        const Generator& mc = g.p;
        const double delta = s.x(g.ix);
        const double eqp = s.x(g.ix + 2), edp = s.x(g.ix + 3);
        const double a = delta - theta(g.bus), vb = v(g.bus);
        const double sa = std::sin(a), ca = std::cos(a);
        const double vd = vb * sa, vq = vb * ca;
        const double id = (eqp - vq) / mc.xdp, iq = (vd - edp) / mc.xqp;
        // local variables: delta, e'_q, e'_d, theta_bus, V_bus
        const int col[5] = {xo + g.ix, xo + g.ix + 2, xo + g.ix + 3, yo + g.bus, yo + nb + g.bus};
        const double dvd[5] = {vb * ca, 0, 0, -vb * ca, sa};
        const double dvq[5] = {-vb * sa, 0, 0, vb * sa, ca};
        double did[5], diq[5], dp[5], dq[5];
        for (int j = 0; j < 5; ++j) {
            did[j] = ((j == 1 ? 1.0 : 0.0) - dvq[j]) / mc.xdp;
            diq[j] = (dvd[j] - (j == 2 ? 1.0 : 0.0)) / mc.xqp;
            dp[j] = id * dvd[j] + vd * did[j] + iq * dvq[j] + vq * diq[j];
            dq[j] = id * dvq[j] + vq * did[j] - iq * dvd[j] - vd * diq[j];
        }
        const int rd = xo + g.ix, rw = rd + 1, rq = rd + 2, rdd = rd + 3;
        const int cw = xo + g.ix + 1;
        k(rd, cw) = omega_b_;
        k(rw, cw) = -mc.d / (2.0 * mc.h);
        if (g.gov >= 0) k(rw, g.gov) = 1.0 / (2.0 * mc.h);
        if (g.efd >= 0) k(rq, xo + g.efd) = 1.0 / mc.td0p;
        for (int j = 0; j < 5; ++j) {
            k(yo + g.bus, col[j]) += dp[j];
            k(yo + nb + g.bus, col[j]) += dq[j];
            k(rw, col[j]) += -dp[j] / (2.0 * mc.h);
            k(rq, col[j]) += (-(j == 1 ? 1.0 : 0.0) - (mc.xd - mc.xdp) * did[j]) / mc.td0p;
            k(rdd, col[j]) += (-(j == 2 ? 1.0 : 0.0) + (mc.xq - mc.xqp) * diq[j]) / mc.tq0p;
        }
        if (g.efd >= 0) {
            const int re = xo + g.efd;
            const bool limited = g.oxl >= 0 && s.zd(oxls_[g.oxl].flag) > 0.5;
            k(re, re) = -1.0 / g.ta;
            if (!limited) k(re, yo + nb + g.bus) = -g.ka / g.ta;
        }
        if (g.gov >= 0) {
            k(g.gov, g.gov) = -1.0 / g.tg;
            k(g.gov, cw) = -1.0 / (g.r * g.tg);
        }
        if (g.oxl >= 0) {
            const OxlData& o = oxls_[g.oxl];
            const double ifd = eqp + (mc.xd - mc.xdp) * id;
            const double sg = logistic(o.p.sharpness * (ifd - o.p.i_lim));
            const double ds = o.p.sharpness * sg * (1.0 - sg);
            k(o.zc, o.zc) = -1.0 / o.p.t_reset;
            for (int j = 0; j < 5; ++j)
                k(o.zc, col[j]) += ds * ((j == 1 ? 1.0 : 0.0) + (mc.xd - mc.xdp) * did[j]);
        }
    }

    for (const LoadData& l : loads_) {
        const Load& pr = l.p;
        const double vr = v(l.bus) / l.v0;
        const int cv = yo + nb + l.bus, rp = yo + l.bus, rq = yo + nb + l.bus;
        const double dpt = pr.p0 * dpow(vr, pr.alpha_t) / l.v0;
        const double dqt = pr.q0 * dpow(vr, pr.beta_t) / l.v0;
        if (l.zc >= 0) {
            const double dps = pr.p0 * dpow(vr, pr.alpha_s) / l.v0;
            const double dqs = pr.q0 * dpow(vr, pr.beta_s) / l.v0;
            k(l.zc, l.zc) = -1.0 / pr.tp;
            k(l.zc, cv) += dps - dpt;
            k(l.zc + 1, l.zc + 1) = -1.0 / pr.tq;
            k(l.zc + 1, cv) += dqs - dqt;
            k(rp, l.zc) += -1.0 / pr.tp;
            k(rq, l.zc + 1) += -1.0 / pr.tq;
        }
        k(rp, cv) -= dpt;
        k(rq, cv) -= dqt;
    }

    k.row(yo + slack_).setZero();
    k.row(yo + nb + slack_).setZero();
    k(yo + slack_, yo + slack_) = 1.0;
    k(yo + nb + slack_, yo + nb + slack_) = 1.0;
    return -k;
}

EventRule ltc_rule(const Ltc& ltc, int device_id, int zd_index, int v_index) {
    EventRule r;
    r.device_id = device_id;
    r.device = ltc.name;
    r.zd_index = zd_index;
    r.delay = ltc.delay;
    r.lower = ltc.ratio_min;
    r.upper = ltc.ratio_max;
    const double lo = ltc.v_ref - ltc.deadband, hi = ltc.v_ref + ltc.deadband;
    r.guard = [v_index, lo, hi](const SystemState& s) {
        const double vs = s.y(v_index);
        if (vs < lo) return 1;
        if (vs > hi) return -1;
        return 0;
    };
    const double step = ltc.step;
    r.transition = [zd_index, step](const SystemState& s, int mode) {
        return s.zd(zd_index) + mode * step;
    };
    return r;
}

std::vector<EventRule> PowerSystemModel::event_rules() const {
    std::vector<EventRule> rules;
    int id = 1;
    for (const LtcData& t : ltcs_) rules.push_back(ltc_rule(t.p, id++, t.zd, v_index(t.to)));
    for (const OxlData& o : oxls_) {
        EventRule r;
        r.device_id = id++;
        r.device = o.p.name;
        r.zd_index = o.flag;
        r.lower = 0.0;
        r.upper = 1.0;
        const int flag = o.flag, zc = o.zc;
        const double pickup = o.p.pickup;
        r.guard = [flag, zc, pickup](const SystemState& s) {
            return s.zd(flag) < 0.5 && s.zc(zc) >= pickup ? 1 : 0;
        };
        r.transition = [](const SystemState&, int) { return 1.0; };
        rules.push_back(r);
    }
    if (!sc_.fault.line.empty()) {
        EventRule r;
        r.device_id = id++;
        r.device = sc_.fault.line;
        r.zd_index = line_status_index(sc_.fault.line);
        r.lower = 0.0;
        r.upper = 1.0;
        const int st = r.zd_index;
        const double tf = sc_.fault.t_fault;
        r.guard = [st, tf](const SystemState& s) {
            return s.zd(st) > 0.5 && s.t >= tf - 1e-9 ? 1 : 0;
        };
        r.transition = [](const SystemState&, int) { return 0.0; };
        rules.push_back(r);
    }
    return rules;
}

HybridSystem build_problem(const Scenario& sc, ModelKind kind) {
    auto model = std::make_shared<const PowerSystemModel>(sc);
    HybridSystem hs;
    hs.problem.n_zc = model->n_zc();
    hs.problem.n_x = model->n_x();
    hs.problem.n_y = model->n_y();
    hs.problem.model_kind = kind;
    hs.problem.epsilon = model->epsilon();
    hs.problem.eval = [model](const SystemState& s, Residuals& r) { model->eval(s, r); };
    hs.problem.analytic_jacobian = [model](const SystemState& s) { return model->jacobian(s); };
    hs.initial = model->initial_state();
    hs.rules = model->event_rules();
    hs.names = model->names();
    return hs;
}

RunPlan make_plan(const Scenario& sc, ModelKind kind, Method method) {
    RunPlan plan;
    plan.model_kind = kind;
    plan.method = method;
    plan.t0 = sc.plan.t0;
    plan.t1 = sc.plan.t1;
    plan.t_end = sc.plan.t_end;
    plan.trap.h = sc.plan.h;
    plan.trap.newton_tol = sc.plan.newton_tol;
    plan.trap.newton_max_iters = sc.plan.newton_max_iters;
    plan.ptc.delta0 = sc.plan.delta0;
    plan.ptc.delta_max = sc.plan.delta_max;
    plan.ptc.f_tol = sc.plan.f_tol;
    plan.ptc.max_iters = sc.plan.max_iters;
    plan.ptc.max_delta_shrink = sc.plan.max_delta_shrink;
    return plan;
}

}  // namespace ptcsim
