#include "ptcsim/scenario_io.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <vector>

namespace ptcsim {

namespace {

std::string fmt(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double to_double(const std::string& s, int line, const std::string& key) {
    double v = 0;
    const char* end = s.data() + s.size();
    auto res = std::from_chars(s.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end)
        throw ParseError(line, "bad number '" + s + "' for " + key);
    return v;
}

int to_int(const std::string& s, int line, const std::string& key) {
    int v = 0;
    const char* end = s.data() + s.size();
    auto res = std::from_chars(s.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end)
        throw ParseError(line, "bad integer '" + s + "' for " + key);
    return v;
}

template <class T>
struct Field {
    std::string key;
    std::function<void(T&, const std::string&, int)> set;
    std::function<std::string(const T&)> get;
    bool required = false;
};

template <class T>
Field<T> num(const std::string& key, double T::*m) {
    return {key,
            [m, key](T& t, const std::string& v, int line) { t.*m = to_double(v, line, key); },
            [m](const T& t) { return fmt(t.*m); }};
}

template <class T>
Field<T> integer(const std::string& key, int T::*m) {
    return {key, [m, key](T& t, const std::string& v, int line) { t.*m = to_int(v, line, key); },
            [m](const T& t) { return std::to_string(t.*m); }};
}

template <class T>
Field<T> ref(const std::string& key, std::string T::*m) {
    return {key, [m](T& t, const std::string& v, int) { t.*m = v; },
            [m](const T& t) { return t.*m; }, true};
}

template <class T, class E>
Field<T> choice(const std::string& key, E T::*m, std::vector<std::pair<std::string, E>> opts) {
    return {key,
            [m, key, opts](T& t, const std::string& v, int line) {
                for (const auto& [name, val] : opts)
                    if (name == v) {
                        t.*m = val;
                        return;
                    }
                throw ParseError(line, "bad value '" + v + "' for " + key);
            },
            [m, opts](const T& t) {
                for (const auto& [name, val] : opts)
                    if (val == t.*m) return name;
                return std::string("?");
            }};
}

const std::vector<std::pair<std::string, BusKind>> kBusKinds = {
    {"slack", BusKind::Slack}, {"pv", BusKind::PV}, {"pq", BusKind::PQ}};
const std::vector<std::pair<std::string, LoadKind>> kLoadKinds = {
    {"erl", LoadKind::ExponentialRecovery}, {"static", LoadKind::Static}};
const std::vector<std::pair<std::string, Archetype>> kArchetypes = {
    {"stable", Archetype::StableFast},
    {"qss_difficulty", Archetype::QssDifficulty},
    {"unstable", Archetype::Unstable}};

const std::vector<Field<Bus>>& bus_fields() {
    static const std::vector<Field<Bus>> f = {
        choice("kind", &Bus::kind, kBusKinds), num("v", &Bus::v_set), num("theta", &Bus::theta_set),
        num("g", &Bus::g_shunt), num("b", &Bus::b_shunt)};
    return f;
}

const std::vector<Field<Line>>& line_fields() {
    static const std::vector<Field<Line>> f = {
        ref("from", &Line::from), ref("to", &Line::to), num("r", &Line::r), num("x", &Line::x),
        num("b", &Line::b), choice("status", &Line::in_service, std::vector<std::pair<std::string, bool>>{{"1", true}, {"0", false}})};
    return f;
}

const std::vector<Field<Generator>>& gen_fields() {
    static const std::vector<Field<Generator>> f = {
        ref("bus", &Generator::bus),   num("p", &Generator::p_set),   num("h", &Generator::h),
        num("d", &Generator::d),       num("xd", &Generator::xd),     num("xq", &Generator::xq),
        num("xdp", &Generator::xdp),   num("xqp", &Generator::xqp),   num("td0p", &Generator::td0p),
        num("tq0p", &Generator::tq0p)};
    return f;
}

const std::vector<Field<Exciter>>& exciter_fields() {
    static const std::vector<Field<Exciter>> f = {ref("gen", &Exciter::gen), num("ka", &Exciter::ka),
                                                  num("ta", &Exciter::ta)};
    return f;
}

const std::vector<Field<Governor>>& governor_fields() {
    static const std::vector<Field<Governor>> f = {ref("gen", &Governor::gen), num("r", &Governor::r),
                                                   num("tg", &Governor::tg)};
    return f;
}

const std::vector<Field<Load>>& load_fields() {
    static const std::vector<Field<Load>> f = {
        ref("bus", &Load::bus),         choice("kind", &Load::kind, kLoadKinds),
        num("p0", &Load::p0),           num("q0", &Load::q0),
        num("tp", &Load::tp),           num("tq", &Load::tq),
        num("alpha_s", &Load::alpha_s), num("alpha_t", &Load::alpha_t),
        num("beta_s", &Load::beta_s),   num("beta_t", &Load::beta_t)};
    return f;
}

const std::vector<Field<Ltc>>& ltc_fields() {
    static const std::vector<Field<Ltc>> f = {
        ref("from", &Ltc::from),           ref("to", &Ltc::to),
        num("x", &Ltc::x),                 num("ratio", &Ltc::ratio),
        num("ratio_min", &Ltc::ratio_min), num("ratio_max", &Ltc::ratio_max),
        num("step", &Ltc::step),           num("v_ref", &Ltc::v_ref),
        num("deadband", &Ltc::deadband),   num("delay", &Ltc::delay)};
    return f;
}

const std::vector<Field<Oxl>>& oxl_fields() {
    static const std::vector<Field<Oxl>> f = {
        ref("gen", &Oxl::gen),         num("i_lim", &Oxl::i_lim),     num("efd_lim", &Oxl::efd_lim),
        num("pickup", &Oxl::pickup),   num("t_reset", &Oxl::t_reset), num("sharpness", &Oxl::sharpness)};
    return f;
}

const std::vector<Field<Scenario>>& scenario_fields() {
    static const std::vector<Field<Scenario>> f = {
        {"label", [](Scenario& s, const std::string& v, int) { s.label = v; },
         [](const Scenario& s) { return s.label; }},
        choice("archetype", &Scenario::archetype, kArchetypes)};
    return f;
}

const std::vector<Field<Network>>& network_fields() {
    static const std::vector<Field<Network>> f = {num("base_mva", &Network::base_mva),
                                                  num("f_base", &Network::f_base)};
    return f;
}

const std::vector<Field<FaultSpec>>& fault_fields() {
    static const std::vector<Field<FaultSpec>> f = {
        {"line", [](FaultSpec& s, const std::string& v, int) { s.line = v; },
         [](const FaultSpec& s) { return s.line; }},
        num("t_fault", &FaultSpec::t_fault)};
    return f;
}

const std::vector<Field<ScenarioPlan>>& plan_fields() {
    static const std::vector<Field<ScenarioPlan>> f = {
        num("t0", &ScenarioPlan::t0),
        num("t1", &ScenarioPlan::t1),
        num("t_end", &ScenarioPlan::t_end),
        num("h", &ScenarioPlan::h),
        num("newton_tol", &ScenarioPlan::newton_tol),
        integer("newton_max_iters", &ScenarioPlan::newton_max_iters),
        num("delta0", &ScenarioPlan::delta0),
        num("delta_max", &ScenarioPlan::delta_max),
        num("f_tol", &ScenarioPlan::f_tol),
        integer("max_iters", &ScenarioPlan::max_iters),
        integer("max_delta_shrink", &ScenarioPlan::max_delta_shrink)};
    return f;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
void set_field(const std::vector<Field<T>>& fields, T& obj, const std::string& key,
               const std::string& value, int line, std::set<std::string>& seen) {
    for (const Field<T>& f : fields) {
        if (f.key != key) continue;
        if (!seen.insert(key).second) throw ParseError(line, "duplicate key '" + key + "'");
        f.set(obj, value, line);
        return;
    }
    throw ParseError(line, "unknown key '" + key + "'");
}

// "name k=v k=v ..."
template <class T>
T parse_record(const std::vector<Field<T>>& fields, const std::string& text, int line) {
    std::istringstream in(text);
    T obj{};
    std::string tok;
    in >> obj.name;
    if (obj.name.find('=') != std::string::npos)
        throw ParseError(line, "record must start with an element name");
    std::set<std::string> seen;
    while (in >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == tok.size())
            throw ParseError(line, "expected key=value, got '" + tok + "'");
        set_field(fields, obj, tok.substr(0, eq), tok.substr(eq + 1), line, seen);
    }
    for (const Field<T>& f : fields)
        if (f.required && !seen.count(f.key))
            throw ParseError(line, "missing required key '" + f.key + "'");
    return obj;
}

template <class T>
void write_record(std::ostringstream& out, const std::vector<Field<T>>& fields, const T& obj) {
    out << obj.name;
    for (const Field<T>& f : fields) out << ' ' << f.key << '=' << f.get(obj);
    out << '\n';
}

template <class T>
void write_singleton(std::ostringstream& out, const std::vector<Field<T>>& fields, const T& obj) {
    for (const Field<T>& f : fields) out << f.key << " = " << f.get(obj) << '\n';
}

}  // namespace

Scenario parse_scenario_text(const std::string& text) {
    Scenario sc;
    sc.components = {};
    std::istringstream in(text);
    std::string raw, section;
    int line = 0;
    bool any = false;
    std::set<std::string> sections_seen;
    std::map<std::string, std::set<std::string>> singleton_keys;

    while (std::getline(in, raw)) {
        ++line;
        std::string s = raw.substr(0, raw.find('#'));
        s = trim(s);
        if (s.empty()) continue;
        any = true;
        if (s.front() == '[') {
            if (s.back() != ']') throw ParseError(line, "malformed section header");
            section = trim(s.substr(1, s.size() - 2));
            static const std::set<std::string> known = {
                "scenario", "network", "buses", "lines", "generators", "exciters", "governors",
                "loads",    "ltcs",    "oxls",  "fault", "plan"};
            if (!known.count(section)) throw ParseError(line, "unknown section [" + section + "]");
            if (!sections_seen.insert(section).second)
                throw ParseError(line, "duplicate section [" + section + "]");
            continue;
        }
        if (section.empty()) throw ParseError(line, "content before the first section");

        auto singleton = [&](auto& fields, auto& obj) {
            const auto eq = s.find('=');
            if (eq == std::string::npos) throw ParseError(line, "expected key = value");
            set_field(fields, obj, trim(s.substr(0, eq)), trim(s.substr(eq + 1)), line,
                      singleton_keys[section]);
        };
        auto& c = sc.components;
        if (section == "scenario") singleton(scenario_fields(), sc);
        else if (section == "network") singleton(network_fields(), sc.network);
        else if (section == "fault") singleton(fault_fields(), sc.fault);
        else if (section == "plan") singleton(plan_fields(), sc.plan);
        else if (section == "buses") sc.network.buses.push_back(parse_record(bus_fields(), s, line));
        else if (section == "lines") sc.network.lines.push_back(parse_record(line_fields(), s, line));
        else if (section == "generators") c.generators.push_back(parse_record(gen_fields(), s, line));
        else if (section == "exciters") c.exciters.push_back(parse_record(exciter_fields(), s, line));
        else if (section == "governors") c.governors.push_back(parse_record(governor_fields(), s, line));
        else if (section == "loads") c.loads.push_back(parse_record(load_fields(), s, line));
        else if (section == "ltcs") c.ltcs.push_back(parse_record(ltc_fields(), s, line));
        else if (section == "oxls") c.oxls.push_back(parse_record(oxl_fields(), s, line));
    }
    if (!any) throw ParseError(line == 0 ? 1 : line, "empty scenario file");
    validate(sc);
    return sc;
}

Scenario parse_scenario(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError(0, "cannot open " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_scenario_text(buf.str());
}

std::string write_scenario(const Scenario& sc) {
    std::ostringstream out;
    out << "[scenario]\n";
    write_singleton(out, scenario_fields(), sc);
    out << "\n[network]\n";
    write_singleton(out, network_fields(), sc.network);
    auto list = [&](const char* name, const auto& fields, const auto& items) {
        out << "\n[" << name << "]\n";
        for (const auto& it : items) write_record(out, fields, it);
    };
    const auto& c = sc.components;
    list("buses", bus_fields(), sc.network.buses);
    list("lines", line_fields(), sc.network.lines);
    list("generators", gen_fields(), c.generators);
    list("exciters", exciter_fields(), c.exciters);
    list("governors", governor_fields(), c.governors);
    list("loads", load_fields(), c.loads);
    list("ltcs", ltc_fields(), c.ltcs);
    list("oxls", oxl_fields(), c.oxls);
    out << "\n[fault]\n";
    write_singleton(out, fault_fields(), sc.fault);
    out << "\n[plan]\n";
    write_singleton(out, plan_fields(), sc.plan);
    return out.str();
}

}  // namespace ptcsim
