#include "ptcsim/cli.hpp"

#include "ptcsim/power_system.hpp"
#include "ptcsim/report.hpp"
#include "ptcsim/scenario_io.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <ostream>

namespace ptcsim {

namespace {

struct Options {
    std::string scenario;
    std::string model = "longterm";
    std::string method = "ptc";
    std::optional<double> t_end, t0, t1, h, delta0, delta_max, f_tol;
    std::optional<int> max_iters;
    std::string out_dir;
};

struct Timed {
    RunReport report;
    std::string csv;
};

// A path to a scenario file, or the label of a bundled scenario.
Scenario load_scenario(const std::string& where) {
    if (!std::filesystem::exists(where)) {
        for (const char* label : {"stable", "qss_difficulty", "unstable"})
            if (where == label) return bundled_scenario(where);
    }
    return parse_scenario(where);
}

RunPlan plan_for(const Scenario& sc, const Options& o, Method method) {
    const ModelKind kind = o.model == "qss" || method == Method::QssTrapWithPtcFallback
                               ? ModelKind::Qss
                               : ModelKind::LongTerm;
    RunPlan plan = make_plan(sc, kind, method);
    if (o.t_end) plan.t_end = *o.t_end;
    if (o.t0) plan.t0 = *o.t0;
    if (o.t1) plan.t1 = *o.t1;
    if (o.h) plan.trap.h = *o.h;
    if (o.delta0) plan.ptc.delta0 = *o.delta0;
    if (o.delta_max) plan.ptc.delta_max = *o.delta_max;
    if (o.f_tol) plan.ptc.f_tol = *o.f_tol;
    if (o.max_iters) plan.ptc.max_iters = *o.max_iters;
    plan.validate();
    return plan;
}

// Builds its own problem so that concurrent runs share nothing mutable.
Timed execute(const Scenario& sc, const RunPlan& plan) {
    const auto start = std::chrono::steady_clock::now();
    const HybridSystem sys = build_problem(sc, plan.model_kind);
    RunResult res = run_plan(sys, plan);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {make_report(sc.label, plan, res, wall), trajectory_csv(sys.names, res.trajectory)};
}

Method parse_method(const std::string& m) {
    if (m == "trap") return Method::Trapezoidal;
    if (m == "qss-fallback") return Method::QssTrapWithPtcFallback;
    return Method::Ptc;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error("cannot write " + p.string());
    f << text;
}

void add_run_flags(CLI::App& app, Options& o) {
    app.set_help_flag("--help", "Print this help message and exit");
    app.add_option("--scenario", o.scenario,
                   "Scenario file, or a bundled label: stable, qss_difficulty, unstable");
    app.add_option("--model", o.model, "Model for the run")
        ->check(CLI::IsMember({"longterm", "qss"}))
        ->capture_default_str();
    app.add_option("--t-end", o.t_end, "Simulation end time in s (default: scenario plan, 300)");
    app.add_option("--t0", o.t0, "Long-term run-up before pseudo-transient continuation, s (default 5)");
    app.add_option("--t1", o.t1, "Long-term run-up before the QSS model, s (default 30)");
    app.add_option("--h", o.h, "Trapezoidal step in s (default 0.05)");
    app.add_option("--delta0", o.delta0, "Initial pseudo-time step (default 0.1)");
    app.add_option("--delta-max", o.delta_max, "Pseudo-time step cap (default 1e4)");
    app.add_option("--f-tol", o.f_tol, "Steady-state residual tolerance (default 1e-6)");
    app.add_option("--max-iters", o.max_iters, "Pseudo-transient iteration bound (default 500)");
    app.add_option("--out", o.out_dir, "Directory for CSV trajectories and reports");
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Pseudo-transient continuation for power-system DAEs with discrete events"};
    app.footer(
        "Exit codes: 0 converged or completed, 1 usage or input error, 2 instability "
        "detected, 3 numerical failure.\nScenario values override the listed defaults; "
        "flags override the scenario.");
    Options o;
    add_run_flags(app, o);
    app.add_option("--method", o.method, "Solution method")
        ->check(CLI::IsMember({"trap", "ptc", "qss-fallback"}))
        ->capture_default_str();

    Options co;
    CLI::App* compare =
        app.add_subcommand("compare", "Run the trapezoidal baseline and pseudo-transient "
                                      "continuation side by side");
    add_run_flags(*compare, co);

    std::string export_label;
    CLI::App* exp = app.add_subcommand("export", "Print a bundled scenario in file format");
    exp->set_help_flag("--help", "Print this help message and exit");
    exp->add_option("label", export_label, "stable, qss_difficulty or unstable")->required();

    // CLI11 wants argv order reversed when given a vector.
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.require_subcommand(0, 1);
    try {
        app.parse(rev);
        if (!*exp && (*compare ? co.scenario : o.scenario).empty())
            throw CLI::RequiredError("--scenario");
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 1;
    }

    try {
        if (*exp) {
            out << write_scenario(bundled_scenario(export_label));
            return 0;
        }
        if (*compare) {
            const Scenario sc = load_scenario(co.scenario);
            const RunPlan base_plan = plan_for(sc, co, Method::Trapezoidal);
            const RunPlan ptc_plan = plan_for(sc, co, Method::Ptc);
            auto base = std::async(std::launch::async, execute, std::cref(sc), std::cref(base_plan));
            auto ptc = std::async(std::launch::async, execute, std::cref(sc), std::cref(ptc_plan));
            const Timed b = base.get();
            const Timed p = ptc.get();
            const std::string text = format_comparison(b.report, p.report);
            if (!co.out_dir.empty()) {
                std::filesystem::path dir(co.out_dir);
                std::filesystem::create_directories(dir);
                write_file(dir / "baseline.csv", b.csv);
                write_file(dir / "ptc.csv", p.csv);
                write_file(dir / "baseline_report.txt", format_report(b.report));
                write_file(dir / "ptc_report.txt", format_report(p.report));
                write_file(dir / "compare.txt", text);
            }
            out << text;
            return std::max(exit_code(b.report.status), exit_code(p.report.status));
        }
        const Scenario sc = load_scenario(o.scenario);
        const RunPlan plan = plan_for(sc, o, parse_method(o.method));
        const Timed r = execute(sc, plan);
        const std::string text = format_report(r.report);
        if (!o.out_dir.empty()) {
            std::filesystem::path dir(o.out_dir);
            std::filesystem::create_directories(dir);
            write_file(dir / "trajectory.csv", r.csv);
            write_file(dir / "report.txt", text);
        }
        out << text;
        return exit_code(r.report.status);
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return 1;
    } catch (const ValidationError& e) {
        err << "invalid scenario: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return 3;
    }
}

}  // namespace ptcsim
