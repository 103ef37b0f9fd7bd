// Command-line front end: describe, solve, verify, integrate, corpus.
//
// Exit codes: 0 success/PASS, 1 FAIL, 2 usage or parse error, 3 irregular
// Lagrangian, 4 integral not conserved, 5 L or g singular during a solve,
// 6 trajectory truncated.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "noether/corpus.hpp"
#include "noether/dynamics.hpp"
#include "noether/errors.hpp"
#include "noether/io.hpp"
#include "noether/killing.hpp"
#include "noether/simplify.hpp"

namespace {

using namespace noether;
using nlohmann::json;

enum Exit : int {
    kPass = 0,
    kFail = 1,
    kUsage = 2,
    kIrregular = 3,
    kNotConserved = 4,
    kSingular = 5,
    kTruncated = 6,
};

struct Loaded {
    LagrangianSystem system;
    std::vector<FirstIntegral> integrals;
};

std::string read_input(const std::string& path) {
    try {
        return read_text_file(path);
    } catch (const Error& e) {
        throw CLI::ValidationError("input", e.what());
    }
}

Loaded load_system(const std::string& path, std::uint64_t seed) {
    SystemFile file = parse_system_file(read_input(path));
    return {build_system(std::move(file.definition), seed), std::move(file.integrals)};
}

FirstIntegral pick_integral(const Loaded& l, const std::string& name, const std::string& text) {
    if (!text.empty()) return make_integral("N", parse(text, l.system.alphabet()));
    for (const auto& n : l.integrals)
        if (n.name == name) return n;
    throw CLI::ValidationError("--integral", "no integral named '" + name + "' in the system file");
}

ExprVector parse_list(const std::string& text, const Alphabet& a) {
    ExprVector out;
    for (const auto& part : split_top_level(text)) out.push_back(parse(part, a));
    return out;
}

std::vector<double> parse_numbers(const std::string& text) {
    std::vector<double> out;
    for (const auto& part : split_top_level(text)) {
        std::size_t used = 0;
        const std::string s(part);
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || s.find_first_not_of(" \t", used) != std::string::npos)
            throw CLI::ValidationError("state", "expected a number, got '" + s + "'");
        out.push_back(v);
    }
    return out;
}

json triple_json(const Triple& tr) {
    json xi = json::array();
    for (const Expr& e : tr.xi) xi.push_back(to_string(e));
    return {{"name", tr.name}, {"tau", to_string(tr.tau)}, {"xi", xi}, {"f", to_string(tr.f)},
            {"form", std::string(form_name(tr.form))}};
}

Triple simplified(Triple tr) {
    tr.tau = simplify(tr.tau);
    for (Expr& e : tr.xi) e = simplify(e);
    tr.f = simplify(tr.f);
    return tr;
}

void emit(const json& report, const std::string& path) {
    const std::string text = report.dump(2) + "\n";
    if (!path.empty()) write_text_file(path, text);
    std::cout << text;
}

CheckOptions check_options(int k, double tol, std::uint64_t seed) {
    CheckOptions o;
    o.k = k;
    o.tol = tol;
    o.seed = seed;
    return o;
}

void print_matrix(std::ostream& os, const ExprMatrix& m) {
    for (const auto& row : m) {
        os << "  [";
        for (std::size_t j = 0; j < row.size(); ++j) os << (j ? ", " : "") << to_string(simplify(row[j]));
        os << "]\n";
    }
}

// --- describe --------------------------------------------------------------

int cmd_describe(const std::string& path, std::uint64_t seed) {
    const Loaded l = load_system(path, seed);
    const LagrangianSystem& s = l.system;
    const Alphabet& a = s.alphabet();
    std::ostringstream os;
    os << "system: " << s.name() << "\n";
    os << "n = " << s.dim() << " (coordinates";
    for (const auto& c : a.coord_names()) os << " " << c;
    os << ")\n";
    if (!s.definition().params.empty()) {
        os << "parameters:";
        for (const auto& [name, v] : s.definition().params) os << " " << name << "=" << format_double(v);
        os << "\n";
    }
    os << "L = " << to_string(s.lagrangian()) << "\n";
    os << "p = dL/dqdot:\n";
    for (int i = 0; i < s.dim(); ++i) os << "  " << a.velocity(i).name << ": " << to_string(simplify(s.momentum()[i])) << "\n";
    os << "g = d2L/dqdot2:\n";
    print_matrix(os, s.hessian());
    os << "normal form qddot = Lambda(t, q, qdot):\n";
    if (s.accel().empty()) {
        os << "  (solved numerically per point)\n";
    } else {
        for (int i = 0; i < s.dim(); ++i) os << "  " << a.accel(i).name << " = " << to_string(simplify(s.accel()[i])) << "\n";
    }
    os << "regularity: |det g| > 1e-8 at " << s.regularity().points << " sampled points (min |det g| = "
       << s.regularity().min_abs_det << ")\n";
    for (const auto& n : l.integrals) os << "integral " << n.name << " = " << to_string(n.expr) << "\n";
    std::cout << os.str();
    return kPass;
}

// --- solve -----------------------------------------------------------------

struct SolveArgs {
    std::string system, integral, n_text, mode, tau = "0", r, h, out, report;
    double c = 0.0;
    bool simplify = false;
};

int cmd_solve(const SolveArgs& args, const CheckOptions& opts) {
    const Loaded l = load_system(args.system, opts.seed);
    const LagrangianSystem& sys = l.system;
    const Alphabet& a = sys.alphabet();
    if (args.integral.empty() == args.n_text.empty())
        throw CLI::ValidationError("solve", "give exactly one of --integral or --N");
    FirstIntegral n = pick_integral(l, args.integral, args.n_text);

    json report;
    report["command"] = "solve";
    report["system"] = sys.name();
    report["integral"] = {{"name", n.name}, {"expr", to_string(n.expr)}};
    report["seed"] = opts.seed;
    report["mode"] = args.mode;

    n.conservation = check_conservation(sys, n, opts);
    report["conservation"] = to_json(*n.conservation);
    if (!n.conservation->passed) {
        report["verdict"] = "NOT_CONSERVED";
        std::cerr << "error: " << n.conservation->summary() << "\n";
        emit(report, args.report);
        return kNotConserved;
    }

    Triple tr;
    std::string method;
    if (args.mode == "onflow-simplest") {
        tr = solve_onflow_simplest(sys, n, args.c, opts);
        method = "on-flow solution with vanishing boundary term: tau = -N/(L+c), xi = tau*qdot";
    } else if (args.mode == "onflow-R") {
        if (args.r.empty()) throw CLI::ValidationError("--R", "mode onflow-R needs --R");
        const ExprVector r = parse_list(args.r, a);
        if (static_cast<int>(r.size()) != sys.dim())
            throw CLI::ValidationError("--R", "expected " + std::to_string(sys.dim()) + " components");
        tr = solve_onflow_with_R(sys, n, r, args.c, opts);
        method = "on-flow solution with vanishing boundary term and free R: tau = -(N + p.R)/(L+c), xi = R + tau*qdot";
    } else if (args.mode == "strong") {
        tr = solve_strong(sys, n, parse(args.tau, a), opts);
        method = "general strong solution: xi = tau*qdot - g^-1 dN/dqdot, f = tau*L + N - p.g^-1 dN/dqdot";
    } else if (args.mode == "alt-strong") {
        tr = solve_alt_strong_trivial_gauge(sys, n, args.c, opts);
        method = "alternative-form strong solution with trivial gauge: xi = -g^-1 dN/dqdot, "
                 "tau = -(N - p.g^-1 dN/dqdot)/(L+c)";
    } else {
        throw CLI::ValidationError("--mode", "unknown mode '" + args.mode + "'");
    }
    if (!args.h.empty()) {
        tr = multiplicity_transform(sys, tr, parse(args.h, a), args.c, opts);
        method += "; then boundary term moved to h by adding (d, qdot d, L d), d = (h - f)/(L+c)";
    }
    tr.name = n.name + "_" + args.mode;
    if (args.simplify) tr = simplified(tr);
    report["method"] = method;
    report["triple"] = triple_json(tr);

    const TripleReport check = verify_triple(sys, tr, tr.form, &n, opts);
    report["verification"] = {{"killing", to_json(check.killing)}, {"integral", to_json(*check.integral)}};
    report["verdict"] = check.passed() ? "PASS" : "FAIL";
    if (!args.out.empty()) write_text_file(args.out, format_triple_file(tr));
    emit(report, args.report);
    if (!check.passed()) {
        std::cerr << check.killing.summary() << "\n" << check.integral->summary() << "\n";
        return kFail;
    }
    return kPass;
}

// --- verify ----------------------------------------------------------------

struct VerifyArgs {
    std::string system, triple, form, integral, n_text, report;
};

int cmd_verify(const VerifyArgs& args, const CheckOptions& opts) {
    const Loaded l = load_system(args.system, opts.seed);
    const LagrangianSystem& sys = l.system;
    const Triple tr = parse_triple_file(read_input(args.triple), sys.alphabet());
    Form mode = tr.form;
    if (!args.form.empty()) {
        const auto f = parse_form(args.form);
        if (!f) throw CLI::ValidationError("--form", "unknown form '" + args.form + "'");
        mode = *f;
    }
    std::optional<FirstIntegral> n;
    if (!args.integral.empty() || !args.n_text.empty()) n = pick_integral(l, args.integral, args.n_text);

    const TripleReport r = verify_triple(sys, tr, mode, n ? &*n : nullptr, opts);
    json report;
    report["command"] = "verify";
    report["system"] = sys.name();
    report["triple"] = triple_json(tr);
    report["form"] = std::string(form_name(mode));
    report["seed"] = opts.seed;
    report["killing"] = to_json(r.killing);
    if (r.integral) report["integral"] = to_json(*r.integral);
    report["verdict"] = r.passed() ? "PASS" : "FAIL";
    emit(report, args.report);
    if (!r.passed()) {
        if (!r.killing.passed) std::cerr << "witness: " << r.killing.summary() << "\n";
        if (r.integral && !r.integral->passed) std::cerr << "witness: " << r.integral->summary() << "\n";
        return kFail;
    }
    return kPass;
}

// --- integrate -------------------------------------------------------------

struct IntegrateArgs {
    std::string system, q0, qdot0, monitor, out, report;
    double t0 = 0.0, t1 = 1.0, dt = 1e-3;
};

int cmd_integrate(const IntegrateArgs& args, std::uint64_t seed) {
    const Loaded l = load_system(args.system, seed);
    const LagrangianSystem& sys = l.system;
    InitialState init{args.t0, parse_numbers(args.q0), parse_numbers(args.qdot0)};
    if (static_cast<int>(init.q.size()) != sys.dim() || static_cast<int>(init.qdot.size()) != sys.dim())
        throw CLI::ValidationError("state", "--q0 and --qdot0 need " + std::to_string(sys.dim()) + " values each");
    const Trajectory traj = integrate(sys, init, args.t1, args.dt);

    std::vector<FirstIntegral> monitored;
    if (args.monitor == "all") {
        monitored = l.integrals;
    } else if (!args.monitor.empty()) {
        for (const auto& name : split_top_level(args.monitor)) {
            const std::string trimmed(name.substr(name.find_first_not_of(' ')));
            monitored.push_back(pick_integral(l, trimmed, ""));
        }
    }

    json report;
    report["command"] = "integrate";
    report["system"] = sys.name();
    report["method"] = traj.method;
    report["t0"] = traj.t0;
    report["t1"] = traj.t1;
    report["dt"] = traj.dt;
    report["nodes"] = traj.size();
    report["truncated"] = traj.truncated;
    if (traj.truncated) report["truncation_reason"] = traj.truncation_reason;
    report["accel_cross_check"] = traj.accel_cross_check;
    report["seed"] = seed;
    json drifts = json::array();
    for (const auto& n : monitored) drifts.push_back(to_json(monitor_drift(sys, traj, n)));
    report["drift"] = drifts;

    if (!args.out.empty()) {
        std::ostringstream csv;
        write_csv(csv, traj, sys.dim());
        write_text_file(args.out, csv.str());
    }
    emit(report, args.report);
    if (traj.truncated) {
        std::cerr << "trajectory truncated: " << traj.truncation_reason << "\n";
        return kTruncated;
    }
    return kPass;
}

// --- corpus ----------------------------------------------------------------

int cmd_corpus_list() {
    std::cout << "freeparticle  L = qdot^2/2; eight point symmetries, five strong triples\n"
              << "isochrony     L = xdot*ydot - G(x)*y; three integrals (--G linear|inverse_cube|radical, --c)\n"
              << "kepler3d      L = |v|^2/2 + mu/|r|; energy, angular momentum, Laplace-Runge-Lenz\n";
    return kPass;
}

struct ExportArgs {
    std::string name, g, out, triples;
    double c = 0.0;
    bool c_given = false;
};

int cmd_corpus_export(const ExportArgs& args) {
    CorpusEntry e;
    if (args.name == "isochrony") {
        GChoice g = GChoice::linear;
        if (!args.g.empty()) {
            const auto parsed = parse_g_choice(args.g);
            if (!parsed) throw CLI::ValidationError("--G", "unknown G choice '" + args.g + "'");
            g = *parsed;
        }
        double c = args.c;
        if (!args.c_given && g == GChoice::radical) c = 1.0;
        try {
            e = load_isochrony(g, c);
        } catch (const std::invalid_argument& err) {
            throw CLI::ValidationError("--G", err.what());
        }
    } else {
        if (!args.g.empty() || args.c_given) throw CLI::ValidationError("--G", "--G and --c apply to isochrony only");
        try {
            e = load(args.name);
        } catch (const std::invalid_argument& err) {
            throw CLI::ValidationError("corpus", err.what());
        }
    }
    std::string text;
    for (const auto& note : e.notes) text += "# " + note + "\n";
    text += "\n" + format_system_file(e.system.definition(), e.integrals);
    if (args.out.empty())
        std::cout << text;
    else
        write_text_file(args.out, text);
    if (!args.triples.empty()) {
        std::filesystem::create_directories(args.triples);
        for (const auto& tr : e.triples)
            write_text_file((std::filesystem::path(args.triples) / (tr.name + ".triple")).string(),
                            format_triple_file(tr));
    }
    return kPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Noether symmetries and first integrals of Lagrangian systems"};
    app.require_subcommand(1);
    int k = 100;
    double tol = 1e-9;
    std::uint64_t seed = kDefaultSeed;
    auto add_check_flags = [&](CLI::App* sub) {
        sub->add_option("--k", k, "sample points per identity check")->check(CLI::PositiveNumber);
        sub->add_option("--tol", tol, "relative tolerance")->check(CLI::PositiveNumber);
        sub->add_option("--seed", seed, "random seed");
    };

    std::string describe_path;
    auto* describe = app.add_subcommand("describe", "print momenta, Hessian, normal form and regularity");
    describe->add_option("system", describe_path, "system file")->required();
    describe->add_option("--seed", seed, "random seed");

    SolveArgs solve_args;
    auto* solve = app.add_subcommand("solve", "find a triple whose Noether integral is a given first integral");
    solve->add_option("system", solve_args.system, "system file")->required();
    solve->add_option("--integral", solve_args.integral, "integral name from the system file");
    solve->add_option("--N", solve_args.n_text, "integral expression");
    solve->add_option("--mode", solve_args.mode, "solver")
        ->required()
        ->check(CLI::IsMember({"onflow-simplest", "onflow-R", "strong", "alt-strong"}));
    solve->add_option("--tau", solve_args.tau, "time change for the strong solver");
    solve->add_option("--R", solve_args.r, "comma-separated R vector for onflow-R");
    solve->add_option("--c", solve_args.c, "shift added to L in denominators");
    solve->set_help_flag("--help", "print this help message and exit");  // -h would clash with --h
    solve->add_option("--h", solve_args.h, "move the boundary term to this expression");
    solve->add_option("--out", solve_args.out, "write the triple file here");
    solve->add_option("--report", solve_args.report, "also write the JSON report here");
    solve->add_flag("--simplify", solve_args.simplify, "simplify the triple before writing");
    add_check_flags(solve);

    VerifyArgs verify_args;
    auto* verify = app.add_subcommand("verify", "check a triple against the Killing-type equation");
    verify->add_option("system", verify_args.system, "system file")->required();
    verify->add_option("triple", verify_args.triple, "triple file")->required();
    verify->add_option("--form", verify_args.form, "strong | onflow | alt-strong | alt-onflow (default: claimed)");
    verify->add_option("--integral", verify_args.integral, "also check the triple produces this integral");
    verify->add_option("--N", verify_args.n_text, "integral expression to check against");
    verify->add_option("--report", verify_args.report, "also write the JSON report here");
    add_check_flags(verify);

    IntegrateArgs int_args;
    auto* integ = app.add_subcommand("integrate", "RK4 trajectory with first-integral drift monitoring");
    integ->add_option("system", int_args.system, "system file")->required();
    integ->add_option("--q0", int_args.q0, "initial coordinates, comma-separated")->required();
    integ->add_option("--qdot0", int_args.qdot0, "initial velocities, comma-separated")->required();
    integ->add_option("--t0", int_args.t0, "start time");
    integ->add_option("--t1", int_args.t1, "end time")->required();
    integ->add_option("--dt", int_args.dt, "step")->check(CLI::PositiveNumber);
    integ->add_option("--monitor", int_args.monitor, "integral names, comma-separated, or 'all'");
    integ->add_option("--out", int_args.out, "CSV trajectory output");
    integ->add_option("--report", int_args.report, "also write the JSON report here");
    integ->add_option("--seed", seed, "random seed");

    auto* corpus = app.add_subcommand("corpus", "built-in example systems");
    corpus->require_subcommand(1);
    auto* list = corpus->add_subcommand("list", "list corpus entries");
    ExportArgs export_args;
    auto* exp = corpus->add_subcommand("export", "write a corpus entry as a system file");
    exp->add_option("name", export_args.name, "entry name")->required();
    exp->add_option("--G", export_args.g, "isochrony G: linear | inverse_cube | radical");
    auto* c_opt = exp->add_option("--c", export_args.c, "isochrony constant c");
    exp->add_option("--out", export_args.out, "output path (default stdout)");
    exp->add_option("--triples", export_args.triples, "directory for the entry's triple files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }
    export_args.c_given = c_opt->count() > 0;

    const CheckOptions opts = check_options(k, tol, seed);
    try {
        if (describe->parsed()) return cmd_describe(describe_path, seed);
        if (solve->parsed()) return cmd_solve(solve_args, opts);
        if (verify->parsed()) return cmd_verify(verify_args, opts);
        if (integ->parsed()) return cmd_integrate(int_args, seed);
        if (list->parsed()) return cmd_corpus_list();
        if (exp->parsed()) return cmd_corpus_export(export_args);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kUsage;
    } catch (const RegularityError& e) {
        std::cerr << "irregular Lagrangian: " << e.what() << "\n";
        return kIrregular;
    } catch (const NotConservedError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNotConserved;
    } catch (const LagrangianVanishesError& e) {
        std::cerr << "singular: " << e.what() << "\n";
        return kSingular;
    } catch (const GInversionError& e) {
        std::cerr << "singular: " << e.what() << "\n";
        return kSingular;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFail;
    }
    return kUsage;
}
