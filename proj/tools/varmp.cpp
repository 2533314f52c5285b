// varmp: hypothesis checks, spectra, geometry certificates and critical
// points for coupled (p1,p2)-Laplacian systems.
//
// exit codes: 0 ok, 2 hypothesis fail, 3 config error, 4 no convergence,
// 5 geometry failure, 1 anything unexpected.

#include <varmp/json_io.hpp>
#include <varmp/varmp.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace varmp;

namespace {

enum Exit { ok = 0, internal = 1, hypothesis_fail = 2, config_error = 3, no_convergence = 4, geometry_fail = 5 };

constexpr const char* cor1_model = R"(family = power
p1 = 2
p2 = 2
q1 = 4
q2 = 4
gamma1 = 1.5
gamma2 = 1.5
gamma3 = 2
gamma4 = 2.1
c_star = 1
N = 3
)";

struct Options {
    std::string model;
    std::string mesh = "interval:200";
    std::string out;
    unsigned long long seed = 0;
    bool json = false;
    bool quiet = false;
    SolveConfig solve;
    double p = 2.0;
    int modes = 0;
    int count = 3;
    int sphere_samples = 1000;
    double eig_tol = 1e-8;
};

json run_config(const Options& o, const std::string& command)
{
    json c = {{"command", command}, {"model", o.model}, {"mesh", o.mesh}, {"seed", o.seed}};
    c["solver"] = to_json(o.solve);
    c["sphere_samples"] = o.sphere_samples;
    c["eigen_tol"] = jnum(o.eig_tol);
    return c;
}

void emit(const Options& o, const json& j, const std::string& file)
{
    if (!o.out.empty())
        write_json_atomic(fs::path(o.out) / file, j);
    if (o.json)
        std::cout << j.dump(2) << "\n";
}

void note(const Options& o, const std::string& s)
{
    if (!o.quiet && !o.json)
        std::cout << s << "\n";
}

std::string fmt(double v, int prec = 6)
{
    std::ostringstream os;
    os << std::setprecision(prec) << v;
    return os.str();
}

void write_field_csv(const fs::path& path, const Mesh& mesh, const Field& f, const char* name)
{
    std::ostringstream os;
    os << (mesh.dimension() == 1 ? "node,x," : "node,x,y,") << name << "\n" << std::setprecision(17);
    for (std::size_t i = 0; i < mesh.n_nodes(); ++i) {
        os << i << ',' << mesh.nodes()[i].x;
        if (mesh.dimension() == 2)
            os << ',' << mesh.nodes()[i].y;
        os << ',' << f[static_cast<Eigen::Index>(i)] << '\n';
    }
    write_text_atomic(path, os.str());
}

void write_solution(const fs::path& dir, const Problem& P, const SolveResult& r, const json& summary)
{
    std::ostringstream state, trace;
    write_state_csv(state, P.mesh(), r.state, differential(P, r.state));
    write_trace(trace, r.trace);
    write_text_atomic(dir / "state.csv", state.str());
    write_text_atomic(dir / "trace.csv", trace.str());
    write_json_atomic(dir / "result.json", summary);
}

Exit classification_exit(Classification c) { return c == Classification::converged ? ok : no_convergence; }

// --- subcommands --------------------------------------------------------------

void print_report(const HypothesisReport& rep)
{
    std::cout << std::left << std::setw(12) << "condition" << std::setw(14) << "verdict" << "note\n";
    for (const auto& [k, v] : rep.verdicts) {
        std::string verdict = to_string(v);
        if (rep.informational.count(k))
            verdict += "*";
        const auto w = rep.witnesses.find(k);
        std::cout << std::setw(12) << k << std::setw(14) << verdict << (w == rep.witnesses.end() ? "" : w->second.note)
                  << "\n";
    }
    std::cout << "overall: " << (rep.overall() ? "pass" : "fail") << "   (* informational)\n";
}

int cmd_check(const Options& o)
{
    const ModelSpec spec = load_model_spec(o.model);
    const HypothesisReport rep = check_model(spec, o.seed);
    json j = {{"config", run_config(o, "check")}, {"model", to_json(spec)}, {"report", to_json(rep)}};
    emit(o, j, "check.json");
    if (!o.json && !o.quiet)
        print_report(rep);
    return rep.overall() ? ok : hypothesis_fail;
}

int cmd_eigen(const Options& o)
{
    const Mesh mesh = mesh_from_spec(o.mesh);
    const SpectralResult r = first_eigenpair(o.p, mesh, o.eig_tol);
    json j = {{"config", run_config(o, "eigen")}, {"p", jnum(o.p)}, {"lambda", jnum(r.lambda)},
              {"residual", jnum(r.residual)}, {"iterations", r.iterations}};
    if (o.modes > 0) {
        const SubspaceLadder ladder = subspace_ladder(o.p, mesh, o.modes, o.eig_tol);
        j["ladder"] = {{"lambda_hat", jnums(ladder.lambda_hat)}, {"mode_eigenvalues", jnums(ladder.mode_eigenvalues)}};
    }
    if (!o.out.empty())
        write_field_csv(fs::path(o.out) / "phi.csv", mesh, r.phi, "phi");
    emit(o, j, "eigen.json");
    note(o, "lambda_1 = " + fmt(r.lambda, 10) + "  (p = " + fmt(o.p) + ", residual " + fmt(r.residual, 3) + ", "
                + std::to_string(r.iterations) + " iterations)");
    return ok;
}

GeometryReport certify(const Problem& P, const ModelSet& m, const Options& o)
{
    return verify_geometry(P, m, o.seed, o.sphere_samples);
}

void print_geometry(const Options& o, const GeometryReport& g)
{
    note(o, "lambda_bar " + fmt(g.lambda_bar) + "  sigma* " + fmt(g.sigma_star) + "  R0 " + fmt(g.R0) + "  rho0 "
                + fmt(g.rho0));
    note(o, "e: J = " + fmt(g.e_energy) + ", |e|_W = " + fmt(g.e_norm) + " after " + std::to_string(g.doubling.size())
                + " doublings");
    note(o, "sphere: " + std::to_string(g.sphere_samples) + " samples, min J " + fmt(g.sphere_min_J) + ", "
                + std::to_string(g.sphere_violations) + " below rho0");
}

int cmd_geometry(const Options& o)
{
    const ModelSet m = build_models(load_model_spec(o.model));
    const Mesh mesh = mesh_from_spec(o.mesh);
    const Problem P(mesh, m);
    const GeometryReport g = certify(P, m, o);
    emit(o, {{"config", run_config(o, "geometry")}, {"geometry", to_json(g)}}, "geometry.json");
    print_geometry(o, g);
    return g.certified() ? ok : geometry_fail;
}

int cmd_solve(const Options& o)
{
    const ModelSet m = build_models(load_model_spec(o.model));
    const Mesh mesh = mesh_from_spec(o.mesh);
    const Problem P(mesh, m);
    const GeometryReport g = certify(P, m, o);
    const SolveResult r = mountain_pass(P, g, o.solve);
    const Residuals res = residual_check(P, r.state);
    json j = {{"config", run_config(o, "solve")}, {"geometry", to_json(g)}, {"result", to_json(r)}};
    j["result"]["residual"] = {jnum(res.res_u), jnum(res.res_v)};
    if (!o.out.empty())
        write_solution(o.out, P, r, j);
    if (o.json)
        std::cout << j.dump(2) << "\n";
    note(o, std::string(to_string(r.classification)) + ": level " + fmt(r.level, 10) + ", cps " + fmt(r.cps_final, 3)
                + ", " + std::to_string(r.iterations) + " iterations");
    for (const auto& w : r.warnings)
        note(o, "warning: " + w);
    return classification_exit(r.classification);
}

int cmd_multiplicity(const Options& o)
{
    const ModelSet m = build_models(load_model_spec(o.model));
    const Mesh mesh = mesh_from_spec(o.mesh);
    const Problem P(mesh, m);
    const SubspaceLadder l1 = subspace_ladder(m.p1, mesh, o.count, o.eig_tol);
    const SubspaceLadder l2 = m.p2 == m.p1 ? l1 : subspace_ladder(m.p2, mesh, o.count, o.eig_tol);
    const MultiplicityResult mr = symmetric_multiplicity(P, l1, l2, o.count, o.solve);
    json list = json::array();
    for (std::size_t k = 0; k < mr.solutions.size(); ++k) {
        const auto& r = mr.solutions[k];
        json entry = to_json(r);
        if (!o.out.empty()) {
            const fs::path dir = fs::path(o.out) / ("solution_" + std::to_string(k + 1));
            write_solution(dir, P, r, {{"config", run_config(o, "multiplicity")}, {"result", entry}});
            entry["directory"] = dir.string();
        }
        list.push_back(entry);
        note(o, "#" + std::to_string(k + 1) + "  level " + fmt(r.level, 10) + "  cps " + fmt(r.cps_final, 3));
    }
    for (const auto& w : mr.warnings)
        note(o, "warning: " + w);
    emit(o, {{"config", run_config(o, "multiplicity")}, {"requested", o.count}, {"solutions", list},
             {"warnings", json(mr.warnings)}},
         "multiplicity.json");
    return static_cast<int>(mr.solutions.size()) >= o.count ? ok : no_convergence;
}

int cmd_demo(Options o)
{
    std::istringstream in(cor1_model);
    const ModelSpec spec = parse_model_spec(in);
    o.model = "<bundled cor1 pass-set>";
    const HypothesisReport rep = check_model(spec, o.seed);
    const ModelSet m = build_models(spec);
    const Mesh mesh = mesh_from_spec(o.mesh);
    const Problem P(mesh, m);
    const SpectralResult e1 = first_eigenpair(m.p1, mesh, o.eig_tol);
    const GeometryReport g = certify(P, m, o);
    const SolveResult r = mountain_pass(P, g, o.solve);
    json verdicts = json::object();
    for (const auto& [k, v] : rep.verdicts)
        verdicts[k] = to_string(v);
    const json j = {{"config", run_config(o, "demo")},
                    {"check", {{"overall", rep.overall() ? "pass" : "fail"}, {"verdicts", verdicts}}},
                    {"eigen", {{"p", jnum(m.p1)}, {"lambda", jnum(e1.lambda)}, {"iterations", e1.iterations}}},
                    {"geometry", {{"certified", g.certified()}, {"R0", jnum(g.R0)}, {"rho0", jnum(g.rho0)},
                                  {"sphere_min_J", jnum(g.sphere_min_J)}, {"e_energy", jnum(g.e_energy)}}},
                    {"solve", to_json(r)}};
    emit(o, j, "summary.json");
    if (!o.json && !o.quiet) {
        std::cout << std::left;
        auto row = [](const std::string& stage, const std::string& value) {
            std::cout << "  " << std::setw(10) << stage << value << "\n";
        };
        std::cout << "demo on " << o.mesh << " (seed " << o.seed << ")\n";
        row("check", rep.overall() ? "pass" : "fail");
        row("eigen", "lambda_1 = " + fmt(e1.lambda, 8));
        row("geometry", std::string(g.certified() ? "certified" : "not certified") + ", R0 = " + fmt(g.R0)
                            + ", rho0 = " + fmt(g.rho0));
        row("solve", std::string(to_string(r.classification)) + ", level = " + fmt(r.level, 8) + ", cps = "
                         + fmt(r.cps_final, 3));
    }
    if (!rep.overall())
        return hypothesis_fail;
    if (!g.certified())
        return geometry_fail;
    return classification_exit(r.classification);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Variational solver for coupled (p1,p2)-Laplacian systems"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* c) {
        c->add_option("--seed", o.seed, "sampling seed")->capture_default_str();
        c->add_flag("--json", o.json, "print the JSON report on stdout");
        c->add_flag("--quiet", o.quiet, "suppress the human-readable summary");
        c->add_option("--out", o.out, "output directory");
    };
    auto model_arg = [&](CLI::App* c) { c->add_option("model", o.model, "model file")->required()->check(CLI::ExistingFile); };
    auto mesh_opt = [&](CLI::App* c) {
        c->add_option("--mesh", o.mesh, "interval:<n>[:<length>], square:<nx>x<ny> or a mesh file")->capture_default_str();
    };
    auto solver_opts = [&](CLI::App* c) {
        c->add_option("--tol", o.solve.tol_cps, "CPS tolerance")->capture_default_str();
        c->add_option("--max-iters", o.solve.max_iters, "iteration cap")->capture_default_str();
        c->add_option("--path-points", o.solve.path_points, "points on the mountain-pass path")->capture_default_str();
        c->add_option("--path-sweeps", o.solve.path_sweeps, "path deformation sweeps")->capture_default_str();
        c->add_option("--dedupe", o.solve.dedupe_distance, "W-distance for duplicates (0: 1e-2 x diameter)")
            ->capture_default_str();
    };

    auto* check = app.add_subcommand("check", "verify the structural and growth hypotheses of a model");
    model_arg(check);
    common(check);

    auto* eigen = app.add_subcommand("eigen", "first eigenpair of the Dirichlet p-Laplacian");
    eigen->add_option("--p", o.p, "exponent p > 1")->capture_default_str();
    eigen->add_option("--modes", o.modes, "also build the subspace ladder to this depth")->capture_default_str();
    eigen->add_option("--eig-tol", o.eig_tol, "quotient tolerance")->capture_default_str();
    mesh_opt(eigen);
    common(eigen);

    auto* geometry = app.add_subcommand("geometry", "certify the mountain-pass geometry");
    model_arg(geometry);
    mesh_opt(geometry);
    geometry->add_option("--samples", o.sphere_samples, "sphere samples")->capture_default_str();
    common(geometry);

    auto* solve = app.add_subcommand("solve", "mountain-pass critical point");
    model_arg(solve);
    mesh_opt(solve);
    solver_opts(solve);
    common(solve);

    auto* multiplicity = app.add_subcommand("multiplicity", "symmetric critical points from mode seeds");
    model_arg(multiplicity);
    mesh_opt(multiplicity);
    multiplicity->add_option("--count", o.count, "number of critical points")->capture_default_str();
    solver_opts(multiplicity);
    common(multiplicity);

    auto* demo = app.add_subcommand("demo", "check, eigen, geometry and solve on the bundled pass-set model");
    std::string demo_mesh = "interval:100";
    demo->add_option("--mesh", demo_mesh, "mesh spec")->capture_default_str();
    common(demo);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return config_error;
    }
    if (demo->parsed())
        o.mesh = demo_mesh;

    try {
        o.solve.seed = o.seed;
        o.solve.validate();
        if (check->parsed()) return cmd_check(o);
        if (eigen->parsed()) return cmd_eigen(o);
        if (geometry->parsed()) return cmd_geometry(o);
        if (solve->parsed()) return cmd_solve(o);
        if (multiplicity->parsed()) return cmd_multiplicity(o);
        if (demo->parsed()) return cmd_demo(o);
    } catch (const GeometryError& e) {
        std::cerr << "geometry failure: " << e.what() << "\n";
        return geometry_fail;
    } catch (const ConvergenceError& e) {
        std::cerr << "no convergence: " << e.what() << "\n";
        return no_convergence;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const WindowEmptyError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return internal;
    }
    return internal;
}
