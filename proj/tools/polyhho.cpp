// Command-line experiment runner.  Exit codes: 0 success, 2 flagged nonconvergence, 1 error.
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "polyhho/bench.hpp"

using namespace polyhho;

namespace {

struct Common {
    std::string config_path;
    int k = 1;
    std::string family = "cartesian";
    std::string mode = "robust";
    double dt0 = 1.;
    double stop_tol = 1e-11;
    int max_iter = 200;
    bool verbose = false;
    std::string out;
    CLI::Option* k_opt = nullptr;
    CLI::Option* mode_opt = nullptr;
    CLI::Option* dt0_opt = nullptr;
    CLI::Option* tol_opt = nullptr;
    CLI::Option* iter_opt = nullptr;
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--config", c.config_path, "key=value solver configuration file");
    c.k_opt = app->add_option("--k", c.k, "polynomial degree")->check(CLI::Range(0, 3));
    app->add_option("--family", c.family, "mesh family")->check(CLI::IsMember({"cartesian", "hexagonal", "kershaw"}));
    c.mode_opt = app->add_option("--mode", c.mode, "robust or classic")->check(CLI::IsMember({"robust", "classic"}));
    c.dt0_opt = app->add_option("--dt0", c.dt0, "initial pseudo-time step");
    c.tol_opt = app->add_option("--stop-tol", c.stop_tol, "momentum residual tolerance");
    c.iter_opt = app->add_option("--max-iter", c.max_iter, "iteration cap");
    app->add_flag("--verbose", c.verbose, "print the residual history");
    app->add_option("--out", c.out, "output directory");
}

/// Config file values first, explicit flags override them.
RunConfig resolve(const Common& c) {
    RunConfig cfg;
    if (!c.config_path.empty()) cfg = load_config(c.config_path);
    if (c.k_opt->count() || c.config_path.empty()) cfg.k = c.k;
    if (c.mode_opt->count()) cfg.solver.mode = parse_mode(c.mode);
    if (c.dt0_opt->count()) cfg.solver.dt0 = c.dt0;
    if (c.tol_opt->count()) cfg.solver.stop_tol = c.stop_tol;
    if (c.iter_opt->count()) cfg.solver.max_iter = c.max_iter;
    cfg.solver.verbose = c.verbose;
    return cfg;
}

int finish_report(const ExperimentReport& rep, const Common& c, const std::string& stem) {
    std::cout << rep.csv();
    if (!c.out.empty()) rep.write(c.out, stem);
    if (!rep.all_converged()) {
        std::cerr << "nonconvergence flagged:\n" << rep.metadata_text();
        return 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pressure-robust HHO Navier-Stokes solver on polygonal meshes"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    Common kc, rc, cc;
    int k_levels = 4, r_levels = 1;
    std::size_t k_base = 10, r_base = 10;
    double k_nu = 0.025;
    CLI::Option* k_nu_opt = nullptr;
    double r_lambda = 1e6;
    CLI::Option* r_lambda_opt = nullptr;
    double c_re = 100., c_lambda = 0.;
    CLI::Option* c_lambda_opt = nullptr;
    CLI::Option* c_psi_opt = nullptr;
    std::string c_psi = "poly:cubic", c_mesh;
    std::size_t c_n = 16, c_samples = 101;
    bool c_stokes = false;
    PropertyOptions popts;

    auto* kov = app.add_subcommand("kovasznay", "Kovasznay convergence study");
    add_common(kov, kc);
    kov->add_option("--levels", k_levels, "number of refinement levels")->check(CLI::PositiveNumber);
    kov->add_option("--base-n", k_base, "cells per side on level 1")->check(CLI::PositiveNumber);
    k_nu_opt = kov->add_option("--nu", k_nu, "viscosity");

    auto* rob = app.add_subcommand("robustness", "irrotational forcing study, u = (-y, x), nu = 1");
    add_common(rob, rc);
    rob->add_option("--levels", r_levels, "number of refinement levels")->check(CLI::PositiveNumber);
    rob->add_option("--base-n", r_base, "cells per side on level 1")->check(CLI::PositiveNumber);
    r_lambda_opt = rob->add_option("--lambda", r_lambda, "forcing amplitude");

    auto* cav = app.add_subcommand("cavity", "lid-driven cavity with optional irrotational forcing");
    add_common(cav, cc);
    cav->add_option("--re", c_re, "Reynolds number 1/nu")->check(CLI::PositiveNumber);
    c_lambda_opt = cav->add_option("--lambda", c_lambda, "amplitude of lambda grad psi");
    c_psi_opt = cav->add_option("--psi", c_psi, "potential poly:<id>");
    cav->add_option("--n", c_n, "cells per side")->check(CLI::PositiveNumber);
    cav->add_option("--mesh", c_mesh, "mesh file, overrides --family and --n")->check(CLI::ExistingFile);
    cav->add_option("--samples", c_samples, "samples per centerline")->check(CLI::Range(2, 100000));
    cav->add_flag("--stokes", c_stokes, "drop the convective term");

    auto* prop = app.add_subcommand("proptest", "operator invariant suite");
    prop->add_option("--n", popts.n, "cells per side of the test meshes")->check(CLI::PositiveNumber);
    prop->add_option("--samples", popts.samples, "random draws per check")->check(CLI::PositiveNumber);
    prop->add_option("--seed", popts.seed, "random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*kov) {
            const RunConfig cfg = resolve(kc);
            StudyOptions o;
            o.k = cfg.k;
            o.family = parse_family(kc.family);
            o.levels = k_levels;
            o.base_n = k_base;
            o.nu = k_nu_opt->count() || kc.config_path.empty() ? k_nu : cfg.nu;
            o.solver = cfg.solver;
            return finish_report(run_kovasznay(o), kc, "kovasznay_k" + std::to_string(o.k) + "_" + kc.family);
        }
        if (*rob) {
            const RunConfig cfg = resolve(rc);
            StudyOptions o;
            o.k = cfg.k;
            o.family = parse_family(rc.family);
            o.levels = r_levels;
            o.base_n = r_base;
            o.lambda = r_lambda_opt->count() || rc.config_path.empty() ? r_lambda : cfg.lambda;
            o.solver = cfg.solver;
            return finish_report(run_robustness(o), rc,
                                 "robustness_k" + std::to_string(o.k) + "_" + mode_name(o.solver.mode));
        }
        if (*cav) {
            const RunConfig cfg = resolve(cc);
            CavityOptions o;
            o.re = c_re;
            o.lambda = c_lambda_opt->count() || cc.config_path.empty() ? c_lambda : cfg.lambda;
            o.psi = c_psi_opt->count() || cc.config_path.empty() ? c_psi : cfg.psi;
            o.k = cfg.k;
            o.family = parse_family(cc.family);
            o.n = c_n;
            if (!c_mesh.empty()) o.mesh = load_mesh(c_mesh);
            o.samples = c_samples;
            o.convection = !c_stokes;
            o.solver = cfg.solver;
            const CavityResult r = run_cavity(o);
            std::cout << "# cavity Re=" << o.re << " lambda=" << o.lambda << " k=" << o.k
                      << " mode=" << mode_name(o.solver.mode) << " N_dof=" << r.n_dof
                      << " iters=" << r.state.iterations << " converged=" << (r.state.converged ? 1 : 0)
                      << " residual=" << (r.state.residuals.empty() ? 0. : r.state.residuals.back())
                      << " seconds=" << r.seconds << '\n';
            std::cout << r.dat();
            if (!cc.out.empty()) {
                std::filesystem::create_directories(cc.out);
                std::ofstream f(std::filesystem::path(cc.out) / "cavity_profiles.dat");
                f << r.dat();
            }
            if (!r.state.converged) {
                std::cerr << "nonconvergence flagged: " << r.state.status << '\n';
                return 2;
            }
            return 0;
        }
        if (*prop) {
            const auto t0 = std::chrono::steady_clock::now();
            bool ok = true;
            for (const PropertyCheck& c : run_property_suite(popts)) {
                std::cout << (c.pass() ? "PASS " : "FAIL ") << c.name << ": " << c.value << " (tol " << c.tol << ")\n";
                ok = ok && c.pass();
            }
            std::cout << "seconds " << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()
                      << '\n';
            return ok ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
