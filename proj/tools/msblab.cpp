/*
 * Command-line front end for the bridge laboratory.
 *
 *   msblab rate-sweep  --config c.json [--out dir]   total KL vs marginal count
 *   msblab eps-sweep   --config c.json [--out dir]   single-interval KL vs length
 *   msblab bound-check --config c.json [--out dir]   a priori bound per mesh
 *   msblab simulate    --config c.json [--out dir]   marginal flow (+ particles)
 *   msblab bridge      --config c.json [--out dir]   one bridge, duals + coupling
 *
 * Exit status: 0 when every asserted check passes, 1 when a sweep finishes
 * but a check fails, 2 on configuration or runtime errors.
 */

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "msb/format.hpp"
#include "msb/rate_lab.hpp"

namespace fs = std::filesystem;
using namespace msb;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "./out";
    bool verbose = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "experiment config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", args.out_dir, "output directory (created if missing)");
    cmd->add_flag("--verbose", args.verbose, "echo the report log to stdout");
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("could not open " + p.string());
    out << content;
}

int finish_sweep(const RateReport& rep, const CommonArgs& args) {
    emit_report(rep, args.out_dir);
    if (args.verbose) std::fputs(report_log(rep).c_str(), stdout);
    std::printf("%s: %zu rows, checks %s, reports in %s\n", rep.kind.c_str(), rep.rows.size(),
                rep.checks_pass ? "passed" : "FAILED", args.out_dir.c_str());
    if (!rep.checks_pass)
        for (const std::string& f : rep.flags) std::printf("  flag: %s\n", f.c_str());
    return rep.checks_pass ? 0 : 1;
}

int run_simulate(const CommonArgs& args) {
    const ExperimentConfig cfg = load_config(args.config_path);
    const TorusGrid grid = make_grid(1, cfg.grid_n);
    const GridDensity rho0 = make_initial_density(cfg.initial, grid, cfg.potential, cfg.tau);

    std::vector<double> times = cfg.export_times;
    if (times.empty())
        for (int k = 0; k <= 4; ++k) times.push_back(cfg.horizon * k / 4.0);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                times.end());
    if (times.empty() || times.front() < 0.0)
        throw std::invalid_argument("simulate: export times must be nonnegative");
    if (times.front() > 0.0) times.insert(times.begin(), 0.0);

    const MarginalPath path = marginal_path(rho0, cfg.potential, cfg.tau, times, cfg.fp);
    fs::create_directories(args.out_dir);
    {
        std::ofstream os(fs::path(args.out_dir) / "marginals.csv", std::ios::binary);
        write_marginal_csv(os, path);
    }

    nlohmann::ordered_json j;
    j["config"] = nlohmann::ordered_json::parse(config_to_json(cfg));
    j["times"] = times;
    j["grid_n"] = cfg.grid_n;
    std::vector<double> masses;
    for (const GridDensity& rho : path.densities) masses.push_back(integrate(grid, rho.values));
    j["masses"] = masses;

    if (cfg.particles.count > 0) {
        const ParticleEnsemble ens =
            simulate_particles(rho0, cfg.potential, cfg.tau, times, cfg.particles.dt,
                               cfg.particles.count, cfg.particles.seed);
        std::ofstream os(fs::path(args.out_dir) / "particles.csv", std::ios::binary);
        write_particle_csv(os, ens);
        std::vector<double> tv;
        for (size_t k = 0; k < times.size(); ++k)
            tv.push_back(total_variation(particle_histogram(ens, k, grid), path.densities[k]));
        j["particle_count"] = cfg.particles.count;
        j["particle_tv"] = tv;
    }
    write_file(fs::path(args.out_dir) / "simulate.json", j.dump(2) + "\n");
    if (args.verbose) std::fputs((j.dump(2) + "\n").c_str(), stdout);
    std::printf("simulate: %zu snapshots on n = %d, outputs in %s\n", times.size(), cfg.grid_n,
                args.out_dir.c_str());
    return 0;
}

int run_bridge(const CommonArgs& args) {
    const ExperimentConfig cfg = load_config(args.config_path);
    if (!(cfg.bridge_t_b > cfg.bridge_t_a))
        throw std::invalid_argument("bridge: t_b must exceed t_a");
    const TorusGrid grid = make_grid(1, cfg.grid_n);
    const GridDensity rho0 = make_initial_density(cfg.initial, grid, cfg.potential, cfg.tau);

    // SDE marginals at the endpoints and at the Girsanov quadrature times
    std::vector<double> times;
    if (cfg.bridge_t_a > 0.0) times.push_back(0.0);
    times.push_back(cfg.bridge_t_a);
    for (double t : midpoint_times(cfg.bridge_t_a, cfg.bridge_t_b, cfg.quad_points))
        times.push_back(t);
    times.push_back(cfg.bridge_t_b);
    const MarginalPath path = marginal_path(rho0, cfg.potential, cfg.tau, times, cfg.fp);

    BridgeProblem prob;
    prob.rho_a = path.density_at(cfg.bridge_t_a);
    prob.rho_b = path.density_at(cfg.bridge_t_b);
    prob.t_a = cfg.bridge_t_a;
    prob.t_b = cfg.bridge_t_b;
    prob.tau = cfg.tau;
    prob.strict_resolution = cfg.strict_resolution;
    const BridgeSolution sol = solve_bridge(prob, cfg.sinkhorn);

    fs::create_directories(args.out_dir);
    {
        std::ofstream os(fs::path(args.out_dir) / "bridge.txt", std::ios::binary);
        write_bridge_report(os, sol);
    }
    if (cfg.grid_n <= 64) {
        std::ofstream os(fs::path(args.out_dir) / "coupling.csv", std::ios::binary);
        write_coupling_csv(os, sol);
    }

    const double kl_bridge = girsanov_interval_kl(sol, cfg.potential, path, cfg.quad_points);
    nlohmann::ordered_json j;
    j["config"] = nlohmann::ordered_json::parse(config_to_json(cfg));
    j["t_a"] = cfg.bridge_t_a;
    j["t_b"] = cfg.bridge_t_b;
    j["iterations"] = sol.iterations;
    j["marginal_residual"] = sol.marginal_residual;
    j["kl_sde_vs_bridge"] = kl_bridge;
    j["kl_sde_vs_wiener"] = kl_vs_wiener(cfg.potential, prob.rho_a, cfg.bridge_t_a,
                                         cfg.bridge_t_b, cfg.tau, cfg.quad_points, cfg.fp);
    if (cfg.tau == 1.0) {
        const BenamouTerms opt = benamou_objective(sol, cfg.quad_points);
        const BenamouTerms ref =
            benamou_reference(cfg.potential, path, cfg.bridge_t_a, cfg.bridge_t_b,
                              cfg.quad_points);
        j["action_bridge"] = {{"kinetic", opt.kinetic}, {"fisher", opt.fisher},
                              {"total", opt.total()}};
        j["action_sde_flow"] = {{"kinetic", ref.kinetic}, {"fisher", ref.fisher},
                                {"total", ref.total()}};
    }
    write_file(fs::path(args.out_dir) / "bridge.json", j.dump(2) + "\n");
    if (args.verbose) std::fputs((j.dump(2) + "\n").c_str(), stdout);
    std::printf("bridge: [%s, %s] on n = %d, %d iterations, residual %s, KL %s, outputs in %s\n",
                format_double(cfg.bridge_t_a).c_str(), format_double(cfg.bridge_t_b).c_str(),
                cfg.grid_n, sol.iterations, format_double(sol.marginal_residual).c_str(),
                format_double(kl_bridge).c_str(), args.out_dir.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Schrodinger bridge laboratory on the flat torus"};
    app.require_subcommand(1);

    CommonArgs args;
    CLI::App* rate = app.add_subcommand("rate-sweep", "total KL versus marginal count");
    CLI::App* eps = app.add_subcommand("eps-sweep", "single-interval KL versus length");
    CLI::App* bound = app.add_subcommand("bound-check", "a priori bound per mesh");
    CLI::App* sim = app.add_subcommand("simulate", "marginal flow and particles");
    CLI::App* bridge = app.add_subcommand("bridge", "solve one bridge");
    for (CLI::App* cmd : {rate, eps, bound, sim, bridge}) add_common(cmd, args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints message or help text
        return code == 0 ? 0 : 2;
    }

    try {
        if (rate->parsed()) return finish_sweep(run_m_sweep(load_config(args.config_path)), args);
        if (eps->parsed()) return finish_sweep(run_eps_sweep(load_config(args.config_path)), args);
        if (bound->parsed())
            return finish_sweep(run_bound_check(load_config(args.config_path)), args);
        if (sim->parsed()) return run_simulate(args);
        if (bridge->parsed()) return run_bridge(args);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
