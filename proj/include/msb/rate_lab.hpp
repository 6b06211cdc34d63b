#pragma once
/*
 * Experiment drivers: configured sweeps that measure how the chain total KL
 * scales with the number of marginals and with the interval length, check
 * the a priori bound, and write deterministic reports (CSV + JSON, with
 * wall-clock timing confined to the .log file).
 */

#include <cstdint>
#include <string>
#include <vector>

#include "msb/chain.hpp"

namespace msb {

struct DensityInit {
    enum class Kind { Uniform, VonMises, WrappedGaussian, Stationary };
    Kind kind = Kind::VonMises;
    double kappa = 1.0;
    double center = 0.0;
    double variance = 0.2;
};

GridDensity make_initial_density(const DensityInit& init, const TorusGrid& grid,
                                 const PotentialSpec& spec, double tau);

struct ParticleConfig {
    int count = 0;
    double dt = 1e-4;
    std::uint64_t seed = 12345;
};

struct ExperimentConfig {
    double tau = 1.0;
    double horizon = 1.0;
    int grid_n = 256;
    PotentialSpec potential;  // defaults to the benchmark drift
    DensityInit initial;
    std::vector<int> m_values{2, 4, 8, 16, 32};
    std::vector<double> eps_values{0.4, 0.2, 0.1, 0.05};
    SinkhornParams sinkhorn;
    StepPolicy fp;
    int quad_points = 32;
    int c1_time_samples = 65;
    bool strict_resolution = true;
    std::vector<double> export_times;  // simulate only
    ParticleConfig particles;          // simulate only
    double bridge_t_a = 0.0;           // bridge only
    double bridge_t_b = 0.5;
};

ExperimentConfig default_experiment_config();
// Strict parse: unknown or ill-typed keys raise invalid_argument naming the key.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& cfg);  // resolved, canonical

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    int points_used = 0;
    bool conclusive = false;  // r^2 >= 0.95 on at least 3 points
};

// Ordinary least squares on (log x, log y); points with y <= positive_floor
// are dropped.
FitResult fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys,
                     double positive_floor = 1e-12);

struct SweepRow {
    double abscissa = 0.0;  // m for marginal sweeps, eps for interval sweeps
    double kl = 0.0;
    double bound = 0.0;
    double margin = 0.0;  // bound - kl
    double c1 = 0.0;
    double c2 = 0.0;
    std::vector<double> per_interval_kl;
    long iterations = 0;
    double max_residual = 0.0;
};

struct RateReport {
    std::string kind;  // m_sweep, eps_sweep, bound_check
    std::vector<SweepRow> rows;
    FitResult fit;
    double slope_window_lo = 0.0;
    double slope_window_hi = 0.0;
    bool degenerate_bound = false;
    bool checks_pass = true;
    std::vector<std::string> flags;
    double runtime_seconds = 0.0;  // never serialized to CSV/JSON
    std::string config_json;
};

// Total KL versus the marginal count, fitted against m (slope target -2,
// accepted window [-2.2, -0.9]; m = 1 rows are kept but excluded from the
// fit). Also checks the bound and that the total is nonincreasing in m.
RateReport run_m_sweep(const ExperimentConfig& cfg);

// Single-interval KL versus the interval length eps (slope window
// [1.8, 2.6]); the bound constants are recomputed on [0, eps] per row.
RateReport run_eps_sweep(const ExperimentConfig& cfg);

// Bound comparison for each requested m, no fit.
RateReport run_bound_check(const ExperimentConfig& cfg);

std::string report_csv(const RateReport& report);
std::string report_json(const RateReport& report);
std::string report_log(const RateReport& report);  // includes runtime

// Writes <kind>.csv, <kind>.json and <kind>.log into out_dir.
void emit_report(const RateReport& report, const std::string& out_dir);

}  // namespace msb
