#include "msb/rate_lab.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "msb/format.hpp"

namespace msb {

using nlohmann::json;
using nlohmann::ordered_json;

GridDensity make_initial_density(const DensityInit& init, const TorusGrid& grid,
                                 const PotentialSpec& spec, double tau) {
    switch (init.kind) {
        case DensityInit::Kind::Uniform: return uniform_density(grid);
        case DensityInit::Kind::VonMises: return von_mises_density(grid, init.kappa, init.center);
        case DensityInit::Kind::WrappedGaussian:
            return wrapped_gaussian_density(grid, init.center, init.variance);
        case DensityInit::Kind::Stationary: return stationary_density(grid, spec, tau);
    }
    throw std::logic_error("make_initial_density: unknown kind");
}

ExperimentConfig default_experiment_config() {
    ExperimentConfig cfg;
    cfg.potential = benchmark_potential();
    return cfg;
}

// ── config parsing ──────────────────────────────────────────────────────────

namespace {

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) {
                ok = true;
                break;
            }
        if (!ok)
            throw std::invalid_argument("config: unknown key '" + key + "' in " + where);
    }
}

double get_number(const json& obj, const std::string& key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number())
        throw std::invalid_argument("config: key '" + key + "' must be a number");
    return obj[key].get<double>();
}

int get_int(const json& obj, const std::string& key, int fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_integer())
        throw std::invalid_argument("config: key '" + key + "' must be an integer");
    return obj[key].get<int>();
}

bool get_bool(const json& obj, const std::string& key, bool fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_boolean())
        throw std::invalid_argument("config: key '" + key + "' must be a boolean");
    return obj[key].get<bool>();
}

std::vector<double> get_number_array(const json& obj, const std::string& key,
                                     std::vector<double> fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_array())
        throw std::invalid_argument("config: key '" + key + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : obj[key]) {
        if (!v.is_number())
            throw std::invalid_argument("config: key '" + key + "' must be an array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

std::vector<int> get_int_array(const json& obj, const std::string& key,
                               std::vector<int> fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_array())
        throw std::invalid_argument("config: key '" + key + "' must be an array of integers");
    std::vector<int> out;
    for (const auto& v : obj[key]) {
        if (!v.is_number_integer())
            throw std::invalid_argument("config: key '" + key + "' must be an array of integers");
        out.push_back(v.get<int>());
    }
    return out;
}

TimeCoeff parse_coeff(const json& j) {
    if (!j.is_object() || !j.contains("type"))
        throw std::invalid_argument("config: potential coefficient needs a 'type'");
    const std::string type = j["type"].get<std::string>();
    if (type == "polynomial") {
        check_keys(j, "potential coefficient", {"type", "coefficients"});
        if (!j.contains("coefficients"))
            throw std::invalid_argument("config: polynomial coefficient needs 'coefficients'");
        return TimeCoeff::polynomial(get_number_array(j, "coefficients", {}));
    }
    if (type == "harmonic") {
        check_keys(j, "potential coefficient", {"type", "amplitude", "frequency", "shift"});
        return TimeCoeff::harmonic(get_number(j, "amplitude", 0.0),
                                   get_number(j, "frequency", 0.0),
                                   get_number(j, "shift", 0.0));
    }
    throw std::invalid_argument("config: coefficient type '" + type +
                                "' is not one of polynomial, harmonic");
}

PotentialSpec parse_potential(const json& j) {
    if (j.is_string()) {
        const std::string name = j.get<std::string>();
        if (name == "benchmark") return benchmark_potential();
        if (name == "zero") return zero_potential();
        throw std::invalid_argument("config: potential '" + name +
                                    "' is not one of benchmark, zero");
    }
    if (!j.is_object())
        throw std::invalid_argument("config: 'potential' must be a string or an object");
    check_keys(j, "'potential'", {"terms"});
    if (!j.contains("terms") || !j["terms"].is_array())
        throw std::invalid_argument("config: 'potential' needs a 'terms' array");
    PotentialSpec spec;
    for (const auto& t : j["terms"]) {
        check_keys(t, "potential term", {"wave_number", "phase", "coeff"});
        PotentialTerm term;
        term.wave_number = get_int(t, "wave_number", 1);
        const std::string phase = t.contains("phase") ? t["phase"].get<std::string>() : "cos";
        if (phase == "cos")
            term.phase = Phase::Cos;
        else if (phase == "sin")
            term.phase = Phase::Sin;
        else
            throw std::invalid_argument("config: phase '" + phase + "' is not one of cos, sin");
        if (!t.contains("coeff"))
            throw std::invalid_argument("config: potential term needs a 'coeff'");
        term.coeff = parse_coeff(t["coeff"]);
        spec.terms.push_back(std::move(term));
    }
    validate_potential(spec);
    return spec;
}

DensityInit parse_initial(const json& j) {
    if (!j.is_object() || !j.contains("type"))
        throw std::invalid_argument("config: 'initial' needs a 'type'");
    DensityInit init;
    const std::string type = j["type"].get<std::string>();
    if (type == "uniform") {
        check_keys(j, "'initial'", {"type"});
        init.kind = DensityInit::Kind::Uniform;
    } else if (type == "von_mises") {
        check_keys(j, "'initial'", {"type", "kappa", "center"});
        init.kind = DensityInit::Kind::VonMises;
        init.kappa = get_number(j, "kappa", 1.0);
        init.center = get_number(j, "center", 0.0);
    } else if (type == "wrapped_gaussian") {
        check_keys(j, "'initial'", {"type", "center", "variance"});
        init.kind = DensityInit::Kind::WrappedGaussian;
        init.center = get_number(j, "center", 0.0);
        init.variance = get_number(j, "variance", 0.2);
        if (!(init.variance > 0.0))
            throw std::invalid_argument("config: wrapped_gaussian variance must be positive");
    } else if (type == "stationary") {
        check_keys(j, "'initial'", {"type"});
        init.kind = DensityInit::Kind::Stationary;
    } else {
        throw std::invalid_argument(
            "config: initial type '" + type +
            "' is not one of uniform, von_mises, wrapped_gaussian, stationary");
    }
    return init;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
    check_keys(j, "top level",
               {"tau", "horizon", "grid_n", "potential", "initial", "m_values", "eps_values",
                "sinkhorn", "fokker_planck", "quad_points", "c1_time_samples",
                "strict_resolution", "export_times", "particles", "bridge"});

    ExperimentConfig cfg = default_experiment_config();
    cfg.tau = get_number(j, "tau", cfg.tau);
    cfg.horizon = get_number(j, "horizon", cfg.horizon);
    cfg.grid_n = get_int(j, "grid_n", cfg.grid_n);
    if (j.contains("potential")) cfg.potential = parse_potential(j["potential"]);
    if (j.contains("initial")) cfg.initial = parse_initial(j["initial"]);
    cfg.m_values = get_int_array(j, "m_values", cfg.m_values);
    cfg.eps_values = get_number_array(j, "eps_values", cfg.eps_values);
    if (j.contains("sinkhorn")) {
        const json& s = j["sinkhorn"];
        check_keys(s, "'sinkhorn'", {"tolerance", "max_iterations"});
        cfg.sinkhorn.tolerance = get_number(s, "tolerance", cfg.sinkhorn.tolerance);
        cfg.sinkhorn.max_iterations = get_int(s, "max_iterations", cfg.sinkhorn.max_iterations);
    }
    if (j.contains("fokker_planck")) {
        const json& s = j["fokker_planck"];
        check_keys(s, "'fokker_planck'", {"dt_target", "cfl_safety"});
        cfg.fp.dt_target = get_number(s, "dt_target", cfg.fp.dt_target);
        cfg.fp.cfl_safety = get_number(s, "cfl_safety", cfg.fp.cfl_safety);
    }
    cfg.quad_points = get_int(j, "quad_points", cfg.quad_points);
    cfg.c1_time_samples = get_int(j, "c1_time_samples", cfg.c1_time_samples);
    cfg.strict_resolution = get_bool(j, "strict_resolution", cfg.strict_resolution);
    cfg.export_times = get_number_array(j, "export_times", cfg.export_times);
    if (j.contains("particles")) {
        const json& s = j["particles"];
        check_keys(s, "'particles'", {"count", "dt", "seed"});
        cfg.particles.count = get_int(s, "count", cfg.particles.count);
        cfg.particles.dt = get_number(s, "dt", cfg.particles.dt);
        if (s.contains("seed")) {
            if (!s["seed"].is_number_unsigned() && !s["seed"].is_number_integer())
                throw std::invalid_argument("config: key 'seed' must be an integer");
            cfg.particles.seed = s["seed"].get<std::uint64_t>();
        }
    }
    if (j.contains("bridge")) {
        const json& s = j["bridge"];
        check_keys(s, "'bridge'", {"t_a", "t_b"});
        cfg.bridge_t_a = get_number(s, "t_a", cfg.bridge_t_a);
        cfg.bridge_t_b = get_number(s, "t_b", cfg.bridge_t_b);
    }

    if (!(cfg.tau > 0.0)) throw std::invalid_argument("config: 'tau' must be positive");
    if (!(cfg.horizon > 0.0)) throw std::invalid_argument("config: 'horizon' must be positive");
    for (int m : cfg.m_values)
        if (m < 1) throw std::invalid_argument("config: 'm_values' entries must be >= 1");
    for (double e : cfg.eps_values)
        if (!(e > 0.0)) throw std::invalid_argument("config: 'eps_values' entries must be positive");
    if (cfg.quad_points < 1) throw std::invalid_argument("config: 'quad_points' must be >= 1");
    if (cfg.c1_time_samples < 2)
        throw std::invalid_argument("config: 'c1_time_samples' must be >= 2");
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: could not open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_config(ss.str());
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string(e.what()) + " (file " + path + ")");
    }
}

namespace {

ordered_json coeff_to_json(const TimeCoeff& c) {
    if (c.kind == TimeCoeff::Kind::Polynomial)
        return {{"type", "polynomial"}, {"coefficients", c.poly}};
    return {{"type", "harmonic"},
            {"amplitude", c.amplitude},
            {"frequency", c.frequency},
            {"shift", c.shift}};
}

ordered_json potential_to_json(const PotentialSpec& spec) {
    ordered_json terms = ordered_json::array();
    for (const auto& t : spec.terms)
        terms.push_back({{"wave_number", t.wave_number},
                         {"phase", t.phase == Phase::Cos ? "cos" : "sin"},
                         {"coeff", coeff_to_json(t.coeff)}});
    return {{"terms", std::move(terms)}};
}

ordered_json initial_to_json(const DensityInit& init) {
    switch (init.kind) {
        case DensityInit::Kind::Uniform: return {{"type", "uniform"}};
        case DensityInit::Kind::VonMises:
            return {{"type", "von_mises"}, {"kappa", init.kappa}, {"center", init.center}};
        case DensityInit::Kind::WrappedGaussian:
            return {{"type", "wrapped_gaussian"},
                    {"center", init.center},
                    {"variance", init.variance}};
        case DensityInit::Kind::Stationary: return {{"type", "stationary"}};
    }
    throw std::logic_error("initial_to_json: unknown kind");
}

}  // namespace

std::string config_to_json(const ExperimentConfig& cfg) {
    ordered_json j;
    j["tau"] = cfg.tau;
    j["horizon"] = cfg.horizon;
    j["grid_n"] = cfg.grid_n;
    j["potential"] = potential_to_json(cfg.potential);
    j["initial"] = initial_to_json(cfg.initial);
    j["m_values"] = cfg.m_values;
    j["eps_values"] = cfg.eps_values;
    j["sinkhorn"] = {{"tolerance", cfg.sinkhorn.tolerance},
                     {"max_iterations", cfg.sinkhorn.max_iterations}};
    j["fokker_planck"] = {{"dt_target", cfg.fp.dt_target}, {"cfl_safety", cfg.fp.cfl_safety}};
    j["quad_points"] = cfg.quad_points;
    j["c1_time_samples"] = cfg.c1_time_samples;
    j["strict_resolution"] = cfg.strict_resolution;
    if (!cfg.export_times.empty()) j["export_times"] = cfg.export_times;
    if (cfg.particles.count > 0)
        j["particles"] = {{"count", cfg.particles.count},
                          {"dt", cfg.particles.dt},
                          {"seed", cfg.particles.seed}};
    j["bridge"] = {{"t_a", cfg.bridge_t_a}, {"t_b", cfg.bridge_t_b}};
    return j.dump(2);
}

FitResult fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys,
                     double positive_floor) {
    if (xs.size() != ys.size()) throw std::invalid_argument("fit_loglog: size mismatch");
    std::vector<double> lx, ly;
    for (size_t k = 0; k < xs.size(); ++k) {
        if (!(xs[k] > 0.0)) throw std::invalid_argument("fit_loglog: abscissa must be positive");
        if (ys[k] > positive_floor) {
            lx.push_back(std::log(xs[k]));
            ly.push_back(std::log(ys[k]));
        }
    }
    FitResult fit;
    fit.points_used = static_cast<int>(lx.size());
    if (fit.points_used < 2) return fit;

    const double n = static_cast<double>(lx.size());
    double sx = 0.0, sy = 0.0;
    for (size_t k = 0; k < lx.size(); ++k) {
        sx += lx[k];
        sy += ly[k];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (size_t k = 0; k < lx.size(); ++k) {
        const double dx = lx[k] - mx, dy = ly[k] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) return fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (size_t k = 0; k < lx.size(); ++k) {
        const double r = ly[k] - (fit.intercept + fit.slope * lx[k]);
        ss_res += r * r;
    }
    fit.r_squared = (syy > 0.0) ? 1.0 - ss_res / syy : 1.0;
    fit.conclusive = fit.points_used >= 3 && fit.r_squared >= 0.95;
    return fit;
}

// ── sweep runners ───────────────────────────────────────────────────────────

namespace {

std::vector<double> linspace(double a, double b, int count) {
    std::vector<double> out(static_cast<size_t>(count));
    for (int k = 0; k < count; ++k)
        out[static_cast<size_t>(k)] = a + (b - a) * k / (count - 1);
    return out;
}

struct Regularity {
    double c1 = 0.0;
    double c2 = 0.0;
};

Regularity regularity_constants(const ExperimentConfig& cfg, const GridDensity& rho0,
                                double horizon) {
    Regularity reg;
    reg.c1 = constant_c1(cfg.potential, rho0.grid, horizon, cfg.c1_time_samples);
    const MarginalPath path = marginal_path(rho0, cfg.potential, cfg.tau,
                                            linspace(0.0, horizon, cfg.c1_time_samples), cfg.fp);
    reg.c2 = constant_c2(cfg.potential, path);
    return reg;
}

MsbParams msb_params(const ExperimentConfig& cfg) {
    MsbParams p;
    p.sinkhorn = cfg.sinkhorn;
    p.fp = cfg.fp;
    p.quad_points = cfg.quad_points;
    p.strict_resolution = cfg.strict_resolution;
    return p;
}

void note(RateReport& rep, std::string msg, bool fail) {
    rep.flags.push_back(std::move(msg));
    if (fail) rep.checks_pass = false;
}

void apply_slope_window(RateReport& rep) {
    if (rep.fit.points_used < 2) {
        note(rep, "fit skipped: fewer than two positive KL values", false);
        return;
    }
    if (!rep.fit.conclusive) {
        const std::string why =
            rep.fit.points_used < 3
                ? "only " + std::to_string(rep.fit.points_used) + " positive points"
                : "r^2 = " + format_double(rep.fit.r_squared) + " below 0.95";
        note(rep, "fit inconclusive: " + why + ", slope not asserted", false);
        return;
    }
    if (rep.fit.slope < rep.slope_window_lo || rep.fit.slope > rep.slope_window_hi)
        note(rep, "slope " + format_double(rep.fit.slope) + " outside [" +
                      format_double(rep.slope_window_lo) + ", " +
                      format_double(rep.slope_window_hi) + "]", true);
}

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace

RateReport run_m_sweep(const ExperimentConfig& cfg) {
    Stopwatch clock;
    RateReport rep;
    rep.kind = "m_sweep";
    rep.slope_window_lo = -2.2;
    rep.slope_window_hi = -0.9;
    rep.config_json = config_to_json(cfg);
    if (cfg.m_values.empty()) throw std::invalid_argument("m sweep: 'm_values' is empty");

    const TorusGrid grid = make_grid(1, cfg.grid_n);
    const GridDensity rho0 = make_initial_density(cfg.initial, grid, cfg.potential, cfg.tau);
    const Regularity reg = regularity_constants(cfg, rho0, cfg.horizon);
    rep.degenerate_bound = (reg.c1 == 0.0);
    if (rep.degenerate_bound)
        note(rep, "bound degenerate: c1 = 0 (drift-free potential), bound not asserted", false);

    for (int m : cfg.m_values) {
        const TimeGrid tgrid = uniform_time_grid(cfg.horizon, m);
        const MsbSolution sol = solve_msb(cfg.potential, rho0, cfg.tau, tgrid, msb_params(cfg));
        SweepRow row;
        row.abscissa = static_cast<double>(m);
        row.kl = sol.total_kl;
        row.c1 = reg.c1;
        row.c2 = reg.c2;
        row.bound = theoretical_bound(reg.c1, reg.c2, cfg.horizon, tgrid.max_gap());
        row.margin = row.bound - row.kl;
        row.per_interval_kl = sol.per_interval_kl;
        row.iterations = sol.total_iterations;
        row.max_residual = sol.max_residual;
        if (!rep.degenerate_bound && row.kl > row.bound)
            note(rep, "bound violated at m = " + std::to_string(m) + ": kl = " +
                          format_double(row.kl) + " > " + format_double(row.bound), true);
        if (!rep.rows.empty() && row.kl > rep.rows.back().kl + 1e-6)
            note(rep, "total KL increased from m = " +
                          format_double(rep.rows.back().abscissa) + " to m = " +
                          std::to_string(m), true);
        rep.rows.push_back(std::move(row));
    }

    std::vector<double> ms, kls;
    for (const SweepRow& row : rep.rows)
        if (row.abscissa >= 2.0) {
            ms.push_back(row.abscissa);
            kls.push_back(row.kl);
        }
    rep.fit = fit_loglog(ms, kls);
    apply_slope_window(rep);
    rep.runtime_seconds = clock.seconds();
    return rep;
}

RateReport run_eps_sweep(const ExperimentConfig& cfg) {
    Stopwatch clock;
    RateReport rep;
    rep.kind = "eps_sweep";
    rep.slope_window_lo = 1.8;
    rep.slope_window_hi = 2.6;
    rep.config_json = config_to_json(cfg);
    if (cfg.eps_values.empty()) throw std::invalid_argument("eps sweep: 'eps_values' is empty");

    const TorusGrid grid = make_grid(1, cfg.grid_n);
    const GridDensity rho0 = make_initial_density(cfg.initial, grid, cfg.potential, cfg.tau);

    for (double eps : cfg.eps_values) {
        const TimeGrid tgrid = uniform_time_grid(eps, 1);
        const MsbSolution sol = solve_msb(cfg.potential, rho0, cfg.tau, tgrid, msb_params(cfg));
        const Regularity reg = regularity_constants(cfg, rho0, eps);
        SweepRow row;
        row.abscissa = eps;
        row.kl = sol.total_kl;
        row.c1 = reg.c1;
        row.c2 = reg.c2;
        row.bound = theoretical_bound(reg.c1, reg.c2, eps, eps);
        row.margin = row.bound - row.kl;
        row.per_interval_kl = sol.per_interval_kl;
        row.iterations = sol.total_iterations;
        row.max_residual = sol.max_residual;
        if (reg.c1 == 0.0) {
            if (!rep.degenerate_bound)
                note(rep, "bound degenerate: c1 = 0 (drift-free potential), bound not asserted",
                     false);
            rep.degenerate_bound = true;
        } else if (row.kl > row.bound) {
            note(rep, "bound violated at eps = " + format_double(eps) + ": kl = " +
                          format_double(row.kl) + " > " + format_double(row.bound), true);
        }
        rep.rows.push_back(std::move(row));
    }

    std::vector<double> xs, ys;
    for (const SweepRow& row : rep.rows) {
        xs.push_back(row.abscissa);
        ys.push_back(row.kl);
    }
    rep.fit = fit_loglog(xs, ys);
    apply_slope_window(rep);
    rep.runtime_seconds = clock.seconds();
    return rep;
}

RateReport run_bound_check(const ExperimentConfig& cfg) {
    Stopwatch clock;
    RateReport rep;
    rep.kind = "bound_check";
    rep.config_json = config_to_json(cfg);
    if (cfg.m_values.empty()) throw std::invalid_argument("bound check: 'm_values' is empty");

    const TorusGrid grid = make_grid(1, cfg.grid_n);
    const GridDensity rho0 = make_initial_density(cfg.initial, grid, cfg.potential, cfg.tau);
    const Regularity reg = regularity_constants(cfg, rho0, cfg.horizon);
    rep.degenerate_bound = (reg.c1 == 0.0);
    if (rep.degenerate_bound)
        note(rep, "bound degenerate: c1 = 0 (drift-free potential), bound not asserted", false);

    for (int m : cfg.m_values) {
        const TimeGrid tgrid = uniform_time_grid(cfg.horizon, m);
        const MsbSolution sol = solve_msb(cfg.potential, rho0, cfg.tau, tgrid, msb_params(cfg));
        const BoundCheck bc = check_against_bound(sol, reg.c1, reg.c2);
        SweepRow row;
        row.abscissa = static_cast<double>(m);
        row.kl = sol.total_kl;
        row.c1 = reg.c1;
        row.c2 = reg.c2;
        row.bound = bc.bound;
        row.margin = bc.bound - sol.total_kl;
        row.per_interval_kl = sol.per_interval_kl;
        row.iterations = sol.total_iterations;
        row.max_residual = sol.max_residual;
        if (!rep.degenerate_bound && !bc.holds)
            note(rep, "bound violated at m = " + std::to_string(m) + ": kl = " +
                          format_double(row.kl) + " > " + format_double(row.bound), true);
        rep.rows.push_back(std::move(row));
    }
    rep.runtime_seconds = clock.seconds();
    return rep;
}

// ── report output ───────────────────────────────────────────────────────────

std::string report_csv(const RateReport& report) {
    std::string out = "abscissa,kl,bound,margin\n";
    for (const SweepRow& row : report.rows) {
        out += format_double(row.abscissa);
        out += ',';
        out += format_double(row.kl);
        out += ',';
        out += format_double(row.bound);
        out += ',';
        out += format_double(row.margin);
        out += '\n';
    }
    return out;
}

std::string report_json(const RateReport& report) {
    ordered_json j;
    j["kind"] = report.kind;
    j["config"] = ordered_json::parse(report.config_json);
    ordered_json rows = ordered_json::array();
    for (const SweepRow& row : report.rows) {
        ordered_json r;
        r["abscissa"] = row.abscissa;
        r["kl"] = row.kl;
        r["bound"] = row.bound;
        r["margin"] = row.margin;
        r["c1"] = row.c1;
        r["c2"] = row.c2;
        r["per_interval_kl"] = row.per_interval_kl;
        r["sinkhorn_iterations"] = row.iterations;
        r["max_marginal_residual"] = row.max_residual;
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    if (report.kind != "bound_check") {
        j["fit"] = {{"slope", report.fit.slope},
                    {"intercept", report.fit.intercept},
                    {"r_squared", report.fit.r_squared},
                    {"points_used", report.fit.points_used},
                    {"conclusive", report.fit.conclusive},
                    {"window_lo", report.slope_window_lo},
                    {"window_hi", report.slope_window_hi}};
    }
    j["degenerate_bound"] = report.degenerate_bound;
    j["checks_pass"] = report.checks_pass;
    j["flags"] = report.flags;
    return j.dump(2) + "\n";
}

std::string report_log(const RateReport& report) {
    std::ostringstream os;
    os << "# " << report.kind << " report\n";
    os << "config:\n" << report.config_json << "\n";
    for (const SweepRow& row : report.rows)
        os << "abscissa " << format_double(row.abscissa) << ": kl = " << format_double(row.kl)
           << ", bound = " << format_double(row.bound)
           << ", margin = " << format_double(row.margin)
           << ", sinkhorn iterations = " << row.iterations
           << ", max residual = " << format_double(row.max_residual) << "\n";
    if (report.kind != "bound_check" && report.fit.points_used >= 2)
        os << "fit: slope = " << format_double(report.fit.slope)
           << ", r^2 = " << format_double(report.fit.r_squared) << " on "
           << report.fit.points_used << " points (window [" << format_double(report.slope_window_lo)
           << ", " << format_double(report.slope_window_hi) << "])\n";
    for (const std::string& f : report.flags) os << "flag: " << f << "\n";
    os << "checks_pass: " << (report.checks_pass ? "true" : "false") << "\n";
    os << "runtime_seconds: " << report.runtime_seconds << "\n";
    return os.str();
}

void emit_report(const RateReport& report, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const auto write = [&](const std::string& name, const std::string& content) {
        const fs::path p = fs::path(out_dir) / name;
        std::ofstream out(p, std::ios::binary);
        if (!out) throw std::runtime_error("emit_report: could not open " + p.string());
        out << content;
    };
    write(report.kind + ".csv", report_csv(report));
    write(report.kind + ".json", report_json(report));
    write(report.kind + ".log", report_log(report));
}

}  // namespace msb
