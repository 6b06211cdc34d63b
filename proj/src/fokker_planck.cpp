#include "msb/fokker_planck.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

#include "msb/format.hpp"
#include "msb/spectral.hpp"

namespace msb {

int steps_for(const StepPolicy& policy, const PotentialSpec& spec, const TorusGrid& grid,
              double t_from, double t_to) {
    if (!(t_to >= t_from))
        throw std::invalid_argument("steps_for: t_to must be >= t_from");
    const double seg = t_to - t_from;
    if (seg == 0.0) return 0;
    if (!(policy.dt_target > 0.0) || !(policy.cfl_safety > 0.0))
        throw std::invalid_argument("steps_for: step policy must be positive");
    int n = static_cast<int>(std::ceil(seg / policy.dt_target - 1e-12));
    const double speed = max_abs_psi_dx(spec, t_from, t_to, grid);
    if (speed > 0.0) {
        const double dt_cfl = policy.cfl_safety * grid.spacing / speed;
        n = std::max(n, static_cast<int>(std::ceil(seg / dt_cfl - 1e-12)));
    }
    return std::max(n, 1);
}

namespace {

// d/dt rho = -d/dx (rho * drift) integrated with Heun's method; the flux
// divergence is evaluated spectrally.
void advect_step(std::vector<double>& rho, const std::vector<double>& drift, double dt,
                 SpectralWorkspace& ws, std::vector<double>& flux, std::vector<double>& k1,
                 std::vector<double>& k2, std::vector<double>& stage) {
    const size_t n = rho.size();
    flux.resize(n);
    stage.resize(n);
    for (size_t i = 0; i < n; ++i) flux[i] = rho[i] * drift[i];
    ws.derivative(flux, k1);
    for (size_t i = 0; i < n; ++i) stage[i] = rho[i] - dt * k1[i];
    for (size_t i = 0; i < n; ++i) flux[i] = stage[i] * drift[i];
    ws.derivative(flux, k2);
    for (size_t i = 0; i < n; ++i) rho[i] -= 0.5 * dt * (k1[i] + k2[i]);
}

}  // namespace

GridDensity evolve(const GridDensity& rho0, const PotentialSpec& spec, double tau,
                   double t_from, double t_to, int n_steps, EvolveStats* stats) {
    validate_density(rho0);
    if (!(tau > 0.0)) throw std::invalid_argument("evolve: tau must be positive");
    if (!(t_to >= t_from)) throw std::invalid_argument("evolve: t_to must be >= t_from");
    if (t_to == t_from) {
        if (stats) *stats = EvolveStats{};
        return rho0;
    }
    if (n_steps < 1) throw std::invalid_argument("evolve: need at least one step");

    const TorusGrid& grid = rho0.grid;
    const int n = grid.n;
    const double h = grid.spacing;
    const double dt = (t_to - t_from) / n_steps;

    SpectralWorkspace ws(n);
    // exact diffusion over dt/2: mode k decays by exp(-tau * (dt/2) * k^2 / 2)
    std::vector<double> gain(static_cast<size_t>(n / 2 + 1));
    for (int k = 0; k <= n / 2; ++k)
        gain[static_cast<size_t>(k)] = std::exp(-tau * dt * k * k / 4.0);

    std::vector<double> rho = rho0.values;
    std::vector<double> drift(static_cast<size_t>(n)), flux, k1, k2, stage;
    EvolveStats local;

    for (int step = 0; step < n_steps; ++step) {
        const double t_mid = t_from + (step + 0.5) * dt;
        ws.apply_mode_gain(rho, gain);
        for (int i = 0; i < n; ++i)
            drift[static_cast<size_t>(i)] = psi_dx(spec, t_mid, grid.nodes[static_cast<size_t>(i)]);
        advect_step(rho, drift, dt, ws, flux, k1, k2, stage);
        ws.apply_mode_gain(rho, gain);

        double clipped = 0.0;
        for (double& v : rho)
            if (v < 0.0) {
                clipped -= v;
                v = 0.0;
            }
        if (clipped > 0.0) {
            local.clipped_mass += clipped * h;
            if (local.clipped_mass > kMaxClippedMass)
                throw std::runtime_error(
                    "evolve: clipped mass " + std::to_string(local.clipped_mass) +
                    " exceeds " + std::to_string(kMaxClippedMass) +
                    "; the step size or grid is too coarse for this drift");
            double mass = 0.0;
            for (double v : rho) mass += v;
            mass *= h;
            for (double& v : rho) v /= mass;
        } else {
            double mass = 0.0;
            for (double v : rho) mass += v;
            mass *= h;
            if (std::abs(mass - 1.0) > 1e-12)
                throw std::runtime_error("evolve: mass drifted to " + std::to_string(mass));
        }
        ++local.steps;
    }
    if (stats) *stats = local;
    return GridDensity{grid, std::move(rho)};
}

const TorusGrid& MarginalPath::grid() const {
    if (densities.empty()) throw std::logic_error("MarginalPath: empty path");
    return densities.front().grid;
}

bool MarginalPath::has_time(double t) const {
    for (double s : times)
        if (std::abs(s - t) <= 1e-12) return true;
    return false;
}

const GridDensity& MarginalPath::density_at(double t) const {
    for (size_t k = 0; k < times.size(); ++k)
        if (std::abs(times[k] - t) <= 1e-12) return densities[k];
    throw std::out_of_range("MarginalPath: no density stored at t = " + std::to_string(t));
}

MarginalPath marginal_path(const GridDensity& rho0, const PotentialSpec& spec, double tau,
                           const std::vector<double>& times, const StepPolicy& policy) {
    if (times.empty()) throw std::invalid_argument("marginal_path: empty time list");
    for (size_t k = 1; k < times.size(); ++k)
        if (!(times[k] > times[k - 1]))
            throw std::invalid_argument("marginal_path: times must be strictly increasing");
    validate_density(rho0);

    MarginalPath path;
    path.tau = tau;
    path.times = times;
    path.densities.reserve(times.size());
    path.densities.push_back(rho0);
    for (size_t k = 1; k < times.size(); ++k) {
        const int n_steps = steps_for(policy, spec, rho0.grid, times[k - 1], times[k]);
        path.densities.push_back(
            evolve(path.densities.back(), spec, tau, times[k - 1], times[k], n_steps));
    }
    return path;
}

GridDensity uniform_density(const TorusGrid& grid) {
    return make_density(grid, std::vector<double>(static_cast<size_t>(grid.n), 1.0));
}

GridDensity von_mises_density(const TorusGrid& grid, double kappa, double center) {
    std::vector<double> v(static_cast<size_t>(grid.n));
    for (int i = 0; i < grid.n; ++i)
        v[static_cast<size_t>(i)] = std::exp(kappa * std::cos(grid.nodes[static_cast<size_t>(i)] - center));
    return make_density(grid, std::move(v));
}

GridDensity wrapped_gaussian_density(const TorusGrid& grid, double center, double variance) {
    std::vector<double> v(static_cast<size_t>(grid.n));
    for (int i = 0; i < grid.n; ++i)
        v[static_cast<size_t>(i)] =
            heat_kernel_point(grid.nodes[static_cast<size_t>(i)] - center, variance).value;
    return make_density(grid, std::move(v));
}

GridDensity stationary_density(const TorusGrid& grid, const PotentialSpec& spec, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("stationary_density: tau must be positive");
    std::vector<double> v(static_cast<size_t>(grid.n));
    for (int i = 0; i < grid.n; ++i)
        v[static_cast<size_t>(i)] =
            std::exp(2.0 * psi_value(spec, 0.0, grid.nodes[static_cast<size_t>(i)]) / tau);
    return make_density(grid, std::move(v));
}

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Per-substep drift tables: drift(x) = sum_w -A[w] sin(wx) + B[w] cos(wx).
struct DriftTable {
    int max_wave = 0;
    std::vector<double> a, b;  // indexed 1..max_wave
};

DriftTable drift_table(const PotentialSpec& spec, double t) {
    DriftTable tab;
    tab.max_wave = std::max(spec.max_wave_number(), 1);
    tab.a.assign(static_cast<size_t>(tab.max_wave) + 1, 0.0);
    tab.b.assign(static_cast<size_t>(tab.max_wave) + 1, 0.0);
    for (const auto& term : spec.terms) {
        const double ck = term.coeff.value(t) * term.wave_number;
        if (term.phase == Phase::Cos)
            tab.a[static_cast<size_t>(term.wave_number)] += ck;
        else
            tab.b[static_cast<size_t>(term.wave_number)] += ck;
    }
    return tab;
}

double drift_eval(const DriftTable& tab, double x) {
    const double s1 = std::sin(x), c1 = std::cos(x);
    double sw = s1, cw = c1, acc = 0.0;
    for (int w = 1; w <= tab.max_wave; ++w) {
        acc += -tab.a[static_cast<size_t>(w)] * sw + tab.b[static_cast<size_t>(w)] * cw;
        const double sn = sw * c1 + cw * s1;
        cw = cw * c1 - sw * s1;
        sw = sn;
    }
    return acc;
}

}  // namespace

ParticleEnsemble simulate_particles(const GridDensity& rho0, const PotentialSpec& spec,
                                    double tau, const std::vector<double>& times, double dt,
                                    int n_particles, std::uint64_t seed) {
    validate_density(rho0);
    if (!(tau > 0.0)) throw std::invalid_argument("simulate_particles: tau must be positive");
    if (!(dt > 0.0)) throw std::invalid_argument("simulate_particles: dt must be positive");
    if (n_particles < 1) throw std::invalid_argument("simulate_particles: need particles");
    if (times.empty()) throw std::invalid_argument("simulate_particles: empty time list");
    for (size_t k = 1; k < times.size(); ++k)
        if (!(times[k] > times[k - 1]))
            throw std::invalid_argument("simulate_particles: times must be strictly increasing");

    const TorusGrid& grid = rho0.grid;
    const double h = grid.spacing;

    // cumulative masses for inverse-CDF sampling of the initial density
    std::vector<double> cum(static_cast<size_t>(grid.n) + 1, 0.0);
    for (int i = 0; i < grid.n; ++i)
        cum[static_cast<size_t>(i) + 1] =
            cum[static_cast<size_t>(i)] + rho0.values[static_cast<size_t>(i)] * h;
    const double total = cum.back();

    // flatten the substep schedule once; every particle walks the same times
    struct SubStep {
        double sqrt_noise;
        double dt;
        DriftTable drift;
    };
    std::vector<SubStep> schedule;
    std::vector<size_t> record_at(times.size(), 0);  // schedule index after which times[k] is reached
    for (size_t k = 1; k < times.size(); ++k) {
        const double seg = times[k] - times[k - 1];
        const int n_sub = std::max(1, static_cast<int>(std::ceil(seg / dt - 1e-12)));
        const double dts = seg / n_sub;
        for (int j = 0; j < n_sub; ++j) {
            const double t = times[k - 1] + j * dts;
            schedule.push_back({std::sqrt(tau * dts), dts, drift_table(spec, t)});
        }
        record_at[k] = schedule.size();
    }

    ParticleEnsemble ens;
    ens.seed = seed;
    ens.dt = dt;
    ens.times = times;
    ens.positions.assign(times.size(),
                         std::vector<double>(static_cast<size_t>(n_particles), 0.0));

    for (int p = 0; p < n_particles; ++p) {
        std::mt19937_64 eng(splitmix64(seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(p) + 1)));
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::normal_distribution<double> normal(0.0, 1.0);

        // invert the piecewise-linear CDF
        const double u = unif(eng) * total;
        const auto it = std::upper_bound(cum.begin(), cum.end(), u);
        size_t cell = static_cast<size_t>(std::distance(cum.begin(), it));
        cell = (cell == 0) ? 0 : cell - 1;
        if (cell >= static_cast<size_t>(grid.n)) cell = static_cast<size_t>(grid.n) - 1;
        const double cell_mass = cum[cell + 1] - cum[cell];
        double x = grid.nodes[cell];
        if (cell_mass > 0.0) x += h * (u - cum[cell]) / cell_mass;

        ens.positions[0][static_cast<size_t>(p)] = x;
        size_t idx = 0;
        for (size_t k = 1; k < times.size(); ++k) {
            for (; idx < record_at[k]; ++idx) {
                const SubStep& st = schedule[idx];
                x += drift_eval(st.drift, x) * st.dt + st.sqrt_noise * normal(eng);
                x = std::fmod(x, kTwoPi);
                if (x < 0.0) x += kTwoPi;
            }
            ens.positions[k][static_cast<size_t>(p)] = x;
        }
    }
    return ens;
}

GridDensity particle_histogram(const ParticleEnsemble& ens, size_t time_index,
                               const TorusGrid& grid) {
    if (time_index >= ens.positions.size())
        throw std::out_of_range("particle_histogram: time index out of range");
    std::vector<double> counts(static_cast<size_t>(grid.n), 0.0);
    for (double x : ens.positions[time_index]) {
        int cell = static_cast<int>(std::floor(x / grid.spacing));
        cell = std::clamp(cell, 0, grid.n - 1);
        counts[static_cast<size_t>(cell)] += 1.0;
    }
    return make_density(grid, std::move(counts));
}

double total_variation(const GridDensity& p, const GridDensity& q) {
    if (!same_grid(p.grid, q.grid))
        throw std::invalid_argument("total_variation: grids differ");
    double acc = 0.0;
    for (size_t i = 0; i < p.values.size(); ++i)
        acc += std::abs(p.values[i] - q.values[i]);
    return 0.5 * acc * p.grid.spacing;
}

void write_marginal_csv(std::ostream& os, const MarginalPath& path) {
    os << "t,x,rho\n";
    for (size_t k = 0; k < path.times.size(); ++k) {
        const GridDensity& rho = path.densities[k];
        for (int i = 0; i < rho.grid.n; ++i)
            os << format_double(path.times[k]) << ',' << format_double(rho.grid.nodes[static_cast<size_t>(i)])
               << ',' << format_double(rho.values[static_cast<size_t>(i)]) << '\n';
    }
}

void write_particle_csv(std::ostream& os, const ParticleEnsemble& ens) {
    os << "t,particle,x\n";
    for (size_t k = 0; k < ens.times.size(); ++k)
        for (size_t p = 0; p < ens.positions[k].size(); ++p)
            os << format_double(ens.times[k]) << ',' << p << ','
               << format_double(ens.positions[k][p]) << '\n';
}

}  // namespace msb
