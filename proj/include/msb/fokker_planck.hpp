#pragma once
/*
 * Forward Kolmogorov solver for dZ_t = psi_x(t, Z_t) dt + sqrt(tau) dB_t:
 *
 *   d(rho)/dt = -d/dx(rho psi_x) + (tau/2) d2/dx2 rho
 *
 * Time stepping is Strang splitting. Each step applies an exact spectral
 * half-step of diffusion, a Heun (RK2) full step of the advection flux with
 * the drift frozen at the step midpoint, and a second diffusion half-step.
 * Mass is conserved to rounding; negative undershoots are clipped and the
 * density renormalized, with the clipped mass tracked and bounded.
 */

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "msb/potential.hpp"
#include "msb/torus.hpp"

namespace msb {

// Total clipped mass allowed over one evolve call before aborting.
inline constexpr double kMaxClippedMass = 1e-8;

struct StepPolicy {
    double dt_target = 1e-3;
    double cfl_safety = 0.5;  // max |psi_x| * dt / spacing stays below this
};

int steps_for(const StepPolicy& policy, const PotentialSpec& spec, const TorusGrid& grid,
              double t_from, double t_to);

struct EvolveStats {
    double clipped_mass = 0.0;
    int steps = 0;
};

GridDensity evolve(const GridDensity& rho0, const PotentialSpec& spec, double tau,
                   double t_from, double t_to, int n_steps, EvolveStats* stats = nullptr);

// Densities of the SDE at a fixed list of times, all sharing one grid.
struct MarginalPath {
    double tau = 0.0;
    std::vector<double> times;
    std::vector<GridDensity> densities;

    const TorusGrid& grid() const;
    bool has_time(double t) const;
    const GridDensity& density_at(double t) const;  // matches within 1e-12
};

MarginalPath marginal_path(const GridDensity& rho0, const PotentialSpec& spec, double tau,
                           const std::vector<double>& times, const StepPolicy& policy = {});

// ── reference densities ─────────────────────────────────────────────────────

GridDensity uniform_density(const TorusGrid& grid);
GridDensity von_mises_density(const TorusGrid& grid, double kappa, double center = 0.0);
GridDensity wrapped_gaussian_density(const TorusGrid& grid, double center, double variance);
// Invariant density exp(2 psi(0, x) / tau) of the frozen t = 0 drift.
GridDensity stationary_density(const TorusGrid& grid, const PotentialSpec& spec, double tau);

// ── particle simulation ─────────────────────────────────────────────────────

struct ParticleEnsemble {
    std::uint64_t seed = 0;
    double dt = 0.0;
    std::vector<double> times;
    std::vector<std::vector<double>> positions;  // positions[k][p] at times[k]
};

// Euler-Maruyama with step <= dt, positions recorded at the given times
// (the first entry is the sampling time of the initial condition). Each
// particle draws from its own counter-seeded generator, so results do not
// depend on particle count ordering or batching.
ParticleEnsemble simulate_particles(const GridDensity& rho0, const PotentialSpec& spec,
                                    double tau, const std::vector<double>& times, double dt,
                                    int n_particles, std::uint64_t seed);

// Empirical histogram of one recorded snapshot, normalized on the grid.
GridDensity particle_histogram(const ParticleEnsemble& ens, size_t time_index,
                               const TorusGrid& grid);

double total_variation(const GridDensity& p, const GridDensity& q);

void write_marginal_csv(std::ostream& os, const MarginalPath& path);
void write_particle_csv(std::ostream& os, const ParticleEnsemble& ens);

}  // namespace msb
