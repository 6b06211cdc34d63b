#pragma once
/*
 * Two-marginal Schrodinger bridges on the torus grid.
 *
 * The static problem minimizes KL(pi || K) over couplings pi with prescribed
 * marginals, where K_ij = p_{t_b - t_a}^tau(x_i, x_j) * h is the heat-kernel
 * transition mass. It is solved by Sinkhorn iteration in the log domain on
 * dual potentials (f, g), so vanishing marginal entries and long intervals
 * are handled without under- or overflow. The optimal coupling is
 *
 *   pi_ij = exp(f_i + g_j) K_ij,   gauge: sum_i f_i = 0.
 *
 * From the duals the solver exposes the dynamic picture: the h-transform
 * drift tau * d/dx log(sum_j p_{t_b - t}(x - x_j) e^{g_j}), the entropic
 * interpolation between the marginals, and path-space KL functionals
 * evaluated by midpoint quadrature in time.
 */

#include <iosfwd>
#include <vector>

#include "msb/fokker_planck.hpp"
#include "msb/potential.hpp"
#include "msb/torus.hpp"

namespace msb {

// Drift and interpolation evaluations need sqrt(tau * s) >= 0.6 * spacing,
// where s is the gap to the nearer endpoint; closer than that the discrete
// dual sums no longer resolve the kernel. Bridge construction itself uses
// the stricter kKernelMatrixGuard.
inline constexpr double kDriftResolutionGuard = 0.6;

struct SinkhornParams {
    double tolerance = 1e-10;   // L1 residual of both marginals, in mass units
    int max_iterations = 100000;
};

struct BridgeProblem {
    GridDensity rho_a;
    GridDensity rho_b;
    double t_a = 0.0;
    double t_b = 0.0;
    double tau = 1.0;
    bool strict_resolution = true;
};

struct BridgeSolution {
    BridgeProblem problem;
    std::vector<double> log_dual_a;  // f, gauged to mean zero over finite entries
    std::vector<double> log_dual_b;  // g
    double marginal_residual = 0.0;
    int iterations = 0;
    std::vector<double> residual_history;

    DenseMatrix coupling() const;  // mass matrix, sums to 1
};

BridgeSolution solve_bridge(const BridgeProblem& problem, const SinkhornParams& params = {});

// Quadrature nodes t_a + (q + 1/2) (t_b - t_a) / count. Every consumer of
// interior bridge quantities uses this exact sequence, so marginal paths can
// be built to carry precisely these times.
std::vector<double> midpoint_times(double t_a, double t_b, int count);

// Drift of the bridge SDE at time t in [t_a, t_b).
GridField bridge_drift(const BridgeSolution& sol, double t);

// Marginal of the bridge at interior time t in (t_a, t_b).
GridDensity entropic_interpolation(const BridgeSolution& sol, double t);

// Current velocity (tau/2) * d/dx log(H_bwd / H_fwd) at interior time t.
GridField current_velocity(const BridgeSolution& sol, double t);

/*
 * KL on path space between the SDE with drift psi_x and the bridge over
 * [t_a, t_b], by the Girsanov identity
 *
 *   KL = (1 / 2 tau) int_{t_a}^{t_b} E_rho_t |psi_x(t, .) - v_bridge(t, .)|^2 dt
 *
 * with midpoint quadrature. path must contain the SDE marginals at the
 * quadrature times (see midpoint_times).
 */
double girsanov_interval_kl(const BridgeSolution& sol, const PotentialSpec& spec,
                            const MarginalPath& path, int quad_points = 32);

// Same quadrature for KL of the SDE law against the driftless (Wiener)
// reference: (1 / 2 tau) int E_rho_t |psi_x|^2 dt. rho_a is the SDE marginal
// at t_a and is evolved through the quadrature midpoints internally.
double kl_vs_wiener(const PotentialSpec& spec, const GridDensity& rho_a, double t_a,
                    double t_b, double tau, int quad_points = 32,
                    const StepPolicy& policy = {});

/*
 * Action of the bridge in rescaled time, for unit noise. With eps = t_b - t_a
 * and the bridge marginals mu_s, s in [0, 1]:
 *
 *   kinetic = int_0^1 (eps^2 / 2) E_mu_s |u_s|^2 ds
 *   fisher  = int_0^1 (eps^2 / 8) E_mu_s |d/dx log mu_s|^2 ds
 *
 * where u is the current velocity in rescaled time. The bridge minimizes
 * kinetic + fisher among curves joining its endpoints; benamou_reference
 * evaluates the same functional on the SDE marginal flow with its own
 * current velocity psi_x - (1/2) d/dx log rho, giving an upper bound.
 */
struct BenamouTerms {
    double kinetic = 0.0;
    double fisher = 0.0;
    double total() const { return kinetic + fisher; }
};

BenamouTerms benamou_objective(const BridgeSolution& sol, int quad_points = 32);
BenamouTerms benamou_reference(const PotentialSpec& spec, const MarginalPath& path,
                               double t_a, double t_b, int quad_points = 32);

void write_bridge_report(std::ostream& os, const BridgeSolution& sol);
void write_coupling_csv(std::ostream& os, const BridgeSolution& sol);  // grids up to n = 64

}  // namespace msb
