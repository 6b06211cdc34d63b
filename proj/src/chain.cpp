#include "msb/chain.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace msb {

double TimeGrid::max_gap() const {
    double g = 0.0;
    for (size_t k = 1; k < times.size(); ++k) g = std::max(g, times[k] - times[k - 1]);
    return g;
}

TimeGrid uniform_time_grid(double horizon, int m) {
    if (!(horizon > 0.0)) throw std::invalid_argument("uniform_time_grid: horizon must be positive");
    if (m < 1) throw std::invalid_argument("uniform_time_grid: need at least one interval");
    TimeGrid tg;
    tg.horizon = horizon;
    tg.times.resize(static_cast<size_t>(m) + 1);
    for (int k = 0; k <= m; ++k) tg.times[static_cast<size_t>(k)] = horizon * k / m;
    return tg;
}

TimeGrid time_grid_from(std::vector<double> times) {
    if (times.size() < 2) throw std::invalid_argument("time_grid_from: need at least two times");
    if (times.front() != 0.0) throw std::invalid_argument("time_grid_from: times must start at 0");
    for (size_t k = 1; k < times.size(); ++k)
        if (!(times[k] > times[k - 1]))
            throw std::invalid_argument("time_grid_from: times must be strictly increasing");
    TimeGrid tg;
    tg.horizon = times.back();
    tg.times = std::move(times);
    return tg;
}

MsbSolution solve_msb(const PotentialSpec& spec, const GridDensity& rho0, double tau,
                      const TimeGrid& tgrid, const MsbParams& params) {
    if (tgrid.intervals() < 1) throw std::invalid_argument("solve_msb: empty time grid");
    if (params.quad_points < 1) throw std::invalid_argument("solve_msb: quad_points must be >= 1");

    // one marginal sweep carrying knots and all quadrature midpoints
    std::vector<double> all_times = tgrid.times;
    for (int j = 0; j < tgrid.intervals(); ++j) {
        const auto mids = midpoint_times(tgrid.times[static_cast<size_t>(j)],
                                         tgrid.times[static_cast<size_t>(j) + 1],
                                         params.quad_points);
        all_times.insert(all_times.end(), mids.begin(), mids.end());
    }
    std::sort(all_times.begin(), all_times.end());

    MsbSolution sol;
    sol.tau = tau;
    sol.tgrid = tgrid;
    sol.path = marginal_path(rho0, spec, tau, all_times, params.fp);
    sol.bridges.reserve(static_cast<size_t>(tgrid.intervals()));
    sol.per_interval_kl.reserve(static_cast<size_t>(tgrid.intervals()));

    for (int j = 0; j < tgrid.intervals(); ++j) {
        const double ta = tgrid.times[static_cast<size_t>(j)];
        const double tb = tgrid.times[static_cast<size_t>(j) + 1];
        BridgeProblem bp;
        bp.rho_a = sol.path.density_at(ta);
        bp.rho_b = sol.path.density_at(tb);
        bp.t_a = ta;
        bp.t_b = tb;
        bp.tau = tau;
        bp.strict_resolution = params.strict_resolution;
        sol.bridges.push_back(solve_bridge(bp, params.sinkhorn));
        const BridgeSolution& bs = sol.bridges.back();
        sol.total_iterations += bs.iterations;
        sol.max_residual = std::max(sol.max_residual, bs.marginal_residual);
        sol.per_interval_kl.push_back(
            girsanov_interval_kl(bs, spec, sol.path, params.quad_points));
    }
    for (double v : sol.per_interval_kl) sol.total_kl += v;
    return sol;
}

double theoretical_bound(double c1, double c2, double horizon, double max_gap) {
    if (!(c1 >= 0.0) || !(c2 >= 0.0))
        throw std::invalid_argument("theoretical_bound: constants must be nonnegative");
    if (!(horizon > 0.0) || !(max_gap > 0.0) || max_gap > horizon * (1.0 + 1e-12))
        throw std::invalid_argument("theoretical_bound: need 0 < max_gap <= horizon");
    return horizon * max_gap * (1.5 * c1 + std::sqrt(2.5 * c1) * c2);
}

BoundCheck check_against_bound(const MsbSolution& sol, double c1, double c2) {
    BoundCheck bc;
    bc.c1 = c1;
    bc.c2 = c2;
    bc.total_kl = sol.total_kl;
    bc.bound = theoretical_bound(c1, c2, sol.tgrid.horizon, sol.tgrid.max_gap());
    bc.degenerate = (c1 == 0.0);
    bc.holds = bc.degenerate ? true : (sol.total_kl <= bc.bound);
    if (!sol.per_interval_kl.empty())
        bc.dominant_interval = static_cast<int>(
            std::max_element(sol.per_interval_kl.begin(), sol.per_interval_kl.end()) -
            sol.per_interval_kl.begin());
    return bc;
}

namespace {

// SDE transition row: evolve a width-sigma source from x_center on the fine
// grid and sample the result at the coarse nodes (every ratio-th fine node),
// so both couplings use the same node-sample convention and no binning
// offset enters.
std::vector<double> transition_row(const PotentialSpec& spec, double tau, double t_a,
                                   double t_b, const TorusGrid& fine, double x_center,
                                   double variance, int ratio, const StepPolicy& fp) {
    GridDensity src = wrapped_gaussian_density(fine, x_center, variance);
    const GridDensity dst =
        evolve(src, spec, tau, t_a, t_b, steps_for(fp, spec, fine, t_a, t_b));
    const int n_coarse = fine.n / ratio;
    std::vector<double> row(static_cast<size_t>(n_coarse));
    for (int k = 0; k < n_coarse; ++k)
        row[static_cast<size_t>(k)] = dst.values[static_cast<size_t>(k) * ratio];
    return row;
}

}  // namespace

std::vector<double> pairwise_interval_kl(const MsbSolution& sol, const PotentialSpec& spec,
                                         const PairwiseParams& params) {
    const TorusGrid& grid = sol.path.grid();
    const int n = grid.n;
    if (n > 64)
        throw std::invalid_argument("pairwise_interval_kl: dense diagnostic limited to n <= 64");
    if (params.fine_n % n != 0 || params.fine_n < 2 * n)
        throw std::invalid_argument(
            "pairwise_interval_kl: fine_n must be a multiple of n and at least 2n");
    const TorusGrid fine = make_grid(1, params.fine_n);
    const int ratio = params.fine_n / n;
    const double sigma = params.smear_cells * fine.spacing;
    const double h = grid.spacing;

    std::vector<double> out;
    out.reserve(sol.bridges.size());
    for (size_t j = 0; j < sol.bridges.size(); ++j) {
        const double ta = sol.tgrid.times[j];
        const double tb = sol.tgrid.times[j + 1];
        const GridDensity& rho_a = sol.path.density_at(ta);

        // Richardson in the source variance removes the smear to O(sigma^4)
        DenseMatrix sde(n, n);
        for (int i = 0; i < n; ++i) {
            const double xc = grid.nodes[static_cast<size_t>(i)];
            const auto narrow = transition_row(spec, sol.tau, ta, tb, fine, xc,
                                               sigma * sigma, ratio, params.fp);
            const auto wide = transition_row(spec, sol.tau, ta, tb, fine, xc,
                                             2.0 * sigma * sigma, ratio, params.fp);
            double mass = 0.0;
            for (int k = 0; k < n; ++k) {
                double v = 2.0 * narrow[static_cast<size_t>(k)] - wide[static_cast<size_t>(k)];
                if (v < 0.0) v = 0.0;
                sde.at(i, k) = v;
                mass += v;
            }
            const double row_mass = rho_a.values[static_cast<size_t>(i)] * h;
            for (int k = 0; k < n; ++k) sde.at(i, k) *= row_mass / mass;
        }

        DenseMatrix bridge = sol.bridges[j].coupling();
        // both as densities under the cell weight h^2
        const double inv_w = 1.0 / (h * h);
        for (double& v : sde.data) v *= inv_w;
        for (double& v : bridge.data) v *= inv_w;
        out.push_back(kl_coupling(sde, bridge, h * h));
    }
    return out;
}

void write_msb_json(std::ostream& os, const MsbSolution& sol, const BoundCheck* bc) {
    nlohmann::ordered_json j;
    j["tau"] = sol.tau;
    j["horizon"] = sol.tgrid.horizon;
    j["intervals"] = sol.tgrid.intervals();
    j["knots"] = sol.tgrid.times;
    j["grid_n"] = sol.path.grid().n;
    j["per_interval_kl"] = sol.per_interval_kl;
    j["total_kl"] = sol.total_kl;
    j["sinkhorn_iterations"] = sol.total_iterations;
    j["max_marginal_residual"] = sol.max_residual;
    if (bc) {
        j["bound"] = {{"c1", bc->c1},
                      {"c2", bc->c2},
                      {"value", bc->bound},
                      {"total_kl", bc->total_kl},
                      {"holds", bc->holds},
                      {"degenerate", bc->degenerate},
                      {"dominant_interval", bc->dominant_interval}};
    }
    os << j.dump(2) << '\n';
}

}  // namespace msb
