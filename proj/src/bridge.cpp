#include "msb/bridge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "msb/format.hpp"
#include "msb/spectral.hpp"

namespace msb {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log sum over the circulant row/column: lse_j(dual[j] + logK[(i - j) mod n])
// for all i when stride_down, otherwise lse_i(dual[i] + logK[(i - j) mod n])
// for all j. -inf dual entries (empty marginal cells) drop out.
void circulant_lse(const std::vector<double>& dual, const std::vector<double>& logK,
                   bool stride_down, std::vector<double>& out) {
    const int n = static_cast<int>(dual.size());
    out.resize(dual.size());
    for (int r = 0; r < n; ++r) {
        int idx = stride_down ? r : (n - r) % n;
        double m = kNegInf;
        for (int j = 0; j < n; ++j) {
            const double v = dual[static_cast<size_t>(j)] + logK[static_cast<size_t>(idx)];
            if (v > m) m = v;
            if (stride_down) { if (--idx < 0) idx += n; }
            else             { if (++idx >= n) idx -= n; }
        }
        if (m == kNegInf) {
            out[static_cast<size_t>(r)] = kNegInf;
            continue;
        }
        double s = 0.0;
        idx = stride_down ? r : (n - r) % n;
        for (int j = 0; j < n; ++j) {
            const double v = dual[static_cast<size_t>(j)] + logK[static_cast<size_t>(idx)];
            if (v != kNegInf) s += std::exp(v - m);
            if (stride_down) { if (--idx < 0) idx += n; }
            else             { if (++idx >= n) idx -= n; }
        }
        out[static_cast<size_t>(r)] = m + std::log(s);
    }
}

struct DualSums {
    std::vector<double> h, dh;  // sum_j p(x_i - x_j) e^{dual_j - max}, and derivative
};

// Kernel-weighted sums of exponentiated duals, factored by the max so the
// exponentials stay in range. The common factor cancels in every ratio taken.
DualSums dual_kernel_sums(const TorusGrid& grid, const KernelProfile& prof,
                          const std::vector<double>& dual) {
    const int n = grid.n;
    double mx = kNegInf;
    for (double v : dual) mx = std::max(mx, v);
    std::vector<double> e(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double v = dual[static_cast<size_t>(j)];
        e[static_cast<size_t>(j)] = (v == kNegInf) ? 0.0 : std::exp(v - mx);
    }
    DualSums out;
    out.h.assign(static_cast<size_t>(n), 0.0);
    out.dh.assign(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        int idx = i;
        double hs = 0.0, ds = 0.0;
        for (int j = 0; j < n; ++j) {
            hs += prof.value[static_cast<size_t>(idx)] * e[static_cast<size_t>(j)];
            ds += prof.deriv[static_cast<size_t>(idx)] * e[static_cast<size_t>(j)];
            if (--idx < 0) idx += n;
        }
        out.h[static_cast<size_t>(i)] = hs;
        out.dh[static_cast<size_t>(i)] = ds;
    }
    return out;
}

void check_gap_resolution(const BridgeProblem& p, double gap, const char* what) {
    if (!p.strict_resolution) return;
    const double width = std::sqrt(p.tau * gap);
    const double need = kDriftResolutionGuard * p.rho_a.grid.spacing;
    if (width < need)
        throw std::domain_error(std::string(what) + ": sqrt(tau * gap) = " +
                                std::to_string(width) + " under-resolves the grid (need >= " +
                                std::to_string(need) + ")");
}

}  // namespace

std::vector<double> midpoint_times(double t_a, double t_b, int count) {
    if (count < 1) throw std::invalid_argument("midpoint_times: count must be >= 1");
    std::vector<double> out(static_cast<size_t>(count));
    const double span = t_b - t_a;
    for (int q = 0; q < count; ++q)
        out[static_cast<size_t>(q)] = t_a + span * (q + 0.5) / count;
    return out;
}

BridgeSolution solve_bridge(const BridgeProblem& problem, const SinkhornParams& params) {
    validate_density(problem.rho_a);
    validate_density(problem.rho_b);
    if (!same_grid(problem.rho_a.grid, problem.rho_b.grid))
        throw std::invalid_argument("solve_bridge: marginals live on different grids");
    if (!(problem.t_b > problem.t_a))
        throw std::invalid_argument("solve_bridge: need t_b > t_a");
    if (!(problem.tau > 0.0))
        throw std::invalid_argument("solve_bridge: tau must be positive");
    if (!(params.tolerance > 0.0) || params.max_iterations < 1)
        throw std::invalid_argument("solve_bridge: bad Sinkhorn parameters");

    const TorusGrid& grid = problem.rho_a.grid;
    const int n = grid.n;
    const double h = grid.spacing;
    const HeatKernelMatrix K =
        heat_kernel(grid, problem.t_b - problem.t_a, problem.tau, problem.strict_resolution);

    std::vector<double> logKh(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k)
        logKh[static_cast<size_t>(k)] = std::log(K.profile[static_cast<size_t>(k)]) + std::log(h);

    std::vector<double> la(static_cast<size_t>(n)), lb(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        la[static_cast<size_t>(i)] = std::log(problem.rho_a.values[static_cast<size_t>(i)] * h);
        lb[static_cast<size_t>(i)] = std::log(problem.rho_b.values[static_cast<size_t>(i)] * h);
    }

    std::vector<double> f(static_cast<size_t>(n), 0.0), g(static_cast<size_t>(n), 0.0), lse;
    BridgeSolution sol;
    sol.problem = problem;
    sol.residual_history.reserve(64);

    bool converged = false;
    for (int it = 1; it <= params.max_iterations; ++it) {
        circulant_lse(g, logKh, /*stride_down=*/true, lse);
        for (int i = 0; i < n; ++i) {
            const double v = la[static_cast<size_t>(i)];
            f[static_cast<size_t>(i)] = (v == kNegInf) ? kNegInf : v - lse[static_cast<size_t>(i)];
        }
        circulant_lse(f, logKh, /*stride_down=*/false, lse);
        for (int j = 0; j < n; ++j) {
            const double v = lb[static_cast<size_t>(j)];
            g[static_cast<size_t>(j)] = (v == kNegInf) ? kNegInf : v - lse[static_cast<size_t>(j)];
        }

        // L1 distance of both coupling marginals from the targets, in mass units
        double res = 0.0;
        {
            std::vector<double> col(static_cast<size_t>(n), 0.0);
            for (int i = 0; i < n; ++i) {
                const double fi = f[static_cast<size_t>(i)];
                double row = 0.0;
                if (fi != kNegInf) {
                    int idx = i;
                    for (int j = 0; j < n; ++j) {
                        const double gj = g[static_cast<size_t>(j)];
                        if (gj != kNegInf) {
                            const double mass = std::exp(fi + gj + logKh[static_cast<size_t>(idx)]);
                            row += mass;
                            col[static_cast<size_t>(j)] += mass;
                        }
                        if (--idx < 0) idx += n;
                    }
                }
                res += std::abs(row - problem.rho_a.values[static_cast<size_t>(i)] * h);
            }
            for (int j = 0; j < n; ++j)
                res += std::abs(col[static_cast<size_t>(j)] -
                                problem.rho_b.values[static_cast<size_t>(j)] * h);
        }
        sol.residual_history.push_back(res);
        sol.marginal_residual = res;
        sol.iterations = it;
        if (res <= params.tolerance) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw std::runtime_error("solve_bridge: no convergence after " +
                                 std::to_string(params.max_iterations) +
                                 " iterations, residual = " + std::to_string(sol.marginal_residual));

    // gauge: mean of the finite f entries is zero
    double mean = 0.0;
    int cnt = 0;
    for (double v : f)
        if (v != kNegInf) {
            mean += v;
            ++cnt;
        }
    mean /= std::max(cnt, 1);
    for (double& v : f)
        if (v != kNegInf) v -= mean;
    for (double& v : g)
        if (v != kNegInf) v += mean;

    sol.log_dual_a = std::move(f);
    sol.log_dual_b = std::move(g);
    return sol;
}

DenseMatrix BridgeSolution::coupling() const {
    const TorusGrid& grid = problem.rho_a.grid;
    const int n = grid.n;
    const KernelProfile prof =
        kernel_profile(grid, problem.tau * (problem.t_b - problem.t_a));
    DenseMatrix P(n, n);
    for (int i = 0; i < n; ++i) {
        const double fi = log_dual_a[static_cast<size_t>(i)];
        if (fi == kNegInf) continue;
        for (int j = 0; j < n; ++j) {
            const double gj = log_dual_b[static_cast<size_t>(j)];
            if (gj == kNegInf) continue;
            int d = i - j;
            if (d < 0) d += n;
            P.at(i, j) = std::exp(fi + gj) * prof.value[static_cast<size_t>(d)] * grid.spacing;
        }
    }
    return P;
}

GridField bridge_drift(const BridgeSolution& sol, double t) {
    const BridgeProblem& p = sol.problem;
    if (!(t >= p.t_a && t < p.t_b))
        throw std::invalid_argument("bridge_drift: t must lie in [t_a, t_b)");
    const double s = p.t_b - t;
    check_gap_resolution(p, s, "bridge_drift");
    const TorusGrid& grid = p.rho_a.grid;
    const KernelProfile prof = kernel_profile(grid, p.tau * s);
    const DualSums sums = dual_kernel_sums(grid, prof, sol.log_dual_b);
    GridField v{grid, std::vector<double>(static_cast<size_t>(grid.n))};
    for (int i = 0; i < grid.n; ++i)
        v.values[static_cast<size_t>(i)] =
            p.tau * sums.dh[static_cast<size_t>(i)] / sums.h[static_cast<size_t>(i)];
    return v;
}

GridDensity entropic_interpolation(const BridgeSolution& sol, double t) {
    const BridgeProblem& p = sol.problem;
    if (!(t > p.t_a && t < p.t_b))
        throw std::invalid_argument("entropic_interpolation: t must lie in (t_a, t_b)");
    check_gap_resolution(p, t - p.t_a, "entropic_interpolation");
    check_gap_resolution(p, p.t_b - t, "entropic_interpolation");
    const TorusGrid& grid = p.rho_a.grid;
    const DualSums fwd =
        dual_kernel_sums(grid, kernel_profile(grid, p.tau * (t - p.t_a)), sol.log_dual_a);
    const DualSums bwd =
        dual_kernel_sums(grid, kernel_profile(grid, p.tau * (p.t_b - t)), sol.log_dual_b);
    std::vector<double> mu(static_cast<size_t>(grid.n));
    for (int i = 0; i < grid.n; ++i)
        mu[static_cast<size_t>(i)] = fwd.h[static_cast<size_t>(i)] * bwd.h[static_cast<size_t>(i)];
    return make_density(grid, std::move(mu));
}

GridField current_velocity(const BridgeSolution& sol, double t) {
    const BridgeProblem& p = sol.problem;
    if (!(t > p.t_a && t < p.t_b))
        throw std::invalid_argument("current_velocity: t must lie in (t_a, t_b)");
    check_gap_resolution(p, t - p.t_a, "current_velocity");
    check_gap_resolution(p, p.t_b - t, "current_velocity");
    const TorusGrid& grid = p.rho_a.grid;
    const DualSums fwd =
        dual_kernel_sums(grid, kernel_profile(grid, p.tau * (t - p.t_a)), sol.log_dual_a);
    const DualSums bwd =
        dual_kernel_sums(grid, kernel_profile(grid, p.tau * (p.t_b - t)), sol.log_dual_b);
    GridField v{grid, std::vector<double>(static_cast<size_t>(grid.n))};
    for (int i = 0; i < grid.n; ++i) {
        const size_t k = static_cast<size_t>(i);
        v.values[k] = 0.5 * p.tau * (bwd.dh[k] / bwd.h[k] - fwd.dh[k] / fwd.h[k]);
    }
    return v;
}

double girsanov_interval_kl(const BridgeSolution& sol, const PotentialSpec& spec,
                            const MarginalPath& path, int quad_points) {
    const BridgeProblem& p = sol.problem;
    if (!same_grid(path.grid(), p.rho_a.grid))
        throw std::invalid_argument("girsanov_interval_kl: path grid differs from bridge grid");
    const std::vector<double> mids = midpoint_times(p.t_a, p.t_b, quad_points);
    const double w = (p.t_b - p.t_a) / quad_points;
    const TorusGrid& grid = p.rho_a.grid;
    double total = 0.0;
    for (double t : mids) {
        const GridField v = bridge_drift(sol, t);
        const GridDensity& rho = path.density_at(t);
        double s = 0.0;
        for (int i = 0; i < grid.n; ++i) {
            const size_t k = static_cast<size_t>(i);
            const double diff = psi_dx(spec, t, grid.nodes[k]) - v.values[k];
            s += diff * diff * rho.values[k];
        }
        total += s;
    }
    return total * grid.spacing * w / (2.0 * p.tau);
}

double kl_vs_wiener(const PotentialSpec& spec, const GridDensity& rho_a, double t_a,
                    double t_b, double tau, int quad_points, const StepPolicy& policy) {
    if (!(t_b > t_a)) throw std::invalid_argument("kl_vs_wiener: need t_b > t_a");
    const std::vector<double> mids = midpoint_times(t_a, t_b, quad_points);
    const double w = (t_b - t_a) / quad_points;
    const TorusGrid& grid = rho_a.grid;
    GridDensity rho = rho_a;
    double t_cur = t_a;
    double total = 0.0;
    for (double t : mids) {
        rho = evolve(rho, spec, tau, t_cur, t, steps_for(policy, spec, grid, t_cur, t));
        t_cur = t;
        double s = 0.0;
        for (int i = 0; i < grid.n; ++i) {
            const size_t k = static_cast<size_t>(i);
            const double d = psi_dx(spec, t, grid.nodes[k]);
            s += d * d * rho.values[k];
        }
        total += s;
    }
    return total * grid.spacing * w / (2.0 * tau);
}

BenamouTerms benamou_objective(const BridgeSolution& sol, int quad_points) {
    const BridgeProblem& p = sol.problem;
    if (p.tau != 1.0)
        throw std::invalid_argument("benamou_objective: defined for unit noise (tau = 1)");
    const double eps = p.t_b - p.t_a;
    const std::vector<double> mids = midpoint_times(p.t_a, p.t_b, quad_points);
    const TorusGrid& grid = p.rho_a.grid;
    const double h = grid.spacing;
    BenamouTerms out;
    for (double t : mids) {
        check_gap_resolution(p, t - p.t_a, "benamou_objective");
        check_gap_resolution(p, p.t_b - t, "benamou_objective");
        const DualSums fwd =
            dual_kernel_sums(grid, kernel_profile(grid, t - p.t_a), sol.log_dual_a);
        const DualSums bwd =
            dual_kernel_sums(grid, kernel_profile(grid, p.t_b - t), sol.log_dual_b);
        double z = 0.0;
        for (int i = 0; i < grid.n; ++i)
            z += fwd.h[static_cast<size_t>(i)] * bwd.h[static_cast<size_t>(i)];
        z *= h;
        double kin = 0.0, fis = 0.0;
        for (int i = 0; i < grid.n; ++i) {
            const size_t k = static_cast<size_t>(i);
            const double mu = fwd.h[k] * bwd.h[k] / z;
            const double lf = fwd.dh[k] / fwd.h[k];
            const double lbk = bwd.dh[k] / bwd.h[k];
            const double vel = 0.5 * (lbk - lf);
            const double dlog = lf + lbk;
            kin += vel * vel * mu;
            fis += dlog * dlog * mu;
        }
        out.kinetic += 0.5 * eps * eps * kin * h / quad_points;
        out.fisher += 0.125 * eps * eps * fis * h / quad_points;
    }
    return out;
}

BenamouTerms benamou_reference(const PotentialSpec& spec, const MarginalPath& path,
                               double t_a, double t_b, int quad_points) {
    if (path.tau != 1.0)
        throw std::invalid_argument("benamou_reference: defined for unit noise (tau = 1)");
    const double eps = t_b - t_a;
    const std::vector<double> mids = midpoint_times(t_a, t_b, quad_points);
    const TorusGrid& grid = path.grid();
    const double h = grid.spacing;
    SpectralWorkspace ws(grid.n);
    std::vector<double> logrho(static_cast<size_t>(grid.n)), dlog;
    BenamouTerms out;
    for (double t : mids) {
        const GridDensity& rho = path.density_at(t);
        for (int i = 0; i < grid.n; ++i)
            logrho[static_cast<size_t>(i)] =
                std::log(std::max(rho.values[static_cast<size_t>(i)], kLogFloor));
        ws.derivative(logrho, dlog);
        double kin = 0.0, fis = 0.0;
        for (int i = 0; i < grid.n; ++i) {
            const size_t k = static_cast<size_t>(i);
            const double vel = psi_dx(spec, t, grid.nodes[k]) - 0.5 * dlog[k];
            kin += vel * vel * rho.values[k];
            fis += dlog[k] * dlog[k] * rho.values[k];
        }
        out.kinetic += 0.5 * eps * eps * kin * h / quad_points;
        out.fisher += 0.125 * eps * eps * fis * h / quad_points;
    }
    return out;
}

void write_bridge_report(std::ostream& os, const BridgeSolution& sol) {
    const BridgeProblem& p = sol.problem;
    os << "# bridge [" << format_double(p.t_a) << ", " << format_double(p.t_b)
       << "], tau = " << format_double(p.tau) << ", n = " << p.rho_a.grid.n << '\n';
    os << "# iterations = " << sol.iterations
       << ", marginal residual = " << format_double(sol.marginal_residual) << '\n';
    os << "i,x,log_dual_a,log_dual_b\n";
    for (int i = 0; i < p.rho_a.grid.n; ++i) {
        const size_t k = static_cast<size_t>(i);
        os << i << ',' << format_double(p.rho_a.grid.nodes[k]) << ','
           << format_double(sol.log_dual_a[k]) << ',' << format_double(sol.log_dual_b[k]) << '\n';
    }
}

void write_coupling_csv(std::ostream& os, const BridgeSolution& sol) {
    const int n = sol.problem.rho_a.grid.n;
    if (n > 64)
        throw std::invalid_argument("write_coupling_csv: dense output limited to n <= 64");
    const DenseMatrix P = sol.coupling();
    os << "i,j,mass\n";
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            os << i << ',' << j << ',' << format_double(P.at(i, j)) << '\n';
}

}  // namespace msb
