#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "msb/bridge.hpp"

using namespace msb;

namespace {

GridDensity exp_cos_density(const TorusGrid& g) {
    std::vector<double> v(static_cast<size_t>(g.n));
    for (int i = 0; i < g.n; ++i)
        v[static_cast<size_t>(i)] = std::exp(std::cos(g.nodes[static_cast<size_t>(i)]));
    return make_density(g, std::move(v));
}

GridDensity exp_sin_density(const TorusGrid& g) {
    std::vector<double> v(static_cast<size_t>(g.n));
    for (int i = 0; i < g.n; ++i)
        v[static_cast<size_t>(i)] = std::exp(std::sin(g.nodes[static_cast<size_t>(i)]));
    return make_density(g, std::move(v));
}

// marginal path carrying the knots and the quadrature midpoints of [t_a, t_b]
MarginalPath path_with_midpoints(const GridDensity& rho0, const PotentialSpec& spec,
                                 double tau, double t_a, double t_b, int quad_points,
                                 const StepPolicy& policy = {}) {
    std::vector<double> times{t_a};
    const auto mids = midpoint_times(t_a, t_b, quad_points);
    times.insert(times.end(), mids.begin(), mids.end());
    times.push_back(t_b);
    return marginal_path(rho0, spec, tau, times, policy);
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_SUITE("bridge") {

TEST_CASE("midpoint quadrature nodes are exact") {
    const std::vector<double> m = midpoint_times(0.0, 1.0, 4);
    REQUIRE(m.size() == 4);
    CHECK(m[0] == 0.125);
    CHECK(m[1] == 0.375);
    CHECK(m[2] == 0.625);
    CHECK(m[3] == 0.875);
    CHECK(midpoint_times(0.5, 1.5, 1) == std::vector<double>{1.0});
    CHECK_THROWS_AS(midpoint_times(0.0, 1.0, 0), std::invalid_argument);
}

TEST_CASE("uniform marginals are a Sinkhorn fixed point") {
    const TorusGrid g = make_grid(1, 32);
    BridgeProblem bp;
    bp.rho_a = uniform_density(g);
    bp.rho_b = uniform_density(g);
    bp.t_a = 0.0;
    bp.t_b = 0.5;
    bp.tau = 1.0;
    const BridgeSolution sol = solve_bridge(bp);
    CHECK(sol.iterations <= 2);
    CHECK(sol.marginal_residual <= 1e-12);
    // gauge puts all of the constant into g: f = 0, g = log(1/n)
    for (int i = 0; i < g.n; ++i) {
        CHECK(std::abs(sol.log_dual_a[static_cast<size_t>(i)]) <= 1e-12);
        CHECK(sol.log_dual_b[static_cast<size_t>(i)] ==
              doctest::Approx(-std::log(32.0)).epsilon(1e-12));
    }
    // coupling = uniform source times the transition kernel
    const DenseMatrix P = sol.coupling();
    const HeatKernelMatrix K = heat_kernel(g, 0.5, 1.0);
    for (int i : {0, 7})
        for (int j : {0, 13})
            CHECK(P.at(i, j) ==
                  doctest::Approx(K.entry(i, j) * g.spacing * g.spacing / kTwoPi).epsilon(1e-12));

    // interior marginal stays flat, drift and both action terms vanish
    const GridDensity mu = entropic_interpolation(sol, 0.25);
    for (double v : mu.values) CHECK(v == doctest::Approx(1.0 / kTwoPi).epsilon(1e-12));
    const GridField drift = bridge_drift(sol, 0.25);
    for (double v : drift.values) CHECK(std::abs(v) <= 1e-12);
    const BenamouTerms act = benamou_objective(sol, 8);
    CHECK(std::abs(act.kinetic) <= 1e-12);
    CHECK(std::abs(act.fisher) <= 1e-12);
    const MarginalPath flat =
        path_with_midpoints(uniform_density(g), zero_potential(), 1.0, 0.0, 0.5, 8);
    const BenamouTerms ref = benamou_reference(zero_potential(), flat, 0.0, 0.5, 8);
    CHECK(std::abs(ref.total()) <= 1e-12);
}

TEST_CASE("duals match an extended-precision dense solve on a coarse toy") {
    // n = 8, tau = 1, interval 0.2; reference computed with a 50-digit dense
    // Sinkhorn run to residual < 1e-42, gauged to mean-zero f
    const TorusGrid g = make_grid(1, 8);
    BridgeProblem bp;
    bp.rho_a = exp_cos_density(g);
    bp.rho_b = exp_sin_density(g);
    bp.t_a = 0.0;
    bp.t_b = 0.2;
    bp.tau = 1.0;
    bp.strict_resolution = false;  // deliberately coarse
    SinkhornParams params;
    params.tolerance = 1e-12;
    const BridgeSolution sol = solve_bridge(bp, params);

    const std::vector<double> f_ref{
        4.1085208216033332, 0.025096281749469528, -3.645213860738624, -5.7020291152181699,
        -4.6005014242961197, -1.1378163339157259, 3.8486196760521633, 7.1033239547636734};
    const std::vector<double> g_ref{
        -7.7319743356527911, -4.0616641931646976, 0.021760346689166112, 3.0165634798495063,
        -0.23814079886200379, -5.224576808829893, -8.6872618992102868, -9.788789590132337};
    CHECK(sup_diff(sol.log_dual_a, f_ref) <= 1e-8);
    CHECK(sup_diff(sol.log_dual_b, g_ref) <= 1e-8);
}

TEST_CASE("marginal residuals decrease monotonically to convergence") {
    const TorusGrid g = make_grid(1, 64);
    BridgeProblem bp;
    bp.rho_a = exp_cos_density(g);
    bp.rho_b = exp_sin_density(g);
    bp.t_a = 0.0;
    bp.t_b = 0.25;
    bp.tau = 1.0;
    const BridgeSolution sol = solve_bridge(bp);
    REQUIRE(sol.residual_history.size() >= 2);
    for (size_t k = 1; k < sol.residual_history.size(); ++k)
        CHECK(sol.residual_history[k] <=
              sol.residual_history[k - 1] * (1.0 + 1e-12) + 1e-16);
    CHECK(sol.residual_history.back() == sol.marginal_residual);
    CHECK(static_cast<int>(sol.residual_history.size()) == sol.iterations);
}

TEST_CASE("the coupling reproduces both marginals and unit mass") {
    const TorusGrid g = make_grid(1, 64);
    BridgeProblem bp;
    bp.rho_a = exp_cos_density(g);
    bp.rho_b = exp_sin_density(g);
    bp.t_a = 0.0;
    bp.t_b = 0.3;
    bp.tau = 1.0;
    const BridgeSolution sol = solve_bridge(bp);
    const DenseMatrix P = sol.coupling();
    double total = 0.0, l1 = 0.0;
    for (int i = 0; i < g.n; ++i) {
        double row = 0.0, col = 0.0;
        for (int j = 0; j < g.n; ++j) {
            row += P.at(i, j);
            col += P.at(j, i);
            total += P.at(i, j);
        }
        l1 += std::abs(row - bp.rho_a.values[static_cast<size_t>(i)] * g.spacing);
        l1 += std::abs(col - bp.rho_b.values[static_cast<size_t>(i)] * g.spacing);
    }
    CHECK(std::abs(total - 1.0) <= 1e-12);
    CHECK(l1 <= 1e-10);
}

TEST_CASE("solve_bridge enforces the kernel resolution guard") {
    const TorusGrid g = make_grid(1, 64);
    BridgeProblem bp;
    bp.rho_a = exp_cos_density(g);
    bp.rho_b = exp_sin_density(g);
    bp.t_a = 0.0;
    bp.t_b = 0.02;  // sqrt(0.02) = 0.14 < 2 * spacing = 0.196
    bp.tau = 1.0;
    CHECK_THROWS_AS(solve_bridge(bp), std::domain_error);
    bp.strict_resolution = false;
    CHECK_NOTHROW(solve_bridge(bp));
}

TEST_CASE("interior evaluations refuse gaps the grid does not resolve") {
    const TorusGrid g = make_grid(1, 64);
    BridgeProblem bp;
    bp.rho_a = exp_cos_density(g);
    bp.rho_b = exp_sin_density(g);
    bp.t_a = 0.0;
    bp.t_b = 0.25;
    bp.tau = 1.0;
    const BridgeSolution sol = solve_bridge(bp);
    CHECK_THROWS_AS(bridge_drift(sol, 0.25 - 1e-4), std::domain_error);
    CHECK_THROWS_AS(entropic_interpolation(sol, 1e-4), std::domain_error);
    CHECK_THROWS_AS(bridge_drift(sol, 0.3), std::invalid_argument);  // outside the interval
    CHECK_NOTHROW(bridge_drift(sol, 0.1));

    bp.strict_resolution = false;
    const BridgeSolution lax = solve_bridge(bp);
    CHECK_NOTHROW(bridge_drift(lax, 0.25 - 1e-4));
}

TEST_CASE("a drift-free bridge between heat-flow marginals is the prior itself") {
    const TorusGrid g = make_grid(1, 64);
    const GridDensity rho0 = von_mises_density(g, 1.0, 0.0);
    const MarginalPath path = path_with_midpoints(rho0, zero_potential(), 1.0, 0.0, 0.4, 8);
    BridgeProblem bp;
    bp.rho_a = rho0;
    bp.rho_b = path.density_at(0.4);
    bp.t_a = 0.0;
    bp.t_b = 0.4;
    bp.tau = 1.0;
    SinkhornParams params;
    params.tolerance = 1e-12;
    const BridgeSolution sol = solve_bridge(bp, params);

    for (double t : {0.0, 0.15, 0.3}) {
        const GridField v = bridge_drift(sol, t);
        for (double vi : v.values) CHECK(std::abs(vi) <= 1e-9);
    }
    // the coupling is the source density times the heat transition
    const DenseMatrix P = sol.coupling();
    const HeatKernelMatrix K = heat_kernel(g, 0.4, 1.0);
    const double h = g.spacing;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            CHECK(std::abs(P.at(i, j) -
                           rho0.values[static_cast<size_t>(i)] * h * K.entry(i, j) * h) <= 1e-8);
    // interpolation recovers the heat-flow marginal at a quadrature midpoint
    const double tmid = midpoint_times(0.0, 0.4, 8)[3];
    const GridDensity mu = entropic_interpolation(sol, tmid);
    const GridDensity& rho_mid = path.density_at(tmid);
    double l1 = 0.0;
    for (int i = 0; i < g.n; ++i)
        l1 += std::abs(mu.values[static_cast<size_t>(i)] -
                       rho_mid.values[static_cast<size_t>(i)]) * h;
    CHECK(l1 <= 1e-7);
    CHECK(girsanov_interval_kl(sol, zero_potential(), path, 8) <= 1e-10);
}

TEST_CASE("the drift ignores a constant shift of the duals") {
    const TorusGrid g = make_grid(1, 64);
    const GridDensity rho0 = von_mises_density(g, 1.0, 0.0);
    const PotentialSpec spec = benchmark_potential();
    const MarginalPath path = path_with_midpoints(rho0, spec, 1.0, 0.0, 0.25, 8);
    BridgeProblem bp;
    bp.rho_a = rho0;
    bp.rho_b = path.density_at(0.25);
    bp.t_a = 0.0;
    bp.t_b = 0.25;
    bp.tau = 1.0;
    SinkhornParams params;
    params.tolerance = 1e-12;
    const BridgeSolution sol = solve_bridge(bp, params);

    BridgeSolution shifted = sol;
    for (double& v : shifted.log_dual_b) v += 5.0;
    for (double& v : shifted.log_dual_a) v -= 5.0;
    const GridField a = bridge_drift(sol, 0.125);
    const GridField b = bridge_drift(shifted, 0.125);
    for (int i = 0; i < g.n; ++i)
        CHECK(std::abs(a.values[static_cast<size_t>(i)] -
                       b.values[static_cast<size_t>(i)]) <= 1e-12);
}

TEST_CASE("the drift is the log-derivative of the dual-weighted kernel sum") {
    const TorusGrid g = make_grid(1, 64);
    const GridDensity rho0 = von_mises_density(g, 1.0, 0.0);
    const PotentialSpec spec = benchmark_potential();
    const MarginalPath path = path_with_midpoints(rho0, spec, 1.0, 0.0, 0.25, 8);
    BridgeProblem bp;
    bp.rho_a = rho0;
    bp.rho_b = path.density_at(0.25);
    bp.t_a = 0.0;
    bp.t_b = 0.25;
    bp.tau = 1.0;
    SinkhornParams params;
    params.tolerance = 1e-12;
    const BridgeSolution sol = solve_bridge(bp, params);

    const double t = 0.125;
    const double a = 1.0 * (0.25 - t);  // kernel variance to the right endpoint
    const auto log_h_bwd = [&](double x) {
        double acc = 0.0;
        for (int j = 0; j < g.n; ++j)
            acc += std::exp(sol.log_dual_b[static_cast<size_t>(j)]) *
                   heat_kernel_point(x - g.nodes[static_cast<size_t>(j)], a).value;
        return std::log(acc * g.spacing);
    };
    const GridField v = bridge_drift(sol, t);
    const double delta = 1e-5;
    for (int i = 0; i < g.n; ++i) {
        const double x = g.nodes[static_cast<size_t>(i)];
        const double fd = (log_h_bwd(x + delta) - log_h_bwd(x - delta)) / (2.0 * delta);
        CHECK(std::abs(v.values[static_cast<size_t>(i)] - fd) <= 1e-6);
    }
}

TEST_CASE("girsanov quadrature is stable under refinement") {
    const TorusGrid g = make_grid(1, 64);
    const GridDensity rho0 = von_mises_density(g, 1.0, 0.0);
    const PotentialSpec spec = benchmark_potential();
    std::vector<double> times{0.0};
    for (int q : {8, 16}) {
        const auto mids = midpoint_times(0.0, 0.25, q);
        times.insert(times.end(), mids.begin(), mids.end());
    }
    times.push_back(0.25);
    std::sort(times.begin(), times.end());
    const MarginalPath path = marginal_path(rho0, spec, 1.0, times);

    BridgeProblem bp;
    bp.rho_a = rho0;
    bp.rho_b = path.density_at(0.25);
    bp.t_a = 0.0;
    bp.t_b = 0.25;
    bp.tau = 1.0;
    SinkhornParams params;
    params.tolerance = 1e-12;
    const BridgeSolution sol = solve_bridge(bp, params);
    const double kl8 = girsanov_interval_kl(sol, spec, path, 8);
    const double kl16 = girsanov_interval_kl(sol, spec, path, 16);
    CHECK(kl8 > 0.0);
    CHECK(std::abs(kl8 - kl16) <= 1e-4 * std::max(1.0, kl8));
}

TEST_CASE("the interpolation and current velocity satisfy continuity") {
    const TorusGrid g = make_grid(1, 256);
    const GridDensity rho0 = von_mises_density(g, 1.0, 0.0);
    const PotentialSpec spec = benchmark_potential();
    const MarginalPath path = path_with_midpoints(rho0, spec, 1.0, 0.0, 0.2, 8);
    BridgeProblem bp;
    bp.rho_a = rho0;
    bp.rho_b = path.density_at(0.2);
    bp.t_a = 0.0;
    bp.t_b = 0.2;
    bp.tau = 1.0;
    SinkhornParams params;
    params.tolerance = 1e-12;
    const BridgeSolution sol = solve_bridge(bp, params);

    // d/dt mu + d/dx(mu v) = 0 with centered time differences
    const double t = 0.1;
    const double dt = 1e-4;
    const GridDensity mu = entropic_interpolation(sol, t);
    const GridDensity mu_p = entropic_interpolation(sol, t + dt);
    const GridDensity mu_m = entropic_interpolation(sol, t - dt);
    const GridField v = current_velocity(sol, t);
    GridField flux{g, std::vector<double>(static_cast<size_t>(g.n))};
    for (int i = 0; i < g.n; ++i)
        flux.values[static_cast<size_t>(i)] =
            mu.values[static_cast<size_t>(i)] * v.values[static_cast<size_t>(i)];
    const GridField div = gradient(flux);
    for (int i = 0; i < g.n; ++i) {
        const double dmu = (mu_p.values[static_cast<size_t>(i)] -
                            mu_m.values[static_cast<size_t>(i)]) / (2.0 * dt);
        CHECK(std::abs(dmu + div.values[static_cast<size_t>(i)]) <= 1e-3);
    }
}

TEST_CASE("the interval divergence is nonnegative across random problems") {
    std::mt19937 rng(7071u);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const TorusGrid g = make_grid(1, 64);
    StepPolicy fast;
    fast.dt_target = 2e-3;
    SinkhornParams params;  // default tolerance
    for (int trial = 0; trial < 50; ++trial) {
        PotentialSpec spec;
        const int terms = 1 + static_cast<int>(unit(rng) * 2.999);
        for (int k = 0; k < terms; ++k) {
            const int wave = 1 + static_cast<int>(unit(rng) * 2.999);
            const Phase ph = unit(rng) < 0.5 ? Phase::Cos : Phase::Sin;
            const double amp = -0.6 + 1.2 * unit(rng);
            if (unit(rng) < 0.5)
                spec.terms.push_back({wave, ph, TimeCoeff::constant(amp)});
            else
                spec.terms.push_back(
                    {wave, ph,
                     TimeCoeff::harmonic(amp, 0.5 + 1.5 * unit(rng), kTwoPi * unit(rng))});
        }
        const GridDensity rho0 = von_mises_density(g, 2.0 * unit(rng), kTwoPi * unit(rng));
        const double len = 0.2 + 0.2 * unit(rng);
        const MarginalPath path = path_with_midpoints(rho0, spec, 1.0, 0.0, len, 8, fast);
        BridgeProblem bp;
        bp.rho_a = rho0;
        bp.rho_b = path.density_at(len);
        bp.t_a = 0.0;
        bp.t_b = len;
        bp.tau = 1.0;
        const BridgeSolution sol = solve_bridge(bp, params);
        CHECK(girsanov_interval_kl(sol, spec, path, 8) >= -1e-10);
    }
}

TEST_CASE("the interval KL never exceeds the KL against the driftless prior") {
    // I-projection geometry: KL(sde || bridge) = KL(sde || prior) minus the
    // bridge cost, so the prior comparison dominates
    const TorusGrid g = make_grid(1, 64);
    const GridDensity rho0 = von_mises_density(g, 1.0, 0.0);
    const PotentialSpec spec = benchmark_potential();
    const MarginalPath path = path_with_midpoints(rho0, spec, 1.0, 0.0, 0.25, 16);
    BridgeProblem bp;
    bp.rho_a = rho0;
    bp.rho_b = path.density_at(0.25);
    bp.t_a = 0.0;
    bp.t_b = 0.25;
    bp.tau = 1.0;
    SinkhornParams params;
    params.tolerance = 1e-12;
    const BridgeSolution sol = solve_bridge(bp, params);
    const double kl_bridge = girsanov_interval_kl(sol, spec, path, 16);
    const double kl_prior = kl_vs_wiener(spec, rho0, 0.0, 0.25, 1.0, 16);
    CHECK(kl_bridge > 0.0);
    CHECK(kl_bridge <= kl_prior + 1e-12);
}

TEST_CASE("kl_vs_wiener matches the closed form on an invariant flow") {
    PotentialSpec cosx;
    cosx.terms.push_back({1, Phase::Cos, TimeCoeff::constant(1.0)});
    const TorusGrid g = make_grid(1, 128);
    const GridDensity rho_inf = stationary_density(g, cosx, 1.0);
    // density stays put, so the integral is (dt / 2) E[sin^2]; the expectation
    // below is the 50-digit discrete value for exp(2 cos x) weights
    const double kl = kl_vs_wiener(cosx, rho_inf, 0.0, 0.25, 1.0, 16);
    CHECK(kl == doctest::Approx(0.125 * 0.34888732898200399).epsilon(1e-4));
    CHECK(kl_vs_wiener(zero_potential(), rho_inf, 0.0, 0.25, 1.0, 8) == 0.0);

    // additivity over abutting intervals; doubling the quadrature count on the
    // whole interval reproduces the union of the halves' midpoint nodes
    StepPolicy fine_dt;
    fine_dt.dt_target = 5e-5;
    const TorusGrid g64 = make_grid(1, 64);
    const PotentialSpec bench = benchmark_potential();
    const GridDensity vm = von_mises_density(g64, 1.0, 0.0);
    const double whole = kl_vs_wiener(bench, vm, 0.0, 0.2, 1.0, 16, fine_dt);
    const GridDensity mid =
        evolve(vm, bench, 1.0, 0.0, 0.1, steps_for(fine_dt, bench, g64, 0.0, 0.1));
    const double left = kl_vs_wiener(bench, vm, 0.0, 0.1, 1.0, 8, fine_dt);
    const double right = kl_vs_wiener(bench, mid, 0.1, 0.2, 1.0, 8, fine_dt);
    CHECK(std::abs(whole - (left + right)) <= 1e-10);
}

TEST_CASE("the bridge action never exceeds the SDE flow action") {
    const TorusGrid g = make_grid(1, 64);
    const GridDensity rho0 = von_mises_density(g, 1.0, 0.0);
    const PotentialSpec spec = benchmark_potential();
    const MarginalPath path = path_with_midpoints(rho0, spec, 1.0, 0.0, 0.2, 16);
    BridgeProblem bp;
    bp.rho_a = rho0;
    bp.rho_b = path.density_at(0.2);
    bp.t_a = 0.0;
    bp.t_b = 0.2;
    bp.tau = 1.0;
    SinkhornParams params;
    params.tolerance = 1e-12;
    const BridgeSolution sol = solve_bridge(bp, params);
    const BenamouTerms opt = benamou_objective(sol, 16);
    const BenamouTerms ref = benamou_reference(spec, path, 0.0, 0.2, 16);
    CHECK(opt.kinetic > 0.0);
    CHECK(opt.fisher > 0.0);
    CHECK(opt.total() <= ref.total() + 1e-8);
}

TEST_CASE("the action scales like the squared interval length") {
    const TorusGrid g = make_grid(1, 64);
    const GridDensity rho0 = von_mises_density(g, 1.0, 0.0);
    const PotentialSpec spec = benchmark_potential();
    const MarginalPath p1 = path_with_midpoints(rho0, spec, 1.0, 0.0, 0.2, 16);
    const MarginalPath p2 = path_with_midpoints(rho0, spec, 1.0, 0.0, 0.1, 16);
    const double f1 = benamou_reference(spec, p1, 0.0, 0.2, 16).fisher;
    const double f2 = benamou_reference(spec, p2, 0.0, 0.1, 16).fisher;
    CHECK(f1 / f2 > 3.6);
    CHECK(f1 / f2 < 4.5);
}

TEST_CASE("the action is defined only for unit noise") {
    const TorusGrid g = make_grid(1, 64);
    BridgeProblem bp;
    bp.rho_a = uniform_density(g);
    bp.rho_b = uniform_density(g);
    bp.t_a = 0.0;
    bp.t_b = 0.5;
    bp.tau = 2.0;
    const BridgeSolution sol = solve_bridge(bp);
    CHECK_THROWS_AS(benamou_objective(sol, 8), std::invalid_argument);
}

TEST_CASE("report writers emit the duals and refuse oversized couplings") {
    const TorusGrid g8 = make_grid(1, 8);
    BridgeProblem bp;
    bp.rho_a = exp_cos_density(g8);
    bp.rho_b = exp_sin_density(g8);
    bp.t_a = 0.0;
    bp.t_b = 0.2;
    bp.tau = 1.0;
    bp.strict_resolution = false;
    const BridgeSolution sol = solve_bridge(bp);
    std::ostringstream rep;
    write_bridge_report(rep, sol);
    CHECK(rep.str().find("i,x,log_dual_a,log_dual_b") != std::string::npos);
    std::ostringstream csv;
    write_coupling_csv(csv, sol);
    const std::string text = csv.str();
    // header plus 64 rows
    CHECK(std::count(text.begin(), text.end(), '\n') == 65);

    const TorusGrid g128 = make_grid(1, 128);
    BridgeProblem big;
    big.rho_a = uniform_density(g128);
    big.rho_b = uniform_density(g128);
    big.t_a = 0.0;
    big.t_b = 0.5;
    big.tau = 1.0;
    const BridgeSolution bigsol = solve_bridge(big);
    std::ostringstream os;
    CHECK_THROWS_AS(write_coupling_csv(os, bigsol), std::invalid_argument);
}

TEST_CASE("solve_bridge validates problem data") {
    const TorusGrid g = make_grid(1, 32);
    BridgeProblem bp;
    bp.rho_a = uniform_density(g);
    bp.rho_b = uniform_density(make_grid(1, 64));
    bp.t_a = 0.0;
    bp.t_b = 0.5;
    bp.tau = 1.0;
    CHECK_THROWS_AS(solve_bridge(bp), std::invalid_argument);
    bp.rho_b = uniform_density(g);
    bp.t_b = 0.0;
    CHECK_THROWS_AS(solve_bridge(bp), std::invalid_argument);
    bp.t_b = 0.5;
    bp.tau = -1.0;
    CHECK_THROWS_AS(solve_bridge(bp), std::invalid_argument);
}

}  // TEST_SUITE
