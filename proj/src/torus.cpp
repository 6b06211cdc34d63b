#include "msb/torus.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "msb/spectral.hpp"

namespace msb {

TorusGrid make_grid(int dim, int n) {
    if (dim != 1)
        throw std::invalid_argument("make_grid: only dimension 1 is supported, got " +
                                    std::to_string(dim));
    if (n < 4 || n % 2 != 0)
        throw std::invalid_argument("make_grid: n must be even and >= 4, got " +
                                    std::to_string(n));
    TorusGrid g;
    g.n = n;
    g.spacing = kTwoPi / n;
    g.nodes.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) g.nodes[static_cast<size_t>(i)] = g.spacing * i;
    return g;
}

GridDensity make_density(const TorusGrid& grid, std::vector<double> values) {
    if (static_cast<int>(values.size()) != grid.n)
        throw std::invalid_argument("make_density: value count does not match grid size");
    double mass = 0.0;
    for (double v : values) {
        if (!(v >= 0.0))
            throw std::invalid_argument("make_density: negative or non-finite value");
        mass += v;
    }
    mass *= grid.spacing;
    if (!(mass > 0.0))
        throw std::invalid_argument("make_density: zero total mass");
    for (double& v : values) v /= mass;
    return GridDensity{grid, std::move(values)};
}

void validate_density(const GridDensity& rho) {
    if (static_cast<int>(rho.values.size()) != rho.grid.n)
        throw std::invalid_argument("density: value count does not match grid size");
    double mass = 0.0;
    for (double v : rho.values) {
        if (!(v >= 0.0))
            throw std::invalid_argument("density: negative or non-finite value");
        mass += v;
    }
    mass *= rho.grid.spacing;
    if (std::abs(mass - 1.0) > 1e-12)
        throw std::invalid_argument("density: mass " + std::to_string(mass) +
                                    " deviates from 1 by more than 1e-12");
}

namespace detail {

KernelPoint kernel_point_wrapped(double delta, double variance) {
    const double a = variance;
    // Keep images with (delta + 2*pi*k)^2 / (2a) <= 45, i.e. terms >= ~3e-20.
    const int K = std::max(2, static_cast<int>(std::ceil((M_PI + std::sqrt(90.0 * a)) / kTwoPi)));
    const double norm = 1.0 / std::sqrt(kTwoPi * a);
    double p = 0.0, dp = 0.0;
    for (int k = -K; k <= K; ++k) {
        const double z = delta + kTwoPi * k;
        const double e = norm * std::exp(-z * z / (2.0 * a));
        p += e;
        dp += -(z / a) * e;
    }
    return {p, dp};
}

KernelPoint kernel_point_fourier(double delta, double variance) {
    const double a = variance;
    // Keep modes with a j^2 / 2 <= 42, i.e. terms >= ~6e-19.
    const int M = std::max(1, static_cast<int>(std::ceil(std::sqrt(84.0 / a))));
    double p = 1.0, dp = 0.0;
    for (int j = 1; j <= M; ++j) {
        const double w = 2.0 * std::exp(-a * j * j / 2.0);
        p += w * std::cos(j * delta);
        dp += -w * j * std::sin(j * delta);
    }
    return {p / kTwoPi, dp / kTwoPi};
}

}  // namespace detail

KernelPoint heat_kernel_point(double delta, double variance, KernelRep rep) {
    if (!(variance > 0.0))
        throw std::invalid_argument("heat_kernel_point: variance must be positive");
    switch (rep) {
        case KernelRep::WrappedGaussian: return detail::kernel_point_wrapped(delta, variance);
        case KernelRep::Fourier:         return detail::kernel_point_fourier(delta, variance);
        case KernelRep::Auto: break;
    }
    return variance <= 1.0 ? detail::kernel_point_wrapped(delta, variance)
                           : detail::kernel_point_fourier(delta, variance);
}

KernelProfile kernel_profile(const TorusGrid& grid, double variance, KernelRep rep) {
    KernelProfile prof;
    prof.variance = variance;
    prof.value.resize(static_cast<size_t>(grid.n));
    prof.deriv.resize(static_cast<size_t>(grid.n));
    for (int k = 0; k < grid.n; ++k) {
        const KernelPoint pt = heat_kernel_point(grid.spacing * k, variance, rep);
        prof.value[static_cast<size_t>(k)] = pt.value;
        prof.deriv[static_cast<size_t>(k)] = pt.deriv;
    }
    return prof;
}

HeatKernelMatrix heat_kernel(const TorusGrid& grid, double s, double tau,
                             bool check_resolution) {
    if (!(s > 0.0) || !(tau > 0.0))
        throw std::invalid_argument("heat_kernel: s and tau must be positive");
    const double width = std::sqrt(tau * s);
    if (check_resolution && width < kKernelMatrixGuard * grid.spacing)
        throw std::domain_error(
            "heat_kernel: sqrt(tau*s) = " + std::to_string(width) +
            " under-resolves the grid (need >= " +
            std::to_string(kKernelMatrixGuard * grid.spacing) +
            "); refine the grid or disable the check");
    HeatKernelMatrix K;
    K.grid = grid;
    K.s = s;
    K.tau = tau;
    K.profile = kernel_profile(grid, tau * s).value;
    return K;
}

std::vector<double> HeatKernelMatrix::dense() const {
    std::vector<double> out(static_cast<size_t>(grid.n) * grid.n);
    for (int i = 0; i < grid.n; ++i)
        for (int j = 0; j < grid.n; ++j)
            out[static_cast<size_t>(i) * grid.n + j] = entry(i, j);
    return out;
}

GridField gradient(const GridField& f, DerivativeMode mode) {
    if (static_cast<int>(f.values.size()) != f.grid.n)
        throw std::invalid_argument("gradient: value count does not match grid size");
    GridField out{f.grid, std::vector<double>(f.values.size())};
    if (mode == DerivativeMode::Spectral) {
        SpectralWorkspace ws(f.grid.n);
        ws.derivative(f.values, out.values);
    } else {
        const int n = f.grid.n;
        const double inv2h = 1.0 / (2.0 * f.grid.spacing);
        for (int i = 0; i < n; ++i) {
            const double hi = f.values[static_cast<size_t>((i + 1) % n)];
            const double lo = f.values[static_cast<size_t>((i + n - 1) % n)];
            out.values[static_cast<size_t>(i)] = (hi - lo) * inv2h;
        }
    }
    return out;
}

double integrate(const TorusGrid& grid, const std::vector<double>& values) {
    if (static_cast<int>(values.size()) != grid.n)
        throw std::invalid_argument("integrate: value count does not match grid size");
    double s = 0.0;
    for (double v : values) s += v;
    return s * grid.spacing;
}

double integrate(const GridField& f) { return integrate(f.grid, f.values); }

double kl_divergence(const GridDensity& p, const GridDensity& q) {
    if (!same_grid(p.grid, q.grid))
        throw std::invalid_argument("kl_divergence: densities live on different grids");
    double acc = 0.0;
    for (size_t i = 0; i < p.values.size(); ++i) {
        const double pi = p.values[i];
        if (pi == 0.0) continue;
        const double qi = q.values[i];
        if (qi == 0.0) return std::numeric_limits<double>::infinity();
        acc += pi * (std::log(std::max(pi, kLogFloor)) - std::log(std::max(qi, kLogFloor)));
    }
    return acc * p.grid.spacing;
}

double kl_coupling(const DenseMatrix& p, const DenseMatrix& q, double cell_weight) {
    if (p.rows != q.rows || p.cols != q.cols)
        throw std::invalid_argument("kl_coupling: shape mismatch");
    if (!(cell_weight > 0.0))
        throw std::invalid_argument("kl_coupling: cell weight must be positive");
    double pmass = 0.0, qmass = 0.0;
    for (size_t i = 0; i < p.data.size(); ++i) {
        if (!(p.data[i] >= 0.0) || !(q.data[i] >= 0.0))
            throw std::invalid_argument("kl_coupling: negative or non-finite entry");
        pmass += p.data[i];
        qmass += q.data[i];
    }
    if (std::abs(pmass * cell_weight - 1.0) > 1e-8 || std::abs(qmass * cell_weight - 1.0) > 1e-8)
        throw std::invalid_argument("kl_coupling: inputs are not unit-mass couplings");
    double acc = 0.0;
    for (size_t i = 0; i < p.data.size(); ++i) {
        const double pi = p.data[i];
        if (pi == 0.0) continue;
        const double qi = q.data[i];
        if (qi == 0.0) return std::numeric_limits<double>::infinity();
        acc += pi * (std::log(std::max(pi, kLogFloor)) - std::log(std::max(qi, kLogFloor)));
    }
    return acc * cell_weight;
}

}  // namespace msb
