#pragma once
/*
 * Flat-torus grids and the calculus the bridge solvers are built on.
 *
 * The state space is T^1 = [0, 2*pi) with n uniform nodes x_i = 2*pi*i/n.
 * Integrals are rectangle sums (exact trapezoid for periodic data), so a
 * density is a nonnegative node vector with sum(v)*spacing == 1.
 *
 * The heat kernel p_s^tau(x, y) of dZ = sqrt(tau) dB has two equivalent
 * series in delta = x - y and a = tau*s:
 *
 *   wrapped Gaussian:  sum_k (2*pi*a)^{-1/2} exp(-(delta + 2*pi*k)^2 / (2a))
 *   Fourier:           (1/2*pi) * (1 + 2 sum_{j>=1} exp(-a j^2/2) cos(j delta))
 *
 * The wrapped form converges fast for small a, the Fourier form for large a;
 * evaluation switches representation at a = 1. Truncation keeps terms down to
 * ~1e-19, far below every tolerance asserted on kernel invariants.
 */

#include <limits>
#include <vector>

namespace msb {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Grid resolution guard for kernel matrices: the Gaussian must be wider than
// two grid cells or the discrete rows stop resembling the continuous kernel.
inline constexpr double kKernelMatrixGuard = 2.0;

// Positivity floor used only inside logarithms.
inline constexpr double kLogFloor = 1e-300;

struct TorusGrid {
    int n = 0;
    double spacing = 0.0;
    std::vector<double> nodes;
};

// dim is the torus dimension; only dim == 1 is supported. n must be even and
// at least 4 (even n keeps the spectral derivative's Nyquist handling exact).
TorusGrid make_grid(int dim, int n);

inline bool same_grid(const TorusGrid& a, const TorusGrid& b) { return a.n == b.n; }

struct GridField {
    TorusGrid grid;
    std::vector<double> values;
};

// Nonnegative, unit-mass node vector. Use make_density to normalize raw
// values; validate_density checks the invariants (mass within 1e-12).
struct GridDensity {
    TorusGrid grid;
    std::vector<double> values;
};

GridDensity make_density(const TorusGrid& grid, std::vector<double> values);
void validate_density(const GridDensity& rho);

// ── heat kernel ─────────────────────────────────────────────────────────────

enum class KernelRep { Auto, WrappedGaussian, Fourier };

struct KernelPoint {
    double value = 0.0;
    double deriv = 0.0;  // d/d(delta)
};

// Periodized Gaussian density of variance a evaluated at delta, with its
// derivative. rep Auto picks wrapped for a <= 1, Fourier otherwise.
KernelPoint heat_kernel_point(double delta, double variance, KernelRep rep = KernelRep::Auto);

// Kernel values and derivatives at every grid difference delta_k = k*spacing.
struct KernelProfile {
    double variance = 0.0;
    std::vector<double> value;
    std::vector<double> deriv;
};

KernelProfile kernel_profile(const TorusGrid& grid, double variance, KernelRep rep = KernelRep::Auto);

// Dense symmetric kernel matrix entry(i, j) = p_s^tau(x_i, x_j), stored as a
// circulant profile. check_resolution enforces sqrt(tau*s) >= 2*spacing.
struct HeatKernelMatrix {
    TorusGrid grid;
    double s = 0.0;
    double tau = 0.0;
    std::vector<double> profile;

    double entry(int i, int j) const {
        int d = i - j;
        if (d < 0) d += grid.n;
        return profile[static_cast<size_t>(d)];
    }
    std::vector<double> dense() const;  // row-major n*n
};

HeatKernelMatrix heat_kernel(const TorusGrid& grid, double s, double tau,
                             bool check_resolution = true);

// ── calculus ────────────────────────────────────────────────────────────────

enum class DerivativeMode { Spectral, CentralDifference };

GridField gradient(const GridField& f, DerivativeMode mode = DerivativeMode::Spectral);

double integrate(const GridField& f);
double integrate(const TorusGrid& grid, const std::vector<double>& values);

// KL(p || q) = sum_i p_i log(p_i / q_i) * spacing with 0*log 0 = 0. Returns
// +infinity (no throw) when p puts mass where q vanishes.
double kl_divergence(const GridDensity& p, const GridDensity& q);

// ── dense matrices and coupling KL ──────────────────────────────────────────

struct DenseMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    DenseMatrix() = default;
    DenseMatrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {}
    double& at(int i, int j) { return data[static_cast<size_t>(i) * cols + j]; }
    double at(int i, int j) const { return data[static_cast<size_t>(i) * cols + j]; }
};

// KL between two coupling densities sharing the cell weight w (= spacing^2
// for grid couplings): sum_ij p_ij log(p_ij / q_ij) * w. Both inputs must be
// nonnegative with total mass 1 under w. Same conventions as kl_divergence.
double kl_coupling(const DenseMatrix& p, const DenseMatrix& q, double cell_weight);

namespace detail {
// Representation-forced kernel evaluation, exposed so tests can compare the
// two series directly.
KernelPoint kernel_point_wrapped(double delta, double variance);
KernelPoint kernel_point_fourier(double delta, double variance);
}  // namespace detail

}  // namespace msb
