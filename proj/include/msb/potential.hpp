#pragma once
/*
 * Drift potentials psi(t, x) = sum_m c_m(t) * trig(k_m x) on the torus, with
 * exact partial derivatives up to order 4 in x and 2 in t. Time coefficients
 * are either polynomials of degree <= 4 or harmonics A*sin(w t + phi), and a
 * sum like 0.5 + 0.3 sin t is written as two terms sharing a wave number.
 */

#include <vector>

#include "msb/torus.hpp"

namespace msb {

enum class Phase { Cos, Sin };

struct TimeCoeff {
    enum class Kind { Polynomial, Harmonic };

    Kind kind = Kind::Polynomial;
    std::vector<double> poly{0.0};  // c0 + c1 t + ... , degree <= 4
    double amplitude = 0.0;
    double frequency = 0.0;
    double shift = 0.0;

    static TimeCoeff constant(double c);
    static TimeCoeff polynomial(std::vector<double> coeffs);
    static TimeCoeff harmonic(double amplitude, double frequency, double shift = 0.0);

    double value(double t) const;
    double d1(double t) const;
    double d2(double t) const;
};

struct PotentialTerm {
    int wave_number = 1;
    Phase phase = Phase::Cos;
    TimeCoeff coeff;
};

struct PotentialSpec {
    std::vector<PotentialTerm> terms;

    bool is_zero() const;
    int max_wave_number() const;
};

void validate_potential(const PotentialSpec& spec);

// d^{dx}/dx^{dx} d^{dt}/dt^{dt} psi(t, x); dx_order <= 4, dt_order <= 2.
double psi_partial(const PotentialSpec& spec, double t, double x, int dx_order, int dt_order);

inline double psi_value(const PotentialSpec& s, double t, double x) { return psi_partial(s, t, x, 0, 0); }
inline double psi_dx(const PotentialSpec& s, double t, double x)    { return psi_partial(s, t, x, 1, 0); }
inline double psi_dxx(const PotentialSpec& s, double t, double x)   { return psi_partial(s, t, x, 2, 0); }
inline double psi_dt(const PotentialSpec& s, double t, double x)    { return psi_partial(s, t, x, 0, 1); }

GridField psi_dx_field(const PotentialSpec& spec, double t, const TorusGrid& grid);

// max over 9 time samples in [t0, t1] and all grid nodes of |psi_x|.
double max_abs_psi_dx(const PotentialSpec& spec, double t0, double t1, const TorusGrid& grid);

/*
 * For unit noise (tau = 1) the field
 *
 *   U(t, x) = psi_t + psi_xx / 2 + psi_x^2 / 2
 *
 * measures how far psi is from a harmonic-type potential whose SDE marginals
 * stay bridge-optimal; the small-interval KL scales with |U_x|^2. The first
 * regularity constant is the sup over [0, horizon] x grid of
 *
 *   |U_t| + |U_xx| / 2 + |U_x * psi_x| + |U_x|^2
 *
 * and the second is the sup over path times of max(|psi_x|, |d/dx log rho_t|).
 */
double u_eval(const PotentialSpec& spec, double t, double x);
double u_dt(const PotentialSpec& spec, double t, double x);
double u_dx(const PotentialSpec& spec, double t, double x);
double u_dxx(const PotentialSpec& spec, double t, double x);

double constant_c1(const PotentialSpec& spec, const TorusGrid& grid, double horizon,
                   int time_samples = 65);

struct MarginalPath;
double constant_c2(const PotentialSpec& spec, const MarginalPath& path);

// Benchmark drift used across the experiment suite:
//   psi(t, x) = (0.5 + 0.3 sin t) cos x + 0.2 sin t cos 2x
PotentialSpec benchmark_potential();
PotentialSpec zero_potential();

}  // namespace msb
