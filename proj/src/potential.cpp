#include "msb/potential.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "msb/fokker_planck.hpp"
#include "msb/spectral.hpp"

namespace msb {

TimeCoeff TimeCoeff::constant(double c) {
    TimeCoeff tc;
    tc.kind = Kind::Polynomial;
    tc.poly = {c};
    return tc;
}

TimeCoeff TimeCoeff::polynomial(std::vector<double> coeffs) {
    if (coeffs.empty() || coeffs.size() > 5)
        throw std::invalid_argument("TimeCoeff: polynomial degree must be between 0 and 4");
    TimeCoeff tc;
    tc.kind = Kind::Polynomial;
    tc.poly = std::move(coeffs);
    return tc;
}

TimeCoeff TimeCoeff::harmonic(double amplitude, double frequency, double shift) {
    TimeCoeff tc;
    tc.kind = Kind::Harmonic;
    tc.amplitude = amplitude;
    tc.frequency = frequency;
    tc.shift = shift;
    return tc;
}

double TimeCoeff::value(double t) const {
    if (kind == Kind::Harmonic) return amplitude * std::sin(frequency * t + shift);
    double acc = 0.0;
    for (size_t i = poly.size(); i-- > 0;) acc = acc * t + poly[i];
    return acc;
}

double TimeCoeff::d1(double t) const {
    if (kind == Kind::Harmonic)
        return amplitude * frequency * std::cos(frequency * t + shift);
    double acc = 0.0;
    for (size_t i = poly.size(); i-- > 1;) acc = acc * t + static_cast<double>(i) * poly[i];
    return acc;
}

double TimeCoeff::d2(double t) const {
    if (kind == Kind::Harmonic)
        return -amplitude * frequency * frequency * std::sin(frequency * t + shift);
    double acc = 0.0;
    for (size_t i = poly.size(); i-- > 2;)
        acc = acc * t + static_cast<double>(i) * static_cast<double>(i - 1) * poly[i];
    return acc;
}

bool PotentialSpec::is_zero() const {
    for (const auto& term : terms) {
        if (term.coeff.kind == TimeCoeff::Kind::Harmonic) {
            if (term.coeff.amplitude != 0.0) return false;
        } else {
            for (double c : term.coeff.poly)
                if (c != 0.0) return false;
        }
    }
    return true;
}

int PotentialSpec::max_wave_number() const {
    int k = 0;
    for (const auto& term : terms) k = std::max(k, term.wave_number);
    return k;
}

void validate_potential(const PotentialSpec& spec) {
    for (const auto& term : spec.terms) {
        if (term.wave_number < 1)
            throw std::invalid_argument("potential: wave numbers must be >= 1, got " +
                                        std::to_string(term.wave_number));
        if (term.coeff.kind == TimeCoeff::Kind::Polynomial &&
            (term.coeff.poly.empty() || term.coeff.poly.size() > 5))
            throw std::invalid_argument("potential: polynomial coefficient degree must be <= 4");
        if (!std::isfinite(term.coeff.amplitude) || !std::isfinite(term.coeff.frequency) ||
            !std::isfinite(term.coeff.shift))
            throw std::invalid_argument("potential: non-finite harmonic parameter");
        for (double c : term.coeff.poly)
            if (!std::isfinite(c))
                throw std::invalid_argument("potential: non-finite polynomial coefficient");
    }
}

namespace {

// m-th x-derivative of the spatial factor: trig(k x) picks up a factor k^m
// and a quarter-period shift per derivative.
double spatial_deriv(int wave_number, Phase phase, double x, int m) {
    const double kx = wave_number * x;
    double km = 1.0;
    for (int i = 0; i < m; ++i) km *= wave_number;
    const int r = m % 4;
    double base;
    if (phase == Phase::Cos)
        base = (r == 0) ? std::cos(kx) : (r == 1) ? -std::sin(kx)
             : (r == 2) ? -std::cos(kx) : std::sin(kx);
    else
        base = (r == 0) ? std::sin(kx) : (r == 1) ? std::cos(kx)
             : (r == 2) ? -std::sin(kx) : -std::cos(kx);
    return km * base;
}

double time_deriv(const TimeCoeff& c, double t, int order) {
    switch (order) {
        case 0: return c.value(t);
        case 1: return c.d1(t);
        case 2: return c.d2(t);
        default: throw std::invalid_argument("psi_partial: dt_order must be <= 2");
    }
}

}  // namespace

double psi_partial(const PotentialSpec& spec, double t, double x, int dx_order, int dt_order) {
    if (dx_order < 0 || dx_order > 4)
        throw std::invalid_argument("psi_partial: dx_order must be between 0 and 4");
    if (dt_order < 0 || dt_order > 2)
        throw std::invalid_argument("psi_partial: dt_order must be between 0 and 2");
    double acc = 0.0;
    for (const auto& term : spec.terms)
        acc += time_deriv(term.coeff, t, dt_order) *
               spatial_deriv(term.wave_number, term.phase, x, dx_order);
    return acc;
}

GridField psi_dx_field(const PotentialSpec& spec, double t, const TorusGrid& grid) {
    GridField f{grid, std::vector<double>(static_cast<size_t>(grid.n))};
    for (int i = 0; i < grid.n; ++i)
        f.values[static_cast<size_t>(i)] = psi_dx(spec, t, grid.nodes[static_cast<size_t>(i)]);
    return f;
}

double max_abs_psi_dx(const PotentialSpec& spec, double t0, double t1, const TorusGrid& grid) {
    double m = 0.0;
    const int samples = 9;
    for (int k = 0; k < samples; ++k) {
        const double t = t0 + (t1 - t0) * k / (samples - 1);
        for (double x : grid.nodes) m = std::max(m, std::abs(psi_dx(spec, t, x)));
    }
    return m;
}

double u_eval(const PotentialSpec& s, double t, double x) {
    const double px = psi_partial(s, t, x, 1, 0);
    return psi_partial(s, t, x, 0, 1) + 0.5 * psi_partial(s, t, x, 2, 0) + 0.5 * px * px;
}

double u_dt(const PotentialSpec& s, double t, double x) {
    return psi_partial(s, t, x, 0, 2) + 0.5 * psi_partial(s, t, x, 2, 1) +
           psi_partial(s, t, x, 1, 0) * psi_partial(s, t, x, 1, 1);
}

double u_dx(const PotentialSpec& s, double t, double x) {
    return psi_partial(s, t, x, 1, 1) + 0.5 * psi_partial(s, t, x, 3, 0) +
           psi_partial(s, t, x, 1, 0) * psi_partial(s, t, x, 2, 0);
}

double u_dxx(const PotentialSpec& s, double t, double x) {
    const double pxx = psi_partial(s, t, x, 2, 0);
    return psi_partial(s, t, x, 2, 1) + 0.5 * psi_partial(s, t, x, 4, 0) + pxx * pxx +
           psi_partial(s, t, x, 1, 0) * psi_partial(s, t, x, 3, 0);
}

double constant_c1(const PotentialSpec& spec, const TorusGrid& grid, double horizon,
                   int time_samples) {
    if (time_samples < 2)
        throw std::invalid_argument("constant_c1: need at least 2 time samples");
    double c1 = 0.0;
    for (int k = 0; k < time_samples; ++k) {
        const double t = horizon * k / (time_samples - 1);
        for (double x : grid.nodes) {
            const double ux = u_dx(spec, t, x);
            const double val = std::abs(u_dt(spec, t, x)) + 0.5 * std::abs(u_dxx(spec, t, x)) +
                               std::abs(ux * psi_dx(spec, t, x)) + ux * ux;
            c1 = std::max(c1, val);
        }
    }
    return c1;
}

double constant_c2(const PotentialSpec& spec, const MarginalPath& path) {
    double c2 = 0.0;
    SpectralWorkspace ws(path.grid().n);
    std::vector<double> logrho, dlog;
    for (size_t k = 0; k < path.times.size(); ++k) {
        const double t = path.times[k];
        const GridDensity& rho = path.densities[k];
        logrho.resize(rho.values.size());
        for (size_t i = 0; i < rho.values.size(); ++i)
            logrho[i] = std::log(std::max(rho.values[i], kLogFloor));
        ws.derivative(logrho, dlog);
        for (size_t i = 0; i < rho.values.size(); ++i) {
            c2 = std::max(c2, std::abs(psi_dx(spec, t, rho.grid.nodes[i])));
            c2 = std::max(c2, std::abs(dlog[i]));
        }
    }
    return c2;
}

PotentialSpec benchmark_potential() {
    PotentialSpec spec;
    spec.terms.push_back({1, Phase::Cos, TimeCoeff::constant(0.5)});
    spec.terms.push_back({1, Phase::Cos, TimeCoeff::harmonic(0.3, 1.0)});
    spec.terms.push_back({2, Phase::Cos, TimeCoeff::harmonic(0.2, 1.0)});
    return spec;
}

PotentialSpec zero_potential() { return PotentialSpec{}; }

}  // namespace msb
