#include "msb/spectral.hpp"

#include <fftw3.h>

#include <stdexcept>

namespace msb {

SpectralWorkspace::SpectralWorkspace(int n) : n_(n) {
    if (n < 4 || n % 2 != 0)
        throw std::invalid_argument("SpectralWorkspace: n must be even and >= 4");
    real_ = fftw_alloc_real(static_cast<size_t>(n));
    auto* spec = fftw_alloc_complex(static_cast<size_t>(n / 2 + 1));
    spec_ = spec;
    if (!real_ || !spec_) throw std::bad_alloc();
    plan_fwd_ = fftw_plan_dft_r2c_1d(n, real_, spec, FFTW_ESTIMATE);
    plan_bwd_ = fftw_plan_dft_c2r_1d(n, spec, real_, FFTW_ESTIMATE);
    if (!plan_fwd_ || !plan_bwd_) throw std::runtime_error("SpectralWorkspace: fftw plan failed");
}

SpectralWorkspace::~SpectralWorkspace() {
    if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    if (plan_bwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
    if (spec_) fftw_free(spec_);
    if (real_) fftw_free(real_);
}

SpectralWorkspace::SpectralWorkspace(SpectralWorkspace&& other) noexcept
    : n_(other.n_), real_(other.real_), spec_(other.spec_),
      plan_fwd_(other.plan_fwd_), plan_bwd_(other.plan_bwd_) {
    other.real_ = nullptr;
    other.spec_ = nullptr;
    other.plan_fwd_ = nullptr;
    other.plan_bwd_ = nullptr;
}

void SpectralWorkspace::forward() {
    fftw_execute(static_cast<fftw_plan>(plan_fwd_));
}

void SpectralWorkspace::backward() {
    fftw_execute(static_cast<fftw_plan>(plan_bwd_));
    const double scale = 1.0 / n_;
    for (int i = 0; i < n_; ++i) real_[i] *= scale;
}

void SpectralWorkspace::derivative(const std::vector<double>& in, std::vector<double>& out) {
    if (static_cast<int>(in.size()) != n_)
        throw std::invalid_argument("SpectralWorkspace::derivative: size mismatch");
    for (int i = 0; i < n_; ++i) real_[i] = in[static_cast<size_t>(i)];
    forward();
    auto* spec = static_cast<fftw_complex*>(spec_);
    for (int k = 0; k <= n_ / 2; ++k) {
        // multiply by i*k; k == n/2 is zeroed
        const double re = spec[k][0], im = spec[k][1];
        const double kk = (k == n_ / 2) ? 0.0 : static_cast<double>(k);
        spec[k][0] = -kk * im;
        spec[k][1] = kk * re;
    }
    backward();
    out.resize(static_cast<size_t>(n_));
    for (int i = 0; i < n_; ++i) out[static_cast<size_t>(i)] = real_[i];
}

void SpectralWorkspace::apply_mode_gain(std::vector<double>& field, const std::vector<double>& gain) {
    if (static_cast<int>(field.size()) != n_)
        throw std::invalid_argument("SpectralWorkspace::apply_mode_gain: size mismatch");
    if (static_cast<int>(gain.size()) != n_ / 2 + 1)
        throw std::invalid_argument("SpectralWorkspace::apply_mode_gain: gain needs n/2+1 entries");
    for (int i = 0; i < n_; ++i) real_[i] = field[static_cast<size_t>(i)];
    forward();
    auto* spec = static_cast<fftw_complex*>(spec_);
    for (int k = 0; k <= n_ / 2; ++k) {
        spec[k][0] *= gain[static_cast<size_t>(k)];
        spec[k][1] *= gain[static_cast<size_t>(k)];
    }
    backward();
    for (int i = 0; i < n_; ++i) field[static_cast<size_t>(i)] = real_[i];
}

}  // namespace msb
