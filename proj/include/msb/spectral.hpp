#pragma once

#include <vector>

// Thin RAII wrapper around FFTW real transforms of a fixed length. Plans are
// created with FFTW_ESTIMATE so results do not depend on runtime measurement.

namespace msb {

class SpectralWorkspace {
public:
    explicit SpectralWorkspace(int n);
    ~SpectralWorkspace();

    SpectralWorkspace(const SpectralWorkspace&) = delete;
    SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;
    SpectralWorkspace(SpectralWorkspace&& other) noexcept;
    SpectralWorkspace& operator=(SpectralWorkspace&&) = delete;

    int size() const { return n_; }

    // out_i = f'(x_i) for the trigonometric interpolant of in on [0, 2*pi).
    // The Nyquist mode is dropped (its derivative is not representable).
    void derivative(const std::vector<double>& in, std::vector<double>& out);

    // Multiplies Fourier mode k of the field by gain[k], k = 0 .. n/2.
    void apply_mode_gain(std::vector<double>& field, const std::vector<double>& gain);

private:
    void forward();   // real_ -> spec_
    void backward();  // spec_ -> real_, scaled by 1/n

    int n_ = 0;
    double* real_ = nullptr;
    void* spec_ = nullptr;  // fftw_complex*, kept opaque here
    void* plan_fwd_ = nullptr;
    void* plan_bwd_ = nullptr;
};

}  // namespace msb
