#pragma once

#include "superad/grid.hpp"

namespace superad {

// Diagnostics attached to spectral operations that have soft failure modes.
struct SpectralReport {
    bool boundary_warning = false;   // input not decayed at the grid ends
    double boundary_value = 0;       // worst relative end-point magnitude
    double residual_mean = 0;        // nonzero total integral (antiderivative)
};

// Scaled Fourier transform f^eps(k) = (2 pi eps)^{-1/2} \int e^{-ikx/eps} f(x) dx,
// discretized as a DFT scaled by dx/sqrt(2 pi eps) with the e^{-ik x_min/eps}
// phase so the continuum convention holds on the nose.
GridFunction scaled_fourier(const GridFunction& f);
GridFunction inverse_scaled_fourier(const GridFunction& f);

// d^order/dx^order via multiplication by (ik/eps)^order in transform space.
// order 0 is the identity. Boundary non-decay is reported, not fatal.
GridFunction spectral_derivative(const GridFunction& f, int order, SpectralReport* rep = nullptr);

// Same, but modes below the spectral noise floor are zeroed first; used by the
// recursion where derivatives of derivatives stack up.
GridFunction spectral_derivative_filtered(const GridFunction& f, int order,
                                          double floor_rel = 1e-14);

// Antiderivative F with F' = f and F(x_min) = 0; the zero mode is carried by a
// linear ramp (trapezoid-consistent mean), spectral for the rest. Throws if f
// has not decayed at the grid ends.
GridFunction antiderivative_decaying(const GridFunction& f, SpectralReport* rep = nullptr);

// Raw unscaled DFT helpers (FFTW behind a plan cache; thread-safe).
void fft_forward_inplace(std::vector<cplx>& data);
void fft_backward_inplace(std::vector<cplx>& data);  // unnormalized inverse

// Band-limited evaluation of a momentum-space function at arbitrary momenta:
// synthesizes from the position samples, psi_hat(v) = dx/sqrt(2 pi eps) *
// sum_x e^{-ivx/eps} psi(x). Exact for functions supported on the grid band.
class BandLimitedInterpolant {
  public:
    explicit BandLimitedInterpolant(const GridFunction& momentum_function);
    cplx operator()(double v) const;

  private:
    GridPtr grid_;
    std::vector<cplx> position_;  // inverse transform of the input
    double scale_ = 0;
};

}  // namespace superad
