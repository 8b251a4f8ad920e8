#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <vector>

#include "reconkit/field.hpp"

namespace reconkit {

/* Fourier coefficients of a real field in half-spectrum layout, normalized so
   that f(x) = sum_xi coef(xi) exp(2 pi i <xi, x>) with the conjugate half
   implied. dim 1: index m in [0, N/2]. dim 2: row-major (m0, m1) with
   m0 in [0, N) carrying the signed frequency m0 > N/2 -> m0 - N and
   m1 in [0, N/2]. */
struct SpectrumData {
  Grid grid;
  std::vector<std::complex<double>> coef;
};

size_t spectrum_size(const Grid& g);

/* Signed frequency of transform index m along a full axis of n points; the
   Nyquist index n/2 is kept positive by convention. */
inline int signed_freq(int m, int n) { return m <= n / 2 ? m : m - n; }

/* Forward transform; cached on the field, so repeated use costs one FFT. */
std::shared_ptr<const SpectrumData> spectrum_of(const Field& f);

/* Inverse transform back to a real field. */
Field synthesize(const SpectrumData& s);

/* Scales every coefficient by mult(x0, x1) evaluated at the signed integer
   frequency. mult must satisfy mult(-xi) = conj mult(xi) for the result to be
   real; real even multipliers and the derivative symbols below qualify. */
Field apply_multiplier(const Field& f, const std::function<std::complex<double>(int, int)>& mult);

/* Radial real multiplier m(|xi|). */
Field apply_radial(const Field& f, const std::function<double(double)>& mult);

/* Spectral partial derivative of order (k0, k1): multiplier
   (2 pi i x0)^k0 (2 pi i x1)^k1. Odd orders drop the Nyquist mode of their
   axis, which has no consistent sign on the real lattice. */
Field derivative(const Field& f, int k0, int k1 = 0);

/* Periodic convolution (a * b)(x) = integral a(y) b(x - y) dy, evaluated
   spectrally: coefficients multiply. */
Field convolve(const Field& a, const Field& b);

}  // namespace reconkit
