#pragma once

#include <cstddef>
#include <vector>

#include "omlab/fourier_field.hpp"

namespace omlab {

/// Smallest integer >= n of the form 2^a 3^b 5^c.
int fft_size(int n);

/// Grid evaluation values[x_j] = mean + sum_k coeff(k) e_k(x_j) on M^d points.
/// Requires M >= 2N+1 (throws AliasingError otherwise).
GridField synthesize(const FourierField& f, int points);

/// Discrete Fourier coefficients of g restricted to the box of the given cutoff.
/// The zero mode is dropped (projection onto mean-zero fields). Exact for
/// trigonometric polynomials of degree <= M - cutoff - 1.
FourierField analyze(const GridField& g, int cutoff);

/// As analyze, but the zero mode is kept as the field's retained mean.
FourierField analyze_with_mean(const GridField& g, int cutoff);

double grid_mean(const GridField& g);

namespace fft_detail {

/// Layout of the half-complex spectrum FFTW uses for real transforms on M^d points.
struct HalfLayout {
  int dim = 1;
  int points = 1;
  std::size_t real_size = 1;
  std::size_t complex_size = 1;
  int last_extent = 1;  // M/2 + 1

  HalfLayout(int d, int m);

  /// Position of mode k in the half spectrum; requires k[dim-1] >= 0.
  std::size_t index(const Mode& k) const;
};

/// Unnormalised backward transform: out[x] = sum_k in[k] exp(+2 pi i k.x/M).
/// `in` is overwritten.
void inverse_real(const HalfLayout& layout, Complex* in, double* out);

/// Unnormalised forward transform: out[k] = sum_x in[x] exp(-2 pi i k.x/M).
void forward_real(const HalfLayout& layout, double* in, Complex* out);

/// Writes the coefficients of f into a zeroed half spectrum, with the retained
/// mean at k = 0.
void scatter(const FourierField& f, const HalfLayout& layout, std::vector<Complex>& half);

}  // namespace fft_detail

}  // namespace omlab
